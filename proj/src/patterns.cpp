#include "flowspec/patterns.hpp"

#include <algorithm>
#include <map>

namespace flowspec {

namespace {

/// Combined guard of a single-output transition (shared guard and output guard).
std::optional<GuardExpr> firing_guard(const TransitionDecl& t) {
  std::optional<GuardExpr> g = t.shared_guard;
  if (t.outputs.size() == 1 && t.outputs.front().guard) {
    if (!g) g.emplace();
    const auto& lits = t.outputs.front().guard->literals;
    g->literals.insert(g->literals.end(), lits.begin(), lits.end());
  }
  return g;
}

bool is_simple_choice_candidate(const TransitionDecl& t) {
  return t.inputs.size() == 1 && t.join == JoinKind::None && t.split == SplitKind::None;
}

std::vector<std::string> trigger_events(const TransitionDecl& t) {
  std::vector<std::string> events;
  for (const auto& in : t.inputs) {
    if (in.event) events.push_back(*in.event);
  }
  if (t.shared_event) events.push_back(*t.shared_event);
  std::sort(events.begin(), events.end());
  return events;
}

}  // namespace

std::set<std::string> or_split_targets(const ProcessModel& model) {
  std::set<std::string> out;
  for (const auto& t : model.transitions) {
    if (t.split != SplitKind::Or) continue;
    for (const auto& o : t.outputs) out.insert(o.target);
  }
  return out;
}

PatternKind classify_transition(const ProcessModel& model, const TransitionDecl& t) {
  switch (t.join) {
    case JoinKind::Multi: return PatternKind::MultipleMerge;
    case JoinKind::Xor: return PatternKind::SimpleMerge;
    case JoinKind::Or: return PatternKind::SynchronizeMerge;
    case JoinKind::And: {
      auto fed = or_split_targets(model);
      bool from_or = std::any_of(t.inputs.begin(), t.inputs.end(),
                                 [&](const InBranch& in) { return fed.count(in.source) != 0; });
      return from_or ? PatternKind::SynchronizeMerge : PatternKind::Synchronization;
    }
    case JoinKind::None: break;
  }
  if (t.split == SplitKind::Or) return PatternKind::MultipleChoice;
  if (t.split == SplitKind::And) return PatternKind::ParallelSplit;
  if (is_simple_choice_candidate(t) && firing_guard(t)) {
    const auto& source = t.inputs.front().source;
    for (const auto& other : model.transitions) {
      if (&other == &t || !is_simple_choice_candidate(other)) continue;
      if (other.inputs.front().source == source && firing_guard(other)) {
        return PatternKind::ExclusiveChoice;
      }
    }
  }
  return PatternKind::Sequence;
}

Classification classify(const ProcessModel& model) {
  Classification out;
  auto fed = or_split_targets(model);
  for (const auto& t : model.transitions) {
    PatternInstance instance{classify_transition(model, t), t.id, {}};
    if (instance.kind == PatternKind::SynchronizeMerge && t.join == JoinKind::And) {
      instance.notes.push_back("and-join fed by an or-split");
    }
    if (t.join != JoinKind::None && t.split != SplitKind::None) {
      instance.notes.push_back("also splits (" + std::string(to_string(t.split)) + ")");
    }
    out.transitions.push_back(std::move(instance));
  }
  ModelIndex index(model);
  for (const auto& path : index.state_paths()) {
    const auto* node = index.node(path);
    if (!node->entry_actions.empty() || !node->exit_actions.empty()) {
      out.states.push_back({PatternKind::EntryExitCase, path});
    }
    if (node->is_composite()) out.states.push_back({PatternKind::EmbeddedStates, path});
  }
  return out;
}

bool guards_overlap(const GuardExpr* a, const GuardExpr* b) {
  std::map<std::string, bool> polarity;
  for (const auto* g : {a, b}) {
    if (g == nullptr) continue;
    for (const auto& lit : g->literals) {
      auto [it, inserted] = polarity.emplace(lit.atom, !lit.negated);
      if (!inserted && it->second == lit.negated) return false;
    }
  }
  return true;
}

std::vector<Diagnostic> lint(const ProcessModel& model) {
  std::vector<Diagnostic> out;
  ModelIndex index(model);

  // Competing simple transitions: same source, same trigger events.
  const auto& ts = model.transitions;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!is_simple_choice_candidate(ts[i])) continue;
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      if (!is_simple_choice_candidate(ts[j])) continue;
      if (ts[i].inputs.front().source != ts[j].inputs.front().source) continue;
      if (trigger_events(ts[i]) != trigger_events(ts[j])) continue;
      auto gi = firing_guard(ts[i]);
      auto gj = firing_guard(ts[j]);
      std::set<std::string> atoms;
      for (const auto* g : {&gi, &gj}) {
        if (!*g) continue;
        for (const auto& lit : (*g)->literals) atoms.insert(lit.atom);
      }
      if (atoms.size() > kMaxOverlapAtoms) {
        out.push_back({"GuardAtomLimit", Severity::Warning, ts[i].id + "," + ts[j].id,
                       "too many guard atoms to check for overlap"});
        continue;
      }
      if (guards_overlap(gi ? &*gi : nullptr, gj ? &*gj : nullptr)) {
        out.push_back({"OverlappingGuards", Severity::Warning, ts[i].id + "," + ts[j].id,
                       "transitions from '" + ts[i].inputs.front().source +
                           "' can both be enabled under one guard valuation"});
      }
    }
  }

  // Reachability fixpoint from the initial pseudostate.
  std::set<std::string> reached{model.initial_name};
  auto mark = [&](const std::string& path) {
    bool changed = false;
    for (const auto& p : index.default_entry_chain(path)) {
      for (const auto& a : index.ancestors_inclusive(p)) changed |= reached.insert(a).second;
    }
    return changed;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : ts) {
      auto is_reached = [&](const InBranch& in) { return reached.count(in.source) != 0; };
      bool fires = t.join == JoinKind::And ? std::all_of(t.inputs.begin(), t.inputs.end(), is_reached)
                                           : std::any_of(t.inputs.begin(), t.inputs.end(), is_reached);
      if (!fires) continue;
      for (const auto& o : t.outputs) changed |= mark(o.target);
    }
  }
  for (const auto& path : index.state_paths()) {
    if (reached.count(path) == 0) {
      out.push_back({"UnreachableState", Severity::Warning, path,
                     "state cannot be reached from '" + model.initial_name + "'"});
    }
  }
  if (index.is_final_referenced() && reached.count(model.final_name) == 0) {
    out.push_back({"DanglingFinal", Severity::Warning, model.final_name,
                   "final pseudostate is targeted but never reached"});
  }

  auto fed = or_split_targets(model);
  for (const auto& t : ts) {
    if (t.join != JoinKind::Or) continue;
    bool from_or = std::any_of(t.inputs.begin(), t.inputs.end(),
                               [&](const InBranch& in) { return fed.count(in.source) != 0; });
    if (!from_or) {
      out.push_back({"OrJoinWithoutOrSplit", Severity::Warning, t.id,
                     "or-join has no input fed by an or-split"});
    }
  }
  return out;
}

}  // namespace flowspec
