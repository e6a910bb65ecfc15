#include <algorithm>

#include "flowspec/firing.hpp"
#include "flowspec/gwt.hpp"
#include "flowspec/patterns.hpp"

namespace flowspec {

std::string_view to_string(TermRole role) {
  switch (role) {
    case TermRole::State: return "state";
    case TermRole::Event: return "event";
    case TermRole::Guard: return "guard";
    case TermRole::Action: return "action";
  }
  return "action";
}

std::optional<TermRole> InferenceHints::role_of(std::string_view atom) const {
  auto in = [&](const std::vector<std::string>& list) {
    return std::find(list.begin(), list.end(), atom) != list.end();
  };
  if (in(states) || (initial_name && *initial_name == atom) || (final_name && *final_name == atom)) {
    return TermRole::State;
  }
  if (in(events)) return TermRole::Event;
  if (in(guards)) return TermRole::Guard;
  if (in(actions)) return TermRole::Action;
  return std::nullopt;
}

std::vector<std::vector<std::size_t>> enumerate_choice_subsets(std::size_t n) {
  if (n == 0 || n > kMaxChoiceBranches) {
    throw Error("TooManyChoiceBranches", "choice enumeration supports 1.." +
                                             std::to_string(kMaxChoiceBranches) + " guarded branches, got " +
                                             std::to_string(n));
  }
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t size = 1; size <= n; ++size) {
    // Lexicographic k-combinations of branch indices.
    std::vector<std::size_t> combo(size);
    for (std::size_t i = 0; i < size; ++i) combo[i] = i;
    while (true) {
      out.push_back(combo);
      std::size_t i = size;
      while (i > 0 && combo[i - 1] == n - size + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < size; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  return out;
}

namespace {

bool is_merge_kind(PatternKind kind) {
  return kind == PatternKind::SynchronizeMerge || kind == PatternKind::MultipleMerge;
}

bool touches_hierarchy(const ModelIndex& index, const TransitionDecl& t, const FiringSelection& sel) {
  auto nested = [&](const std::string& path) {
    return index.parent(path).has_value() || index.is_composite(path);
  };
  for (std::size_t i : sel.inputs) {
    if (nested(t.inputs[i].source)) return true;
  }
  for (std::size_t o : sel.outputs) {
    if (nested(t.outputs[o].target)) return true;
  }
  return false;
}

InferenceHints role_hints(const ProcessModel& model, const ModelIndex& index) {
  InferenceHints hints;
  hints.initial_name = model.initial_name;
  hints.final_name = model.final_name;
  hints.states.push_back(model.initial_name);
  hints.states.insert(hints.states.end(), index.state_paths().begin(), index.state_paths().end());
  if (index.is_final_referenced()) hints.states.push_back(model.final_name);
  hints.events = index.event_names();
  hints.guards = index.guard_atoms();
  hints.actions = index.action_names();
  return hints;
}

void add_structure_hints(InferenceHints& hints, const ProcessModel& model, const ModelIndex& index) {
  for (const auto& path : index.state_paths()) {
    const auto* node = index.node(path);
    if (!node->entry_actions.empty()) hints.entry_actions.emplace_back(path, node->entry_actions);
    if (!node->exit_actions.empty()) hints.exit_actions.emplace_back(path, node->exit_actions);
    if (node->initial_child) hints.initial_children.emplace_back(path, qualified(path, *node->initial_child));
  }
  hints.transitions = model.transitions;
}

class Emitter {
 public:
  Emitter(const ProcessModel& model, EmitMode mode) : model_(model), index_(model), mode_(mode) {}

  FeatureDoc run() {
    FeatureDoc doc;
    doc.title = model_.title;
    doc.role = model_.role;
    doc.feature = model_.feature;
    doc.benefit = model_.benefit;
    doc.hints = role_hints(model_, index_);
    if (strict()) add_structure_hints(doc.hints, model_, index_);
    for (const auto& t : model_.transitions) emit_transition(t, doc.scenarios);
    return doc;
  }

 private:
  bool strict() const { return mode_ == EmitMode::Strict; }

  Term term(const std::string& atom, TermRole role, bool negated = false) const {
    return {atom, negated, role};
  }

  void emit_transition(const TransitionDecl& t, std::vector<Scenario>& out) {
    PatternKind kind = classify_transition(model_, t);
    std::size_t guarded = std::count_if(t.outputs.begin(), t.outputs.end(), [](const OutBranch& o) {
      return o.guard.has_value() && !o.mandatory;
    });
    if (t.split == SplitKind::Or && guarded > kMaxChoiceBranches) {
      throw Error("TooManyChoiceBranches", "transition '" + t.id + "' has " + std::to_string(guarded) +
                                               " guarded branches; at most " +
                                               std::to_string(kMaxChoiceBranches) + " are supported");
    }

    SelectionPolicy policy;
    policy.per_input = t.join == JoinKind::Xor || t.join == JoinKind::Multi ||
                       (!strict() && (kind == PatternKind::Synchronization ||
                                      kind == PatternKind::SimpleMerge ||
                                      kind == PatternKind::MultipleMerge));
    if (!strict() && t.split == SplitKind::And) {
      // A source with exit actions gets one row per branch, each naming its target.
      FiringSelection all;
      for (std::size_t i = 0; i < t.inputs.size(); ++i) all.inputs.push_back(i);
      for (std::size_t o = 0; o < t.outputs.size(); ++o) all.outputs.push_back(o);
      policy.per_output = plan_firing(index_, t, all).exits_any_actions();
    }

    auto family = firing_selections(t, policy);
    for (const auto& sel : family) {
      Stimulus stimulus = stimulus_for(model_, t, sel, strict());
      if (!stimulus.realizable) continue;
      FiringPlan plan = plan_firing(index_, t, sel);

      Scenario s;
      s.name = std::string(to_string(kind)) + " " + t.id;
      if (family.size() > 1) s.name += " " + std::to_string(sel.family_index);

      bool guards_in_given = strict() ? !stimulus.events.empty() : kind == PatternKind::MultipleChoice;
      if (strict()) {
        for (const auto& leaf : plan.given_leaves) s.given.push_back(term(leaf, TermRole::State));
      } else {
        for (std::size_t i : sel.inputs) s.given.push_back(term(t.inputs[i].source, TermRole::State));
      }
      for (const auto& e : stimulus.events) s.when.push_back(term(e, TermRole::Event));
      auto& guard_terms = guards_in_given ? s.given : s.when;
      for (const auto& lit : stimulus.literals) {
        guard_terms.push_back(term(lit.atom, TermRole::Guard, lit.negated));
      }

      if (strict()) {
        if (!plan.trace.empty()) s.then.push_back(ThenItem::actions(plan.trace));
        Configuration after;
        for (const auto& leaf : plan.entered_leaves) ++after.active[leaf];
        for (const auto& leaf : ordered_leaves(index_, after)) s.then.push_back(ThenItem::state(leaf));
      } else {
        if (is_merge_kind(kind)) {
          if (!plan.trace.empty()) s.then.push_back(ThenItem::actions(plan.trace));
        } else {
          for (const auto& a : plan.trace) s.then.push_back(ThenItem::actions({a}));
        }
        bool with_targets = is_merge_kind(kind) || policy.per_output || plan.trace.empty() ||
                            touches_hierarchy(index_, t, sel);
        if (with_targets) {
          for (const auto& leaf : plan.entered_leaves) s.then.push_back(ThenItem::state(leaf));
        }
      }
      out.push_back(std::move(s));
    }
  }

  const ProcessModel& model_;
  ModelIndex index_;
  EmitMode mode_;
};

}  // namespace

FeatureDoc emit_feature(const ProcessModel& model, EmitMode mode) { return Emitter(model, mode).run(); }

}  // namespace flowspec
