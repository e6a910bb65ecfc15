#include "flowspec/infer.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <regex>
#include <set>

#include "flowspec/replay.hpp"

namespace flowspec {

namespace {

template <typename T>
bool contains(const std::vector<T>& list, const T& value) {
  return std::find(list.begin(), list.end(), value) != list.end();
}

template <typename T>
void push_unique(std::vector<T>& list, const T& value) {
  if (!contains(list, value)) list.push_back(value);
}

InferenceHints merge_hints(const InferenceHints& base, const InferenceHints& extra) {
  InferenceHints h = base;
  for (const auto& s : extra.states) push_unique(h.states, s);
  for (const auto& s : extra.events) push_unique(h.events, s);
  for (const auto& s : extra.guards) push_unique(h.guards, s);
  for (const auto& s : extra.actions) push_unique(h.actions, s);
  if (extra.initial_name) h.initial_name = extra.initial_name;
  if (extra.final_name) h.final_name = extra.final_name;
  h.entry_actions.insert(h.entry_actions.end(), extra.entry_actions.begin(), extra.entry_actions.end());
  h.exit_actions.insert(h.exit_actions.end(), extra.exit_actions.begin(), extra.exit_actions.end());
  h.initial_children.insert(h.initial_children.end(), extra.initial_children.begin(),
                            extra.initial_children.end());
  h.transitions.insert(h.transitions.end(), extra.transitions.begin(), extra.transitions.end());
  return h;
}

std::string parent_path(const std::string& path) {
  auto dot = path.rfind('.');
  return dot == std::string::npos ? std::string() : path.substr(0, dot);
}

// Builds the state forest from qualified paths; missing parents are created.
class ForestBuilder {
 public:
  explicit ForestBuilder(std::vector<StateNode>& roots) : roots_(roots) {}

  StateNode& ensure(const std::string& path) {
    if (auto found = locate(path)) return *found;
    auto parent = parent_path(path);
    auto& siblings = parent.empty() ? roots_ : ensure(parent).children;
    siblings.push_back(StateNode{last_segment(path), {}, {}, {}, std::nullopt});
    return siblings.back();
  }

  StateNode* locate(const std::string& path) {
    auto parent = parent_path(path);
    std::vector<StateNode>* siblings = &roots_;
    if (!parent.empty()) {
      auto* p = locate(parent);
      if (!p) return nullptr;
      siblings = &p->children;
    }
    auto name = last_segment(path);
    for (auto& node : *siblings) {
      if (node.name == name) return &node;
    }
    return nullptr;
  }

 private:
  std::vector<StateNode>& roots_;
};

void copy_header(const FeatureDoc& doc, const InferenceHints& hints, ProcessModel& model) {
  model.title = doc.title;
  model.role = doc.role;
  model.feature = doc.feature;
  model.benefit = doc.benefit;
  if (hints.initial_name) model.initial_name = *hints.initial_name;
  if (hints.final_name) model.final_name = *hints.final_name;
}

Inference from_declarations(const FeatureDoc& doc, const InferenceHints& hints) {
  Inference out;
  auto& model = out.model;
  copy_header(doc, hints, model);
  ForestBuilder forest(model.states);
  for (const auto& path : hints.states) {
    if (path == model.initial_name || path == model.final_name) continue;
    forest.ensure(path);
  }
  for (const auto& [path, acts] : hints.entry_actions) forest.ensure(path).entry_actions = acts;
  for (const auto& [path, acts] : hints.exit_actions) forest.ensure(path).exit_actions = acts;
  for (const auto& [path, child] : hints.initial_children) forest.ensure(path).initial_child = last_segment(child);
  model.transitions = hints.transitions;
  for (auto& t : model.transitions) normalize(t);

  out.diagnostics = validate(model);
  if (has_errors(out.diagnostics)) return out;
  for (const auto& scenario : doc.scenarios) {
    try {
      auto verdict = replay_scenario(model, scenario, EmitMode::Strict);
      if (!verdict.passed) {
        const auto& m = verdict.mismatches.front();
        out.diagnostics.push_back({"ScenarioMismatch", Severity::Error, scenario.name,
                                   "declared transitions do not reproduce the scenario: expected '" +
                                       m.expected + "', observed '" + m.observed + "'"});
      }
    } catch (const ReplayError& e) {
      out.diagnostics.push_back({"ScenarioMismatch", Severity::Error, scenario.name, e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Term classification

class Classifier {
 public:
  Classifier(const FeatureDoc& doc, const InferenceHints& hints, const ProcessModel& model,
             std::vector<Diagnostic>& diagnostics)
      : doc_(doc), hints_(hints), model_(model), diagnostics_(diagnostics) {}

  std::map<std::string, TermRole> run() {
    // (1) hinted roles
    for (const auto& s : doc_.scenarios) {
      for_each_atom(s, [&](const std::string& atom) {
        if (auto role = hints_.role_of(atom)) roles_.emplace(atom, *role);
      });
    }
    roles_.emplace(model_.initial_name, TermRole::State);

    // (2) negated anywhere: guard
    for (const auto& s : doc_.scenarios) {
      for (const auto* clause : {&s.given, &s.when}) {
        for (const auto& t : *clause) {
          if (t.negated) assign(t.atom, TermRole::Guard);
        }
      }
    }
    // (3) remaining positive GIVEN terms: states
    for (const auto& s : doc_.scenarios) {
      for (const auto& t : s.given) assign(t.atom, TermRole::State);
    }
    // (4) trailing THEN terms shaped like states
    for (const auto& s : doc_.scenarios) {
      for (auto it = s.then.rbegin(); it != s.then.rend(); ++it) {
        if (it->names.size() != 1) break;
        const auto& atom = it->names.front();
        auto known = roles_.find(atom);
        if (known != roles_.end() && known->second != TermRole::State) break;
        if (known == roles_.end() && it->kind != ThenItem::Kind::StateTerm && !looks_like_state(atom)) break;
        assign(atom, TermRole::State);
      }
    }
    // (5) remaining WHEN terms: events
    for (const auto& s : doc_.scenarios) {
      for (const auto& t : s.when) {
        if (roles_.count(t.atom)) continue;
        assign(t.atom, TermRole::Event);
        flag_choice_shape(t.atom);
      }
    }
    // (6) everything else: actions
    for (const auto& s : doc_.scenarios) {
      for (const auto& item : s.then) {
        for (const auto& a : item.names) assign(a, TermRole::Action);
      }
    }
    return roles_;
  }

 private:
  template <typename F>
  static void for_each_atom(const Scenario& s, F&& f) {
    for (const auto& t : s.given) f(t.atom);
    for (const auto& t : s.when) f(t.atom);
    for (const auto& item : s.then) {
      for (const auto& n : item.names) f(n);
    }
  }

  void assign(const std::string& atom, TermRole role) { roles_.emplace(atom, role); }

  static std::string shape_prefix(const std::string& atom) {
    static const std::regex shape(R"(([A-Za-z_]+)[0-9]+)");
    std::smatch m;
    return std::regex_match(atom, m, shape) ? m[1].str() : std::string();
  }

  bool looks_like_state(const std::string& atom) const {
    if (atom == model_.final_name) return true;
    auto parent = parent_path(atom);
    if (!parent.empty()) {
      auto it = roles_.find(parent);
      if (it != roles_.end() && it->second == TermRole::State) return true;
      if (parent.find('.') == std::string::npos) return true;
    }
    auto prefix = shape_prefix(atom);
    if (prefix.empty()) return false;
    bool state_shape = false, other_shape = false;
    for (const auto& [name, role] : roles_) {
      if (shape_prefix(name) != prefix) continue;
      (role == TermRole::State ? state_shape : other_shape) = true;
    }
    return state_shape && !other_shape;
  }

  // A bare WHEN term that alone distinguishes scenarios from the same GIVEN
  // may just as well be the guard of an exclusive choice.
  void flag_choice_shape(const std::string& atom) {
    if (flagged_.count(atom)) return;
    for (const auto& a : doc_.scenarios) {
      if (!mentions(a.when, atom)) continue;
      for (const auto& b : doc_.scenarios) {
        if (&a == &b || b.given != a.given || b.when == a.when || mentions(b.when, atom)) continue;
        flagged_.insert(atom);
        diagnostics_.push_back({"AmbiguousTerm", Severity::Warning, atom,
                                "'" + atom + "' read as an event; it may be the guard of an exclusive choice"});
        return;
      }
    }
  }

  static bool mentions(const std::vector<Term>& terms, const std::string& atom) {
    return std::any_of(terms.begin(), terms.end(), [&](const Term& t) { return t.atom == atom; });
  }

  const FeatureDoc& doc_;
  const InferenceHints& hints_;
  const ProcessModel& model_;
  std::vector<Diagnostic>& diagnostics_;
  std::map<std::string, TermRole> roles_;
  std::set<std::string> flagged_;
};

// ---------------------------------------------------------------------------
// Scenario folding

struct Raw {
  std::size_t index = 0;
  std::string name;
  std::vector<std::string> sources;
  std::vector<std::string> events;
  std::vector<GuardLiteral> guards;
  std::vector<std::string> actions;
  std::vector<std::string> targets;
  bool used = false;

  bool has_negation() const {
    return std::any_of(guards.begin(), guards.end(), [](const GuardLiteral& g) { return g.negated; });
  }
  bool positive(const std::string& atom) const { return contains(guards, GuardLiteral{atom, false}); }
};

std::string sink_name(const std::string& scenario) {
  std::string out = "_after_";
  for (char c : scenario) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return out;
}

std::vector<std::string> common_prefix(const std::vector<const Raw*>& group) {
  std::vector<std::string> prefix = group.front()->actions;
  for (const auto* r : group) {
    std::size_t n = 0;
    while (n < prefix.size() && n < r->actions.size() && prefix[n] == r->actions[n]) ++n;
    prefix.resize(n);
  }
  return prefix;
}

std::vector<std::string> common_suffix(const std::vector<const Raw*>& group) {
  std::vector<std::string> suffix(group.front()->actions.rbegin(), group.front()->actions.rend());
  for (const auto* r : group) {
    std::size_t n = 0;
    auto it = r->actions.rbegin();
    while (n < suffix.size() && it != r->actions.rend() && suffix[n] == *it) ++n, ++it;
    suffix.resize(n);
  }
  std::reverse(suffix.begin(), suffix.end());
  return suffix;
}

GuardExpr guard_of(const std::vector<GuardLiteral>& lits) { return GuardExpr{lits}; }

class Folder {
 public:
  Folder(const FeatureDoc& doc, const std::map<std::string, TermRole>& roles, ProcessModel& model,
         std::vector<Diagnostic>& diagnostics)
      : doc_(doc), roles_(roles), model_(model), diagnostics_(diagnostics) {}

  void run() {
    decompose();
    fold_or_splits();
    fold_split_rows();
    fold_joins();
    for (auto& r : raws_) {
      if (!r.used) single(r);
    }
    std::stable_sort(built_.begin(), built_.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::size_t n = 0;
    for (auto& [order, t] : built_) {
      t.id = "t" + std::to_string(++n);
      normalize(t);
      model_.transitions.push_back(std::move(t));
    }
  }

  // Targets that need a sink state, in creation order.
  const std::vector<std::string>& sinks() const { return sinks_; }

 private:
  TermRole role(const std::string& atom) const {
    auto it = roles_.find(atom);
    return it == roles_.end() ? TermRole::Action : it->second;
  }

  void warn(const std::string& code, const std::string& where, const std::string& message) {
    diagnostics_.push_back({code, Severity::Warning, where, message});
  }

  void decompose() {
    for (std::size_t i = 0; i < doc_.scenarios.size(); ++i) {
      const auto& s = doc_.scenarios[i];
      Raw r;
      r.index = i;
      r.name = s.name;
      for (const auto& t : s.given) {
        auto rl = role(t.atom);
        if (t.negated || rl == TermRole::Guard) {
          if (rl != TermRole::Guard) warn("AmbiguousTerm", s.name, "negated '" + t.atom + "' read as a guard");
          push_unique(r.guards, GuardLiteral{t.atom, t.negated});
        } else if (rl == TermRole::State) {
          r.sources.push_back(t.atom);
        } else {
          warn("AmbiguousTerm", s.name, "GIVEN term '" + t.atom + "' is not a state; ignored");
        }
      }
      for (const auto& t : s.when) {
        auto rl = role(t.atom);
        if (t.negated || rl == TermRole::Guard) {
          push_unique(r.guards, GuardLiteral{t.atom, t.negated});
        } else {
          if (rl != TermRole::Event) warn("AmbiguousTerm", s.name, "WHEN term '" + t.atom + "' read as an event");
          r.events.push_back(t.atom);
        }
      }
      std::size_t end = s.then.size();
      while (end > 0 && s.then[end - 1].names.size() == 1 && role(s.then[end - 1].names.front()) == TermRole::State) {
        --end;
      }
      for (std::size_t k = 0; k < s.then.size(); ++k) {
        if (k >= end) {
          r.targets.push_back(s.then[k].names.front());
        } else {
          r.actions.insert(r.actions.end(), s.then[k].names.begin(), s.then[k].names.end());
        }
      }
      if (r.sources.empty()) {
        warn("MissingSource", s.name, "no GIVEN state; assuming the initial pseudostate");
        r.sources.push_back(model_.initial_name);
      }
      raws_.push_back(std::move(r));
    }
  }

  std::string sink_for(const std::string& scenario) {
    auto name = sink_name(scenario);
    push_unique(sinks_, name);
    return name;
  }

  void emit(std::size_t order, TransitionDecl t) { built_.emplace_back(order, std::move(t)); }

  // Families sharing sources and events whose guards carry negations.
  void fold_or_splits() {
    for (auto& lead : raws_) {
      if (lead.used || !lead.has_negation()) continue;
      std::vector<Raw*> group;
      for (auto& r : raws_) {
        if (!r.used && r.sources == lead.sources && r.events == lead.events && !r.guards.empty()) group.push_back(&r);
      }
      if (group.size() < 2) continue;
      std::vector<std::string> branch_atoms, shared_atoms;
      for (const auto* r : group) {
        for (const auto& g : r->guards) {
          bool negated_somewhere = std::any_of(group.begin(), group.end(), [&](const Raw* o) {
            return contains(o->guards, GuardLiteral{g.atom, true});
          });
          bool everywhere = std::all_of(group.begin(), group.end(), [&](const Raw* o) { return o->positive(g.atom); });
          if (negated_somewhere) push_unique(branch_atoms, g.atom);
          else if (everywhere) push_unique(shared_atoms, g.atom);
        }
      }
      if (branch_atoms.empty()) continue;

      std::vector<const Raw*> cgroup(group.begin(), group.end());
      TransitionDecl t;
      t.split = SplitKind::Or;
      for (const auto& s : lead.sources) t.inputs.push_back({s, std::nullopt, {}});
      assign_events(t, lead.events, lead.name);
      if (!shared_atoms.empty()) {
        std::vector<GuardLiteral> lits;
        for (const auto& a : shared_atoms) lits.push_back({a, false});
        t.shared_guard = guard_of(lits);
      }
      t.shared_actions = common_prefix(cgroup);
      auto skip = t.shared_actions.size();

      std::vector<std::string> explained;
      std::vector<OutBranch> branches;
      for (const auto& atom : branch_atoms) {
        std::vector<const Raw*> on, off;
        for (const auto* r : cgroup) (r->positive(atom) ? on : off).push_back(r);
        if (on.empty()) continue;
        OutBranch b;
        b.guard = guard_of({{atom, false}});
        for (auto it = on.front()->actions.begin() + skip; it != on.front()->actions.end(); ++it) {
          bool in_all = std::all_of(on.begin(), on.end(), [&](const Raw* r) { return contains(r->actions, *it); });
          bool in_none = std::none_of(off.begin(), off.end(), [&](const Raw* r) {
            return std::find(r->actions.begin() + skip, r->actions.end(), *it) != r->actions.end();
          });
          if (in_all && in_none) push_unique(b.actions, *it);
        }
        for (const auto& target : on.front()->targets) {
          bool in_all = std::all_of(on.begin(), on.end(), [&](const Raw* r) { return contains(r->targets, target); });
          bool in_none = std::none_of(off.begin(), off.end(), [&](const Raw* r) { return contains(r->targets, target); });
          if (in_all && in_none && b.target.empty()) b.target = target;
        }
        if (b.target.empty()) {
          const Raw* alone = on.front();
          for (const auto* r : on) {
            auto positives = std::count_if(branch_atoms.begin(), branch_atoms.end(),
                                           [&](const std::string& a) { return r->positive(a); });
            if (positives == 1) { alone = r; break; }
          }
          b.target = sink_for(alone->name);
        }
        explained.push_back(b.target);
        branches.push_back(std::move(b));
      }
      for (const auto& target : cgroup.front()->targets) {
        bool everywhere = std::all_of(cgroup.begin(), cgroup.end(), [&](const Raw* r) { return contains(r->targets, target); });
        if (everywhere && !contains(explained, target)) {
          OutBranch b;
          b.target = target;
          b.mandatory = true;
          t.outputs.push_back(std::move(b));
        }
      }
      for (auto& b : branches) t.outputs.push_back(std::move(b));
      for (auto* r : group) r->used = true;
      emit(lead.index, std::move(t));
    }
  }

  // One row per branch of an and-split: same trigger, one distinct target each.
  void fold_split_rows() {
    for (auto& lead : raws_) {
      if (lead.used || lead.has_negation() || lead.targets.size() != 1) continue;
      std::vector<Raw*> group;
      std::vector<std::string> seen;
      for (auto& r : raws_) {
        if (r.used || r.sources != lead.sources || r.events != lead.events || r.guards != lead.guards) continue;
        if (r.targets.size() != 1 || contains(seen, r.targets.front())) continue;
        seen.push_back(r.targets.front());
        group.push_back(&r);
      }
      if (group.size() < 2) continue;
      std::vector<const Raw*> cgroup(group.begin(), group.end());
      TransitionDecl t;
      t.split = SplitKind::And;
      for (const auto& s : lead.sources) t.inputs.push_back({s, std::nullopt, {}});
      assign_events(t, lead.events, lead.name);
      if (!lead.guards.empty()) t.shared_guard = guard_of(lead.guards);
      t.shared_actions = common_prefix(cgroup);
      for (const auto* r : cgroup) {
        OutBranch b;
        b.target = r->targets.front();
        b.actions.assign(r->actions.begin() + t.shared_actions.size(), r->actions.end());
        t.outputs.push_back(std::move(b));
      }
      for (auto* r : group) r->used = true;
      emit(lead.index, std::move(t));
    }
  }

  // Rows from distinct single sources converging on a common action suffix.
  void fold_joins() {
    for (auto& lead : raws_) {
      if (lead.used || lead.sources.size() != 1 || lead.actions.empty() || lead.has_negation()) continue;
      std::vector<Raw*> group;
      std::vector<std::string> seen;
      for (auto& r : raws_) {
        if (r.used || r.sources.size() != 1 || r.actions.empty() || r.has_negation()) continue;
        if (r.targets != lead.targets || r.guards != lead.guards) continue;
        if (r.actions.back() != lead.actions.back() || contains(seen, r.sources.front())) continue;
        seen.push_back(r.sources.front());
        group.push_back(&r);
      }
      if (group.size() < 2) continue;
      std::vector<const Raw*> cgroup(group.begin(), group.end());
      TransitionDecl t;
      t.join = JoinKind::And;
      t.shared_actions = common_suffix(cgroup);
      for (const auto* r : cgroup) {
        InBranch in;
        in.source = r->sources.front();
        if (!r->events.empty()) in.event = r->events.front();
        for (std::size_t e = 1; e < r->events.size(); ++e) {
          warn("ExtraEvent", r->name, "event '" + r->events[e] + "' dropped from join input");
        }
        in.actions.assign(r->actions.begin(), r->actions.end() - t.shared_actions.size());
        t.inputs.push_back(std::move(in));
      }
      if (!lead.guards.empty()) t.shared_guard = guard_of(lead.guards);
      add_targets(t, lead);
      warn("AmbiguousJoin", lead.name,
           "rows folded into an and-join; the text cannot tell and, or, xor and multi joins apart");
      for (auto* r : group) r->used = true;
      emit(lead.index, std::move(t));
    }
  }

  void single(Raw& r) {
    TransitionDecl t;
    if (r.sources.size() > 1) {
      t.join = JoinKind::And;
      for (std::size_t i = 0; i < r.sources.size(); ++i) {
        InBranch in{r.sources[i], std::nullopt, {}};
        if (i < r.events.size()) in.event = r.events[i];
        t.inputs.push_back(std::move(in));
      }
      std::vector<std::string> extra(r.events.begin() + std::min(r.events.size(), r.sources.size()), r.events.end());
      if (!extra.empty()) t.shared_event = extra.front();
      for (std::size_t e = 1; e < extra.size(); ++e) warn("ExtraEvent", r.name, "event '" + extra[e] + "' dropped");
      warn("AmbiguousJoin", r.name, "several GIVEN states read as an and-join");
    } else {
      t.inputs.push_back({r.sources.front(), std::nullopt, {}});
      assign_events(t, r.events, r.name);
    }
    t.shared_actions = r.actions;
    add_targets(t, r);
    if (!r.guards.empty()) {
      if (t.outputs.size() == 1) {
        t.outputs.front().guard = guard_of(r.guards);
      } else {
        t.shared_guard = guard_of(r.guards);
      }
    }
    r.used = true;
    emit(r.index, std::move(t));
  }

  void assign_events(TransitionDecl& t, const std::vector<std::string>& events, const std::string& where) {
    if (events.empty()) return;
    if (t.inputs.size() == 1) {
      t.inputs.front().event = events.front();
      if (events.size() > 1) t.shared_event = events[1];
      for (std::size_t e = 2; e < events.size(); ++e) warn("ExtraEvent", where, "event '" + events[e] + "' dropped");
    } else {
      t.shared_event = events.front();
      for (std::size_t e = 1; e < events.size(); ++e) warn("ExtraEvent", where, "event '" + events[e] + "' dropped");
    }
  }

  void add_targets(TransitionDecl& t, const Raw& r) {
    if (r.targets.empty()) {
      warn("SyntheticSink", r.name, "no target state named; using a synthetic sink");
      t.outputs.push_back(OutBranch{sink_for(r.name), std::nullopt, {}, false});
      return;
    }
    for (const auto& target : r.targets) t.outputs.push_back(OutBranch{target, std::nullopt, {}, false});
    if (t.outputs.size() > 1) t.split = SplitKind::And;
  }

  const FeatureDoc& doc_;
  const std::map<std::string, TermRole>& roles_;
  ProcessModel& model_;
  std::vector<Diagnostic>& diagnostics_;
  std::vector<Raw> raws_;
  std::vector<std::pair<std::size_t, TransitionDecl>> built_;
  std::vector<std::string> sinks_;
};

// Children entered from outside their composite become its initial child and
// the entering transition targets the composite instead.
void settle_composites(ProcessModel& model, std::vector<Diagnostic>& diagnostics) {
  ModelIndex index(model);
  std::vector<std::pair<std::string, std::string>> choices;
  for (const auto& path : index.state_paths()) {
    if (!index.is_composite(path)) continue;
    std::optional<std::string> entered;
    for (auto& t : model.transitions) {
      bool from_outside = std::none_of(t.inputs.begin(), t.inputs.end(), [&](const InBranch& in) {
        return index.is_state(in.source) && index.is_descendant_or_self(in.source, path);
      });
      if (!from_outside) continue;
      for (auto& o : t.outputs) {
        if (index.parent(o.target) != path) continue;
        if (!entered) entered = o.target;
      }
    }
    if (!entered) {
      entered = qualified(path, index.node(path)->children.front().name);
      diagnostics.push_back({"AssumedInitialChild", Severity::Warning, path,
                             "no child is entered from outside; the first child is taken as initial"});
    }
    choices.emplace_back(path, *entered);
  }
  ForestBuilder forest(model.states);
  for (const auto& [path, child] : choices) {
    forest.locate(path)->initial_child = last_segment(child);
    for (auto& t : model.transitions) {
      bool from_outside = std::none_of(t.inputs.begin(), t.inputs.end(), [&](const InBranch& in) {
        return in.source == path || in.source.rfind(path + ".", 0) == 0;
      });
      if (!from_outside) continue;
      for (auto& o : t.outputs) {
        if (o.target == child) o.target = path;
      }
    }
  }
}

Inference from_scenarios(const FeatureDoc& doc, const InferenceHints& hints) {
  Inference out;
  auto& model = out.model;
  copy_header(doc, hints, model);

  auto roles = Classifier(doc, hints, model, out.diagnostics).run();
  Folder folder(doc, roles, model, out.diagnostics);
  folder.run();

  ForestBuilder forest(model.states);
  auto add_state = [&](const std::string& name) {
    if (name == model.initial_name || name == model.final_name) return;
    forest.ensure(name);
  };
  for (const auto& s : doc.scenarios) {
    for (const auto& t : s.given) {
      if (!t.negated && roles[t.atom] == TermRole::State) add_state(t.atom);
    }
    for (const auto& item : s.then) {
      if (item.names.size() == 1 && roles[item.names.front()] == TermRole::State) add_state(item.names.front());
    }
  }
  for (const auto& sink : folder.sinks()) add_state(sink);
  settle_composites(model, out.diagnostics);

  auto problems = validate(model);
  out.diagnostics.insert(out.diagnostics.end(), problems.begin(), problems.end());
  return out;
}

}  // namespace

Inference infer_model(const FeatureDoc& doc, const InferenceHints& extra) {
  auto hints = merge_hints(doc.hints, extra);
  if (!hints.transitions.empty()) return from_declarations(doc, hints);
  return from_scenarios(doc, hints);
}

}  // namespace flowspec
