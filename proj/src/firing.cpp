#include "flowspec/firing.hpp"

#include <algorithm>
#include <map>

#include "flowspec/gwt.hpp"

namespace flowspec {

std::vector<FiringSelection> firing_selections(const TransitionDecl& t, SelectionPolicy policy) {
  std::vector<std::vector<std::size_t>> input_sets;
  if (policy.per_input) {
    for (std::size_t i = 0; i < t.inputs.size(); ++i) input_sets.push_back({i});
  } else {
    std::vector<std::size_t> all(t.inputs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    input_sets.push_back(all);
  }

  std::vector<std::vector<std::size_t>> output_sets;
  if (t.split == SplitKind::Or) {
    std::vector<std::size_t> guarded;
    for (std::size_t i = 0; i < t.outputs.size(); ++i) {
      if (t.outputs[i].guard && !t.outputs[i].mandatory) guarded.push_back(i);
    }
    for (const auto& subset : enumerate_choice_subsets(guarded.size())) {
      std::vector<std::size_t> chosen;
      for (std::size_t i = 0; i < t.outputs.size(); ++i) {
        bool picked = std::any_of(subset.begin(), subset.end(),
                                  [&](std::size_t k) { return guarded[k] == i; });
        bool always = !(t.outputs[i].guard && !t.outputs[i].mandatory);
        if (picked || always) chosen.push_back(i);
      }
      output_sets.push_back(std::move(chosen));
    }
  } else if (policy.per_output) {
    for (std::size_t i = 0; i < t.outputs.size(); ++i) output_sets.push_back({i});
  } else {
    std::vector<std::size_t> all(t.outputs.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    output_sets.push_back(all);
  }

  std::vector<FiringSelection> out;
  for (const auto& ins : input_sets) {
    for (const auto& outs : output_sets) {
      out.push_back({ins, outs, out.size() + 1});
    }
  }
  return out;
}

namespace {

class ValuationBuilder {
 public:
  bool assert_literals(const std::vector<GuardLiteral>& lits) {
    for (const auto& lit : lits) {
      auto it = fixed_.find(lit.atom);
      if (it != fixed_.end()) {
        if (it->second == lit.negated) return false;
        continue;
      }
      fixed_[lit.atom] = !lit.negated;
      literals_.push_back(lit);
    }
    return true;
  }

  // Makes a conjunction false by flipping its first free literal.
  bool falsify(const std::vector<GuardLiteral>& lits) {
    for (const auto& lit : lits) {
      auto it = fixed_.find(lit.atom);
      if (it != fixed_.end() && it->second == lit.negated) return true;
    }
    for (const auto& lit : lits) {
      if (fixed_.count(lit.atom) == 0) {
        fixed_[lit.atom] = lit.negated;
        literals_.push_back({lit.atom, !lit.negated});
        return true;
      }
    }
    return false;
  }

  std::vector<GuardLiteral> take() { return std::move(literals_); }

 private:
  std::map<std::string, bool> fixed_;
  std::vector<GuardLiteral> literals_;
};

std::vector<GuardLiteral> combined_guard(const TransitionDecl& t) {
  std::vector<GuardLiteral> lits;
  if (t.shared_guard) lits = t.shared_guard->literals;
  if (t.outputs.size() == 1 && t.outputs.front().guard) {
    const auto& g = t.outputs.front().guard->literals;
    lits.insert(lits.end(), g.begin(), g.end());
  }
  return lits;
}

}  // namespace

Stimulus stimulus_for(const ProcessModel& model, const TransitionDecl& t,
                      const FiringSelection& selection, bool isolate) {
  Stimulus s;
  for (std::size_t i : selection.inputs) {
    if (t.inputs[i].event) s.events.push_back(*t.inputs[i].event);
  }
  if (t.shared_event) s.events.push_back(*t.shared_event);

  ValuationBuilder builder;
  bool ok = true;
  if (t.shared_guard) ok &= builder.assert_literals(t.shared_guard->literals);
  for (std::size_t o : selection.outputs) {
    if (t.outputs[o].guard) ok &= builder.assert_literals(t.outputs[o].guard->literals);
  }
  if (t.split == SplitKind::Or) {
    for (std::size_t o = 0; o < t.outputs.size(); ++o) {
      bool selected = std::find(selection.outputs.begin(), selection.outputs.end(), o) !=
                      selection.outputs.end();
      if (!selected && t.outputs[o].guard) ok &= builder.falsify(t.outputs[o].guard->literals);
    }
  }
  if (isolate) {
    std::vector<std::string> sources;
    for (std::size_t i : selection.inputs) sources.push_back(t.inputs[i].source);
    for (const auto& other : model.transitions) {
      if (&other == &t || other.inputs.size() != 1 || other.split != SplitKind::None) continue;
      if (std::find(sources.begin(), sources.end(), other.inputs.front().source) == sources.end()) continue;
      std::vector<std::string> needed;
      if (other.inputs.front().event) needed.push_back(*other.inputs.front().event);
      if (other.shared_event) needed.push_back(*other.shared_event);
      bool triggered = std::all_of(needed.begin(), needed.end(), [&](const std::string& e) {
        return std::find(s.events.begin(), s.events.end(), e) != s.events.end();
      });
      auto guard = combined_guard(other);
      if (triggered && !guard.empty()) builder.falsify(guard);
    }
  }
  s.literals = builder.take();
  s.realizable = ok;
  return s;
}

std::optional<std::string> firing_boundary(const ModelIndex& index,
                                           const std::vector<std::string>& sources,
                                           const std::vector<std::string>& targets) {
  std::vector<std::string> all = sources;
  all.insert(all.end(), targets.begin(), targets.end());
  return index.common_ancestor(all);
}

std::vector<std::string> entered_states(const ModelIndex& index, const std::string& target,
                                        const std::optional<std::string>& boundary) {
  std::vector<std::string> chain;
  for (const auto& a : index.ancestors_inclusive(target)) {
    if (boundary && a == *boundary) break;
    chain.push_back(a);
  }
  std::reverse(chain.begin(), chain.end());
  auto below = index.default_entry_chain(target);
  chain.insert(chain.end(), below.begin() + 1, below.end());
  return chain;
}

std::vector<std::string> exited_states(const ModelIndex& index, const std::string& leaf,
                                       const std::optional<std::string>& boundary) {
  std::vector<std::string> chain;
  for (const auto& a : index.ancestors_inclusive(leaf)) {
    if (boundary && a == *boundary) break;
    chain.push_back(a);
  }
  return chain;
}

FiringPlan plan_firing(const ModelIndex& index, const TransitionDecl& t, const FiringSelection& sel) {
  FiringPlan plan;
  std::vector<std::string> sources, targets;
  for (std::size_t i : sel.inputs) sources.push_back(t.inputs[i].source);
  for (std::size_t o : sel.outputs) targets.push_back(t.outputs[o].target);
  auto boundary = firing_boundary(index, sources, targets);

  for (const auto& s : sources) {
    std::string leaf = index.default_leaf(s);
    plan.given_leaves.push_back(leaf);
    for (const auto& state : exited_states(index, leaf, boundary)) {
      const auto& acts = index.exit_actions(state);
      plan.exit_actions.insert(plan.exit_actions.end(), acts.begin(), acts.end());
    }
  }
  plan.trace = plan.exit_actions;
  for (std::size_t i : sel.inputs) {
    const auto& acts = t.inputs[i].actions;
    plan.trace.insert(plan.trace.end(), acts.begin(), acts.end());
  }
  plan.trace.insert(plan.trace.end(), t.shared_actions.begin(), t.shared_actions.end());
  for (std::size_t o : sel.outputs) {
    const auto& acts = t.outputs[o].actions;
    plan.trace.insert(plan.trace.end(), acts.begin(), acts.end());
  }
  for (const auto& target : targets) {
    for (const auto& state : entered_states(index, target, boundary)) {
      const auto& acts = index.entry_actions(state);
      plan.trace.insert(plan.trace.end(), acts.begin(), acts.end());
    }
    plan.entered_leaves.push_back(index.default_leaf(target));
  }
  return plan;
}

}  // namespace flowspec
