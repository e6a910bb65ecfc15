#include "flowspec/replay.hpp"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "flowspec/firing.hpp"

namespace flowspec {

namespace {

struct Firing {
  std::size_t transition = 0;
  std::vector<std::size_t> inputs;
  std::vector<std::size_t> outputs;
};

class Engine {
 public:
  Engine(const ProcessModel& model) : model_(model), index_(model) {}

  const ModelIndex& index() const { return index_; }

  // First active leaf at or below `path`, in model order.
  std::optional<std::string> active_leaf(const Configuration& config, const std::string& path) const {
    std::optional<std::string> best;
    for (const auto& [leaf, count] : config.active) {
      if (count <= 0) continue;
      bool under = leaf == path || (index_.is_state(leaf) && index_.is_descendant_or_self(leaf, path));
      if (!under) continue;
      if (!best || index_.order_of(leaf) < index_.order_of(*best)) best = leaf;
    }
    return best;
  }

  std::vector<Firing> firings(const Configuration& config, const EventSet& events,
                              const Valuation& valuation) const {
    std::vector<Firing> out;
    for (std::size_t ti = 0; ti < model_.transitions.size(); ++ti) {
      const auto& t = model_.transitions[ti];
      if (t.shared_event && events.count(*t.shared_event) == 0) continue;
      if (t.shared_guard && !t.shared_guard->holds(valuation)) continue;
      auto outputs = select_outputs(t, valuation);
      if (outputs.empty()) continue;
      for (auto& inputs : select_inputs(t, config, events)) {
        out.push_back({ti, std::move(inputs), outputs});
      }
    }
    return out;
  }

  StepResult step(const Configuration& config, const EventSet& events, const Valuation& valuation) const {
    auto fs = firings(config, events, valuation);
    check_conflicts(config, fs);

    StepResult result;
    result.after = config;
    for (const auto& f : fs) {
      const auto& t = model_.transitions[f.transition];
      apply(t, f, result);
      if (result.fired.empty() || result.fired.back() != t.id) result.fired.push_back(t.id);
    }
    if (!is_legal(index_, result.after)) {
      throw ReplayError("IllegalConfiguration", "step leaves two active states in one composite",
                        result.fired);
    }
    return result;
  }

 private:
  bool input_ready(const InBranch& in, const Configuration& config, const EventSet& events) const {
    return active_leaf(config, in.source).has_value() && (!in.event || events.count(*in.event) != 0);
  }

  std::vector<std::vector<std::size_t>> select_inputs(const TransitionDecl& t, const Configuration& config,
                                                      const EventSet& events) const {
    std::vector<std::vector<std::size_t>> out;
    switch (t.join) {
      case JoinKind::None:
      case JoinKind::And: {
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < t.inputs.size(); ++i) {
          if (!input_ready(t.inputs[i], config, events)) return {};
          all.push_back(i);
        }
        out.push_back(std::move(all));
        break;
      }
      case JoinKind::Or: {
        std::vector<std::size_t> expected;
        auto record = config.or_expect.find(t.id);
        if (record != config.or_expect.end()) {
          expected = record->second;
        } else {
          for (std::size_t i = 0; i < t.inputs.size(); ++i) {
            if (active_leaf(config, t.inputs[i].source)) expected.push_back(i);
          }
        }
        if (expected.empty()) return {};
        for (std::size_t i : expected) {
          if (!input_ready(t.inputs[i], config, events)) return {};
        }
        out.push_back(std::move(expected));
        break;
      }
      case JoinKind::Xor:
        for (std::size_t i = 0; i < t.inputs.size(); ++i) {
          if (input_ready(t.inputs[i], config, events)) return {{i}};
        }
        break;
      case JoinKind::Multi:
        for (std::size_t i = 0; i < t.inputs.size(); ++i) {
          if (input_ready(t.inputs[i], config, events)) out.push_back({i});
        }
        break;
    }
    return out;
  }

  static std::vector<std::size_t> select_outputs(const TransitionDecl& t, const Valuation& valuation) {
    std::vector<std::size_t> out;
    if (t.split == SplitKind::Or) {
      bool any_guard = false;
      for (std::size_t o = 0; o < t.outputs.size(); ++o) {
        const auto& branch = t.outputs[o];
        if (!branch.guard) {
          out.push_back(o);
        } else if (branch.guard->holds(valuation)) {
          any_guard = true;
          out.push_back(o);
        }
      }
      if (!any_guard) out.clear();
      return out;
    }
    for (std::size_t o = 0; o < t.outputs.size(); ++o) {
      if (t.outputs[o].guard && !t.outputs[o].guard->holds(valuation)) return {};
      out.push_back(o);
    }
    return out;
  }

  void check_conflicts(const Configuration& config, const std::vector<Firing>& fs) const {
    std::map<std::string, int> demand;
    std::map<std::string, std::vector<std::string>> claimants;
    for (const auto& f : fs) {
      const auto& t = model_.transitions[f.transition];
      for (std::size_t i : f.inputs) {
        auto leaf = *active_leaf(config, t.inputs[i].source);
        ++demand[leaf];
        auto& ids = claimants[leaf];
        if (std::find(ids.begin(), ids.end(), t.id) == ids.end()) ids.push_back(t.id);
      }
    }
    for (const auto& [leaf, wanted] : demand) {
      if (wanted > config.count(leaf) && claimants[leaf].size() > 1) {
        std::string list;
        for (const auto& id : claimants[leaf]) list += (list.empty() ? "" : ", ") + id;
        throw ReplayError("NondeterminismConflict",
                          "transitions " + list + " compete for active state '" + leaf + "'",
                          claimants[leaf]);
      }
    }
  }

  void apply(const TransitionDecl& t, const Firing& f, StepResult& result) const {
    auto& config = result.after;
    std::vector<std::string> sources, targets;
    for (std::size_t i : f.inputs) sources.push_back(t.inputs[i].source);
    for (std::size_t o : f.outputs) targets.push_back(t.outputs[o].target);
    auto boundary = firing_boundary(index_, sources, targets);

    std::vector<std::string> trace;
    for (const auto& source : sources) {
      auto leaf = active_leaf(config, source);
      if (!leaf) continue;  // consumed by an earlier firing of a multi-join
      for (const auto& state : exited_states(index_, *leaf, boundary)) {
        const auto& acts = index_.exit_actions(state);
        trace.insert(trace.end(), acts.begin(), acts.end());
      }
      if (--config.active[*leaf] <= 0) config.active.erase(*leaf);
    }
    for (std::size_t i : f.inputs) trace.insert(trace.end(), t.inputs[i].actions.begin(), t.inputs[i].actions.end());
    trace.insert(trace.end(), t.shared_actions.begin(), t.shared_actions.end());
    for (std::size_t o : f.outputs) trace.insert(trace.end(), t.outputs[o].actions.begin(), t.outputs[o].actions.end());
    for (const auto& target : targets) {
      for (const auto& state : entered_states(index_, target, boundary)) {
        const auto& acts = index_.entry_actions(state);
        trace.insert(trace.end(), acts.begin(), acts.end());
      }
      ++config.active[index_.default_leaf(target)];
    }
    result.trace.insert(result.trace.end(), trace.begin(), trace.end());

    if (t.join == JoinKind::Or) config.or_expect.erase(t.id);
    if (t.split == SplitKind::Or) record_activation(targets, config);
  }

  // Remembers which inputs of downstream or-joins this or-split activated.
  void record_activation(const std::vector<std::string>& targets, Configuration& config) const {
    for (const auto& join : model_.transitions) {
      if (join.join != JoinKind::Or) continue;
      bool fed = false;
      std::vector<std::size_t> expected;
      for (std::size_t i = 0; i < join.inputs.size(); ++i) {
        if (std::find(targets.begin(), targets.end(), join.inputs[i].source) != targets.end()) {
          expected.push_back(i);
        }
      }
      for (const auto& t : model_.transitions) {
        if (t.split != SplitKind::Or) continue;
        for (const auto& o : t.outputs) {
          for (const auto& in : join.inputs) fed |= o.target == in.source;
        }
      }
      if (!fed) continue;
      if (expected.empty()) {
        config.or_expect.erase(join.id);
      } else {
        config.or_expect[join.id] = std::move(expected);
      }
    }
  }

  const ProcessModel& model_;
  ModelIndex index_;
};

std::string joined(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : " ") + s;
  return out;
}

// Whether the trace is some ordering of the AND-groups, each kept in sequence.
bool matches_groups(const std::vector<std::vector<std::string>>& groups, const std::vector<std::string>& trace,
                    std::size_t pos, std::vector<bool>& used) {
  if (pos == trace.size()) {
    return std::all_of(used.begin(), used.end(), [](bool u) { return u; });
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (used[g]) continue;
    const auto& group = groups[g];
    if (pos + group.size() > trace.size() || !std::equal(group.begin(), group.end(), trace.begin() + pos)) continue;
    used[g] = true;
    if (matches_groups(groups, trace, pos + group.size(), used)) return true;
    used[g] = false;
  }
  return false;
}

// Paper-style rows describe one thread of a synchronizing join; the other
// threads are implied. Activates them (and supplies their events) when the
// row names a ready input of an and/or join.
bool complete_joins(const ProcessModel& model, const ModelIndex& index, Configuration& config, EventSet& events);

}  // namespace

bool is_legal(const ModelIndex& index, const Configuration& config) {
  std::vector<std::string> leaves;
  for (const auto& [leaf, count] : config.active) {
    if (count < 0) return false;
    if (count > 0) leaves.push_back(leaf);
  }
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    for (std::size_t j = i + 1; j < leaves.size(); ++j) {
      if (!index.is_state(leaves[i]) || !index.is_state(leaves[j])) continue;
      if (index.common_ancestor({leaves[i], leaves[j]}) || index.is_descendant_or_self(leaves[i], leaves[j]) ||
          index.is_descendant_or_self(leaves[j], leaves[i])) {
        return false;
      }
    }
  }
  return true;
}

namespace {

bool complete_joins(const ProcessModel& model, const ModelIndex& index, Configuration& config, EventSet& events) {
  auto active_under = [&](const std::string& path) {
    return std::any_of(config.active.begin(), config.active.end(), [&](const auto& entry) {
      return entry.second > 0 &&
             (entry.first == path || (index.is_state(entry.first) && index.is_descendant_or_self(entry.first, path)));
    });
  };
  bool changed = false;
  for (const auto& t : model.transitions) {
    if (t.join != JoinKind::And && t.join != JoinKind::Or) continue;
    bool named = std::any_of(t.inputs.begin(), t.inputs.end(), [&](const InBranch& in) {
      return active_under(in.source) && (!in.event || events.count(*in.event) != 0);
    });
    if (!named) continue;
    Configuration trial = config;
    EventSet trial_events = events;
    for (const auto& in : t.inputs) {
      if (!active_under(in.source)) ++trial.active[index.default_leaf(in.source)];
      if (in.event) trial_events.insert(*in.event);
    }
    if (!is_legal(index, trial)) continue;
    config = std::move(trial);
    events = std::move(trial_events);
    changed = true;
  }
  return changed;
}

}  // namespace

std::vector<std::string> enabled(const ProcessModel& model, const Configuration& config, const EventSet& events,
                                 const Valuation& valuation) {
  Engine engine(model);
  std::vector<std::string> out;
  for (const auto& f : engine.firings(config, events, valuation)) {
    const auto& id = model.transitions[f.transition].id;
    if (out.empty() || out.back() != id) out.push_back(id);
  }
  return out;
}

StepResult step(const ProcessModel& model, const Configuration& config, const EventSet& events,
                const Valuation& valuation) {
  return Engine(model).step(config, events, valuation);
}

Verdict replay_scenario(const ProcessModel& model, const Scenario& scenario, EmitMode mode) {
  Engine engine(model);
  const auto& index = engine.index();
  auto is_state_name = [&](const std::string& name) {
    return index.is_state(name) || name == model.initial_name || name == model.final_name;
  };
  auto guard_atoms = index.guard_atoms();
  auto is_guard = [&](const std::string& name) {
    return std::find(guard_atoms.begin(), guard_atoms.end(), name) != guard_atoms.end();
  };

  Configuration config;
  Valuation valuation;
  EventSet events;
  for (const auto& term : scenario.given) {
    if (term.negated) {
      valuation[term.atom] = false;
    } else if (is_state_name(term.atom)) {
      ++config.active[index.is_state(term.atom) ? index.default_leaf(term.atom) : term.atom];
    } else {
      valuation[term.atom] = true;
    }
  }
  if (config.active.empty() || !is_legal(index, config)) {
    throw ReplayError("IllegalGiven", "GIVEN of '" + scenario.name + "' is not a legal configuration");
  }
  for (const auto& term : scenario.when) {
    if (term.negated) {
      valuation[term.atom] = false;
    } else if (is_guard(term.atom)) {
      valuation[term.atom] = true;
    } else {
      events.insert(term.atom);
    }
  }

  Verdict verdict;
  verdict.scenario = scenario.name;
  StepResult result;
  try {
    result = engine.step(config, events, valuation);
  } catch (const ReplayError& e) {
    verdict.mismatches.push_back({"a deterministic step", e.code() + ": " + e.what(), 0});
    return verdict;
  }
  if (result.fired.empty() && mode == EmitMode::PaperExact && complete_joins(model, index, config, events)) {
    try {
      result = engine.step(config, events, valuation);
    } catch (const ReplayError& e) {
      verdict.mismatches.push_back({"a deterministic step", e.code() + ": " + e.what(), 0});
      return verdict;
    }
  }
  if (result.fired.empty()) {
    verdict.mismatches.push_back({"a transition to fire", "nothing enabled", 0});
    return verdict;
  }

  std::vector<std::vector<std::string>> groups;
  std::vector<std::pair<std::string, std::size_t>> states;
  for (std::size_t k = 0; k < scenario.then.size(); ++k) {
    const auto& item = scenario.then[k];
    if (item.names.size() == 1 && (item.kind == ThenItem::Kind::StateTerm || is_state_name(item.names.front()))) {
      states.emplace_back(item.names.front(), k);
    } else {
      groups.push_back(item.names);
    }
  }
  std::vector<std::string> flat;
  for (const auto& g : groups) flat.insert(flat.end(), g.begin(), g.end());
  const auto& trace = result.trace;

  if (mode == EmitMode::Strict) {
    std::vector<bool> used(groups.size(), false);
    if (!matches_groups(groups, trace, 0, used)) {
      std::size_t n = std::max(flat.size(), trace.size());
      for (std::size_t p = 0; p < n; ++p) {
        std::string want = p < flat.size() ? flat[p] : "<none>";
        std::string got = p < trace.size() ? trace[p] : "<none>";
        if (want != got) verdict.mismatches.push_back({want, got, p});
      }
      if (verdict.mismatches.empty()) verdict.mismatches.push_back({joined(flat), joined(trace), 0});
    }
    std::vector<std::string> expected_states;
    for (const auto& [name, pos] : states) expected_states.push_back(name);
    auto observed = ordered_leaves(index, result.after);
    auto sorted_expected = expected_states;
    auto sorted_observed = observed;
    std::sort(sorted_expected.begin(), sorted_expected.end());
    std::sort(sorted_observed.begin(), sorted_observed.end());
    if (sorted_expected != sorted_observed) {
      verdict.mismatches.push_back({joined(expected_states), joined(observed), trace.size()});
    }
  } else {
    std::size_t pos = 0;
    for (const auto& want : flat) {
      while (pos < trace.size() && trace[pos] != want) ++pos;
      if (pos == trace.size()) {
        verdict.mismatches.push_back({want, joined(trace), pos});
        break;
      }
      ++pos;
    }
    for (const auto& [name, k] : states) {
      bool active = std::any_of(result.after.active.begin(), result.after.active.end(), [&](const auto& entry) {
        return entry.first == name || (index.is_state(entry.first) && index.is_descendant_or_self(entry.first, name));
      });
      if (!active) verdict.mismatches.push_back({name, joined(ordered_leaves(index, result.after)), k});
    }
  }
  verdict.passed = verdict.mismatches.empty();
  if (verdict.passed) verdict.fired = result.fired;
  return verdict;
}

bool SuiteReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

SuiteReport check_suite(const ProcessModel& model, const FeatureDoc& doc, EmitMode mode) {
  SuiteReport report;
  std::set<std::string> covered;
  for (const auto& scenario : doc.scenarios) {
    Verdict v;
    try {
      v = replay_scenario(model, scenario, mode);
    } catch (const ReplayError& e) {
      v.scenario = scenario.name;
      v.mismatches.push_back({"a legal GIVEN configuration", e.what(), 0});
    }
    if (v.passed) covered.insert(v.fired.begin(), v.fired.end());
    report.verdicts.push_back(std::move(v));
  }
  for (const auto& t : model.transitions) {
    if (covered.count(t.id) == 0) report.uncovered.push_back(t.id);
  }
  const auto total = model.transitions.size();
  report.coverage = total == 0 ? 1.0 : static_cast<double>(total - report.uncovered.size()) / total;
  return report;
}

std::string report_json(const SuiteReport& report, int indent) {
  nlohmann::ordered_json root;
  root["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : report.verdicts) {
    nlohmann::ordered_json entry;
    entry["scenario"] = v.scenario;
    entry["passed"] = v.passed;
    entry["mismatches"] = nlohmann::ordered_json::array();
    for (const auto& m : v.mismatches) {
      entry["mismatches"].push_back({{"expected", m.expected}, {"observed", m.observed}, {"position", m.position}});
    }
    entry["fired"] = v.fired;
    root["verdicts"].push_back(std::move(entry));
  }
  root["coverage"] = report.coverage;
  root["uncovered"] = report.uncovered;
  return root.dump(indent) + "\n";
}

// ---------------------------------------------------------------------------
// explore

namespace {

struct Explorer {
  const ProcessModel& model;
  Engine engine;
  int depth_bound;
  std::vector<ExploreTrace> out;

  void visit(const Configuration& config, ExploreTrace& path) {
    if (static_cast<int>(path.size()) == depth_bound) {
      if (!path.empty()) out.push_back(path);
      return;
    }
    std::vector<ExploreStep> choices;
    for (const auto& t : model.transitions) {
      SelectionPolicy policy{t.join == JoinKind::Xor || t.join == JoinKind::Multi, false};
      for (const auto& sel : firing_selections(t, policy)) {
        auto stimulus = stimulus_for(model, t, sel, true);
        if (!stimulus.realizable) continue;
        EventSet events(stimulus.events.begin(), stimulus.events.end());
        Valuation valuation;
        for (const auto& lit : stimulus.literals) valuation[lit.atom] = !lit.negated;
        StepResult r;
        try {
          r = engine.step(config, events, valuation);
        } catch (const ReplayError&) {
          continue;
        }
        if (r.fired.empty()) continue;
        bool seen = std::any_of(choices.begin(), choices.end(), [&](const ExploreStep& c) {
          return c.fired == r.fired && c.trace == r.trace && c.after == r.after;
        });
        if (seen) continue;
        choices.push_back({r.fired, stimulus.events, stimulus.literals, r.trace, r.after});
      }
    }
    if (choices.empty()) {
      if (!path.empty()) out.push_back(path);
      return;
    }
    for (auto& choice : choices) {
      Configuration next = choice.after;
      path.push_back(std::move(choice));
      visit(next, path);
      path.pop_back();
    }
  }
};

}  // namespace

std::vector<ExploreTrace> explore(const ProcessModel& model, int depth_bound) {
  if (depth_bound < 0 || depth_bound > kMaxExploreDepth) {
    throw ReplayError("DepthBound", "depth bound must be within 0.." + std::to_string(kMaxExploreDepth));
  }
  Explorer explorer{model, Engine(model), depth_bound, {}};
  ExploreTrace path;
  explorer.visit(initial_configuration(model), path);
  return std::move(explorer.out);
}

}  // namespace flowspec
