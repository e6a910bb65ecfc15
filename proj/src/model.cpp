#include "flowspec/model.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace flowspec {

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_';
}

const std::vector<std::string>& empty_list() {
  static const std::vector<std::string> empty;
  return empty;
}

void push_unique(std::vector<std::string>& out, std::set<std::string>& seen,
                 const std::string& name) {
  if (seen.insert(name).second) out.push_back(name);
}

}  // namespace

bool is_simple_ident(std::string_view text) {
  return !text.empty() && std::all_of(text.begin(), text.end(), ident_char);
}

bool is_ident(std::string_view text) {
  if (text.empty() || text.front() == '.' || text.back() == '.') return false;
  char prev = 0;
  for (char c : text) {
    if (c == '.') {
      if (prev == '.') return false;
    } else if (!ident_char(c)) {
      return false;
    }
    prev = c;
  }
  return true;
}

bool GuardExpr::holds(const Valuation& valuation) const {
  for (const auto& lit : literals) {
    auto it = valuation.find(lit.atom);
    bool value = it != valuation.end() && it->second;
    if (value == lit.negated) return false;
  }
  return true;
}

std::string GuardExpr::to_string() const {
  std::string out;
  for (const auto& lit : literals) {
    if (!out.empty()) out += " and ";
    if (lit.negated) out += "not ";
    out += lit.atom;
  }
  return out;
}

std::string_view to_string(SplitKind kind) {
  switch (kind) {
    case SplitKind::None: return "none";
    case SplitKind::And: return "and";
    case SplitKind::Or: return "or";
  }
  return "none";
}

std::string_view to_string(JoinKind kind) {
  switch (kind) {
    case JoinKind::None: return "none";
    case JoinKind::And: return "and";
    case JoinKind::Xor: return "xor";
    case JoinKind::Or: return "or";
    case JoinKind::Multi: return "multi";
  }
  return "none";
}

std::optional<SplitKind> parse_split_kind(std::string_view text) {
  if (text == "none") return SplitKind::None;
  if (text == "and") return SplitKind::And;
  if (text == "or") return SplitKind::Or;
  return std::nullopt;
}

std::optional<JoinKind> parse_join_kind(std::string_view text) {
  if (text == "none") return JoinKind::None;
  if (text == "and") return JoinKind::And;
  if (text == "xor") return JoinKind::Xor;
  if (text == "or") return JoinKind::Or;
  if (text == "multi") return JoinKind::Multi;
  return std::nullopt;
}

namespace {
constexpr std::pair<PatternKind, std::string_view> kPatternNames[] = {
    {PatternKind::Sequence, "Sequence"},
    {PatternKind::ParallelSplit, "ParallelSplit"},
    {PatternKind::Synchronization, "Synchronization"},
    {PatternKind::ExclusiveChoice, "ExclusiveChoice"},
    {PatternKind::SimpleMerge, "SimpleMerge"},
    {PatternKind::MultipleChoice, "MultipleChoice"},
    {PatternKind::SynchronizeMerge, "SynchronizeMerge"},
    {PatternKind::MultipleMerge, "MultipleMerge"},
    {PatternKind::EntryExitCase, "EntryExitCase"},
    {PatternKind::EmbeddedStates, "EmbeddedStates"},
};
}  // namespace

std::string_view to_string(PatternKind kind) {
  for (const auto& [k, name] : kPatternNames) {
    if (k == kind) return name;
  }
  return "Sequence";
}

std::optional<PatternKind> parse_pattern_kind(std::string_view text) {
  for (const auto& [k, name] : kPatternNames) {
    if (name == text) return k;
  }
  return std::nullopt;
}

void normalize(TransitionDecl& transition) {
  if (transition.inputs.size() != 1) return;
  auto& in = transition.inputs.front();
  if (!in.event && transition.shared_event) {
    in.event = std::move(transition.shared_event);
    transition.shared_event.reset();
  }
  if (in.actions.empty() && !transition.shared_actions.empty()) {
    in.actions = std::move(transition.shared_actions);
    transition.shared_actions.clear();
  }
}

bool isomorphic(const ProcessModel& a, const ProcessModel& b) {
  if (a.transitions.size() != b.transitions.size()) return false;
  ProcessModel renamed = b;
  for (std::size_t i = 0; i < renamed.transitions.size(); ++i) {
    renamed.transitions[i].id = a.transitions[i].id;
  }
  return renamed == a;
}

std::string qualified(const std::string& parent_path, const std::string& name) {
  return parent_path.empty() ? name : parent_path + "." + name;
}

std::string last_segment(std::string_view path) {
  auto dot = path.rfind('.');
  return std::string(dot == std::string_view::npos ? path : path.substr(dot + 1));
}

// ---------------------------------------------------------------------------
// ModelIndex

ModelIndex::ModelIndex(const ProcessModel& model) : model_(&model) {
  for (const auto& node : model.states) add(node, "");
  for (const auto& t : model.transitions) {
    for (const auto& out : t.outputs) {
      if (out.target == model.final_name) final_referenced_ = true;
    }
  }
}

void ModelIndex::add(const StateNode& node, const std::string& prefix) {
  std::string path = qualified(prefix, node.name);
  order_.push_back(path);
  nodes_.emplace(path, &node);
  if (!prefix.empty()) parents_.emplace(path, prefix);
  for (const auto& child : node.children) add(child, path);
}

bool ModelIndex::is_state(std::string_view path) const { return nodes_.count(path) > 0; }

bool ModelIndex::is_pseudostate(std::string_view path) const {
  return path == model_->initial_name || (final_referenced_ && path == model_->final_name);
}

const StateNode* ModelIndex::node(std::string_view path) const {
  auto it = nodes_.find(path);
  return it == nodes_.end() ? nullptr : it->second;
}

std::optional<std::string> ModelIndex::parent(std::string_view path) const {
  auto it = parents_.find(path);
  if (it == parents_.end()) return std::nullopt;
  return it->second;
}

bool ModelIndex::is_composite(std::string_view path) const {
  const auto* n = node(path);
  return n != nullptr && n->is_composite();
}

std::vector<std::string> ModelIndex::ancestors_inclusive(std::string_view path) const {
  std::vector<std::string> out{std::string(path)};
  auto p = parent(path);
  while (p) {
    out.push_back(*p);
    p = parent(*p);
  }
  return out;
}

bool ModelIndex::is_descendant_or_self(std::string_view path, std::string_view ancestor) const {
  for (const auto& a : ancestors_inclusive(path)) {
    if (a == ancestor) return true;
  }
  return false;
}

std::string ModelIndex::default_leaf(std::string_view path) const {
  return default_entry_chain(path).back();
}

std::vector<std::string> ModelIndex::default_entry_chain(std::string_view path) const {
  std::vector<std::string> chain{std::string(path)};
  const auto* n = node(path);
  while (n != nullptr && n->is_composite() && n->initial_child) {
    chain.push_back(qualified(chain.back(), *n->initial_child));
    n = node(chain.back());
  }
  return chain;
}

std::optional<std::string> ModelIndex::common_ancestor(
    const std::vector<std::string>& paths) const {
  if (paths.empty()) return std::nullopt;
  auto candidates = ancestors_inclusive(paths.front());
  candidates.erase(candidates.begin());
  for (const auto& candidate : candidates) {
    bool all = std::all_of(paths.begin(), paths.end(), [&](const std::string& p) {
      return p != candidate && is_descendant_or_self(p, candidate);
    });
    if (all) return candidate;
  }
  return std::nullopt;
}

std::size_t ModelIndex::order_of(std::string_view path) const {
  if (path == model_->initial_name) return 0;
  auto it = std::find(order_.begin(), order_.end(), path);
  if (it != order_.end()) return 1 + static_cast<std::size_t>(it - order_.begin());
  return order_.size() + 1;
}

const std::vector<std::string>& ModelIndex::entry_actions(std::string_view path) const {
  const auto* n = node(path);
  return n == nullptr ? empty_list() : n->entry_actions;
}

const std::vector<std::string>& ModelIndex::exit_actions(std::string_view path) const {
  const auto* n = node(path);
  return n == nullptr ? empty_list() : n->exit_actions;
}

std::vector<std::string> ModelIndex::event_names() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& t : model_->transitions) {
    for (const auto& in : t.inputs) {
      if (in.event) push_unique(out, seen, *in.event);
    }
    if (t.shared_event) push_unique(out, seen, *t.shared_event);
  }
  return out;
}

std::vector<std::string> ModelIndex::guard_atoms() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  auto add_guard = [&](const std::optional<GuardExpr>& g) {
    if (!g) return;
    for (const auto& lit : g->literals) push_unique(out, seen, lit.atom);
  };
  for (const auto& t : model_->transitions) {
    add_guard(t.shared_guard);
    for (const auto& out_branch : t.outputs) add_guard(out_branch.guard);
  }
  return out;
}

std::vector<std::string> ModelIndex::action_names() const {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& path : order_) {
    for (const auto& a : entry_actions(path)) push_unique(out, seen, a);
    for (const auto& a : exit_actions(path)) push_unique(out, seen, a);
  }
  for (const auto& t : model_->transitions) {
    for (const auto& in : t.inputs) {
      for (const auto& a : in.actions) push_unique(out, seen, a);
    }
    for (const auto& a : t.shared_actions) push_unique(out, seen, a);
    for (const auto& o : t.outputs) {
      for (const auto& a : o.actions) push_unique(out, seen, a);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// validate

namespace {

class Validator {
 public:
  explicit Validator(const ProcessModel& model) : model_(model), index_(model) {}

  std::vector<Diagnostic> run() {
    check_pseudostates();
    std::set<std::string> paths;
    for (const auto& node : model_.states) check_state(node, "", paths);
    check_sibling_names(model_.states, "<root>");
    std::set<std::string> ids;
    for (const auto& t : model_.transitions) check_transition(t, ids);
    check_namespaces();
    return std::move(out_);
  }

 private:
  void report(std::string code, std::string location, std::string message) {
    out_.push_back({std::move(code), Severity::Error, std::move(location), std::move(message)});
  }

  void check_pseudostates() {
    if (!is_simple_ident(model_.initial_name)) {
      report("InvalidIdent", "initial", "initial name '" + model_.initial_name + "' is not an identifier");
    }
    if (!is_simple_ident(model_.final_name)) {
      report("InvalidIdent", "final", "final name '" + model_.final_name + "' is not an identifier");
    }
    if (model_.initial_name == model_.final_name) {
      report("PseudostateClash", "final", "initial and final pseudostates share the name '" +
                                              model_.final_name + "'");
    }
    for (const auto& node : model_.states) {
      if (node.name == model_.initial_name || node.name == model_.final_name) {
        report("PseudostateClash", node.name, "state reuses a pseudostate name");
      }
    }
  }

  void check_sibling_names(const std::vector<StateNode>& siblings, const std::string& where) {
    std::set<std::string> seen;
    for (const auto& s : siblings) {
      if (!seen.insert(s.name).second) {
        report("DuplicateStateName", where == "<root>" ? s.name : qualified(where, s.name),
               "state '" + s.name + "' declared twice");
      }
    }
  }

  void check_state(const StateNode& node, const std::string& prefix, std::set<std::string>& paths) {
    std::string path = qualified(prefix, node.name);
    if (!is_simple_ident(node.name)) {
      report("InvalidIdent", path, "state name '" + node.name + "' is not a local identifier");
    }
    paths.insert(path);
    for (const auto* list : {&node.entry_actions, &node.exit_actions}) {
      for (const auto& a : *list) {
        if (!is_simple_ident(a)) report("InvalidIdent", path, "action '" + a + "' is not an identifier");
      }
    }
    if (node.is_composite()) {
      if (!node.initial_child) {
        report("MissingInitialChild", path, "composite state has no initial child");
      } else {
        bool found = std::any_of(node.children.begin(), node.children.end(),
                                 [&](const StateNode& c) { return c.name == *node.initial_child; });
        if (!found) {
          report("BadInitialChild", path, "initial child '" + *node.initial_child + "' is not a child");
        }
      }
      check_sibling_names(node.children, path);
      for (const auto& child : node.children) check_state(child, path, paths);
    } else if (node.initial_child) {
      report("UnexpectedInitialChild", path, "simple state declares an initial child");
    }
  }

  bool endpoint_known(const std::string& path) const {
    return index_.is_state(path) || path == model_.initial_name || path == model_.final_name;
  }

  void check_guard(const std::optional<GuardExpr>& guard, const std::string& where) {
    if (!guard) return;
    if (guard->literals.empty()) {
      report("EmptyGuard", where, "guard has no literals");
      return;
    }
    std::set<std::string> atoms;
    for (const auto& lit : guard->literals) {
      if (!is_simple_ident(lit.atom)) report("InvalidIdent", where, "guard atom '" + lit.atom + "'");
      if (!atoms.insert(lit.atom).second) {
        report("DuplicateGuardAtom", where, "atom '" + lit.atom + "' repeated in one guard");
      }
    }
  }

  void check_disjoint(const std::vector<std::string>& paths, const std::string& where,
                      const char* code) {
    for (std::size_t i = 0; i < paths.size(); ++i) {
      for (std::size_t j = i + 1; j < paths.size(); ++j) {
        if (!index_.is_state(paths[i]) || !index_.is_state(paths[j])) continue;
        if (paths[i] == paths[j] || index_.common_ancestor({paths[i], paths[j]}) ||
            index_.is_descendant_or_self(paths[i], paths[j]) ||
            index_.is_descendant_or_self(paths[j], paths[i])) {
          report(code, where, "'" + paths[i] + "' and '" + paths[j] +
                                  "' cannot be active together");
        }
      }
    }
  }

  void check_transition(const TransitionDecl& t, std::set<std::string>& ids) {
    const std::string& where = t.id;
    if (!is_simple_ident(t.id)) report("InvalidIdent", where, "transition id '" + t.id + "'");
    if (!ids.insert(t.id).second) report("DuplicateTransitionId", where, "transition id reused");
    if (t.inputs.empty()) report("EmptyInputs", where, "transition has no input branch");
    if (t.outputs.empty()) report("EmptyOutputs", where, "transition has no output branch");

    for (const auto& in : t.inputs) {
      if (!endpoint_known(in.source)) {
        report("UnresolvedEndpoint", where, "source '" + in.source + "' is not declared");
      } else if (in.source == model_.final_name) {
        report("FinalHasOutgoing", where, "final pseudostate cannot be a source");
      }
      if (in.event && !is_simple_ident(*in.event)) report("InvalidIdent", where, "event '" + *in.event + "'");
    }
    for (const auto& out : t.outputs) {
      if (!endpoint_known(out.target)) {
        report("UnresolvedEndpoint", where, "target '" + out.target + "' is not declared");
      } else if (out.target == model_.initial_name) {
        report("InitialHasIncoming", where, "initial pseudostate cannot be a target");
      }
      check_guard(out.guard, where);
    }
    check_guard(t.shared_guard, where);

    if (t.inputs.size() > 1 && t.join == JoinKind::None) {
      report("JoinRequired", where, "several input branches need a join kind");
    }
    if (t.inputs.size() < 2 && t.join != JoinKind::None) {
      report("JoinArity", where, "a join needs at least two input branches");
    }
    if (t.outputs.size() > 1 && t.split == SplitKind::None) {
      report("SplitRequired", where, "several output branches need a split kind");
    }
    if (t.split == SplitKind::And && t.outputs.size() < 2) {
      report("SplitArity", where, "an and-split needs at least two output branches");
    }
    if (t.split == SplitKind::Or) {
      bool guarded = std::any_of(t.outputs.begin(), t.outputs.end(),
                                 [](const OutBranch& o) { return o.guard.has_value(); });
      if (!guarded) report("OrSplitWithoutGuard", where, "or-split needs a guarded output branch");
    }
    for (const auto& out : t.outputs) {
      if (t.split == SplitKind::And && out.guard) {
        report("AndSplitGuard", where, "and-split output branches cannot be guarded");
      }
      if (out.mandatory && t.split != SplitKind::Or) {
        report("MandatoryOutsideOrSplit", where, "only or-split branches can be mandatory");
      }
      if (out.mandatory && out.guard) {
        report("MandatoryGuarded", where, "a mandatory branch cannot carry a guard");
      }
    }
    check_triggers(t);

    std::vector<std::string> sources, targets;
    for (const auto& in : t.inputs) sources.push_back(in.source);
    for (const auto& out : t.outputs) targets.push_back(out.target);
    if (t.join == JoinKind::And || t.join == JoinKind::Or) {
      check_disjoint(sources, where, "ParallelSourcesConflict");
    }
    if (t.split != SplitKind::None) check_disjoint(targets, where, "ParallelTargetsConflict");
  }

  // Every way the transition can fire must be triggered by an event or a guard.
  void check_triggers(const TransitionDecl& t) {
    bool any_guard = t.shared_guard.has_value() || t.shared_event.has_value() ||
                     std::any_of(t.outputs.begin(), t.outputs.end(),
                                 [](const OutBranch& o) { return o.guard.has_value(); });
    if (any_guard) return;
    bool per_input = t.join == JoinKind::Xor || t.join == JoinKind::Multi;
    bool ok = per_input ? std::all_of(t.inputs.begin(), t.inputs.end(),
                                      [](const InBranch& in) { return in.event.has_value(); })
                        : std::any_of(t.inputs.begin(), t.inputs.end(),
                                      [](const InBranch& in) { return in.event.has_value(); });
    if (!ok) report("MissingTrigger", t.id, "transition can fire without any event or guard");
  }

  void check_namespaces() {
    std::map<std::string, std::string> owner;
    auto claim = [&](const std::string& name, const std::string& space) {
      auto [it, inserted] = owner.emplace(name, space);
      if (!inserted && it->second != space) {
        report("NamespaceOverlap", name, "'" + name + "' used as both " + it->second + " and " + space);
      }
    };
    claim(model_.initial_name, "state");
    claim(model_.final_name, "state");
    for (const auto& p : index_.state_paths()) claim(p, "state");
    for (const auto& e : index_.event_names()) claim(e, "event");
    for (const auto& g : index_.guard_atoms()) claim(g, "guard");
    for (const auto& a : index_.action_names()) claim(a, "action");
  }

  const ProcessModel& model_;
  ModelIndex index_;
  std::vector<Diagnostic> out_;
};

}  // namespace

std::vector<Diagnostic> validate(const ProcessModel& model) { return Validator(model).run(); }

StateRef resolve(const ProcessModel& model, std::string_view path) {
  if (path == model.initial_name) return {StateRole::Initial, std::string(path), nullptr};
  const std::vector<StateNode>* level = &model.states;
  const StateNode* found = nullptr;
  std::size_t start = 0;
  while (start <= path.size()) {
    auto dot = path.find('.', start);
    auto segment = path.substr(start, dot == std::string_view::npos ? dot : dot - start);
    found = nullptr;
    for (const auto& node : *level) {
      if (node.name == segment) found = &node;
    }
    if (found == nullptr) break;
    if (dot == std::string_view::npos) return {StateRole::State, std::string(path), found};
    level = &found->children;
    start = dot + 1;
  }
  if (path == model.final_name) return {StateRole::Final, std::string(path), nullptr};
  throw UnknownState(std::string(path));
}

int Configuration::count(std::string_view path) const {
  auto it = active.find(std::string(path));
  return it == active.end() ? 0 : it->second;
}

Configuration initial_configuration(const ProcessModel& model) {
  Configuration config;
  config.active[model.initial_name] = 1;
  return config;
}

std::vector<std::string> ordered_leaves(const ModelIndex& index, const Configuration& config) {
  std::vector<std::pair<std::size_t, std::string>> keyed;
  for (const auto& [path, count] : config.active) {
    for (int i = 0; i < count; ++i) keyed.emplace_back(index.order_of(path), path);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::string> out;
  for (auto& [order, path] : keyed) out.push_back(std::move(path));
  return out;
}

}  // namespace flowspec
