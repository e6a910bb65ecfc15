// Statechart intermediate representation shared by every flowspec module.
#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flowspec/diagnostics.hpp"

namespace flowspec {

/// True when `text` is a well-formed identifier: letters, digits and
/// underscores, with single dots allowed as hierarchy separators.
bool is_ident(std::string_view text);

/// Same as is_ident but without dots (local state names, events, ...).
bool is_simple_ident(std::string_view text);

struct GuardLiteral {
  std::string atom;
  bool negated = false;

  bool operator==(const GuardLiteral&) const = default;
};

using Valuation = std::map<std::string, bool>;

/// Conjunction of possibly negated atoms.
struct GuardExpr {
  std::vector<GuardLiteral> literals;

  /// Unmentioned atoms evaluate to false.
  bool holds(const Valuation& valuation) const;
  std::string to_string() const;

  bool operator==(const GuardExpr&) const = default;
};

struct StateNode {
  std::string name;  // local name; qualified path is built from ancestors
  std::vector<std::string> entry_actions;
  std::vector<std::string> exit_actions;
  std::vector<StateNode> children;
  std::optional<std::string> initial_child;  // local name of a child

  bool is_composite() const { return !children.empty(); }
  bool operator==(const StateNode&) const = default;
};

enum class SplitKind { None, And, Or };
enum class JoinKind { None, And, Xor, Or, Multi };

std::string_view to_string(SplitKind kind);
std::string_view to_string(JoinKind kind);
std::optional<SplitKind> parse_split_kind(std::string_view text);
std::optional<JoinKind> parse_join_kind(std::string_view text);

struct InBranch {
  std::string source;
  std::optional<std::string> event;
  std::vector<std::string> actions;

  bool operator==(const InBranch&) const = default;
};

struct OutBranch {
  std::string target;
  std::optional<GuardExpr> guard;
  std::vector<std::string> actions;
  bool mandatory = false;

  bool operator==(const OutBranch&) const = default;
};

struct TransitionDecl {
  std::string id;
  std::vector<InBranch> inputs;
  SplitKind split = SplitKind::None;
  JoinKind join = JoinKind::None;
  std::optional<std::string> shared_event;
  std::optional<GuardExpr> shared_guard;
  std::vector<std::string> shared_actions;
  std::vector<OutBranch> outputs;

  bool operator==(const TransitionDecl&) const = default;
};

/// Folds shared event/actions of a single-input transition into its input
/// branch when that branch has none. Both forms fire identically; the folded
/// one is the form every parser and generator produces.
void normalize(TransitionDecl& transition);

struct ProcessModel {
  std::string title;
  std::string role;
  std::string feature;
  std::string benefit;
  std::string initial_name = "alpha";
  std::string final_name = "Beta";
  std::vector<StateNode> states;
  std::vector<TransitionDecl> transitions;

  bool operator==(const ProcessModel&) const = default;
};

/// Equal up to a renaming of transition ids (declaration order kept).
bool isomorphic(const ProcessModel& a, const ProcessModel& b);

enum class PatternKind {
  Sequence,
  ParallelSplit,
  Synchronization,
  ExclusiveChoice,
  SimpleMerge,
  MultipleChoice,
  SynchronizeMerge,
  MultipleMerge,
  EntryExitCase,
  EmbeddedStates,
};

std::string_view to_string(PatternKind kind);
std::optional<PatternKind> parse_pattern_kind(std::string_view text);

/// Thrown by resolve() for paths that name nothing.
class UnknownState : public Error {
 public:
  explicit UnknownState(const std::string& path)
      : Error("UnknownState", "unknown state '" + path + "'") {}
};

enum class StateRole { State, Initial, Final };

struct StateRef {
  StateRole role = StateRole::State;
  std::string path;
  const StateNode* node = nullptr;  // null for pseudostates
};

/// Flattened view of the state forest. Holds pointers into the model, which
/// must outlive the index.
class ModelIndex {
 public:
  explicit ModelIndex(const ProcessModel& model);

  const ProcessModel& model() const { return *model_; }

  /// Qualified state paths in pre-order (declaration order), no pseudostates.
  const std::vector<std::string>& state_paths() const { return order_; }

  bool is_state(std::string_view path) const;
  bool is_pseudostate(std::string_view path) const;
  bool is_final_referenced() const { return final_referenced_; }
  /// States plus the initial pseudostate and, when targeted, the final one.
  bool is_node(std::string_view path) const {
    return is_state(path) || is_pseudostate(path);
  }

  const StateNode* node(std::string_view path) const;
  std::optional<std::string> parent(std::string_view path) const;
  bool is_composite(std::string_view path) const;
  /// `path` itself followed by its ancestors, innermost first.
  std::vector<std::string> ancestors_inclusive(std::string_view path) const;
  bool is_descendant_or_self(std::string_view path, std::string_view ancestor) const;
  /// Leaf reached by following initial children from `path`.
  std::string default_leaf(std::string_view path) const;
  /// States entered, outermost first, when landing on `path` from outside it:
  /// `path` and its initial-child chain.
  std::vector<std::string> default_entry_chain(std::string_view path) const;
  /// Deepest state that is a proper ancestor of every given path, if any.
  std::optional<std::string> common_ancestor(const std::vector<std::string>& paths) const;
  /// Position in pre-order; pseudostates sort first (initial) and last (final).
  std::size_t order_of(std::string_view path) const;

  const std::vector<std::string>& entry_actions(std::string_view path) const;
  const std::vector<std::string>& exit_actions(std::string_view path) const;

  std::vector<std::string> event_names() const;
  std::vector<std::string> guard_atoms() const;
  std::vector<std::string> action_names() const;

 private:
  void add(const StateNode& node, const std::string& prefix);

  const ProcessModel* model_;
  std::vector<std::string> order_;
  std::map<std::string, const StateNode*, std::less<>> nodes_;
  std::map<std::string, std::string, std::less<>> parents_;
  bool final_referenced_ = false;
};

std::string qualified(const std::string& parent_path, const std::string& name);
std::string last_segment(std::string_view path);

/// Every structural invariant violation, in a stable order.
std::vector<Diagnostic> validate(const ProcessModel& model);

StateRef resolve(const ProcessModel& model, std::string_view path);

/// Multiset of active leaf paths plus the or-join activation records left by
/// fired or-splits.
struct Configuration {
  std::map<std::string, int> active;
  std::map<std::string, std::vector<std::size_t>> or_expect;  // join id -> input indices

  int count(std::string_view path) const;
  bool operator==(const Configuration&) const = default;
};

Configuration initial_configuration(const ProcessModel& model);

/// Leaves ordered by model pre-order, repeated by multiplicity.
std::vector<std::string> ordered_leaves(const ModelIndex& index, const Configuration& config);

}  // namespace flowspec
