// Given-When-Then feature documents: emission from models, text formatting,
// and parsing.
#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "flowspec/model.hpp"

namespace flowspec {

enum class TermRole { State, Event, Guard, Action };

std::string_view to_string(TermRole role);

struct Term {
  std::string atom;
  bool negated = false;
  std::optional<TermRole> role;  // unset when the parser cannot tell

  bool operator==(const Term&) const = default;
};

/// THEN element: an ordered action sequence ("a1; a2") or a state term.
struct ThenItem {
  enum class Kind { ActionSeq, StateTerm };
  Kind kind = Kind::ActionSeq;
  std::vector<std::string> names;  // exactly one name for StateTerm

  static ThenItem actions(std::vector<std::string> names) { return {Kind::ActionSeq, std::move(names)}; }
  static ThenItem state(std::string name) { return {Kind::StateTerm, {std::move(name)}}; }

  bool operator==(const ThenItem&) const = default;
};

struct Scenario {
  std::string name;
  std::vector<Term> given;
  std::vector<Term> when;
  std::vector<ThenItem> then;

  bool operator==(const Scenario&) const = default;
};

/// Role declarations and structure carried as leading `#` comments.
struct InferenceHints {
  std::vector<std::string> states;
  std::vector<std::string> events;
  std::vector<std::string> guards;
  std::vector<std::string> actions;
  std::optional<std::string> initial_name;
  std::optional<std::string> final_name;
  std::vector<std::pair<std::string, std::vector<std::string>>> entry_actions;
  std::vector<std::pair<std::string, std::vector<std::string>>> exit_actions;
  std::vector<std::pair<std::string, std::string>> initial_children;  // composite -> child path
  std::vector<TransitionDecl> transitions;

  std::optional<TermRole> role_of(std::string_view atom) const;
  bool operator==(const InferenceHints&) const = default;
};

struct FeatureDoc {
  std::string title;
  std::string role;
  std::string feature;
  std::string benefit;
  InferenceHints hints;
  std::vector<Scenario> scenarios;

  bool operator==(const FeatureDoc&) const = default;
};

enum class EmitMode { PaperExact, Strict };
enum class Style { PaperUpper, Gherkin };

/// Scenarios per transition in declaration order. Strict documents also carry
/// the full declarations as hints so reverse inference is exact.
FeatureDoc emit_feature(const ProcessModel& model, EmitMode mode);

inline constexpr std::size_t kMaxChoiceBranches = 10;

/// All nonempty subsets of {0..n-1}, by size then branch order.
/// Throws Error("TooManyChoiceBranches") when n is 0 or above the limit.
std::vector<std::vector<std::size_t>> enumerate_choice_subsets(std::size_t branch_count);

std::string format_feature(const FeatureDoc& doc, Style style);

/// Text of one clause as it appears after its keyword.
std::string clause_text(const std::vector<Term>& terms);
std::string clause_text(const std::vector<ThenItem>& items);

/// Parses either casing style. Throws SyntaxError with codes EmptyDocument,
/// MalformedClause, UnknownKeyword, MalformedHint.
FeatureDoc parse_feature(std::string_view text, const std::string& file = "<feature>");

}  // namespace flowspec
