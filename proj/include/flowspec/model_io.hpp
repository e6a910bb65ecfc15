// Textual model formats: the .pml DSL, the XML subset, and DOT output.
#pragma once

#include <set>
#include <string>
#include <string_view>

#include "flowspec/model.hpp"

namespace flowspec {

/// Parses the .pml DSL. Throws SyntaxError (with span) or SemanticError.
ProcessModel parse_dsl(std::string_view text, const std::string& file = "<dsl>");

/// Parses a single `trans <id> { ... }` declaration. `known_states` lists the
/// state paths used to split comma-separated branch lists from action lists.
TransitionDecl parse_transition_decl(std::string_view text, const std::set<std::string>& known_states,
                                     const std::string& file = "<trans>");

/// One-line DSL form of a transition, accepted by parse_transition_decl.
std::string serialize_transition(const TransitionDecl& transition);

/// Deterministic DSL text; parse_dsl(serialize_dsl(m)) == m for valid models.
std::string serialize_dsl(const ProcessModel& model);

class XmlError : public SyntaxError {
 public:
  using SyntaxError::SyntaxError;
};

/// Parses the XML subset documented in docs/xml-format.md.
ProcessModel parse_xml(std::string_view text, const std::string& file = "<xml>");

std::string serialize_xml(const ProcessModel& model);

/// Graphviz digraph: one node per state or pseudostate, composite states drawn
/// as clusters, one edge per (input branch, output branch) pair.
std::string render_dot(const ProcessModel& model);

enum class ModelFormat { Dsl, Xml };

/// Reads a model file, picking the format from the extension unless given.
ProcessModel load_model(const std::string& path, std::optional<ModelFormat> format = std::nullopt);

std::string read_file(const std::string& path);

}  // namespace flowspec
