#include <sstream>

#include "flowspec/model_io.hpp"

namespace flowspec {

namespace {

std::string dot_quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string comma_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
  return out;
}

std::string state_label(const std::string& path, const StateNode& node) {
  std::string label = path;
  if (!node.entry_actions.empty()) label += "\\nentry / " + comma_list(node.entry_actions);
  if (!node.exit_actions.empty()) label += "\\nexit / " + comma_list(node.exit_actions);
  return "\"" + label + "\"";
}

void write_state(std::ostringstream& out, const StateNode& node, const std::string& prefix, int depth) {
  std::string indent(2 * depth, ' ');
  std::string path = qualified(prefix, node.name);
  if (!node.is_composite()) {
    out << indent << dot_quote(path) << " [label=" << state_label(path, node) << "];\n";
    return;
  }
  out << indent << "subgraph " << dot_quote("cluster_" + path) << " {\n";
  out << indent << "  label=" << dot_quote(path) << ";\n";
  out << indent << "  " << dot_quote(path) << " [label=" << state_label(path, node)
      << ", style=dashed];\n";
  for (const auto& child : node.children) write_state(out, child, path, depth + 1);
  out << indent << "}\n";
}

std::string edge_label(const TransitionDecl& t, const InBranch& in, const OutBranch& o) {
  std::vector<std::string> events;
  if (in.event) events.push_back(*in.event);
  if (t.shared_event) events.push_back(*t.shared_event);
  GuardExpr guard;
  if (t.shared_guard) guard.literals = t.shared_guard->literals;
  if (o.guard) guard.literals.insert(guard.literals.end(), o.guard->literals.begin(), o.guard->literals.end());
  std::vector<std::string> actions = in.actions;
  actions.insert(actions.end(), t.shared_actions.begin(), t.shared_actions.end());
  actions.insert(actions.end(), o.actions.begin(), o.actions.end());

  std::string label = comma_list(events);
  if (!guard.literals.empty()) label += (label.empty() ? "[" : " [") + guard.to_string() + "]";
  if (!actions.empty()) label += (label.empty() ? "/ " : " / ") + comma_list(actions);
  return label;
}

}  // namespace

std::string render_dot(const ProcessModel& model) {
  ModelIndex index(model);
  std::ostringstream out;
  out << "digraph process {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=box, style=rounded];\n";
  out << "  " << dot_quote(model.initial_name) << " [shape=circle, label=" << dot_quote(model.initial_name)
      << "];\n";
  for (const auto& node : model.states) write_state(out, node, "", 1);
  if (index.is_final_referenced()) {
    out << "  " << dot_quote(model.final_name) << " [shape=doublecircle, label="
        << dot_quote(model.final_name) << "];\n";
  }
  for (const auto& t : model.transitions) {
    for (const auto& in : t.inputs) {
      for (const auto& o : t.outputs) {
        out << "  " << dot_quote(in.source) << " -> " << dot_quote(o.target) << " [label="
            << dot_quote(edge_label(t, in, o)) << ", tooltip=" << dot_quote(t.id) << "];\n";
      }
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace flowspec
