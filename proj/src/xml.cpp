#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "flowspec/model_io.hpp"

namespace flowspec {

namespace pt = boost::property_tree;

namespace {

class XmlReader {
 public:
  explicit XmlReader(std::string file) : file_(std::move(file)) {}

  ProcessModel read(std::string_view text) {
    pt::ptree doc;
    std::istringstream in{std::string(text)};
    try {
      pt::read_xml(in, doc, pt::xml_parser::trim_whitespace | pt::xml_parser::no_comments);
    } catch (const pt::xml_parser_error& e) {
      throw XmlError("MalformedXml", e.message(), {file_, static_cast<int>(std::max<unsigned long>(e.line(), 1)), 1});
    }
    const pt::ptree* root = nullptr;
    for (const auto& [tag, child] : doc) {
      if (tag == "process") {
        if (root != nullptr) fail("MalformedXml", "more than one <process> element", "process");
        root = &child;
      } else {
        fail("UnknownElement", "unexpected top-level element <" + tag + ">", tag);
      }
    }
    if (root == nullptr) fail("MissingProcessHeader", "no <process> element", "document");

    ProcessModel model;
    check_attrs(*root, "process", {"name", "role", "feature", "benefit"});
    model.title = attr(*root, "name").value_or("");
    model.role = attr(*root, "role").value_or("");
    model.feature = attr(*root, "feature").value_or("");
    model.benefit = attr(*root, "benefit").value_or("");
    for (const auto& [tag, child] : *root) {
      if (tag == "<xmlattr>") continue;
      if (tag == "initial") {
        check_attrs(child, "initial", {"name"});
        model.initial_name = required(child, "name", "initial");
      } else if (tag == "final") {
        check_attrs(child, "final", {"name"});
        model.final_name = required(child, "name", "final");
      } else if (tag == "state") {
        model.states.push_back(read_state(child, ""));
      } else if (tag == "trans") {
        model.transitions.push_back(read_transition(child));
      } else {
        fail("UnknownElement", "unexpected element <" + tag + "> in <process>", "process");
      }
    }
    return model;
  }

 private:
  [[noreturn]] void fail(const std::string& code, const std::string& message, const std::string& where) {
    throw XmlError(code, message + " (in " + where + ")", {file_, 1, 1});
  }

  static std::optional<std::string> attr(const pt::ptree& node, const std::string& name) {
    auto v = node.get_optional<std::string>("<xmlattr>." + name);
    if (!v) return std::nullopt;
    return *v;
  }

  std::string required(const pt::ptree& node, const std::string& name, const std::string& where) {
    auto v = attr(node, name);
    if (!v) fail("MissingAttribute", "<" + where + "> requires attribute '" + name + "'", where);
    return *v;
  }

  void check_attrs(const pt::ptree& node, const std::string& where,
                   std::initializer_list<std::string_view> allowed) {
    auto attrs = node.get_child_optional("<xmlattr>");
    if (!attrs) return;
    for (const auto& [name, value] : *attrs) {
      if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
        fail("UnknownAttribute", "<" + where + "> does not take attribute '" + name + "'", where);
      }
    }
  }

  void check_leaf(const pt::ptree& node, const std::string& where) {
    for (const auto& [tag, child] : node) {
      if (tag != "<xmlattr>") fail("UnknownElement", "<" + where + "> cannot contain <" + tag + ">", where);
    }
  }

  static std::vector<std::string> words(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string w;
    while (in >> w) out.push_back(w);
    return out;
  }

  GuardExpr guard(const std::string& text, const std::string& where) {
    auto tokens = words(text);
    GuardExpr g;
    std::size_t i = 0;
    while (i < tokens.size()) {
      GuardLiteral lit;
      if (tokens[i] == "not") {
        lit.negated = true;
        ++i;
      }
      if (i >= tokens.size() || tokens[i] == "and" || tokens[i] == "not") {
        fail("BadCondition", "malformed cond '" + text + "'", where);
      }
      lit.atom = tokens[i++];
      g.literals.push_back(std::move(lit));
      if (i < tokens.size()) {
        if (tokens[i] != "and") fail("BadCondition", "malformed cond '" + text + "'", where);
        if (++i == tokens.size()) fail("BadCondition", "malformed cond '" + text + "'", where);
      }
    }
    if (g.literals.empty()) fail("BadCondition", "empty cond", where);
    return g;
  }

  std::string local(const std::string& name, const std::string& prefix, const std::string& where) {
    if (name.find('.') == std::string::npos) return name;
    if (!prefix.empty() && name.rfind(prefix + ".", 0) == 0) return name.substr(prefix.size() + 1);
    fail("DottedNameMismatch", "'" + name + "' does not match its nesting", where);
  }

  StateNode read_state(const pt::ptree& node, const std::string& prefix) {
    check_attrs(node, "state", {"name"});
    StateNode state;
    state.name = local(required(node, "name", "state"), prefix, "state");
    std::string path = qualified(prefix, state.name);
    for (const auto& [tag, child] : node) {
      if (tag == "<xmlattr>") continue;
      if (tag == "onentry" || tag == "onexit") {
        check_attrs(child, tag, {"actions"});
        check_leaf(child, tag);
        auto list = words(required(child, "actions", tag));
        auto& dest = tag == "onentry" ? state.entry_actions : state.exit_actions;
        dest.insert(dest.end(), list.begin(), list.end());
      } else if (tag == "initial") {
        check_attrs(child, "initial", {"target"});
        check_leaf(child, tag);
        state.initial_child = local(required(child, "target", "initial"), path, "initial");
      } else if (tag == "state") {
        state.children.push_back(read_state(child, path));
      } else {
        fail("UnknownElement", "unexpected element <" + tag + "> in state '" + path + "'", path);
      }
    }
    return state;
  }

  TransitionDecl read_transition(const pt::ptree& node) {
    check_attrs(node, "trans", {"id", "join", "split", "event", "cond", "actions"});
    TransitionDecl t;
    t.id = required(node, "id", "trans");
    std::string where = "trans " + t.id;
    if (auto j = attr(node, "join")) {
      auto kind = parse_join_kind(*j);
      if (!kind) fail("UnknownJoinKind", "join kind '" + *j + "'", where);
      t.join = *kind;
    }
    if (auto s = attr(node, "split")) {
      auto kind = parse_split_kind(*s);
      if (!kind) fail("UnknownSplitKind", "split kind '" + *s + "'", where);
      t.split = *kind;
    }
    t.shared_event = attr(node, "event");
    if (auto c = attr(node, "cond")) t.shared_guard = guard(*c, where);
    if (auto a = attr(node, "actions")) t.shared_actions = words(*a);
    for (const auto& [tag, child] : node) {
      if (tag == "<xmlattr>") continue;
      check_leaf(child, tag);
      if (tag == "in") {
        check_attrs(child, "in", {"source", "event", "actions"});
        InBranch in;
        in.source = required(child, "source", "in");
        in.event = attr(child, "event");
        if (auto a = attr(child, "actions")) in.actions = words(*a);
        t.inputs.push_back(std::move(in));
      } else if (tag == "out") {
        check_attrs(child, "out", {"target", "cond", "actions", "mandatory"});
        OutBranch out;
        out.target = required(child, "target", "out");
        if (auto c = attr(child, "cond")) out.guard = guard(*c, where);
        if (auto a = attr(child, "actions")) out.actions = words(*a);
        if (auto m = attr(child, "mandatory")) {
          if (*m != "true" && *m != "false") fail("BadAttribute", "mandatory must be true or false", where);
          out.mandatory = *m == "true";
        }
        t.outputs.push_back(std::move(out));
      } else {
        fail("UnknownElement", "unexpected element <" + tag + "> in " + where, where);
      }
    }
    normalize(t);
    return t;
  }

  std::string file_;
};

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string spaced(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& s : items) out += (out.empty() ? "" : " ") + s;
  return out;
}

void write_state(std::ostringstream& out, const StateNode& node, const std::string& prefix, int depth) {
  std::string indent(2 * depth, ' ');
  std::string path = qualified(prefix, node.name);
  bool leaf = node.entry_actions.empty() && node.exit_actions.empty() && !node.is_composite();
  out << indent << "<state name=\"" << escape(path) << "\"" << (leaf ? "/>\n" : ">\n");
  if (leaf) return;
  if (!node.entry_actions.empty()) out << indent << "  <onentry actions=\"" << spaced(node.entry_actions) << "\"/>\n";
  if (!node.exit_actions.empty()) out << indent << "  <onexit actions=\"" << spaced(node.exit_actions) << "\"/>\n";
  if (node.initial_child) out << indent << "  <initial target=\"" << qualified(path, *node.initial_child) << "\"/>\n";
  for (const auto& child : node.children) write_state(out, child, path, depth + 1);
  out << indent << "</state>\n";
}

}  // namespace

ProcessModel parse_xml(std::string_view text, const std::string& file) {
  ProcessModel model = XmlReader(file).read(text);
  auto diagnostics = validate(model);
  if (!diagnostics.empty()) throw SemanticError(std::move(diagnostics));
  return model;
}

std::string serialize_xml(const ProcessModel& model) {
  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<process name=\"" << escape(model.title) << "\"";
  if (!model.role.empty()) out << " role=\"" << escape(model.role) << "\"";
  if (!model.feature.empty()) out << " feature=\"" << escape(model.feature) << "\"";
  if (!model.benefit.empty()) out << " benefit=\"" << escape(model.benefit) << "\"";
  out << ">\n";
  if (model.initial_name != "alpha") out << "  <initial name=\"" << model.initial_name << "\"/>\n";
  if (model.final_name != "Beta") out << "  <final name=\"" << model.final_name << "\"/>\n";
  for (const auto& node : model.states) write_state(out, node, "", 1);
  for (const auto& t : model.transitions) {
    out << "  <trans id=\"" << t.id << "\"";
    if (t.join != JoinKind::None) out << " join=\"" << to_string(t.join) << "\"";
    if (t.split != SplitKind::None) out << " split=\"" << to_string(t.split) << "\"";
    if (t.shared_event) out << " event=\"" << *t.shared_event << "\"";
    if (t.shared_guard) out << " cond=\"" << t.shared_guard->to_string() << "\"";
    if (!t.shared_actions.empty()) out << " actions=\"" << spaced(t.shared_actions) << "\"";
    out << ">\n";
    for (const auto& in : t.inputs) {
      out << "    <in source=\"" << in.source << "\"";
      if (in.event) out << " event=\"" << *in.event << "\"";
      if (!in.actions.empty()) out << " actions=\"" << spaced(in.actions) << "\"";
      out << "/>\n";
    }
    for (const auto& o : t.outputs) {
      out << "    <out target=\"" << o.target << "\"";
      if (o.guard) out << " cond=\"" << o.guard->to_string() << "\"";
      if (!o.actions.empty()) out << " actions=\"" << spaced(o.actions) << "\"";
      if (o.mandatory) out << " mandatory=\"true\"";
      out << "/>\n";
    }
    out << "  </trans>\n";
  }
  out << "</process>\n";
  return out.str();
}

}  // namespace flowspec
