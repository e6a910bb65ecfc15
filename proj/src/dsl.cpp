#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "flowspec/model_io.hpp"

namespace flowspec {

namespace {

enum class Tok { Ident, String, LBrace, RBrace, Comma, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourceSpan span;
};

const std::set<std::string, std::less<>> kKeywords = {
    "process", "role", "feature", "benefit", "initialname", "finalname", "state", "entry",
    "exit",    "initial", "trans", "from",   "join",        "split",     "on",    "if",
    "do",      "to",      "mandatory", "not", "and",        "or",        "xor",   "multi"};

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      SourceSpan span{file_, line_, col_};
      if (pos_ >= text_.size()) {
        out.push_back({Tok::End, "", span});
        return out;
      }
      char c = text_[pos_];
      if (c == '{' || c == '}' || c == ',') {
        advance();
        out.push_back({c == '{' ? Tok::LBrace : c == '}' ? Tok::RBrace : Tok::Comma,
                       std::string(1, c), span});
      } else if (c == '"') {
        out.push_back({Tok::String, string_literal(span), span});
      } else if (std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.') {
        std::string word;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                text_[pos_] == '.')) {
          word += text_[pos_];
          advance();
        }
        out.push_back({Tok::Ident, word, span});
      } else {
        throw SyntaxError("UnexpectedCharacter", std::string("unexpected character '") + c + "'", span);
      }
    }
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  std::string string_literal(const SourceSpan& span) {
    advance();
    std::string out;
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\n') break;
      if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
      out += text_[pos_];
      advance();
    }
    if (pos_ >= text_.size() || text_[pos_] != '"') {
      throw SyntaxError("UnterminatedString", "string literal is not closed", span);
    }
    advance();
    return out;
  }

  std::string_view text_;
  std::string file_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::set<std::string> known_states = {})
      : tokens_(std::move(tokens)), known_(std::move(known_states)) {}

  ProcessModel parse_model() {
    if (!is_word("process")) {
      throw SyntaxError("MissingProcessHeader", "expected 'process \"<title>\" {'", peek().span);
    }
    next();
    ProcessModel model;
    model.title = expect(Tok::String, "process title").text;
    expect(Tok::LBrace, "'{'");
    while (peek().kind == Tok::Ident && is_header(peek().text)) {
      std::string key = next().text;
      const Token& value = expect(Tok::String, "header value");
      if (key == "role") model.role = value.text;
      if (key == "feature") model.feature = value.text;
      if (key == "benefit") model.benefit = value.text;
      if (key == "initialname" || key == "finalname") {
        if (!is_simple_ident(value.text)) {
          throw SyntaxError("InvalidIdent", "'" + value.text + "' is not an identifier", value.span);
        }
        (key == "initialname" ? model.initial_name : model.final_name) = value.text;
      }
    }
    std::vector<std::size_t> pending_transitions;
    while (peek().kind != Tok::RBrace) {
      if (is_word("state")) {
        model.states.push_back(parse_state(""));
      } else if (is_word("trans")) {
        pending_transitions.push_back(pos_);
        skip_transition();
      } else {
        throw SyntaxError("UnexpectedToken", "expected 'state', 'trans' or '}', found '" +
                                                 describe(peek()) + "'", peek().span);
      }
    }
    next();
    if (peek().kind != Tok::End) {
      throw SyntaxError("TrailingInput", "unexpected input after the process block", peek().span);
    }

    // Transitions are parsed once every state name is known so that
    // "do a1, S2" can tell an action list from the next branch.
    ModelIndex index(model);
    known_ = {index.state_paths().begin(), index.state_paths().end()};
    known_.insert(model.initial_name);
    known_.insert(model.final_name);
    for (std::size_t start : pending_transitions) {
      pos_ = start;
      model.transitions.push_back(parse_transition());
    }
    return model;
  }

  TransitionDecl parse_single_transition() {
    auto t = parse_transition();
    if (peek().kind != Tok::End) {
      throw SyntaxError("TrailingInput", "unexpected input after transition", peek().span);
    }
    return t;
  }

 private:
  static bool is_header(const std::string& word) {
    return word == "role" || word == "feature" || word == "benefit" || word == "initialname" ||
           word == "finalname";
  }

  static std::string describe(const Token& t) { return t.kind == Tok::End ? "end of input" : t.text; }

  const Token& peek(std::size_t ahead = 0) const {
    return tokens_[std::min(pos_ + ahead, tokens_.size() - 1)];
  }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (pos_ + 1 < tokens_.size()) ++pos_;
    return t;
  }
  bool is_word(std::string_view word, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Ident && peek(ahead).text == word;
  }

  const Token& expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) {
      throw SyntaxError("UnexpectedToken", "expected " + what + ", found '" + describe(peek()) + "'",
                        peek().span);
    }
    return next();
  }

  void expect_word(std::string_view word) {
    if (!is_word(word)) {
      throw SyntaxError("UnexpectedToken",
                        "expected '" + std::string(word) + "', found '" + describe(peek()) + "'",
                        peek().span);
    }
    next();
  }

  const Token& name(const std::string& what, bool allow_dots) {
    const Token& t = expect(Tok::Ident, what);
    if (kKeywords.count(t.text) != 0) {
      throw SyntaxError("ReservedWord", "'" + t.text + "' is a keyword", t.span);
    }
    if (!(allow_dots ? is_ident(t.text) : is_simple_ident(t.text))) {
      throw SyntaxError("InvalidIdent", "'" + t.text + "' is not a valid " + what, t.span);
    }
    return t;
  }

  // Accepts a local name or a qualified path consistent with the nesting.
  std::string local_name(const Token& t, const std::string& prefix) {
    if (t.text.find('.') == std::string::npos) return t.text;
    if (!prefix.empty() && t.text.rfind(prefix + ".", 0) == 0) {
      std::string rest = t.text.substr(prefix.size() + 1);
      if (is_simple_ident(rest)) return rest;
    }
    throw SyntaxError("DottedNameMismatch",
                      "'" + t.text + "' does not match its nesting" +
                          (prefix.empty() ? std::string(" (top level)") : " under '" + prefix + "'"),
                      t.span);
  }

  std::vector<std::string> ident_list(bool stop_at_state) {
    std::vector<std::string> out{name("action", false).text};
    while (peek().kind == Tok::Comma && peek(1).kind == Tok::Ident &&
           !(stop_at_state && known_.count(peek(1).text) != 0)) {
      next();
      out.push_back(name("action", false).text);
    }
    return out;
  }

  StateNode parse_state(const std::string& prefix) {
    expect_word("state");
    StateNode node;
    node.name = local_name(name("state name", true), prefix);
    std::string path = qualified(prefix, node.name);
    if (peek().kind != Tok::LBrace) return node;
    next();
    while (peek().kind != Tok::RBrace) {
      if (is_word("entry")) {
        next();
        auto list = ident_list(false);
        node.entry_actions.insert(node.entry_actions.end(), list.begin(), list.end());
      } else if (is_word("exit")) {
        next();
        auto list = ident_list(false);
        node.exit_actions.insert(node.exit_actions.end(), list.begin(), list.end());
      } else if (is_word("initial")) {
        next();
        node.initial_child = local_name(name("initial child", true), path);
      } else if (is_word("state")) {
        node.children.push_back(parse_state(path));
      } else {
        throw SyntaxError("UnexpectedToken", "expected 'entry', 'exit', 'initial', 'state' or '}', found '" +
                                                 describe(peek()) + "'", peek().span);
      }
    }
    next();
    return node;
  }

  void skip_transition() {
    next();
    while (peek().kind != Tok::RBrace && peek().kind != Tok::End) next();
    expect(Tok::RBrace, "'}' closing the transition");
  }

  GuardExpr parse_guard() {
    GuardExpr guard;
    do {
      GuardLiteral lit;
      if (is_word("not")) {
        next();
        lit.negated = true;
      }
      lit.atom = name("guard atom", false).text;
      guard.literals.push_back(std::move(lit));
    } while (is_word("and") && next().kind == Tok::Ident);
    return guard;
  }

  InBranch parse_in_branch() {
    InBranch in;
    in.source = name("source state", true).text;
    if (is_word("on")) {
      next();
      in.event = name("event", false).text;
    }
    if (is_word("do")) {
      next();
      in.actions = ident_list(true);
    }
    return in;
  }

  OutBranch parse_out_branch() {
    OutBranch out;
    out.target = name("target state", true).text;
    if (is_word("if")) {
      next();
      out.guard = parse_guard();
    }
    if (is_word("do")) {
      next();
      out.actions = ident_list(true);
    }
    if (is_word("mandatory")) {
      next();
      out.mandatory = true;
    }
    return out;
  }

  TransitionDecl parse_transition() {
    expect_word("trans");
    TransitionDecl t;
    t.id = name("transition id", false).text;
    expect(Tok::LBrace, "'{'");
    expect_word("from");
    t.inputs.push_back(parse_in_branch());
    while (peek().kind == Tok::Comma) {
      next();
      t.inputs.push_back(parse_in_branch());
    }
    if (is_word("join")) {
      next();
      const Token& k = expect(Tok::Ident, "join kind");
      auto kind = parse_join_kind(k.text);
      if (!kind || *kind == JoinKind::None) {
        throw SyntaxError("UnknownJoinKind", "join kind must be and, xor, or, multi", k.span);
      }
      t.join = *kind;
    }
    if (is_word("split")) {
      next();
      const Token& k = expect(Tok::Ident, "split kind");
      auto kind = parse_split_kind(k.text);
      if (!kind || *kind == SplitKind::None) {
        throw SyntaxError("UnknownSplitKind", "split kind must be and, or", k.span);
      }
      t.split = *kind;
    }
    if (is_word("on")) {
      next();
      t.shared_event = name("event", false).text;
    }
    if (is_word("if")) {
      next();
      t.shared_guard = parse_guard();
    }
    if (is_word("do")) {
      next();
      t.shared_actions = ident_list(false);
    }
    expect_word("to");
    t.outputs.push_back(parse_out_branch());
    while (peek().kind == Tok::Comma) {
      next();
      t.outputs.push_back(parse_out_branch());
    }
    expect(Tok::RBrace, "'}' closing the transition");
    normalize(t);
    return t;
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  std::set<std::string> known_;
};

std::string quote(const std::string& text) {
  std::string out = "\"";
  for (char c : text) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += sep;
    out += items[i];
  }
  return out;
}

void write_state(std::ostringstream& out, const StateNode& node, const std::string& prefix,
                 int depth) {
  std::string indent(2 * depth, ' ');
  std::string path = qualified(prefix, node.name);
  out << indent << "state " << path;
  if (node.entry_actions.empty() && node.exit_actions.empty() && !node.is_composite() &&
      !node.initial_child) {
    out << "\n";
    return;
  }
  out << " {\n";
  if (!node.entry_actions.empty()) out << indent << "  entry " << join(node.entry_actions, ", ") << "\n";
  if (!node.exit_actions.empty()) out << indent << "  exit " << join(node.exit_actions, ", ") << "\n";
  if (node.initial_child) out << indent << "  initial " << qualified(path, *node.initial_child) << "\n";
  for (const auto& child : node.children) write_state(out, child, path, depth + 1);
  out << indent << "}\n";
}

}  // namespace

ProcessModel parse_dsl(std::string_view text, const std::string& file) {
  Parser parser(Lexer(text, file).run());
  ProcessModel model = parser.parse_model();
  auto diagnostics = validate(model);
  if (!diagnostics.empty()) throw SemanticError(std::move(diagnostics));
  return model;
}

TransitionDecl parse_transition_decl(std::string_view text, const std::set<std::string>& known_states,
                                     const std::string& file) {
  Parser parser(Lexer(text, file).run(), known_states);
  return parser.parse_single_transition();
}

std::string serialize_transition(const TransitionDecl& t) {
  std::string out = "trans " + t.id + " { from ";
  for (std::size_t i = 0; i < t.inputs.size(); ++i) {
    const auto& in = t.inputs[i];
    if (i > 0) out += ", ";
    out += in.source;
    if (in.event) out += " on " + *in.event;
    if (!in.actions.empty()) out += " do " + join(in.actions, ", ");
  }
  if (t.join != JoinKind::None) out += " join " + std::string(to_string(t.join));
  if (t.split != SplitKind::None) out += " split " + std::string(to_string(t.split));
  if (t.shared_event) out += " on " + *t.shared_event;
  if (t.shared_guard) out += " if " + t.shared_guard->to_string();
  if (!t.shared_actions.empty()) out += " do " + join(t.shared_actions, ", ");
  out += " to ";
  for (std::size_t i = 0; i < t.outputs.size(); ++i) {
    const auto& o = t.outputs[i];
    if (i > 0) out += ", ";
    out += o.target;
    if (o.guard) out += " if " + o.guard->to_string();
    if (!o.actions.empty()) out += " do " + join(o.actions, ", ");
    if (o.mandatory) out += " mandatory";
  }
  return out + " }";
}

std::string serialize_dsl(const ProcessModel& model) {
  std::ostringstream out;
  out << "process " << quote(model.title) << " {\n";
  if (!model.role.empty()) out << "  role " << quote(model.role) << "\n";
  if (!model.feature.empty()) out << "  feature " << quote(model.feature) << "\n";
  if (!model.benefit.empty()) out << "  benefit " << quote(model.benefit) << "\n";
  if (model.initial_name != "alpha") out << "  initialname " << quote(model.initial_name) << "\n";
  if (model.final_name != "Beta") out << "  finalname " << quote(model.final_name) << "\n";
  if (!model.states.empty()) out << "\n";
  for (const auto& node : model.states) write_state(out, node, "", 1);
  if (!model.transitions.empty()) out << "\n";
  for (const auto& t : model.transitions) out << "  " << serialize_transition(t) << "\n";
  out << "}\n";
  return out.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("FileNotFound", "cannot read '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

ProcessModel load_model(const std::string& path, std::optional<ModelFormat> format) {
  if (!format) {
    auto ends_with = [&](std::string_view suffix) {
      return path.size() >= suffix.size() && path.compare(path.size() - suffix.size(), suffix.size(), suffix) == 0;
    };
    if (ends_with(".xml")) {
      format = ModelFormat::Xml;
    } else if (ends_with(".pml")) {
      format = ModelFormat::Dsl;
    } else {
      throw Error("UnknownFormat", "cannot tell the format of '" + path + "'; use --format");
    }
  }
  std::string text = read_file(path);
  return *format == ModelFormat::Xml ? parse_xml(text, path) : parse_dsl(text, path);
}

}  // namespace flowspec
