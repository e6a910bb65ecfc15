#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "flowspec/gwt.hpp"
#include "flowspec/model_io.hpp"

namespace flowspec {

namespace {

std::string join(const std::vector<std::string>& items, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
  return out;
}

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

void write_hints(std::ostringstream& out, const InferenceHints& h) {
  if (h.initial_name) out << "# initialname: " << *h.initial_name << "\n";
  if (h.final_name) out << "# finalname: " << *h.final_name << "\n";
  auto list = [&](const char* key, const std::vector<std::string>& items) {
    if (!items.empty()) out << "# " << key << ": " << join(items, ", ") << "\n";
  };
  list("states", h.states);
  list("events", h.events);
  list("guards", h.guards);
  list("actions", h.actions);
  for (const auto& [state, acts] : h.entry_actions) out << "# entry " << state << ": " << join(acts, ", ") << "\n";
  for (const auto& [state, acts] : h.exit_actions) out << "# exit " << state << ": " << join(acts, ", ") << "\n";
  for (const auto& [state, child] : h.initial_children) out << "# initial " << state << ": " << child << "\n";
  for (const auto& t : h.transitions) out << "# " << serialize_transition(t) << "\n";
}

}  // namespace

std::string clause_text(const std::vector<Term>& terms) {
  std::vector<std::string> parts;
  for (const auto& t : terms) parts.push_back((t.negated ? "NOT " : "") + t.atom);
  return join(parts, " AND ");
}

std::string clause_text(const std::vector<ThenItem>& items) {
  std::vector<std::string> parts;
  for (const auto& item : items) parts.push_back(join(item.names, "; "));
  return join(parts, " AND ");
}

std::string format_feature(const FeatureDoc& doc, Style style) {
  bool upper = style == Style::PaperUpper;
  auto with = [](const char* prefix, const std::string& text) {
    return text.empty() ? std::string(prefix) : std::string(prefix) + " " + text;
  };
  std::ostringstream out;
  write_hints(out, doc.hints);
  out << with("Feature:", doc.title) << "\n";
  if (!doc.role.empty()) out << "  As a " << doc.role << "\n";
  if (!doc.feature.empty()) out << "  I request " << doc.feature << "\n";
  if (!doc.benefit.empty()) out << "  To gain " << doc.benefit << "\n";
  for (const auto& s : doc.scenarios) {
    out << "\n  " << with("Scenario:", s.name) << "\n";
    out << "    " << (upper ? "GIVEN " : "Given ") << clause_text(s.given) << "\n";
    out << "    " << (upper ? "WHEN " : "When ") << clause_text(s.when) << "\n";
    out << "    " << (upper ? "THEN " : "Then ") << clause_text(s.then) << "\n";
  }
  return out.str();
}

// ---------------------------------------------------------------------------
// parse_feature

namespace {

struct Piece {
  std::string text;
  int column = 1;
};

// Splits on `sep` tokens outside double quotes. For "AND" the separator must
// stand alone between spaces; for ';' any occurrence splits.
std::vector<Piece> split_outside_quotes(std::string_view text, int base_column, bool on_and) {
  std::vector<Piece> out;
  bool quoted = false;
  std::size_t start = 0;
  auto emit = [&](std::size_t end, std::size_t next) {
    auto raw = text.substr(start, end - start);
    std::size_t lead = 0;
    while (lead < raw.size() && std::isspace(static_cast<unsigned char>(raw[lead]))) ++lead;
    out.push_back({trim(raw), base_column + static_cast<int>(start + lead)});
    start = next;
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '"') quoted = !quoted;
    if (quoted) continue;
    if (!on_and && text[i] == ';') {
      emit(i, i + 1);
    } else if (on_and && text.compare(i, 3, "AND") == 0 && (i == 0 || text[i - 1] == ' ') &&
               (i + 3 == text.size() || text[i + 3] == ' ')) {
      emit(i, i + 3);
      i += 2;
    }
  }
  emit(text.size(), text.size());
  return out;
}

class FeatureParser {
 public:
  FeatureParser(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  FeatureDoc run() {
    std::istringstream in{std::string(text_)};
    std::string raw;
    int line_no = 0;
    bool saw_content = false;
    while (std::getline(in, raw)) {
      ++line_no;
      if (!raw.empty() && raw.back() == '\r') raw.pop_back();
      std::string line = trim(raw);
      int column = 1 + static_cast<int>(raw.find_first_not_of(" \t") == std::string::npos
                                            ? 0
                                            : raw.find_first_not_of(" \t"));
      if (line.empty()) continue;
      if (line[0] == '#') {
        if (!in_body_) hint(line, line_no);
        continue;
      }
      saw_content = true;
      handle(line, line_no, column);
    }
    finish_scenario();
    if (!saw_content) {
      throw SyntaxError("EmptyDocument", "feature text has no header and no scenarios", {file_, 1, 1});
    }
    return std::move(doc_);
  }

 private:
  SourceSpan at(int line, int column) const { return {file_, line, column}; }

  static bool starts_with(const std::string& s, std::string_view prefix) {
    return s.compare(0, prefix.size(), prefix) == 0 &&
           (s.size() == prefix.size() || s[prefix.size()] == ' ' || prefix.back() == ':');
  }

  static std::string rest(const std::string& s, std::size_t n) { return trim(std::string_view(s).substr(n)); }

  void hint(const std::string& line, int line_no) {
    std::string body = trim(std::string_view(line).substr(1));
    auto colon = body.find(':');
    auto list_after = [&]() {
      std::vector<std::string> out;
      std::string tail = body.substr(colon + 1);
      std::size_t pos = 0;
      while (pos <= tail.size()) {
        auto comma = tail.find(',', pos);
        std::string item = trim(tail.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        pos = comma + 1;
      }
      return out;
    };
    auto& h = doc_.hints;
    if (body.rfind("trans ", 0) == 0) {
      std::set<std::string> known(h.states.begin(), h.states.end());
      try {
        h.transitions.push_back(parse_transition_decl(body, known, file_));
      } catch (const SyntaxError& e) {
        throw SyntaxError("MalformedHint", e.what(), at(line_no, 1));
      }
      return;
    }
    if (colon == std::string::npos) return;
    std::string key = trim(body.substr(0, colon));
    if (key == "states") h.states = list_after();
    else if (key == "events") h.events = list_after();
    else if (key == "guards") h.guards = list_after();
    else if (key == "actions") h.actions = list_after();
    else if (key == "initialname") h.initial_name = trim(body.substr(colon + 1));
    else if (key == "finalname") h.final_name = trim(body.substr(colon + 1));
    else if (key.rfind("entry ", 0) == 0) h.entry_actions.emplace_back(trim(key.substr(6)), list_after());
    else if (key.rfind("exit ", 0) == 0) h.exit_actions.emplace_back(trim(key.substr(5)), list_after());
    else if (key.rfind("initial ", 0) == 0) h.initial_children.emplace_back(trim(key.substr(8)), trim(body.substr(colon + 1)));
  }

  void handle(const std::string& line, int line_no, int column) {
    if (starts_with(line, "Feature:")) {
      doc_.title = rest(line, 8);
      in_body_ = true;
      return;
    }
    if (!open_ && doc_.scenarios.empty()) {
      if (starts_with(line, "As a")) return void(doc_.role = rest(line, 4));
      if (starts_with(line, "I request")) return void(doc_.feature = rest(line, 9));
      if (starts_with(line, "To gain")) return void(doc_.benefit = rest(line, 7));
    }
    if (starts_with(line, "Scenario:")) {
      finish_scenario();
      open_ = true;
      in_body_ = true;
      current_ = Scenario{};
      current_.name = rest(line, 9);
      scenario_line_ = line_no;
      last_ = Clause::None;
      return;
    }
    auto space = line.find(' ');
    std::string word = line.substr(0, space);
    std::string keyword = lower(word);
    std::string text = space == std::string::npos ? "" : trim(std::string_view(line).substr(space));
    int text_column = column + static_cast<int>(line.size() - text.size());

    Clause clause;
    if (keyword == "given") clause = Clause::Given;
    else if (keyword == "when") clause = Clause::When;
    else if (keyword == "then") clause = Clause::Then;
    else if (keyword == "and" || keyword == "but") clause = last_;
    else throw SyntaxError("UnknownKeyword", "unknown keyword '" + word + "'", at(line_no, column));
    if (clause == Clause::None) {
      throw SyntaxError("MalformedClause", "'" + word + "' has no clause to continue", at(line_no, column));
    }
    if (text.empty()) {
      throw SyntaxError("MalformedClause", "'" + word + "' clause is empty", at(line_no, column));
    }
    in_body_ = true;
    if (!open_ || (static_cast<int>(clause) < static_cast<int>(last_))) {
      if (open_ && explicit_name()) {
        throw SyntaxError("MalformedClause", "clause out of order in scenario '" + current_.name + "'",
                          at(line_no, column));
      }
      finish_scenario();
      open_ = true;
      current_ = Scenario{};
      current_.name = "Scenario " + std::to_string(doc_.scenarios.size() + 1);
      implicit_ = true;
      scenario_line_ = line_no;
    }
    last_ = clause;
    auto pieces = split_outside_quotes(text, text_column, true);
    for (const auto& p : pieces) {
      if (p.text.empty()) throw SyntaxError("MalformedClause", "empty term", at(line_no, p.column));
    }
    if (clause == Clause::Then) {
      for (const auto& p : pieces) current_.then.push_back(then_item(p, line_no));
    } else {
      auto& dest = clause == Clause::Given ? current_.given : current_.when;
      for (const auto& p : pieces) dest.push_back(term(p, line_no));
    }
  }

  bool explicit_name() const { return !implicit_; }

  Term term(const Piece& p, int line_no) const {
    Term t;
    std::string text = p.text;
    if (text.rfind("NOT ", 0) == 0) {
      t.negated = true;
      text = trim(std::string_view(text).substr(4));
      if (text.empty()) throw SyntaxError("MalformedClause", "NOT without a term", at(line_no, p.column));
    }
    t.atom = text;
    t.role = doc_.hints.role_of(t.atom);
    if (!t.role && t.negated) t.role = TermRole::Guard;
    return t;
  }

  ThenItem then_item(const Piece& p, int line_no) const {
    auto parts = split_outside_quotes(p.text, p.column, false);
    std::vector<std::string> names;
    for (const auto& part : parts) {
      if (part.text.empty()) throw SyntaxError("MalformedClause", "empty action in sequence", at(line_no, part.column));
      names.push_back(part.text);
    }
    if (names.size() == 1 && doc_.hints.role_of(names.front()) == TermRole::State) {
      return ThenItem::state(names.front());
    }
    return ThenItem::actions(std::move(names));
  }

  void finish_scenario() {
    if (!open_) return;
    const char* missing = current_.given.empty() ? "GIVEN" : current_.when.empty() ? "WHEN"
                          : current_.then.empty() ? "THEN" : nullptr;
    if (missing != nullptr) {
      throw SyntaxError("MalformedClause", "scenario '" + current_.name + "' has no " + missing + " clause",
                        at(scenario_line_, 1));
    }
    doc_.scenarios.push_back(std::move(current_));
    open_ = false;
    implicit_ = false;
    last_ = Clause::None;
  }

  enum class Clause { None = 0, Given = 1, When = 2, Then = 3 };

  std::string_view text_;
  std::string file_;
  FeatureDoc doc_;
  Scenario current_;
  bool open_ = false;
  bool implicit_ = false;
  bool in_body_ = false;
  int scenario_line_ = 1;
  Clause last_ = Clause::None;
};

}  // namespace

FeatureDoc parse_feature(std::string_view text, const std::string& file) {
  return FeatureParser(text, file).run();
}

}  // namespace flowspec
