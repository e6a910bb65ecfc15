#include "flowspec/skeletons.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include <nlohmann/json.hpp>

namespace flowspec {

namespace {

std::string canonical_keyword(std::string_view keyword) {
  std::string k;
  for (char c : keyword) k += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (k == "given") return "Given";
  if (k == "when") return "When";
  if (k == "then") return "Then";
  throw Error("UnknownKeyword", "step keyword must be Given, When or Then, got '" + std::string(keyword) + "'");
}

// Lowercases and joins alphanumeric runs with single underscores.
void append_words(std::string& slug, std::string_view text) {
  for (char c : text) {
    auto u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      slug += static_cast<char>(std::tolower(u));
    } else if (!slug.empty() && slug.back() != '_') {
      slug += '_';
    }
  }
}

}  // namespace

StepSkeleton extract_skeleton(std::string_view keyword, std::string_view step_text) {
  if (std::count(step_text.begin(), step_text.end(), '"') % 2 != 0) {
    throw Error("UnbalancedQuotes", "unbalanced double quote in step '" + std::string(step_text) + "'");
  }
  StepSkeleton s;
  s.keyword = canonical_keyword(keyword);
  s.pattern = s.keyword + " ";
  std::string slug;
  append_words(slug, s.keyword);
  slug += '_';

  int group = 0;
  std::size_t pos = 0;
  while (pos < step_text.size()) {
    auto open = step_text.find('"', pos);
    auto plain = step_text.substr(pos, open == std::string_view::npos ? std::string_view::npos : open - pos);
    s.pattern += plain;
    append_words(slug, plain);
    if (open == std::string_view::npos) break;
    auto close = step_text.find('"', open + 1);
    s.pattern += "\"(.*)\"";
    if (!slug.empty() && slug.back() != '_') slug += '_';
    slug += "group" + std::to_string(++group);
    slug += '_';
    pos = close + 1;
  }
  while (!slug.empty() && slug.back() == '_') slug.pop_back();
  s.slug = slug;
  return s;
}

std::vector<StepSkeleton> emit_skeletons(const FeatureDoc& doc) {
  std::vector<StepSkeleton> out;
  std::map<std::string, int> slug_uses;
  auto add = [&](std::string_view keyword, const std::string& text) {
    auto s = extract_skeleton(keyword, text);
    bool seen = std::any_of(out.begin(), out.end(), [&](const StepSkeleton& o) {
      return o.keyword == s.keyword && o.pattern == s.pattern;
    });
    if (seen) return;
    int n = ++slug_uses[s.slug];
    if (n > 1) s.slug += "_" + std::to_string(n);
    out.push_back(std::move(s));
  };
  for (const auto& scenario : doc.scenarios) {
    add("Given", clause_text(scenario.given));
    add("When", clause_text(scenario.when));
    add("Then", clause_text(scenario.then));
  }
  return out;
}

std::string skeletons_json(const std::vector<StepSkeleton>& skeletons) {
  auto array = nlohmann::ordered_json::array();
  for (const auto& s : skeletons) {
    array.push_back({{"keyword", s.keyword}, {"pattern", s.pattern}, {"slug", s.slug}});
  }
  return array.dump(2) + "\n";
}

}  // namespace flowspec
