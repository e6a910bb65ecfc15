// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.
//
// usage: acceptance <flowspec-cli> <fixtures-dir>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../support/oracles.hpp"
#include "../support/random_model.hpp"
#include "flowspec/gwt.hpp"
#include "flowspec/infer.hpp"
#include "flowspec/model_io.hpp"
#include "flowspec/patterns.hpp"
#include "flowspec/replay.hpp"
#include "flowspec/skeletons.hpp"

namespace fs = std::filesystem;
using namespace flowspec;
using flowspec::testing::normalize_ws;

namespace {

std::string g_cli;
std::string g_fixtures;

// Collects failure notes for one criterion; the first few are printed.
struct Check {
  std::vector<std::string> failures;
  std::size_t cases = 0;

  void expect(bool ok, const std::string& what) {
    ++cases;
    if (!ok) failures.push_back(what);
  }
};

std::string fixture_path(const std::string& name) { return g_fixtures + "/" + name; }

std::vector<std::pair<std::string, ProcessModel>> fixture_models() {
  std::vector<std::pair<std::string, ProcessModel>> out;
  for (int i = 1; i <= 9; ++i) {
    std::string name = "M" + std::to_string(i);
    out.emplace_back(name, load_model(fixture_path(name + ".pml")));
  }
  return out;
}

// Fixtures plus the seeded random models shared by the round-trip and replay
// criteria.
const std::vector<std::pair<std::string, ProcessModel>>& corpus() {
  static const auto models = [] {
    auto out = fixture_models();
    std::mt19937 rng(20240611);
    int made = 0;
    for (int attempt = 0; attempt < 1000 && made < 200; ++attempt) {
      if (auto m = flowspec::testing::random_model(rng)) {
        out.emplace_back("random#" + std::to_string(made++), std::move(*m));
      }
    }
    return out;
  }();
  return models;
}

std::size_t random_count() { return corpus().size() - 9; }

// Transition id of an emitted scenario: the second word of its name.
std::string scenario_transition(const Scenario& s) {
  std::istringstream in(s.name);
  std::string pattern, id;
  in >> pattern >> id;
  return id;
}

std::string block(const Scenario& s) {
  return "GIVEN " + clause_text(s.given) + "\nWHEN " + clause_text(s.when) + "\nTHEN " + clause_text(s.then);
}

Check golden_reproduction() {
  Check c;
  const std::vector<std::pair<std::string, std::set<std::string>>> selections = {
      {"M1", {"t1"}}, {"M2", {"t1"}}, {"M3", {"t1"}}, {"M4", {"t1", "t2"}},
      {"M5", {"t2"}}, {"M6", {"t1"}}, {"M7", {"t2"}}, {"M8", {"t1"}},
  };
  for (std::size_t k = 0; k < selections.size(); ++k) {
    const auto& [name, ids] = selections[k];
    auto doc = emit_feature(load_model(fixture_path(name + ".pml")), EmitMode::PaperExact);
    std::string text;
    for (const auto& s : doc.scenarios) {
      if (!ids.count(scenario_transition(s))) continue;
      if (!text.empty()) text += "\n\n";
      text += block(s);
    }
    auto golden = read_file(fixture_path("golden/code" + std::to_string(k + 1) + ".gwt"));
    c.expect(normalize_ws(text) == normalize_ws(golden), name + " differs from code" + std::to_string(k + 1));
  }

  auto m9 = emit_feature(load_model(fixture_path("M9.pml")), EmitMode::PaperExact);
  std::vector<std::string> rows;
  for (const auto& s : m9.scenarios) rows.push_back(normalize_ws(block(s)));
  std::vector<std::string> expected;
  std::istringstream golden(read_file(fixture_path("golden/table1.gwt")));
  for (std::string line; std::getline(golden, line);) {
    if (!normalize_ws(line).empty()) expected.push_back(normalize_ws(line));
  }
  c.expect(rows == expected, "M9 rows differ from table1.gwt");
  c.expect(expected.size() == 8, "table1.gwt should hold the eight printed rows");
  return c;
}

Check skeleton_fidelity() {
  Check c;
  auto doc = parse_feature(read_file(fixture_path("golden/section2.feature")));
  auto got = emit_skeletons(doc);
  const std::vector<StepSkeleton> expected = {
      {"Given", "Given there is a resource at \"(.*)\"", "given_there_is_a_resource_at_group1"},
      {"When", "When I request this resource as raw", "when_i_request_this_resource_as_raw"},
      {"Then", "Then the response code is 200", "then_the_response_code_is_200"},
  };
  c.expect(got.size() == expected.size(), "expected three skeletons");
  for (std::size_t i = 0; i < std::min(got.size(), expected.size()); ++i) {
    c.expect(got[i].keyword == expected[i].keyword && got[i].pattern == expected[i].pattern &&
                 got[i].slug == expected[i].slug,
             "skeleton " + std::to_string(i + 1) + " is '" + got[i].pattern + "' / " + got[i].slug);
  }
  c.expect(skeletons_json(got) == read_file(fixture_path("golden/section2.steps.json")),
           "JSON differs from section2.steps.json");
  return c;
}

Check round_trip() {
  Check c;
  c.expect(random_count() >= 200, "only " + std::to_string(random_count()) + " random models generated");
  for (const auto& [name, m] : corpus()) {
    for (auto style : {Style::PaperUpper, Style::Gherkin}) {
      auto text = format_feature(emit_feature(m, EmitMode::Strict), style);
      auto inf = infer_model(parse_feature(text));
      c.expect(!has_errors(inf.diagnostics), name + ": error diagnostics");
      c.expect(isomorphic(inf.model, m), name + ": inferred model is not isomorphic");
      c.expect(format_feature(emit_feature(inf.model, EmitMode::Strict), style) == text,
               name + ": emission is not a fixpoint");
    }
  }
  return c;
}

// One THEN mutation; returns false when the kind does not apply.
bool mutate(Scenario& s, int kind, const std::vector<std::string>& states, std::mt19937& rng) {
  std::vector<std::pair<std::size_t, std::size_t>> slots;
  for (std::size_t i = 0; i < s.then.size(); ++i) {
    for (std::size_t j = 0; j < s.then[i].names.size(); ++j) slots.emplace_back(i, j);
  }
  auto pick = [&](auto& v) { return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)]; };
  switch (kind) {
    case 0: {  // drop one name
      if (slots.empty()) return false;
      auto [i, j] = pick(slots);
      auto& names = s.then[i].names;
      names.erase(names.begin() + static_cast<std::ptrdiff_t>(j));
      if (names.empty()) s.then.erase(s.then.begin() + static_cast<std::ptrdiff_t>(i));
      return true;
    }
    case 1:  // add a foreign action
      s.then.insert(s.then.begin(), ThenItem::actions({"zz_mutant"}));
      return true;
    default: {  // move a target elsewhere
      std::vector<std::size_t> targets;
      for (std::size_t i = 0; i < s.then.size(); ++i) {
        if (s.then[i].kind == ThenItem::Kind::StateTerm) targets.push_back(i);
      }
      if (targets.empty()) return false;
      auto& name = s.then[pick(targets)].names[0];
      std::vector<std::string> others;
      for (const auto& p : states) {
        if (p != name) others.push_back(p);
      }
      if (others.empty()) return false;
      name = pick(others);
      return true;
    }
  }
}

Check replay_coherence() {
  Check c;
  std::mt19937 rng(7);
  std::size_t mutants = 0;
  for (const auto& [name, m] : corpus()) {
    auto doc = emit_feature(m, EmitMode::Strict);
    auto report = check_suite(m, doc, EmitMode::Strict);
    c.expect(report.all_passed(), name + ": strict scenario failed");
    c.expect(report.coverage == 1.0, name + ": coverage below 1.0");

    ModelIndex index(m);
    auto states = index.state_paths();
    states.push_back(m.final_name);
    for (const auto& s : doc.scenarios) {
      for (int kind = 0; kind < 3; ++kind) {
        Scenario mutant = s;
        if (!mutate(mutant, kind, states, rng)) continue;
        ++mutants;
        try {
          c.expect(!replay_scenario(m, mutant, EmitMode::Strict).passed,
                   name + ": mutant of '" + s.name + "' still passes");
        } catch (const Error& e) {
          c.expect(false, name + ": mutant of '" + s.name + "' raised " + e.code());
        }
      }
    }
  }
  c.expect(mutants > 0, "no mutants were produced");
  return c;
}

ProcessModel or_split_model(std::size_t n) {
  std::string text = "process \"choice\" {\n  state S0\n";
  for (std::size_t i = 1; i <= n; ++i) text += "  state S" + std::to_string(i) + "\n";
  text += "  trans t0 { from alpha on start to S0 }\n  trans t1 { from S0 on ev split or to ";
  for (std::size_t i = 1; i <= n; ++i) {
    auto k = std::to_string(i);
    if (i > 1) text += ", ";
    text += "S" + k + " if g" + k + " do a" + k;
  }
  text += " }\n}\n";
  return parse_dsl(text);
}

Check choice_enumeration() {
  Check c;
  for (std::size_t n = 1; n <= 4; ++n) {
    auto m = or_split_model(n);
    std::set<std::set<std::string>> chosen;
    std::size_t count = 0;
    for (const auto& s : emit_feature(m, EmitMode::PaperExact).scenarios) {
      if (scenario_transition(s) != "t1") continue;
      ++count;
      std::set<std::string> positive;
      for (const auto& t : s.given) {
        if (t.role == TermRole::Guard && !t.negated) positive.insert(t.atom);
      }
      chosen.insert(positive);
    }
    std::set<std::set<std::string>> oracle;
    for (const auto& subset : flowspec::testing::brute_force_subsets(n)) {
      std::set<std::string> atoms;
      for (auto i : subset) atoms.insert("g" + std::to_string(i + 1));
      oracle.insert(atoms);
    }
    auto label = "n=" + std::to_string(n);
    c.expect(count == (std::size_t{1} << n) - 1, label + ": " + std::to_string(count) + " scenarios");
    c.expect(chosen == oracle, label + ": guard subsets differ from enumeration");
    std::size_t strict = 0;
    for (const auto& s : emit_feature(m, EmitMode::Strict).scenarios) strict += scenario_transition(s) == "t1";
    c.expect(strict == count, label + ": strict count " + std::to_string(strict));
  }
  std::size_t m6 = 0;
  for (const auto& s : emit_feature(load_model(fixture_path("M6.pml")), EmitMode::PaperExact).scenarios) {
    m6 += scenario_transition(s) == "t1";
  }
  c.expect(m6 == 3, "M6 yields " + std::to_string(m6) + " scenarios");
  return c;
}

Check lint_agreement() {
  Check c;
  std::mt19937 rng(11);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int system = 0; system < 100; ++system) {
    int atoms = uniform(1, 6);
    int count = uniform(2, 4);
    ProcessModel m;
    m.title = "guards";
    m.states.push_back({"S0", {}, {}, {}, std::nullopt});
    m.transitions.push_back({"t0", {{m.initial_name, "start", {}}}, SplitKind::None, JoinKind::None,
                             std::nullopt, std::nullopt, {}, {{"S0", std::nullopt, {}, false}}});
    std::vector<std::optional<GuardExpr>> guards;
    for (int k = 1; k <= count; ++k) {
      std::optional<GuardExpr> guard;
      int length = uniform(0, 3);
      if (length > 0) {
        guard.emplace();
        for (int l = 0; l < length; ++l) {
          guard->literals.push_back({"p" + std::to_string(uniform(1, atoms)), uniform(0, 1) == 1});
        }
      }
      guards.push_back(guard);
      auto target = "S" + std::to_string(k);
      m.states.push_back({target, {}, {}, {}, std::nullopt});
      m.transitions.push_back({"t" + std::to_string(k), {{"S0", "ev", {"a" + std::to_string(k)}}}, SplitKind::None,
                               JoinKind::None, std::nullopt, std::nullopt, {}, {{target, guard, {}, false}}});
    }

    std::set<std::string> expected;
    for (int i = 0; i < count; ++i) {
      for (int j = i + 1; j < count; ++j) {
        const GuardExpr* a = guards[i] ? &*guards[i] : nullptr;
        const GuardExpr* b = guards[j] ? &*guards[j] : nullptr;
        bool oracle = flowspec::testing::brute_force_overlap(a, b);
        c.expect(guards_overlap(a, b) == oracle, "system " + std::to_string(system) + ": pair disagrees");
        if (oracle) expected.insert("t" + std::to_string(i + 1) + ",t" + std::to_string(j + 1));
      }
    }
    std::set<std::string> flagged;
    for (const auto& d : lint(m)) {
      if (d.code == "OverlappingGuards") flagged.insert(d.location);
    }
    c.expect(flagged == expected, "system " + std::to_string(system) + ": lint flags differ from enumeration");
  }

  bool m4 = false;
  for (const auto& d : lint(load_model(fixture_path("M4.pml")))) {
    m4 = m4 || (d.code == "OverlappingGuards" && d.location == "t1,t2");
  }
  c.expect(m4, "M4 g1/g2 pair is not flagged");
  return c;
}

Check dot_validity() {
  Check c;
  for (const auto& [name, m] : fixture_models()) {
    ModelIndex index(m);
    auto summary = flowspec::testing::check_dot(render_dot(m));
    c.expect(summary.valid, name + ": " + summary.error);
    std::size_t pseudo = 1 + (index.is_final_referenced() ? 1 : 0);
    c.expect(summary.nodes == index.state_paths().size() + pseudo, name + ": node count");
    std::size_t edges = 0;
    for (const auto& t : m.transitions) edges += t.inputs.size() * t.outputs.size();
    c.expect(summary.edges == edges, name + ": edge count");
  }
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char ch : s) out += ch == '\'' ? std::string("'\\''") : std::string(1, ch);
  return out + "'";
}

struct RunResult {
  int status = -1;
  std::string out;
  std::string err;
  std::map<std::string, std::string> files;

  bool operator==(const RunResult&) const = default;
};

// Runs the CLI with {out} in the arguments replaced by a per-run directory,
// collecting stdout, stderr, exit status and every file written there.
RunResult run_cli(const std::string& args, const fs::path& dir) {
  fs::remove_all(dir);
  fs::create_directories(dir);
  std::string expanded = args;
  for (std::size_t pos; (pos = expanded.find("{out}")) != std::string::npos;) {
    expanded.replace(pos, 5, dir.string());
  }
  auto stdout_path = dir.parent_path() / (dir.filename().string() + ".stdout");
  auto stderr_path = dir.parent_path() / (dir.filename().string() + ".stderr");
  std::string cmd = quote(g_cli) + " " + expanded + " >" + quote(stdout_path.string()) + " 2>" +
                    quote(stderr_path.string());
  int raw = std::system(cmd.c_str());
  RunResult r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(stdout_path);
  r.err = slurp(stderr_path);
  for (const auto& entry : fs::directory_iterator(dir)) r.files[entry.path().filename().string()] = slurp(entry.path());
  return r;
}

Check cli_determinism() {
  Check c;
  auto root = fs::temp_directory_path() / ("flowspec-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(root);
  auto inputs = root / "inputs";
  fs::create_directories(inputs);
  std::size_t runs = 0;

  for (int i = 1; i <= 9; ++i) {
    std::string name = "M" + std::to_string(i);
    auto strict_feature = (inputs / (name + ".feature")).string();
    auto paper_feature = (inputs / (name + ".paper.feature")).string();
    {
      std::ofstream(strict_feature) << format_feature(
          emit_feature(load_model(fixture_path(name + ".pml")), EmitMode::Strict), Style::Gherkin);
      std::ofstream(paper_feature) << format_feature(
          emit_feature(load_model(fixture_path(name + ".pml")), EmitMode::PaperExact), Style::PaperUpper);
    }
    for (std::string ext : {".pml", ".xml"}) {
      auto model = quote(fixture_path(name + ext));
      const std::vector<std::string> commands = {
          "compile " + model,
          "compile " + model + " --mode strict --style gherkin -o {out}/out.feature",
          "--format " + std::string(ext == ".pml" ? "pml" : "xml") + " compile " + model + " --mode paper-exact",
          "check " + model + " " + quote(strict_feature) + " --mode strict --json {out}/report.json",
          "check " + model + " " + quote(paper_feature),
          "check " + model + " " + quote(strict_feature) + " --mode strict --json",
          "render " + model + " -o {out}/model.dot",
          "render " + model,
          "lint " + model,
          "reverse " + quote(strict_feature) + " --dot {out}/r.dot --model-out {out}/r.pml",
          "reverse " + quote(paper_feature),
          "steps " + quote(paper_feature) + " -o {out}/steps.json",
          "steps " + quote(strict_feature),
      };
      for (std::size_t k = 0; k < commands.size(); ++k) {
        auto tag = name + ext + "#" + std::to_string(k);
        auto first = run_cli(commands[k], root / (tag + ".a"));
        auto second = run_cli(commands[k], root / (tag + ".b"));
        ++runs;
        c.expect(first.status == 0 || first.status == 1, tag + ": exit " + std::to_string(first.status) + " " +
                                                             first.err.substr(0, 200));
        bool quiet_ok = commands[k].rfind("lint ", 0) == 0 && first.status == 0;  // clean model
        c.expect(quiet_ok || !first.out.empty() || !first.files.empty(), tag + ": no output");
        c.expect(first == second, tag + ": runs differ");
      }
    }
  }
  fs::remove_all(root);
  c.expect(runs > 0, "no CLI runs");
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 3) {
    std::cerr << "usage: acceptance <flowspec-cli> <fixtures-dir>\n";
    return 2;
  }
  g_cli = argv[1];
  g_fixtures = argv[2];

  const std::vector<std::pair<std::string, std::function<Check()>>> criteria = {
      {"golden reproduction", golden_reproduction},
      {"skeleton fidelity", skeleton_fidelity},
      {"round-trip", round_trip},
      {"replay coherence", replay_coherence},
      {"choice enumeration", choice_enumeration},
      {"lint", lint_agreement},
      {"DOT validity", dot_validity},
      {"CLI determinism", cli_determinism},
  };

  bool all = true;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check c;
    try {
      c = criteria[i].second();
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    bool ok = c.failures.empty();
    all = all && ok;
    std::cout << (ok ? "PASS" : "FAIL") << " " << i + 1 << " " << criteria[i].first << " (" << c.cases
              << " checks)\n";
    for (std::size_t k = 0; k < std::min<std::size_t>(c.failures.size(), 5); ++k) {
      std::cout << "  " << c.failures[k] << "\n";
    }
    if (c.failures.size() > 5) std::cout << "  ... " << c.failures.size() - 5 << " more\n";
  }
  return all ? 0 : 1;
}
