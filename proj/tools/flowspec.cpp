// flowspec command-line driver.
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flowspec/gwt.hpp"
#include "flowspec/infer.hpp"
#include "flowspec/model_io.hpp"
#include "flowspec/patterns.hpp"
#include "flowspec/replay.hpp"
#include "flowspec/skeletons.hpp"

namespace {

using namespace flowspec;

enum Status { kOk = 0, kFailed = 1, kInputError = 2, kInternalError = 3 };

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("FileNotWritable", "cannot write '" + path + "'");
  out << text;
}

std::optional<ModelFormat> format_override(const std::string& name) {
  if (name.empty()) return std::nullopt;
  return name == "xml" ? ModelFormat::Xml : ModelFormat::Dsl;
}

FeatureDoc load_feature(const std::string& path) { return parse_feature(read_file(path), path); }

void print_diagnostics(const std::vector<Diagnostic>& diagnostics) {
  for (const auto& d : diagnostics) std::cerr << format_diagnostic(d) << "\n";
}

std::string human_report(const SuiteReport& report) {
  std::ostringstream out;
  for (const auto& v : report.verdicts) {
    out << (v.passed ? "PASS " : "FAIL ") << v.scenario << "\n";
    for (const auto& m : v.mismatches) {
      out << "  at " << m.position << ": expected " << m.expected << ", observed " << m.observed << "\n";
    }
  }
  char coverage[32];
  std::snprintf(coverage, sizeof coverage, "%.3f", report.coverage);
  out << "coverage " << coverage << "\n";
  if (!report.uncovered.empty()) {
    out << "uncovered";
    for (const auto& id : report.uncovered) out << " " << id;
    out << "\n";
  }
  return out.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Translate between process models and Given-When-Then features"};
  app.require_subcommand(1);

  std::string format;
  app.add_option("--format", format, "Model format, overriding the file extension")
      ->check(CLI::IsMember({"pml", "xml"}));

  const std::map<std::string, EmitMode> modes{{"paper-exact", EmitMode::PaperExact}, {"strict", EmitMode::Strict}};
  const std::map<std::string, Style> styles{{"upper", Style::PaperUpper}, {"gherkin", Style::Gherkin}};

  Style default_style = Style::PaperUpper;
  if (const char* env = std::getenv("FLOWSPEC_STYLE")) {
    auto it = styles.find(env);
    if (it != styles.end()) default_style = it->second;
  }

  auto* compile = app.add_subcommand("compile", "Emit a feature file from a model");
  std::string model_path, output;
  EmitMode mode = EmitMode::PaperExact;
  Style style = default_style;
  compile->add_option("model", model_path, "Model file (.pml or .xml)")->required();
  compile->add_option("--mode", mode, "paper-exact or strict")->transform(CLI::CheckedTransformer(modes));
  compile->add_option("--style", style, "upper or gherkin")->transform(CLI::CheckedTransformer(styles));
  compile->add_option("-o,--output", output, "Output file");

  auto* reverse = app.add_subcommand("reverse", "Infer a model from a feature file");
  std::string feature_path, dot_out, model_out;
  reverse->add_option("feature", feature_path, "Feature file")->required();
  reverse->add_option("--dot", dot_out, "Write the inferred model as DOT");
  reverse->add_option("--model-out", model_out, "Write the inferred model as DSL (default: stdout)");

  auto* check = app.add_subcommand("check", "Replay feature files against a model");
  std::vector<std::string> feature_paths;
  std::string json_out;
  EmitMode check_mode = EmitMode::PaperExact;
  check->add_option("model", model_path, "Model file")->required();
  check->add_option("features", feature_paths, "Feature files")->required();
  check->add_option("--mode", check_mode, "paper-exact or strict")->transform(CLI::CheckedTransformer(modes));
  auto* json_flag = check->add_option("--json", json_out, "Write a JSON report to a file, or '-' for stdout")
                        ->expected(0, 1)
                        ->default_str("-");

  auto* steps = app.add_subcommand("steps", "Generate step-definition skeletons");
  steps->add_option("feature", feature_path, "Feature file")->required();
  steps->add_option("-o,--output", output, "Output file");

  auto* render = app.add_subcommand("render", "Render a model as DOT");
  render->add_option("model", model_path, "Model file")->required();
  render->add_option("-o,--output", output, "Output file");

  auto* lint_cmd = app.add_subcommand("lint", "Report modelling warnings");
  lint_cmd->add_option("model", model_path, "Model file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kInputError;
  }

  try {
    auto fmt = format_override(format);
    if (*compile) {
      write_output(output, format_feature(emit_feature(load_model(model_path, fmt), mode), style));
      return kOk;
    }
    if (*reverse) {
      auto inference = infer_model(load_feature(feature_path));
      print_diagnostics(inference.diagnostics);
      if (!dot_out.empty()) write_output(dot_out, render_dot(inference.model));
      write_output(model_out, serialize_dsl(inference.model));
      return has_errors(inference.diagnostics) ? kFailed : kOk;
    }
    if (*check) {
      auto model = load_model(model_path, fmt);
      FeatureDoc combined;
      for (const auto& path : feature_paths) {
        auto doc = load_feature(path);
        combined.scenarios.insert(combined.scenarios.end(), doc.scenarios.begin(), doc.scenarios.end());
      }
      auto report = check_suite(model, combined, check_mode);
      if (json_flag->count() > 0) {
        write_output(json_out.empty() ? "-" : json_out, report_json(report));
        if (!json_out.empty() && json_out != "-") std::cout << human_report(report);
      } else {
        std::cout << human_report(report);
      }
      return report.all_passed() ? kOk : kFailed;
    }
    if (*steps) {
      write_output(output, skeletons_json(emit_skeletons(load_feature(feature_path))));
      return kOk;
    }
    if (*render) {
      write_output(output, render_dot(load_model(model_path, fmt)));
      return kOk;
    }
    if (*lint_cmd) {
      auto diagnostics = lint(load_model(model_path, fmt));
      for (const auto& d : diagnostics) std::cout << format_diagnostic(d) << "\n";
      return diagnostics.empty() ? kOk : kFailed;
    }
  } catch (const SemanticError& e) {
    print_diagnostics(e.diagnostics());
    return kInputError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.code() << ": " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kInternalError;
  }
  return kInternalError;
}
