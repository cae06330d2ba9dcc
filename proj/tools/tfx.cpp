// Command line front end: run scenario files (all runs, or only their oracle
// cross-checks), validate scenarios without running, explain recorded traces,
// and lint record files for lossless round trips.

#include <cstddef>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "tfx/records.hpp"
#include "tfx/scenario.hpp"

namespace {

struct Overrides {
  bool has_seed = false;
  std::uint64_t seed = 0;
  std::string budget;     // ordinal text, empty means none
  bool has_tol = false;
  double tolerance = 0.0;

  bool any() const { return has_seed || !budget.empty() || has_tol; }
};

// Overrides are spliced into the scenario JSON before loading, so the seed
// reaches the load-time operator checks and the tolerance reaches the space
// declarations.
tfx::Scenario load_with_overrides(const std::string& path, const Overrides& ov) {
  const std::string text = tfx::read_text_file(path);
  if (!ov.any()) return tfx::load_scenario_text(text);
  if (!ov.budget.empty()) tfx::parse_ordinal(ov.budget);  // reject bad flag text up front
  nlohmann::ordered_json doc = nlohmann::ordered_json::parse(text, nullptr, false);
  // Malformed JSON: hand the raw text over so the loader reports it.
  if (doc.is_discarded() || !doc.is_object()) return tfx::load_scenario_text(text);
  if (ov.has_seed || !ov.budget.empty()) {
    nlohmann::ordered_json& d = doc["defaults"];
    if (!d.is_object()) d = nlohmann::ordered_json::object();
    if (ov.has_seed) d["seed"] = ov.seed;
    if (!ov.budget.empty()) d["budget"] = ov.budget;
  }
  if (ov.has_tol && doc.contains("spaces") && doc["spaces"].is_array()) {
    for (auto& s : doc["spaces"]) {
      if (s.is_object() && s.contains("kind") && s["kind"] == "metric") {
        s["eq_tolerance"] = ov.tolerance;
      }
    }
  }
  return tfx::load_scenario_text(doc.dump());
}

int report(const tfx::ScenarioReport& rep, const std::string& out_dir, bool verbose) {
  std::size_t passed = 0;
  for (const auto& r : rep.runs) {
    std::cout << (r.passed ? "ok    " : "FAIL  ") << r.name << " (" << r.directive
              << "): " << r.detail << "\n";
    if (verbose)
      for (const auto& a : r.artifacts) std::cout << "        wrote " << a << "\n";
    if (r.passed) ++passed;
  }
  std::cout << rep.scenario << ": " << passed << " of " << rep.runs.size()
            << " runs passed, artifacts in " << out_dir << "\n";
  return rep.all_passed() ? 0 : 1;
}

int do_run(const std::string& path, const std::string& out_dir, const Overrides& ov,
           bool verbose, bool oracle_only) {
  tfx::Scenario sc = load_with_overrides(path, ov);
  if (oracle_only) {
    nlohmann::ordered_json kept = nlohmann::ordered_json::array();
    for (const auto& r : sc.runs) {
      if (r.value("directive", "") == "oracle-check") kept.push_back(r);
    }
    sc.runs = std::move(kept);
  }
  return report(tfx::run_scenario(sc, out_dir), out_dir, verbose);
}

int do_check(const std::string& path, const Overrides& ov) {
  const tfx::Scenario sc = load_with_overrides(path, ov);
  std::cout << "scenario " << sc.name << " loads cleanly\n";
  for (const auto& s : sc.spaces)
    std::cout << "  space " << s.name << ": " << tfx::space_kind_line(s) << "\n";
  for (const auto& op : sc.operators)
    std::cout << "  operator " << op.name << " on " << op.space->name << ": "
              << tfx::op_kind_name(op.kind) << ", check " << op.check_label << "\n";
  for (const auto& g : sc.games)
    std::cout << "  game " << g.name << ": " << tfx::game_family_name(g.family) << " on "
              << g.space->name << "\n";
  for (const auto& n : sc.nested) std::cout << "  nested game " << n.name << "\n";
  for (const auto& t : sc.systems)
    std::cout << "  transition system " << t.name << ": " << t.system.states.size()
              << " states\n";
  std::cout << "  " << sc.runs.size() << " runs declared\n";
  return 0;
}

int do_explain(const std::string& path) {
  const tfx::TraceFile f = tfx::parse_trace(tfx::read_text_file(path));
  std::cout << tfx::explain_trace(f);
  return 0;
}

std::string first_line(const std::string& text) {
  const auto nl = text.find('\n');
  return text.substr(0, nl == std::string::npos ? text.size() : nl);
}

bool lint_one(const std::string& path) {
  const std::string text = tfx::read_text_file(path);
  const std::string head = first_line(text);
  std::string again, kind;
  if (head == "trace-format 1") {
    again = tfx::render_trace(tfx::parse_trace(text));
    kind = "trace";
  } else if (head == "certificate-format 1") {
    again = tfx::render_cert(tfx::parse_cert(text));
    kind = "certificate";
  } else if (head == "uniqueness-format 1") {
    again = tfx::render_uniq(tfx::parse_uniq(text));
    kind = "uniqueness";
  } else if (head == "oracle-format 1") {
    again = tfx::render_oracle(tfx::parse_oracle(text));
    kind = "oracle";
  } else {
    std::cerr << path << ": unrecognized header \"" << head << "\"\n";
    return false;
  }
  // A parse that loses information would re-render differently.
  if (again != text) {
    std::cerr << path << ": parses, but re-rendering changes the bytes\n";
    return false;
  }
  std::cout << "ok " << kind << " " << path << "\n";
  return true;
}

int do_lint(const std::vector<std::string>& paths) {
  bool all_ok = true;
  for (const auto& p : paths) {
    try {
      all_ok = lint_one(p) && all_ok;
    } catch (const std::exception& e) {
      std::cerr << p << ": " << e.what() << "\n";
      all_ok = false;
    }
  }
  return all_ok ? 0 : 1;
}

void add_override_flags(CLI::App* cmd, Overrides& ov, CLI::Option*& seed_opt,
                        CLI::Option*& tol_opt) {
  seed_opt = cmd->add_option("--seed", ov.seed, "override the default check-sampling seed");
  cmd->add_option("-b,--budget", ov.budget,
                  "override the default stage budget for runs that do not set one, e.g. w*2");
  tol_opt = cmd->add_option("--tolerance", ov.tolerance,
                            "override eq_tolerance on every metric space declaration");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stage-indexed fixpoint workbench"};
  app.require_subcommand(1);

  std::string run_path, run_out = "out";
  bool run_verbose = false;
  Overrides run_ov;
  CLI::Option *run_seed, *run_tol;
  auto* run = app.add_subcommand("run", "execute every run in a scenario file");
  run->add_option("scenario", run_path, "scenario JSON file")->required();
  run->add_option("-o,--out-dir", run_out, "directory for record artifacts")
      ->capture_default_str();
  add_override_flags(run, run_ov, run_seed, run_tol);
  run->add_flag("-v,--verbose", run_verbose, "list the artifact files written for each run");

  std::string oracle_path, oracle_out = "out";
  bool oracle_verbose = false;
  Overrides oracle_ov;
  CLI::Option *oracle_seed, *oracle_tol;
  auto* oracle =
      app.add_subcommand("oracle", "execute only the oracle-check runs in a scenario file");
  oracle->add_option("scenario", oracle_path, "scenario JSON file")->required();
  oracle->add_option("-o,--out-dir", oracle_out, "directory for record artifacts")
      ->capture_default_str();
  add_override_flags(oracle, oracle_ov, oracle_seed, oracle_tol);
  oracle->add_flag("-v,--verbose", oracle_verbose, "list the artifact files written for each run");

  std::string check_path;
  Overrides check_ov;
  CLI::Option *check_seed, *check_tol;
  auto* check = app.add_subcommand("check", "load and validate a scenario without running it");
  check->add_option("scenario", check_path, "scenario JSON file")->required();
  add_override_flags(check, check_ov, check_seed, check_tol);

  std::string trace_path;
  auto* explain = app.add_subcommand("explain", "print a stage-by-stage account of a trace file");
  explain->add_option("trace", trace_path, "recorded .trace file")->required();

  std::vector<std::string> lint_paths;
  auto* lint = app.add_subcommand("lint", "re-parse record files and verify byte-exact rendering");
  lint->add_option("files", lint_paths, "record files of any kind")->required();

  CLI11_PARSE(app, argc, argv);
  run_ov.has_seed = run_seed->count() > 0;
  run_ov.has_tol = run_tol->count() > 0;
  oracle_ov.has_seed = oracle_seed->count() > 0;
  oracle_ov.has_tol = oracle_tol->count() > 0;
  check_ov.has_seed = check_seed->count() > 0;
  check_ov.has_tol = check_tol->count() > 0;

  try {
    if (run->parsed()) return do_run(run_path, run_out, run_ov, run_verbose, false);
    if (oracle->parsed()) return do_run(oracle_path, oracle_out, oracle_ov, oracle_verbose, true);
    if (check->parsed()) return do_check(check_path, check_ov);
    if (explain->parsed()) return do_explain(trace_path);
    if (lint->parsed()) return do_lint(lint_paths);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
