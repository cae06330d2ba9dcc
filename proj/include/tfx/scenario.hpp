#pragma once

#include <deque>
#include <string>
#include <vector>

#include "json.hpp"
#include "tfx/games.hpp"
#include "tfx/oracle.hpp"
#include "tfx/records.hpp"

namespace tfx {

// A scenario file declares spaces, operators, games and transition systems,
// then a list of runs over them. Loading validates every declaration
// (including the declared operator checks); running executes the runs one by
// one, isolating failures, and writes one record file per artifact.

struct ScenarioDefaults {
  std::uint64_t seed = 1;
  std::uint64_t check_samples = 512;  // sample count for contraction checks
  Ordinal budget = nat_scale(Ordinal::omega(), Nat(10));
};

struct NamedSystem {
  std::string name;
  TransitionSystem system;
};

struct Scenario {
  std::string name;
  ScenarioDefaults defaults;
  // deque keeps space addresses stable; operators and games point into it.
  std::deque<Space> spaces;
  std::vector<Operator> operators;
  std::vector<SemanticGame> games;
  std::vector<NestedGame> nested;
  std::vector<NamedSystem> systems;
  nlohmann::ordered_json runs;
};

// ParseError on malformed JSON or states, ValidationError on bad references,
// unknown keys or failed operator checks.
Scenario load_scenario_text(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

struct RunReport {
  std::string name;
  std::string directive;
  bool passed = false;
  std::string detail;
  std::vector<std::string> artifacts;  // files written, in write order
};

struct ScenarioReport {
  std::string scenario;
  std::vector<RunReport> runs;
  bool all_passed() const;
};

// Executes every run. A failing or throwing run is reported and the rest
// still execute. Artifacts land in out_dir as
// <scenario>__<run>.{trace,cert,uniq,oracle}; reruns with the same inputs
// reproduce them byte for byte.
ScenarioReport run_scenario(const Scenario& sc, const std::string& out_dir);

}  // namespace tfx
