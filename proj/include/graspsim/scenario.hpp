#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspsim/analysis.hpp"
#include "graspsim/sim.hpp"

namespace graspsim {

/// Where run outputs land.
struct OutputSection {
  std::string dir = "out";
  std::string basename;  // defaults to the scenario name
};

/// A fully resolved experiment description: model, controller, reference
/// trajectory, disturbance, integration settings and output destination.
struct Scenario {
  std::string name;
  ManipulatorModel model;
  std::optional<GrasperChain> grasper;  // kinematics demos only
  ControllerSpec controller;
  TrajectorySpec trajectory;
  DisturbanceSpec disturbance;
  SimConfig sim;
  OutputSection output;
};

/// Parses the sectioned key-value scenario format (see README for the
/// grammar). [controller] and [trajectory] are required; everything else
/// defaults to the stock setup. Unknown sections, unknown keys, duplicate
/// keys and malformed values raise ParseError with line/key diagnostics.
Scenario parse_scenario(const std::string& text,
                        const std::string& fallback_name = "scenario");

/// Reads and parses a scenario file.
Scenario load_scenario_file(const std::string& path);

/// Serializes a scenario with every section materialized; parsing the output
/// reproduces the scenario exactly (doubles are written round-trip exact).
std::string serialize_scenario(const Scenario& scenario);

/// Built-in scenarios: "fig6" (PD, kp=4.2/kd=2.4, no disturbance),
/// "fig7" (integral action, kd=4.2/kp=2.4/ki=1, constant d=[1,0.5]),
/// "fig8" (high gains kd=21/kp=12/ki=5, same disturbance).
std::optional<Scenario> preset(const std::string& id);
std::vector<std::string> preset_names();

/// Summary of one executed scenario.
struct RunReport {
  std::string scenario;
  StabilityVerdict verdict;
  Metrics metrics;
  std::vector<std::string> output_paths;
  double wall_seconds = 0.0;
};

/// Runs the scenario and (optionally) writes the CSV series to
/// output.dir/basename.csv. Propagates DivergenceError.
RunReport run_scenario(const Scenario& scenario, bool write_outputs = true);

/// Series CSV with header t,q1..qn,qd1..qdn,e1..en,u1..un,d1..dn and at
/// least 12 significant digits per value.
void write_series_csv(const std::string& path, const SimResult& result);

std::string format_run_report(const RunReport& report);

}  // namespace graspsim
