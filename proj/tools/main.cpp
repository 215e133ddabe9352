// graspsim command line front end.
//
// Subcommands:
//   simulate <file|preset>   run a scenario, write CSV series + report
//   analyze <kd> <kp> <ki>   stability verdict, poles, steady-state error
//   reproduce <fig6|fig7|fig8|fig9>   rerun the built-in experiments
//   verify                   run the library self-check suite
//
// Exit codes: 0 ok, 2 scenario parse error, 3 divergence, 4 check failure.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "graspsim/checks.hpp"
#include "graspsim/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitDivergence = 3;
constexpr int kExitVerify = 4;

struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<double> dt;
  std::optional<double> duration;
};

void apply(const Overrides& ov, graspsim::Scenario& sc) {
  if (ov.out_dir) sc.output.dir = *ov.out_dir;
  if (ov.dt) sc.sim.dt = *ov.dt;
  if (ov.duration) sc.sim.duration = *ov.duration;
}

graspsim::Scenario resolve_scenario(const std::string& ref) {
  if (auto sc = graspsim::preset(ref)) return *sc;
  return graspsim::load_scenario_file(ref);
}

int run_simulate(const std::string& ref, const Overrides& ov) {
  graspsim::Scenario sc = resolve_scenario(ref);
  apply(ov, sc);
  const graspsim::RunReport report = graspsim::run_scenario(sc);
  std::cout << graspsim::format_run_report(report);
  return kExitOk;
}

int run_analyze(double kd, double kp, double ki,
                const std::optional<std::string>& out_dir) {
  const graspsim::ErrorTransfer tf{kd, kp, ki};
  const graspsim::StabilityVerdict verdict =
      graspsim::routh_stability(kd, kp, ki);
  const auto roots = graspsim::poles(tf);

  std::cout << "gains: kd=" << kd << " kp=" << kp << " ki=" << ki << "\n";
  std::cout << "stable: " << (verdict.stable ? "yes" : "no") << "\n";
  std::cout << "margin: " << verdict.margin << "\n";
  std::cout << "conditions: kd=" << verdict.condition_values[0]
            << " ki=" << verdict.condition_values[1]
            << " kd*kp-ki=" << verdict.condition_values[2] << "\n";
  for (const auto& p : roots)
    std::cout << "pole: " << p.real() << (p.imag() < 0 ? " - " : " + ")
              << std::abs(p.imag()) << "j\n";
  if (verdict.stable)
    std::cout << "steady_state_error (unit constant forcing): "
              << graspsim::final_value(tf, 1.0) << "\n";
  else
    std::cout << "steady_state_error (unit constant forcing): inapplicable "
                 "(unstable)\n";

  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    const std::string path =
        (std::filesystem::path(*out_dir) / "analysis.csv").string();
    std::ofstream out(path);
    out << "kd,kp,ki,stable,margin,re1,im1,re2,im2,re3,im3\n";
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "%.15g,%.15g,%.15g,%d,%.15g,%.15g,%.15g,%.15g,%.15g,%.15g,"
                  "%.15g\n",
                  kd, kp, ki, verdict.stable ? 1 : 0, verdict.margin,
                  roots[0].real(), roots[0].imag(), roots[1].real(),
                  roots[1].imag(), roots[2].real(), roots[2].imag());
    out << buf;
    std::cout << "wrote: " << path << "\n";
  }
  return kExitOk;
}

int run_reproduce(const std::string& fig, const Overrides& ov) {
  if (fig == "fig9") {
    // Fig. 9 is the energy comparison: rerun the low- and high-gain loops
    // and report both control energies and their ordering.
    graspsim::Scenario low = *graspsim::preset("fig7");
    graspsim::Scenario high = *graspsim::preset("fig8");
    low.name = "fig9_low";
    low.output.basename = "fig9_low";
    high.name = "fig9_high";
    high.output.basename = "fig9_high";
    apply(ov, low);
    apply(ov, high);
    const graspsim::RunReport rl = graspsim::run_scenario(low);
    const graspsim::RunReport rh = graspsim::run_scenario(high);
    std::cout << graspsim::format_run_report(rl) << "\n";
    std::cout << graspsim::format_run_report(rh) << "\n";
    const bool ordered =
        rh.metrics.control_energy > rl.metrics.control_energy;
    std::cout << "energy(high) > energy(low): " << (ordered ? "yes" : "NO")
              << " (" << rh.metrics.control_energy << " vs "
              << rl.metrics.control_energy << ")\n";
    return ordered ? kExitOk : kExitVerify;
  }
  auto sc = graspsim::preset(fig);
  if (!sc) {
    std::cerr << "error: unknown figure '" << fig
              << "' (expected fig6, fig7, fig8 or fig9)\n";
    return kExitParse;
  }
  apply(ov, *sc);
  const graspsim::RunReport report = graspsim::run_scenario(*sc);
  std::cout << graspsim::format_run_report(report);
  return kExitOk;
}

int run_verify(double order_dt0) {
  graspsim::VerifyOptions opts;
  opts.order_dt0 = order_dt0;
  const auto results = graspsim::run_all_checks(opts);
  for (const auto& r : results)
    std::cout << graspsim::format_check(r) << "\n";
  const bool ok = graspsim::all_passed(results);
  std::cout << (ok ? "verify: all checks passed\n"
                   : "verify: FAILED\n");
  return ok ? kExitOk : kExitVerify;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale manipulator tracking-control toolkit"};
  app.require_subcommand(1);

  Overrides ov;
  std::string scenario_ref;
  double kd = 0, kp = 0, ki = 0;
  std::string fig;
  double order_dt0 = 0.05;
  std::optional<std::string> analyze_dir;

  CLI::App* sim = app.add_subcommand(
      "simulate", "Run a scenario file or a built-in preset");
  sim->add_option("file", scenario_ref,
                  "Scenario file path, or preset id (fig6, fig7, fig8)")
      ->required();

  CLI::App* ana = app.add_subcommand(
      "analyze", "Stability and steady-state analysis for one gain triple");
  ana->add_option("kd", kd, "Velocity gain")->required();
  ana->add_option("kp", kp, "Position gain")->required();
  ana->add_option("ki", ki, "Integral gain")->required();
  ana->add_option("--out-dir", analyze_dir, "Also write analysis.csv here");

  CLI::App* rep = app.add_subcommand(
      "reproduce", "Rerun a built-in experiment (fig6, fig7, fig8, fig9)");
  rep->add_option("fig", fig, "Figure id")->required();

  CLI::App* ver =
      app.add_subcommand("verify", "Run the library self-check suite");
  ver->add_option("--order-dt0", order_dt0,
                  "Coarsest step of the integrator order study");

  for (CLI::App* cmd : {sim, rep}) {
    cmd->add_option("--out-dir", ov.out_dir, "Output directory override");
    cmd->add_option("--dt", ov.dt, "Integration step override (s)");
    cmd->add_option("--duration", ov.duration, "Run length override (s)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (sim->parsed()) return run_simulate(scenario_ref, ov);
    if (ana->parsed()) return run_analyze(kd, kp, ki, analyze_dir);
    if (rep->parsed()) return run_reproduce(fig, ov);
    if (ver->parsed()) return run_verify(order_dt0);
  } catch (const graspsim::ParseError& ex) {
    std::cerr << "parse error";
    if (ex.line() > 0) std::cerr << " (line " << ex.line() << ")";
    if (!ex.key().empty()) std::cerr << " [" << ex.key() << "]";
    std::cerr << ": " << ex.what() << "\n";
    return kExitParse;
  } catch (const graspsim::DivergenceError& ex) {
    std::cerr << "divergence: " << ex.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return kExitParse;
  }
  return kExitOk;
}
