#pragma once

#include <optional>
#include <string>
#include <vector>

#include "graspsim/control.hpp"
#include "graspsim/dynamics.hpp"

namespace graspsim {

/// Outcome of one named self-check.
struct CheckResult {
  std::string name;
  bool pass = false;
  double observed = 0.0;   ///< measured residual or ratio
  double threshold = 0.0;  ///< limit it was compared against
  std::string detail;      ///< one-line human readable summary
};

/// Knobs for the self-check suite. Defaults reproduce the standard run;
/// the overrides exist so tests can seed a deliberate fault and confirm
/// the corresponding check goes red.
struct VerifyOptions {
  int samples = 200;             ///< random states per identity check
  unsigned seed = 0x5eedu;       ///< RNG seed, fixed for reproducibility
  double order_dt0 = 0.05;       ///< coarsest step for the order study
  double order_duration = 5.0;   ///< horizon of the order study
  std::optional<ManipulatorModel> model;  ///< model override
  std::optional<GainSet> order_gains;     ///< gains for the order study plant
};

/// Runs every named check and returns the results in a fixed order:
/// mass_matrix_positive_definite, skew_symmetry, regressor_identity,
/// dynamics_round_trip, cancellation_identity, integrator_order,
/// final_value_consistency, energy_conservation.
std::vector<CheckResult> run_all_checks(const VerifyOptions& opts = {});

/// True iff every entry passed.
bool all_passed(const std::vector<CheckResult>& results);

/// Formats one result as "PASS name observed=... threshold=... detail".
std::string format_check(const CheckResult& r);

}  // namespace graspsim
