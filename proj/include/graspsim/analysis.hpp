#pragma once

#include <array>
#include <complex>
#include <vector>

#include "graspsim/control.hpp"

namespace graspsim {

/// Per-joint error transfer function of the integral-action closed loop,
///   G(s) = s / (s^3 + kd s^2 + kp s + ki),
/// mapping a disturbance-induced forcing to the tracking error. ki = 0
/// degenerates to the PD case 1 / (s^2 + kd s + kp).
struct ErrorTransfer {
  double kd = 0.0, kp = 0.0, ki = 0.0;
};

/// Routh-Hurwitz verdict for the monic cubic s^3 + kd s^2 + kp s + ki:
/// stable iff kd > 0, ki > 0 and kd*kp > ki.
struct StabilityVerdict {
  bool stable = false;
  /// min(kd, ki, kd*kp - ki); positive iff stable.
  double margin = 0.0;
  /// The three tested quantities (kd, ki, kd*kp - ki).
  std::array<double, 3> condition_values{};
};

StabilityVerdict routh_stability(double kd, double kp, double ki);

/// Stability of the closed loop a GainSet actually produces: the cubic Routh
/// test per joint when ki > 0, the second-order test (kd > 0 and kp > 0,
/// margin min(kd, kp)) for PD joints. Returns the worst joint's verdict.
StabilityVerdict closed_loop_stability(const GainSet& gains);

/// Roots of s^3 + kd s^2 + kp s + ki via companion-matrix eigenvalues with
/// one Newton polish step, sorted by real part (then imaginary part).
std::array<std::complex<double>, 3> poles(const ErrorTransfer& transfer);

/// Steady-state error for a constant forcing delta (final value theorem):
/// 0 exactly when ki > 0, delta/kp on the PD path (ki = 0), and 0 when
/// delta = 0 regardless of gains. Throws PreconditionError when the transfer
/// is unstable (the limit does not exist).
double final_value(const ErrorTransfer& transfer, double delta);

/// Tracking-error response of one joint's linear error dynamics to a
/// constant forcing delta, from zero initial error: integrates
///   e' = v,  v' = delta - kd v - kp e - ki z,  z' = e
/// with fixed-step RK4 and returns e at t = dt, 2 dt, ..., floor(t_end/dt) dt.
std::vector<double> linear_error_response(const ErrorTransfer& transfer,
                                          double delta, double t_end,
                                          double dt);

/// 3n x 3n state matrix of the n-joint linear error dynamics in per-joint
/// ordering (e_1, v_1, z_1, e_2, ...). With diagonal gains the off-diagonal
/// 3x3 blocks are exactly zero: the joints are literally decoupled.
Eigen::MatrixXd error_state_matrix(const GainSet& gains);

}  // namespace graspsim
