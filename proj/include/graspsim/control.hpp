#pragma once

#include <Eigen/Dense>
#include <vector>

#include "graspsim/dynamics.hpp"

namespace graspsim {

/// Diagonal controller gains, one entry per joint. ki = 0 selects the pure
/// PD computed-torque law.
struct GainSet {
  Eigen::VectorXd kp, kd, ki;

  int n() const { return static_cast<int>(kp.size()); }
};

/// Scalar-times-identity gains for an n-joint arm.
GainSet uniform_gains(int n, double kp, double kd, double ki);

/// Validates positivity and matching dimensions; throws InvalidInputError.
/// Requires kp > 0, kd > 0, ki >= 0 per joint.
void validate_gains(const GainSet& gains);

/// Integral-action accumulator: integral of (q_d - q) since t = 0.
struct ControllerState {
  Eigen::VectorXd integral_error;

  static ControllerState zero(int n) {
    return ControllerState{Eigen::VectorXd::Zero(n)};
  }
};

struct JointState {
  Eigen::VectorXd q, qdot;
};

/// Desired trajectory sample: position, velocity, acceleration.
struct TrajectoryPoint {
  Eigen::VectorXd q, qdot, qddot;
};

enum class WaveShape { sine, cosine };

/// One joint's reference signal: amplitude * {sin|cos}(omega t + phase) + offset.
struct JointWave {
  double amplitude = 0.0;
  double omega = 1.0;  // rad/s
  double phase = 0.0;  // rad
  double offset = 0.0;
  WaveShape shape = WaveShape::sine;
};

/// Per-joint analytic reference trajectory with consistent derivatives.
struct TrajectorySpec {
  std::vector<JointWave> joints;

  int n() const { return static_cast<int>(joints.size()); }
  TrajectoryPoint sample(double t) const;
};

/// The reference used by the stock scenarios: q_d(t) = 0.5 [sin t; cos t].
TrajectorySpec stock_trajectory();

/// Acceleration command
///   v = qddot_d + kd (qdot_d - qdot) + kp (q_d - q) + ki * integral_error
/// with elementwise (diagonal) gains.
Eigen::VectorXd auxiliary_input(const GainSet& gains, const JointState& state,
                                const TrajectoryPoint& desired,
                                const ControllerState& cstate);

/// Computed-torque law with integral action:
///   u = M(q) v + C(q, qdot) qdot + g(q),  v = auxiliary_input(...).
/// With an exact model the closed loop satisfies qddot = v + M^{-1} d.
Eigen::VectorXd inverse_dynamics_control(const ManipulatorModel& model,
                                         const GainSet& gains,
                                         const JointState& state,
                                         const TrajectoryPoint& desired,
                                         const ControllerState& cstate);

/// Computed-torque PD law: inverse_dynamics_control with ki forced to zero
/// and a zero integral accumulator (identical arithmetic path).
Eigen::VectorXd pd_computed_torque(const ManipulatorModel& model,
                                   const GainSet& gains,
                                   const JointState& state,
                                   const TrajectoryPoint& desired);

/// Fixed-sample accumulator update (rectangle rule). The simulator does not
/// use this: there the accumulator is integrated as augmented ODE state.
ControllerState update_integral(const ControllerState& cstate,
                                const Eigen::VectorXd& q_d,
                                const Eigen::VectorXd& q, double dt);

}  // namespace graspsim
