#pragma once

#include <optional>
#include <vector>

#include "graspsim/control.hpp"
#include "graspsim/rk4.hpp"

namespace graspsim {

enum class DisturbanceKind { zero, constant, sinusoid };

/// Bounded joint-torque disturbance d(t) with sup-norm bound `bound`
/// (for the constant kind the bound equals the vector's 2-norm).
struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::zero;
  Eigen::VectorXd value;      // constant kind
  Eigen::VectorXd amplitude;  // sinusoid kind
  double omega = 0.0;         // rad/s, sinusoid kind
  double bound = 0.0;

  static DisturbanceSpec zero(int n);
  static DisturbanceSpec constant(const Eigen::VectorXd& value);
  static DisturbanceSpec sinusoid(const Eigen::VectorXd& amplitude,
                                  double omega);
  int n() const;
};

/// d(t). Throws InvalidInputError for t < 0.
Eigen::VectorXd disturbance_at(const DisturbanceSpec& spec, double t);

enum class ControllerKind { pd, id_integral };

struct ControllerSpec {
  ControllerKind kind = ControllerKind::id_integral;
  GainSet gains;
};

/// Integration settings. Initial state defaults to the reference at t = 0
/// (zero initial error) when q0/qdot0 are not set.
struct SimConfig {
  double dt = 1e-3;      // s
  double duration = 60;  // s
  int record_stride = 1;
  std::optional<Eigen::VectorXd> q0;
  std::optional<Eigen::VectorXd> qdot0;
};

struct Metrics {
  /// RMS of all error entries over samples in the final 20% of the run (rad).
  double rms_error_tail = 0.0;
  /// First time after which the error inf-norm stays below 0.01 rad;
  /// nullopt when it never does.
  std::optional<double> settling_time;
  /// Trapezoidal integral of ||u||^2 over the recorded samples (N^2 m^2 s).
  double control_energy = 0.0;
};

/// Recorded closed-loop run. Samples sit at t = k * record_stride * dt,
/// k = 1..floor(duration / (dt * stride)); the initial state is not a sample.
struct SimResult {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> q, q_d, error, u, d;
  Metrics metrics;
};

/// Settling band used by Metrics (rad, inf-norm).
inline constexpr double kSettlingBand = 0.01;

/// Integrates plant + controller + disturbance over [0, duration] with
/// fixed-step RK4 on the augmented state (q, qdot, integral_error). The
/// controller and disturbance are evaluated at every integrator stage time.
/// Throws DivergenceError when the state goes non-finite.
SimResult simulate(const ManipulatorModel& model,
                   const ControllerSpec& controller,
                   const TrajectorySpec& trajectory,
                   const DisturbanceSpec& disturbance, const SimConfig& config);

/// Metrics over an explicit series (t strictly increasing, >= 5 samples).
Metrics compute_metrics(const std::vector<double>& t,
                        const std::vector<Eigen::VectorXd>& error,
                        const std::vector<Eigen::VectorXd>& u);

/// Unforced motion (u = 0, d = 0) of the plant alone; used for energy-drift
/// checks. Returns the recorded (q, qdot) trajectory.
IntegrationRecord integrate_passive(const ManipulatorModel& model,
                                    const Eigen::VectorXd& q0,
                                    const Eigen::VectorXd& qdot0,
                                    double duration, double dt);

/// Stacks a recorded joint-vector series into a (samples x n) matrix.
Eigen::MatrixXd as_matrix(const std::vector<Eigen::VectorXd>& series);

}  // namespace graspsim
