#include "graspsim/sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace graspsim {

DisturbanceSpec DisturbanceSpec::zero(int n) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::zero;
  s.value = Eigen::VectorXd::Zero(n);
  s.bound = 0.0;
  return s;
}

DisturbanceSpec DisturbanceSpec::constant(const Eigen::VectorXd& value) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::constant;
  s.value = value;
  s.bound = value.norm();
  return s;
}

DisturbanceSpec DisturbanceSpec::sinusoid(const Eigen::VectorXd& amplitude,
                                          double omega) {
  DisturbanceSpec s;
  s.kind = DisturbanceKind::sinusoid;
  s.amplitude = amplitude;
  s.omega = omega;
  s.bound = amplitude.norm();
  return s;
}

int DisturbanceSpec::n() const {
  return static_cast<int>(kind == DisturbanceKind::sinusoid ? amplitude.size()
                                                            : value.size());
}

Eigen::VectorXd disturbance_at(const DisturbanceSpec& spec, double t) {
  if (t < 0.0) throw InvalidInputError("disturbance time must be >= 0");
  switch (spec.kind) {
    case DisturbanceKind::zero:
      return Eigen::VectorXd::Zero(spec.value.size());
    case DisturbanceKind::constant:
      return spec.value;
    case DisturbanceKind::sinusoid:
      return spec.amplitude * std::sin(spec.omega * t);
  }
  throw InvalidInputError("unknown disturbance kind");
}

namespace {

struct ClosedLoop {
  const ManipulatorModel& model;
  const ControllerSpec& controller;
  const TrajectorySpec& trajectory;
  const DisturbanceSpec& disturbance;
  int n;

  Eigen::VectorXd torque(double t, const Eigen::VectorXd& y,
                         TrajectoryPoint* desired_out = nullptr) const {
    const TrajectoryPoint desired = trajectory.sample(t);
    if (desired_out) *desired_out = desired;
    const JointState state{y.segment(0, n), y.segment(n, n)};
    if (controller.kind == ControllerKind::pd)
      return pd_computed_torque(model, controller.gains, state, desired);
    const ControllerState cstate{y.segment(2 * n, n)};
    return inverse_dynamics_control(model, controller.gains, state, desired,
                                    cstate);
  }

  Eigen::VectorXd operator()(double t, const Eigen::VectorXd& y) const {
    // A non-finite stage state means the trajectory is already blowing up;
    // poison the derivative so the integrator's divergence guard reports it
    // rather than tripping dynamics-level errors on garbage input.
    if (!y.allFinite())
      return Eigen::VectorXd::Constant(
          3 * n, std::numeric_limits<double>::quiet_NaN());
    const TrajectoryPoint desired = trajectory.sample(t);
    const Eigen::VectorXd q = y.segment(0, n);
    const Eigen::VectorXd qdot = y.segment(n, n);
    const Eigen::VectorXd u = torque(t, y);
    const Eigen::VectorXd d = disturbance_at(disturbance, t);
    Eigen::VectorXd dy(3 * n);
    dy.segment(0, n) = qdot;
    dy.segment(n, n) = forward_dynamics(model, q, qdot, u, d);
    dy.segment(2 * n, n) = desired.q - q;
    return dy;
  }
};

}  // namespace

SimResult simulate(const ManipulatorModel& model,
                   const ControllerSpec& controller,
                   const TrajectorySpec& trajectory,
                   const DisturbanceSpec& disturbance,
                   const SimConfig& config) {
  validate_model(model);
  validate_gains(controller.gains);
  const int n = model.n();
  if (trajectory.n() != n)
    throw InvalidInputError("trajectory dimension does not match model");
  if (controller.gains.n() != n)
    throw InvalidInputError("gain dimension does not match model");
  if (disturbance.n() != n)
    throw InvalidInputError("disturbance dimension does not match model");

  if (config.q0 && config.q0->size() != n)
    throw InvalidInputError("initial q dimension does not match model");
  if (config.qdot0 && config.qdot0->size() != n)
    throw InvalidInputError("initial qdot dimension does not match model");
  if (config.dt > 0.0 && config.record_stride >= 1 &&
      std::floor(config.duration / (config.dt * config.record_stride) +
                 1e-9) < 5.0)
    throw InvalidInputError(
        "recording grid too sparse: metrics need at least 5 recorded "
        "samples (duration / (dt * stride) >= 5)");
  const TrajectoryPoint start = trajectory.sample(0.0);
  Eigen::VectorXd y0(3 * n);
  y0.segment(0, n) = config.q0.value_or(start.q);
  y0.segment(n, n) = config.qdot0.value_or(start.qdot);
  y0.segment(2 * n, n).setZero();

  ClosedLoop loop{model, controller, trajectory, disturbance, n};
  IntegrationRecord rec = integrate_guarded(loop, y0, 0.0, config.duration,
                                            config.dt, config.record_stride);

  SimResult result;
  const size_t m = rec.t.size();
  result.t = std::move(rec.t);
  result.q.reserve(m);
  result.q_d.reserve(m);
  result.error.reserve(m);
  result.u.reserve(m);
  result.d.reserve(m);
  for (size_t k = 0; k < m; ++k) {
    const double t = result.t[k];
    const Eigen::VectorXd& y = rec.y[k];
    TrajectoryPoint desired;
    result.u.push_back(loop.torque(t, y, &desired));
    result.q.push_back(y.segment(0, n));
    result.q_d.push_back(desired.q);
    result.error.push_back(desired.q - y.segment(0, n));
    result.d.push_back(disturbance_at(disturbance, t));
  }
  result.metrics = compute_metrics(result.t, result.error, result.u);
  return result;
}

Metrics compute_metrics(const std::vector<double>& t,
                        const std::vector<Eigen::VectorXd>& error,
                        const std::vector<Eigen::VectorXd>& u) {
  const size_t m = t.size();
  if (m < 5)
    throw InvalidInputError("metrics need at least 5 samples");
  if (error.size() != m || u.size() != m)
    throw InvalidInputError("metrics series lengths differ");

  Metrics out;

  // RMS over the final 20% of the recorded time span.
  const double tail_start = t.back() - 0.2 * (t.back() - t.front());
  double sumsq = 0.0;
  long count = 0;
  for (size_t k = 0; k < m; ++k) {
    if (t[k] < tail_start) continue;
    sumsq += error[k].squaredNorm();
    count += error[k].size();
  }
  out.rms_error_tail = std::sqrt(sumsq / static_cast<double>(count));

  // First time after which ||e||_inf stays inside the band. If the run ends
  // outside the band there is no such time.
  long last_outside = -1;
  for (size_t k = 0; k < m; ++k)
    if (error[k].lpNorm<Eigen::Infinity>() >= kSettlingBand)
      last_outside = static_cast<long>(k);
  if (last_outside < 0)
    out.settling_time = t.front();
  else if (last_outside + 1 < static_cast<long>(m))
    out.settling_time = t[static_cast<size_t>(last_outside + 1)];
  else
    out.settling_time = std::nullopt;

  double energy = 0.0;
  for (size_t k = 0; k + 1 < m; ++k)
    energy += 0.5 * (u[k].squaredNorm() + u[k + 1].squaredNorm()) *
              (t[k + 1] - t[k]);
  out.control_energy = energy;
  return out;
}

IntegrationRecord integrate_passive(const ManipulatorModel& model,
                                    const Eigen::VectorXd& q0,
                                    const Eigen::VectorXd& qdot0,
                                    double duration, double dt) {
  validate_model(model);
  const int n = model.n();
  if (q0.size() != n || qdot0.size() != n)
    throw InvalidInputError("initial state dimension does not match model");
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
  auto f = [&](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(2 * n);
    dy.segment(0, n) = y.segment(n, n);
    dy.segment(n, n) =
        forward_dynamics(model, y.segment(0, n), y.segment(n, n), zero, zero);
    return dy;
  };
  Eigen::VectorXd y0(2 * n);
  y0 << q0, qdot0;
  return integrate_guarded(f, y0, 0.0, duration, dt);
}

Eigen::MatrixXd as_matrix(const std::vector<Eigen::VectorXd>& series) {
  if (series.empty()) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd M(static_cast<long>(series.size()), series[0].size());
  for (size_t k = 0; k < series.size(); ++k) M.row(static_cast<long>(k)) = series[k];
  return M;
}

}  // namespace graspsim
