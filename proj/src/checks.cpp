#include "graspsim/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <iterator>
#include <limits>
#include <random>
#include <sstream>

#include "graspsim/analysis.hpp"
#include "graspsim/sim.hpp"

namespace graspsim {
namespace {

Eigen::VectorXd random_vector(std::mt19937& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

ManipulatorModel check_model(const VerifyOptions& opts) {
  return opts.model ? *opts.model : stock_two_link();
}

CheckResult check_mass_matrix_pd(const VerifyOptions& opts) {
  const ManipulatorModel model = check_model(opts);
  std::mt19937 rng(opts.seed + 1);
  const double pi = std::acos(-1.0);
  double min_eig = std::numeric_limits<double>::infinity();
  double max_asym = 0.0;
  for (int s = 0; s < opts.samples; ++s) {
    const Eigen::VectorXd q = random_vector(rng, model.n(), -pi, pi);
    const Matrix M = mass_matrix(model, q);
    max_asym = std::max(max_asym, (M - M.transpose()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<Matrix> es(M);
    min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
  }
  std::ostringstream detail;
  detail << "min eigenvalue " << min_eig << ", max asymmetry " << max_asym;
  return {"mass_matrix_positive_definite", min_eig > 0.0 && max_asym == 0.0,
          min_eig, 0.0, detail.str()};
}

CheckResult check_skew_symmetry(const VerifyOptions& opts) {
  const ManipulatorModel model = check_model(opts);
  std::mt19937 rng(opts.seed + 2);
  const double pi = std::acos(-1.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int s = 0; s < opts.samples; ++s) {
    const Eigen::VectorXd q = random_vector(rng, model.n(), -pi, pi);
    const Eigen::VectorXd qdot = random_vector(rng, model.n(), -2.0, 2.0);
    const Matrix Mdot = (mass_matrix(model, q + h * qdot) -
                         mass_matrix(model, q - h * qdot)) /
                        (2.0 * h);
    const Matrix S = Mdot - 2.0 * coriolis_matrix(model, q, qdot);
    worst = std::max(worst, (S + S.transpose()).cwiseAbs().maxCoeff());
  }
  return {"skew_symmetry", worst < 1e-8, worst, 1e-8,
          "max |(Mdot - 2C) + (Mdot - 2C)^T| over random states"};
}

CheckResult check_regressor(const VerifyOptions& opts) {
  const ManipulatorModel model = check_model(opts);
  std::mt19937 rng(opts.seed + 3);
  const double pi = std::acos(-1.0);
  const Eigen::VectorXd theta = base_parameters(model).theta;
  double worst = 0.0;
  for (int s = 0; s < opts.samples; ++s) {
    const Eigen::VectorXd q = random_vector(rng, model.n(), -pi, pi);
    const Eigen::VectorXd qdot = random_vector(rng, model.n(), -2.0, 2.0);
    const Eigen::VectorXd qddot = random_vector(rng, model.n(), -2.0, 2.0);
    const Eigen::VectorXd lhs = regressor(model, q, qdot, qddot) * theta;
    const Eigen::VectorXd rhs = inverse_dynamics(model, q, qdot, qddot);
    worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  return {"regressor_identity", worst < 1e-10, worst, 1e-10,
          "max |Y(q,qdot,qddot) theta - tau| over random states"};
}

CheckResult check_round_trip(const VerifyOptions& opts) {
  const ManipulatorModel model = check_model(opts);
  std::mt19937 rng(opts.seed + 4);
  const double pi = std::acos(-1.0);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.n());
  double worst = 0.0;
  for (int s = 0; s < opts.samples; ++s) {
    const Eigen::VectorXd q = random_vector(rng, model.n(), -pi, pi);
    const Eigen::VectorXd qdot = random_vector(rng, model.n(), -2.0, 2.0);
    const Eigen::VectorXd qddot = random_vector(rng, model.n(), -2.0, 2.0);
    const Eigen::VectorXd u = inverse_dynamics(model, q, qdot, qddot);
    const Eigen::VectorXd back = forward_dynamics(model, q, qdot, u, zero);
    worst = std::max(worst, (back - qddot).cwiseAbs().maxCoeff());
  }
  return {"dynamics_round_trip", worst < 1e-9, worst, 1e-9,
          "max |FD(q,qdot,ID(q,qdot,qddot)) - qddot| over random states"};
}

CheckResult check_cancellation(const VerifyOptions& opts) {
  const ManipulatorModel model = check_model(opts);
  std::mt19937 rng(opts.seed + 5);
  const double pi = std::acos(-1.0);
  const GainSet gains = uniform_gains(model.n(), 2.4, 4.2, 1.0);
  double worst = 0.0;
  for (int s = 0; s < opts.samples; ++s) {
    JointState state{random_vector(rng, model.n(), -pi, pi),
                     random_vector(rng, model.n(), -2.0, 2.0)};
    TrajectoryPoint desired{random_vector(rng, model.n(), -pi, pi),
                            random_vector(rng, model.n(), -2.0, 2.0),
                            random_vector(rng, model.n(), -2.0, 2.0)};
    ControllerState cstate{random_vector(rng, model.n(), -1.0, 1.0)};
    const Eigen::VectorXd d = random_vector(rng, model.n(), -1.0, 1.0);
    const Eigen::VectorXd u =
        inverse_dynamics_control(model, gains, state, desired, cstate);
    const Eigen::VectorXd v = auxiliary_input(gains, state, desired, cstate);
    const Eigen::VectorXd acc =
        forward_dynamics(model, state.q, state.qdot, u, d);
    const Eigen::VectorXd md =
        mass_matrix(model, state.q).ldlt().solve(d);
    worst = std::max(worst, (acc - v - md).cwiseAbs().maxCoeff());
  }
  return {"cancellation_identity", worst < 1e-10, worst, 1e-10,
          "max |FD(q,qdot,u,d) - v - M^{-1} d| with u from the torque law"};
}

/// Final augmented state (q, qdot, integral_error) of the stock closed loop
/// after `duration` seconds at step dt.
Eigen::VectorXd closed_loop_final_state(const ManipulatorModel& model,
                                        const GainSet& gains, double duration,
                                        double dt) {
  const TrajectorySpec traj = stock_trajectory();
  const DisturbanceSpec dist =
      DisturbanceSpec::constant(Eigen::Vector2d(1.0, 0.5));
  const int n = model.n();
  auto f = [&](double t, const Eigen::VectorXd& y) {
    JointState state{y.segment(0, n), y.segment(n, n)};
    ControllerState cstate{y.segment(2 * n, n)};
    const TrajectoryPoint desired = traj.sample(t);
    const Eigen::VectorXd u =
        inverse_dynamics_control(model, gains, state, desired, cstate);
    Eigen::VectorXd dy(3 * n);
    dy.segment(0, n) = state.qdot;
    dy.segment(n, n) = forward_dynamics(model, state.q, state.qdot, u,
                                        disturbance_at(dist, t));
    dy.segment(2 * n, n) = desired.q - state.q;
    return dy;
  };
  const TrajectoryPoint start = traj.sample(0.0);
  Eigen::VectorXd y0(3 * n);
  y0 << start.q, start.qdot, Eigen::VectorXd::Zero(n);
  const int steps = static_cast<int>(std::floor(duration / dt + 1e-9));
  const IntegrationRecord rec =
      integrate_guarded(f, y0, 0.0, duration, dt, steps);
  return rec.y.back();
}

CheckResult check_integrator_order(const VerifyOptions& opts) {
  const ManipulatorModel model = check_model(opts);
  const GainSet gains = opts.order_gains
                            ? *opts.order_gains
                            : uniform_gains(model.n(), 2.4, 4.2, 1.0);
  const double dt0 = opts.order_dt0;
  const double T = opts.order_duration;
  const Eigen::VectorXd ya = closed_loop_final_state(model, gains, T, dt0);
  const Eigen::VectorXd yb =
      closed_loop_final_state(model, gains, T, dt0 / 2.0);
  const Eigen::VectorXd yc =
      closed_loop_final_state(model, gains, T, dt0 / 4.0);
  const double e1 = (ya - yb).cwiseAbs().maxCoeff();
  const double e2 = (yb - yc).cwiseAbs().maxCoeff();
  const double ratio = e1 / e2;
  std::ostringstream detail;
  detail << "dt-halving error ratio at dt0 = " << dt0 << " is " << ratio
         << " (4th order predicts ~16, accepted range [8, 32])";
  return {"integrator_order", ratio >= 8.0 && ratio <= 32.0, ratio, 8.0,
          detail.str()};
}

CheckResult check_final_value(const VerifyOptions& opts) {
  (void)opts;
  const ErrorTransfer cases[] = {
      {4.2, 2.4, 1.0},  // stock integral gains
      {21.0, 12.0, 5.0},  // high-gain set
      {4.2, 2.4, 0.0},  // PD path
  };
  double worst = 0.0;
  for (const ErrorTransfer& tf : cases) {
    const double margin =
        tf.ki > 0.0 ? routh_stability(tf.kd, tf.kp, tf.ki).margin
                    : std::min(tf.kd, tf.kp);
    const double t_end = 200.0 / margin;
    const double fv = final_value(tf, 1.0);
    const std::vector<double> e = linear_error_response(tf, 1.0, t_end, 1e-3);
    worst = std::max(worst, std::abs(e.back() - fv));
  }
  return {"final_value_consistency", worst < 1e-6, worst, 1e-6,
          "simulated linear error vs final value theorem, constant forcing"};
}

CheckResult check_energy_conservation(const VerifyOptions& opts) {
  ManipulatorModel model = check_model(opts);
  model.gravity = 0.0;  // potential off: total energy is the kinetic energy
  Eigen::VectorXd q0(model.n()), qdot0(model.n());
  for (int i = 0; i < model.n(); ++i) {
    q0[i] = 0.3 * (i + 1);
    qdot0[i] = (i % 2 == 0) ? 1.0 : -0.5;
  }
  const double e0 = kinetic_energy(model, q0, qdot0);
  const IntegrationRecord rec =
      integrate_passive(model, q0, qdot0, 10.0, 1e-3);
  double drift = 0.0;
  for (const Eigen::VectorXd& y : rec.y) {
    const double e = kinetic_energy(model, y.segment(0, model.n()),
                                    y.segment(model.n(), model.n()));
    drift = std::max(drift, std::abs(e - e0));
  }
  const double rel = drift / e0;
  return {"energy_conservation", rel < 1e-6, rel, 1e-6,
          "relative kinetic-energy drift, unforced 10 s run with gravity off"};
}

}  // namespace

std::vector<CheckResult> run_all_checks(const VerifyOptions& opts) {
  using Runner = CheckResult (*)(const VerifyOptions&);
  const Runner runners[] = {
      check_mass_matrix_pd,   check_skew_symmetry,
      check_regressor,        check_round_trip,
      check_cancellation,     check_integrator_order,
      check_final_value,      check_energy_conservation,
  };
  const char* names[] = {
      "mass_matrix_positive_definite",
      "skew_symmetry",
      "regressor_identity",
      "dynamics_round_trip",
      "cancellation_identity",
      "integrator_order",
      "final_value_consistency",
      "energy_conservation",
  };
  std::vector<std::future<CheckResult>> futures;
  futures.reserve(std::size(runners));
  for (Runner r : runners)
    futures.push_back(std::async(std::launch::async, [r, &opts] {
      return r(opts);
    }));
  std::vector<CheckResult> results;
  results.reserve(futures.size());
  for (size_t i = 0; i < futures.size(); ++i) {
    try {
      results.push_back(futures[i].get());
    } catch (const std::exception& ex) {
      results.push_back(CheckResult{names[i], false, 0.0, 0.0,
                                    std::string("raised: ") + ex.what()});
    }
  }
  return results;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(),
                     [](const CheckResult& r) { return r.pass; });
}

std::string format_check(const CheckResult& r) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", r.observed);
  std::string line = (r.pass ? "PASS " : "FAIL ") + r.name + "  observed=";
  line += buf;
  std::snprintf(buf, sizeof(buf), "%.6g", r.threshold);
  line += std::string("  threshold=") + buf + "  (" + r.detail + ")";
  return line;
}

}  // namespace graspsim
