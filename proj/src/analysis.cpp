#include "graspsim/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "graspsim/rk4.hpp"

namespace graspsim {
namespace {

std::complex<double> cubic_value(const ErrorTransfer& tf,
                                 std::complex<double> s) {
  return ((s + tf.kd) * s + tf.kp) * s + tf.ki;
}

std::complex<double> cubic_derivative(const ErrorTransfer& tf,
                                      std::complex<double> s) {
  return (3.0 * s + 2.0 * tf.kd) * s + tf.kp;
}

}  // namespace

StabilityVerdict routh_stability(double kd, double kp, double ki) {
  if (!std::isfinite(kd) || !std::isfinite(kp) || !std::isfinite(ki))
    throw InvalidInputError("gains must be finite");
  StabilityVerdict v;
  v.condition_values = {kd, ki, kd * kp - ki};
  v.margin = std::min({kd, ki, kd * kp - ki});
  v.stable = kd > 0.0 && ki > 0.0 && kd * kp > ki;
  return v;
}

StabilityVerdict closed_loop_stability(const GainSet& gains) {
  validate_gains(gains);
  StabilityVerdict worst;
  worst.stable = true;
  worst.margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < gains.n(); ++i) {
    StabilityVerdict v;
    if (gains.ki[i] > 0.0) {
      v = routh_stability(gains.kd[i], gains.kp[i], gains.ki[i]);
    } else {
      v.condition_values = {gains.kd[i], gains.kp[i],
                            gains.kd[i] * gains.kp[i]};
      v.margin = std::min(gains.kd[i], gains.kp[i]);
      v.stable = gains.kd[i] > 0.0 && gains.kp[i] > 0.0;
    }
    worst.stable = worst.stable && v.stable;
    if (v.margin < worst.margin) {
      worst.margin = v.margin;
      worst.condition_values = v.condition_values;
    }
  }
  return worst;
}

std::array<std::complex<double>, 3> poles(const ErrorTransfer& tf) {
  if (!std::isfinite(tf.kd) || !std::isfinite(tf.kp) || !std::isfinite(tf.ki))
    throw InvalidInputError("transfer coefficients must be finite");
  Eigen::Matrix3d companion;
  companion << 0.0, 0.0, -tf.ki,  //
      1.0, 0.0, -tf.kp,           //
      0.0, 1.0, -tf.kd;
  Eigen::EigenSolver<Eigen::Matrix3d> es(companion, false);

  std::array<std::complex<double>, 3> roots;
  for (int i = 0; i < 3; ++i) {
    std::complex<double> r = es.eigenvalues()[i];
    // One Newton step; skipped near a multiple root where p' vanishes.
    const std::complex<double> dp = cubic_derivative(tf, r);
    if (std::abs(dp) > 1e-8) r -= cubic_value(tf, r) / dp;
    roots[i] = r;
  }
  std::sort(roots.begin(), roots.end(),
            [](const std::complex<double>& a, const std::complex<double>& b) {
              if (a.real() != b.real()) return a.real() < b.real();
              return a.imag() < b.imag();
            });
  return roots;
}

double final_value(const ErrorTransfer& tf, double delta) {
  if (delta == 0.0) return 0.0;
  if (tf.ki > 0.0) {
    if (!routh_stability(tf.kd, tf.kp, tf.ki).stable)
      throw PreconditionError(
          "final value theorem needs a Routh-stable transfer; the limit does "
          "not exist for these gains");
    return 0.0;
  }
  if (tf.ki < 0.0) throw InvalidInputError("ki must be >= 0");
  if (!(tf.kd > 0.0 && tf.kp > 0.0))
    throw PreconditionError(
        "final value theorem needs kd > 0 and kp > 0 on the PD path");
  return delta / tf.kp;
}

std::vector<double> linear_error_response(const ErrorTransfer& tf,
                                          double delta, double t_end,
                                          double dt) {
  if (!(dt > 0.0) || !(t_end > 0.0))
    throw InvalidInputError("t_end and dt must be positive");
  auto f = [&](double, const Eigen::VectorXd& y) {
    Eigen::VectorXd dy(3);
    dy[0] = y[1];
    dy[1] = delta - tf.kd * y[1] - tf.kp * y[0] - tf.ki * y[2];
    dy[2] = y[0];
    return dy;
  };
  IntegrationRecord rec =
      integrate_guarded(f, Eigen::VectorXd::Zero(3), 0.0, t_end, dt);
  std::vector<double> e(rec.y.size());
  for (size_t k = 0; k < rec.y.size(); ++k) e[k] = rec.y[k][0];
  return e;
}

Eigen::MatrixXd error_state_matrix(const GainSet& gains) {
  validate_gains(gains);
  const int n = gains.n();
  // Stacked ordering x = (e, v, z):
  //   e' = v,  v' = -Kp e - Kd v - Ki z,  z' = e.
  Eigen::MatrixXd stacked = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  stacked.block(0, n, n, n).setIdentity();
  stacked.block(n, 0, n, n) = (-gains.kp).asDiagonal();
  stacked.block(n, n, n, n) = (-gains.kd).asDiagonal();
  stacked.block(n, 2 * n, n, n) = (-gains.ki).asDiagonal();
  stacked.block(2 * n, 0, n, n).setIdentity();

  // Permute to per-joint blocks (e_j, v_j, z_j).
  Eigen::MatrixXd A(3 * n, 3 * n);
  auto to_stacked = [n](int interleaved) {
    const int joint = interleaved / 3;
    const int comp = interleaved % 3;
    return comp * n + joint;
  };
  for (int r = 0; r < 3 * n; ++r)
    for (int c = 0; c < 3 * n; ++c) A(r, c) = stacked(to_stacked(r), to_stacked(c));
  return A;
}

}  // namespace graspsim
