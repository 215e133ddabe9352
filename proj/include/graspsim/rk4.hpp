#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <utility>
#include <vector>

#include "graspsim/errors.hpp"

namespace graspsim {

/// One classical 4th-order Runge-Kutta step of y' = f(t, y).
template <class F>
Eigen::VectorXd rk4_step(F&& f, double t, const Eigen::VectorXd& y,
                         double dt) {
  const Eigen::VectorXd k1 = f(t, y);
  const Eigen::VectorXd k2 = f(t + 0.5 * dt, y + (0.5 * dt) * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * dt, y + (0.5 * dt) * k2);
  const Eigen::VectorXd k4 = f(t + dt, y + dt * k3);
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// Recorded samples of a guarded integration. Sample k sits at
/// t = t0 + (k+1) * stride * dt; the initial state is not recorded.
struct IntegrationRecord {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
};

/// Fixed-step RK4 over [t0, t0 + duration], recording every stride-th step.
/// Step times are computed as t0 + k*dt (never accumulated). Throws
/// DivergenceError the moment any state entry becomes non-finite.
template <class F>
IntegrationRecord integrate_guarded(F&& f, Eigen::VectorXd y0, double t0,
                                    double duration, double dt,
                                    int stride = 1) {
  if (dt <= 0.0) throw InvalidInputError("dt must be positive");
  if (duration < dt) throw InvalidInputError("duration must be at least dt");
  if (stride < 1) throw InvalidInputError("record stride must be >= 1");

  const long steps = static_cast<long>(std::floor(duration / dt + 1e-9));
  IntegrationRecord rec;
  rec.t.reserve(static_cast<size_t>(steps / stride));
  rec.y.reserve(static_cast<size_t>(steps / stride));

  Eigen::VectorXd y = std::move(y0);
  for (long k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    y = rk4_step(f, t, y, dt);
    const double t_next = t0 + static_cast<double>(k + 1) * dt;
    if (!y.allFinite()) {
      std::ostringstream os;
      os << "state became non-finite at t = " << t_next;
      throw DivergenceError(t_next, os.str());
    }
    if ((k + 1) % stride == 0) {
      rec.t.push_back(t_next);
      rec.y.push_back(y);
    }
  }
  return rec;
}

}  // namespace graspsim
