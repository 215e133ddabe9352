#include "graspsim/control.hpp"

#include <cmath>
#include <sstream>

namespace graspsim {
namespace {

void require_size(int got, int want, const char* name) {
  if (got != want) {
    std::ostringstream os;
    os << name << " has dimension " << got << ", expected " << want;
    throw InvalidInputError(os.str());
  }
}

}  // namespace

GainSet uniform_gains(int n, double kp, double kd, double ki) {
  GainSet g;
  g.kp = Eigen::VectorXd::Constant(n, kp);
  g.kd = Eigen::VectorXd::Constant(n, kd);
  g.ki = Eigen::VectorXd::Constant(n, ki);
  return g;
}

void validate_gains(const GainSet& gains) {
  const int n = gains.n();
  if (n < 1) throw InvalidInputError("gain set is empty");
  require_size(static_cast<int>(gains.kd.size()), n, "kd");
  require_size(static_cast<int>(gains.ki.size()), n, "ki");
  for (int i = 0; i < n; ++i) {
    if (!(gains.kp[i] > 0.0) || !(gains.kd[i] > 0.0)) {
      std::ostringstream os;
      os << "joint " << i + 1 << ": kp and kd must be > 0";
      throw InvalidInputError(os.str());
    }
    if (!(gains.ki[i] >= 0.0)) {
      std::ostringstream os;
      os << "joint " << i + 1 << ": ki must be >= 0";
      throw InvalidInputError(os.str());
    }
  }
}

TrajectoryPoint TrajectorySpec::sample(double t) const {
  const int nn = n();
  TrajectoryPoint p;
  p.q.resize(nn);
  p.qdot.resize(nn);
  p.qddot.resize(nn);
  for (int i = 0; i < nn; ++i) {
    const JointWave& w = joints[i];
    const double arg = w.omega * t + w.phase;
    const double s = std::sin(arg), c = std::cos(arg);
    if (w.shape == WaveShape::sine) {
      p.q[i] = w.amplitude * s + w.offset;
      p.qdot[i] = w.amplitude * w.omega * c;
      p.qddot[i] = -w.amplitude * w.omega * w.omega * s;
    } else {
      p.q[i] = w.amplitude * c + w.offset;
      p.qdot[i] = -w.amplitude * w.omega * s;
      p.qddot[i] = -w.amplitude * w.omega * w.omega * c;
    }
  }
  return p;
}

TrajectorySpec stock_trajectory() {
  TrajectorySpec spec;
  spec.joints = {JointWave{0.5, 1.0, 0.0, 0.0, WaveShape::sine},
                 JointWave{0.5, 1.0, 0.0, 0.0, WaveShape::cosine}};
  return spec;
}

Eigen::VectorXd auxiliary_input(const GainSet& gains, const JointState& state,
                                const TrajectoryPoint& desired,
                                const ControllerState& cstate) {
  const int n = gains.n();
  require_size(static_cast<int>(state.q.size()), n, "q");
  require_size(static_cast<int>(state.qdot.size()), n, "qdot");
  require_size(static_cast<int>(desired.q.size()), n, "q_d");
  require_size(static_cast<int>(cstate.integral_error.size()), n,
               "integral_error");
  return desired.qddot +
         (gains.kd.array() * (desired.qdot - state.qdot).array() +
          gains.kp.array() * (desired.q - state.q).array() +
          gains.ki.array() * cstate.integral_error.array())
             .matrix();
}

Eigen::VectorXd inverse_dynamics_control(const ManipulatorModel& model,
                                         const GainSet& gains,
                                         const JointState& state,
                                         const TrajectoryPoint& desired,
                                         const ControllerState& cstate) {
  const Eigen::VectorXd v = auxiliary_input(gains, state, desired, cstate);
  return mass_matrix(model, state.q) * v +
         coriolis_matrix(model, state.q, state.qdot) * state.qdot +
         gravity_vector(model, state.q);
}

Eigen::VectorXd pd_computed_torque(const ManipulatorModel& model,
                                   const GainSet& gains,
                                   const JointState& state,
                                   const TrajectoryPoint& desired) {
  GainSet pd = gains;
  pd.ki.setZero();
  return inverse_dynamics_control(model, pd, state, desired,
                                  ControllerState::zero(gains.n()));
}

ControllerState update_integral(const ControllerState& cstate,
                                const Eigen::VectorXd& q_d,
                                const Eigen::VectorXd& q, double dt) {
  if (!(dt > 0.0)) throw InvalidInputError("dt must be positive");
  require_size(static_cast<int>(q.size()),
               static_cast<int>(q_d.size()), "q");
  require_size(static_cast<int>(cstate.integral_error.size()),
               static_cast<int>(q_d.size()), "integral_error");
  ControllerState next = cstate;
  next.integral_error += dt * (q_d - q);
  return next;
}

}  // namespace graspsim
