#include "graspsim/dynamics.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace graspsim {
namespace {

// Per-link grouped parameters (a, b, c) = (m, m*r, m*r^2 + I). The planar
// dynamics are linear in these, which is what makes the regressor exact.
struct Grouped {
  double a = 0.0, b = 0.0, c = 0.0;
};

std::vector<Grouped> grouped_params(const ManipulatorModel& model) {
  std::vector<Grouped> th(model.links.size());
  for (size_t i = 0; i < model.links.size(); ++i) {
    const LinkParams& lk = model.links[i];
    th[i] = {lk.mass, lk.mass * lk.com_distance,
             lk.mass * lk.com_distance * lk.com_distance + lk.inertia_zz};
  }
  return th;
}

std::vector<double> link_lengths(const ManipulatorModel& model) {
  std::vector<double> l(model.links.size());
  for (size_t i = 0; i < model.links.size(); ++i) l[i] = model.links[i].length;
  return l;
}

void require_dimension(const ManipulatorModel& model, const JointVector& v,
                       const char* name) {
  if (v.size() != model.n()) {
    std::ostringstream os;
    os << name << " has dimension " << v.size() << ", model expects "
       << model.n();
    throw InvalidInputError(os.str());
  }
}

void require_revolute(const ManipulatorModel& model) {
  for (JointType jt : model.joint_types) {
    if (jt != JointType::revolute) {
      throw InvalidInputError(
          "dynamics cover planar revolute chains only; prismatic joints are "
          "kinematics-only (GrasperChain)");
    }
  }
}

// Geometry shared by M, dM/dq, gravity and the energies: cumulative link
// angles and their sin/cos.
struct Frames {
  std::vector<double> s, c;  // sin/cos of Theta_i = q_0 + ... + q_i
};

Frames frames(const JointVector& q) {
  Frames f;
  const int n = static_cast<int>(q.size());
  f.s.resize(n);
  f.c.resize(n);
  double theta = 0.0;
  for (int i = 0; i < n; ++i) {
    theta += q[i];
    f.s[i] = std::sin(theta);
    f.c[i] = std::cos(theta);
  }
  return f;
}

// Mass matrix for arbitrary grouped parameters, optionally with all partial
// derivatives dM/dq_l.
//
// With u_k = (cos Theta_k, sin Theta_k), link i's joint origin is
// p_i = sum_{k<i} l_k u_k, its origin Jacobian J_i has column j =
// sum_{k in [j, i)} l_k u_k^perp, and the unit-vector Jacobian W_i has
// u_i^perp in every column j <= i. Then
//   M = sum_i [ a_i J_i^T J_i + b_i (J_i^T W_i + W_i^T J_i) + c_i E_i ],
// where (E_i)_{jm} = 1 for j, m <= i. Differentiating u^perp rotates it to
// -u, which gives exact dM/dq and therefore exactly skew Mdot - 2C.
struct MassAssembly {
  Matrix M;
  std::vector<Matrix> dM;  // dM[l] = dM/dq_l, empty unless requested
};

MassAssembly assemble_mass(const std::vector<double>& l,
                           const std::vector<Grouped>& th, const JointVector& q,
                           bool want_derivatives) {
  const int n = static_cast<int>(q.size());
  const Frames f = frames(q);

  MassAssembly out;
  out.M = Matrix::Zero(n, n);
  if (want_derivatives) out.dM.assign(n, Matrix::Zero(n, n));

  Matrix J(2, n), W(2, n), dJ(2, n), dW(2, n);
  for (int i = 0; i < n; ++i) {
    J.setZero();
    for (int j = 0; j < i; ++j)
      for (int k = j; k < i; ++k) {
        J(0, j) += l[k] * -f.s[k];
        J(1, j) += l[k] * f.c[k];
      }
    W.setZero();
    for (int j = 0; j <= i; ++j) {
      W(0, j) = -f.s[i];
      W(1, j) = f.c[i];
    }

    out.M.noalias() += th[i].a * (J.transpose() * J);
    out.M.noalias() += th[i].b * (J.transpose() * W + W.transpose() * J);
    out.M.topLeftCorner(i + 1, i + 1).array() += th[i].c;

    if (!want_derivatives) continue;
    for (int lidx = 0; lidx < n; ++lidx) {
      dJ.setZero();
      for (int j = 0; j < i; ++j)
        for (int k = std::max(j, lidx); k < i; ++k) {
          dJ(0, j) += l[k] * -f.c[k];
          dJ(1, j) += l[k] * -f.s[k];
        }
      dW.setZero();
      if (lidx <= i)
        for (int j = 0; j <= i; ++j) {
          dW(0, j) = -f.c[i];
          dW(1, j) = -f.s[i];
        }
      Matrix& D = out.dM[lidx];
      D.noalias() += th[i].a * (dJ.transpose() * J + J.transpose() * dJ);
      D.noalias() += th[i].b * (dJ.transpose() * W + J.transpose() * dW +
                                dW.transpose() * J + W.transpose() * dJ);
    }
  }
  return out;
}

Matrix christoffel_coriolis(const std::vector<Matrix>& dM,
                            const JointVector& qdot) {
  const int n = static_cast<int>(qdot.size());
  Matrix C = Matrix::Zero(n, n);
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j) {
      double ckj = 0.0;
      for (int i = 0; i < n; ++i)
        ckj += 0.5 * (dM[i](k, j) + dM[j](k, i) - dM[k](i, j)) * qdot[i];
      C(k, j) = ckj;
    }
  return C;
}

JointVector gravity_for_params(const std::vector<double>& l,
                               const std::vector<Grouped>& th, double g0,
                               const JointVector& q) {
  const int n = static_cast<int>(q.size());
  const Frames f = frames(q);
  JointVector g = JointVector::Zero(n);
  // PE = g0 * sum_i (a_i * p_{i,y} + b_i * sin Theta_i), so
  // dPE/dq_j = g0 * sum_i (a_i * sum_{k in [j, i)} l_k cos Theta_k
  //                        + b_i * cos Theta_i [j <= i]).
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = j; k < i; ++k) acc += l[k] * f.c[k];
      acc *= th[i].a;
      if (j <= i) acc += th[i].b * f.c[i];
      g[j] += g0 * acc;
    }
  }
  return g;
}

JointVector tau_for_params(const std::vector<double>& l,
                           const std::vector<Grouped>& th, double g0,
                           const JointVector& q, const JointVector& qdot,
                           const JointVector& qddot) {
  MassAssembly ma = assemble_mass(l, th, q, true);
  Matrix C = christoffel_coriolis(ma.dM, qdot);
  return ma.M * qddot + C * qdot + gravity_for_params(l, th, g0, q);
}

}  // namespace

std::array<GrasperChain::DhRow, 3> GrasperChain::dh_table() const {
  // Zero-configuration values; joint values add to theta (revolute rows) or
  // d (prismatic row) at evaluation.
  constexpr double half_pi = 1.5707963267948966;
  return {DhRow{0.0, half_pi, 0.0, 0.0}, DhRow{0.0, -half_pi, 0.0, 0.0},
          DhRow{0.0, 0.0, L1 + L2, 0.0}};
}

void validate_model(const ManipulatorModel& model) {
  if (model.n() < 1) throw InvalidInputError("model needs at least one link");
  if (model.joint_types.size() != model.links.size())
    throw InvalidInputError("joint_types size must match links size");
  for (size_t i = 0; i < model.links.size(); ++i) {
    const LinkParams& lk = model.links[i];
    std::ostringstream os;
    if (lk.mass < 0.0) {
      os << "link " << i + 1 << ": mass must be >= 0";
      throw InvalidInputError(os.str());
    }
    if (lk.length <= 0.0) {
      os << "link " << i + 1 << ": length must be > 0";
      throw InvalidInputError(os.str());
    }
    if (lk.com_distance < 0.0 || lk.com_distance > lk.length) {
      os << "link " << i + 1 << ": com_distance must lie in [0, length]";
      throw InvalidInputError(os.str());
    }
    if (lk.inertia_zz < 0.0) {
      os << "link " << i + 1 << ": inertia_zz must be >= 0";
      throw InvalidInputError(os.str());
    }
  }
}

ManipulatorModel stock_two_link() {
  static const ManipulatorModel cached = [] {
    ManipulatorModel m;
    m.links = {LinkParams{1.0, 1.0, 0.5, 1.0 / 12.0},
               LinkParams{1.0, 1.0, 0.5, 1.0 / 12.0}};
    m.joint_types = {JointType::revolute, JointType::revolute};
    m.gravity = 9.81;
    certify_inertia_bounds(m);
    return m;
  }();
  return cached;
}

Matrix mass_matrix(const ManipulatorModel& model, const JointVector& q) {
  require_dimension(model, q, "q");
  require_revolute(model);
  return assemble_mass(link_lengths(model), grouped_params(model), q, false).M;
}

Matrix coriolis_matrix(const ManipulatorModel& model, const JointVector& q,
                       const JointVector& qdot) {
  require_dimension(model, q, "q");
  require_dimension(model, qdot, "qdot");
  require_revolute(model);
  MassAssembly ma =
      assemble_mass(link_lengths(model), grouped_params(model), q, true);
  return christoffel_coriolis(ma.dM, qdot);
}

JointVector gravity_vector(const ManipulatorModel& model,
                           const JointVector& q) {
  require_dimension(model, q, "q");
  require_revolute(model);
  return gravity_for_params(link_lengths(model), grouped_params(model),
                            model.gravity, q);
}

JointVector inverse_dynamics(const ManipulatorModel& model,
                             const JointVector& q, const JointVector& qdot,
                             const JointVector& qddot) {
  require_dimension(model, q, "q");
  require_dimension(model, qdot, "qdot");
  require_dimension(model, qddot, "qddot");
  require_revolute(model);
  return tau_for_params(link_lengths(model), grouped_params(model),
                        model.gravity, q, qdot, qddot);
}

JointVector forward_dynamics(const ManipulatorModel& model,
                             const JointVector& q, const JointVector& qdot,
                             const JointVector& u, const JointVector& d) {
  require_dimension(model, q, "q");
  require_dimension(model, qdot, "qdot");
  require_dimension(model, u, "u");
  require_dimension(model, d, "d");
  require_revolute(model);
  const std::vector<double> l = link_lengths(model);
  const std::vector<Grouped> th = grouped_params(model);
  MassAssembly ma = assemble_mass(l, th, q, true);
  Eigen::LDLT<Matrix> ldlt(ma.M);
  if (ldlt.info() != Eigen::Success || ldlt.rcond() < 1e-12)
    throw SingularMatrixError(
        "mass matrix numerically singular (rcond < 1e-12); model is broken");
  Matrix C = christoffel_coriolis(ma.dM, qdot);
  JointVector rhs =
      u + d - C * qdot - gravity_for_params(l, th, model.gravity, q);
  return ldlt.solve(rhs);
}

Matrix regressor(const ManipulatorModel& model, const JointVector& q,
                 const JointVector& qdot, const JointVector& qddot) {
  require_dimension(model, q, "q");
  require_dimension(model, qdot, "qdot");
  require_dimension(model, qddot, "qddot");
  require_revolute(model);
  const int n = model.n();
  const std::vector<double> l = link_lengths(model);
  const int p = base_parameter_count(n);
  Matrix Y(n, p);
  std::vector<Grouped> unit(n);
  int col = 0;
  for (int i = 0; i < n; ++i) {
    const int first = (i == 0) ? 1 : 0;  // a_1 never enters; skip it
    for (int slot = first; slot < 3; ++slot) {
      for (auto& gp : unit) gp = Grouped{};
      (slot == 0 ? unit[i].a : slot == 1 ? unit[i].b : unit[i].c) = 1.0;
      Y.col(col++) = tau_for_params(l, unit, model.gravity, q, qdot, qddot);
    }
  }
  return Y;
}

DynamicParameters base_parameters(const ManipulatorModel& model) {
  const std::vector<Grouped> th = grouped_params(model);
  const int n = model.n();
  DynamicParameters out;
  out.theta.resize(base_parameter_count(n));
  int idx = 0;
  for (int i = 0; i < n; ++i) {
    if (i > 0) out.theta[idx++] = th[i].a;
    out.theta[idx++] = th[i].b;
    out.theta[idx++] = th[i].c;
  }
  return out;
}

Eigen::Vector2d forward_kinematics(const ManipulatorModel& model,
                                   const JointVector& q) {
  require_dimension(model, q, "q");
  require_revolute(model);
  const Frames f = frames(q);
  Eigen::Vector2d p = Eigen::Vector2d::Zero();
  for (int i = 0; i < model.n(); ++i) {
    p.x() += model.links[i].length * f.c[i];
    p.y() += model.links[i].length * f.s[i];
  }
  return p;
}

Eigen::Vector3d forward_kinematics(const GrasperChain& chain,
                                   const Eigen::Vector3d& q) {
  if (chain.L1 <= 0.0 || chain.L2 <= 0.0)
    throw InvalidInputError("grasper lengths must be positive");
  if (std::abs(q[2]) > chain.L2) {
    std::ostringstream os;
    os << "prismatic joint value " << q[2] << " outside travel [-" << chain.L2
       << ", " << chain.L2 << "]";
    throw InvalidInputError(os.str());
  }
  const auto rows = chain.dh_table();
  Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
  for (int i = 0; i < 3; ++i) {
    const bool prismatic = (i == 2);
    const double theta = rows[i].theta + (prismatic ? 0.0 : q[i]);
    const double dval = rows[i].d + (prismatic ? q[i] : 0.0);
    const double ct = std::cos(theta), st = std::sin(theta);
    const double ca = std::cos(rows[i].alpha), sa = std::sin(rows[i].alpha);
    Eigen::Matrix4d A;
    // Rz(theta) * Tz(d) * Tx(a) * Rx(alpha)
    A << ct, -st * ca, st * sa, rows[i].a * ct,  //
        st, ct * ca, -ct * sa, rows[i].a * st,   //
        0.0, sa, ca, dval,                       //
        0.0, 0.0, 0.0, 1.0;
    T = T * A;
  }
  return T.block<3, 1>(0, 3);
}

double kinetic_energy(const ManipulatorModel& model, const JointVector& q,
                      const JointVector& qdot) {
  return 0.5 * qdot.dot(mass_matrix(model, q) * qdot);
}

double potential_energy(const ManipulatorModel& model, const JointVector& q) {
  require_dimension(model, q, "q");
  const Frames f = frames(q);
  const std::vector<Grouped> th = grouped_params(model);
  double y_origin = 0.0, pe = 0.0;
  for (int i = 0; i < model.n(); ++i) {
    pe += th[i].a * y_origin + th[i].b * f.s[i];
    y_origin += model.links[i].length * f.s[i];
  }
  return model.gravity * pe;
}

std::pair<double, double> certify_inertia_bounds(ManipulatorModel& model,
                                                 int samples, unsigned seed) {
  validate_model(model);
  require_revolute(model);
  const int n = model.n();
  const std::vector<double> l = link_lengths(model);
  const std::vector<Grouped> th = grouped_params(model);
  constexpr double pi = 3.141592653589793;

  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> eig;
  auto visit = [&](const JointVector& q) {
    eig.compute(assemble_mass(l, th, q, false).M, Eigen::EigenvaluesOnly);
    lo = std::min(lo, eig.eigenvalues().minCoeff());
    hi = std::max(hi, eig.eigenvalues().maxCoeff());
  };

  // Dense grid (covers the trig extremes exactly for small n), then random
  // fill-in. M of a revolute chain is independent of q1, so sweep the rest.
  if (n <= 3) {
    const int K = 41;
    JointVector q = JointVector::Zero(n);
    const long total = static_cast<long>(std::pow(K, std::max(n - 1, 1)));
    for (long t = 0; t < total; ++t) {
      long rem = t;
      for (int j = 1; j < n; ++j) {
        q[j] = -pi + 2.0 * pi * static_cast<double>(rem % K) / (K - 1);
        rem /= K;
      }
      visit(q);
    }
  }
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-pi, pi);
  JointVector q(n);
  for (int s = 0; s < samples; ++s) {
    for (int j = 0; j < n; ++j) q[j] = uni(rng);
    visit(q);
  }

  model.alpha1 = lo * (1.0 - 1e-6);
  model.alpha2 = hi * (1.0 + 1e-6);
  return {model.alpha1, model.alpha2};
}

}  // namespace graspsim
