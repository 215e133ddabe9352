#pragma once

#include <Eigen/Dense>
#include <array>
#include <utility>
#include <vector>

#include "graspsim/errors.hpp"

namespace graspsim {

using JointVector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class JointType { revolute, prismatic };

/// Physical parameters of one link of a planar serial arm.
struct LinkParams {
  double mass = 0.0;          // kg
  double length = 0.0;        // m, joint-to-joint
  double com_distance = 0.0;  // m, joint to center of mass along the link
  double inertia_zz = 0.0;    // kg*m^2 about the COM, normal to the plane
};

/// Planar serial manipulator with revolute joints, gravity acting along -y.
///
/// The dynamics entry points below (mass_matrix, coriolis_matrix, ...) cover
/// revolute chains only; prismatic joints appear in GrasperChain, which is
/// kinematics-only.
struct ManipulatorModel {
  std::vector<LinkParams> links;
  std::vector<JointType> joint_types;
  double gravity = 9.81;  // m/s^2

  /// Uniform eigenvalue bounds of M(q): alpha1 <= lambda_min(M) and
  /// lambda_max(M) <= alpha2 over the sampled workspace. Certified
  /// empirically by certify_inertia_bounds.
  double alpha1 = 0.0;
  double alpha2 = 0.0;

  int n() const { return static_cast<int>(links.size()); }
};

/// Base parameter vector for the regressor: per-link grouped parameters
/// (a_i, b_i, c_i) = (m_i, m_i*r_i, m_i*r_i^2 + I_i), with link 1's bare-mass
/// entry a_1 dropped because it never enters the dynamics. Layout:
/// [b_1, c_1, a_2, b_2, c_2, ..., a_n, b_n, c_n], so p = 3n - 1.
struct DynamicParameters {
  Eigen::VectorXd theta;
  int p() const { return static_cast<int>(theta.size()); }
};

/// Revolute-revolute-prismatic grasper chain. The spring segment length L2
/// extends the connecting rod L1, so the effective rod length is L1 + L2;
/// the prismatic joint value q3 shifts it within |q3| <= L2.
struct GrasperChain {
  double L1 = 0.1;   // m, connecting rod
  double L2 = 0.05;  // m, spring segment

  /// DH rows (a, alpha, d, theta) in Rz(theta)*Tz(d)*Tx(a)*Rx(alpha)
  /// convention, before substituting joint values.
  struct DhRow {
    double a, alpha, d, theta;
  };
  std::array<DhRow, 3> dh_table() const;
};

/// Stock simulation model: planar two-link revolute arm, m1=m2=1 kg,
/// l1=l2=1 m, COM at mid-link, I_zz=1/12 kg*m^2, g0=9.81 m/s^2, with
/// inertia bounds pre-certified.
ManipulatorModel stock_two_link();

/// Validates link parameters and joint types; throws InvalidInputError.
void validate_model(const ManipulatorModel& model);

/// Symmetric positive-definite mass matrix M(q).
Matrix mass_matrix(const ManipulatorModel& model, const JointVector& q);

/// Coriolis/centrifugal matrix C(q, qdot) built from Christoffel symbols of
/// M, so that Mdot - 2C is skew-symmetric.
Matrix coriolis_matrix(const ManipulatorModel& model, const JointVector& q,
                       const JointVector& qdot);

/// Gravity torque vector g(q) = d(potential energy)/dq.
JointVector gravity_vector(const ManipulatorModel& model, const JointVector& q);

/// tau = M(q) qddot + C(q, qdot) qdot + g(q).
JointVector inverse_dynamics(const ManipulatorModel& model, const JointVector& q,
                             const JointVector& qdot, const JointVector& qddot);

/// qddot = M(q)^{-1} (u + d - C(q, qdot) qdot - g(q)).
/// Throws SingularMatrixError if M's reciprocal condition estimate < 1e-12.
JointVector forward_dynamics(const ManipulatorModel& model, const JointVector& q,
                             const JointVector& qdot, const JointVector& u,
                             const JointVector& d);

/// Dynamic regressor Y(q, qdot, qddot): n x p matrix with
/// Y * base_parameters(model).theta == inverse_dynamics(model, q, qdot, qddot).
Matrix regressor(const ManipulatorModel& model, const JointVector& q,
                 const JointVector& qdot, const JointVector& qddot);

/// The model's base parameter vector theta_d (see DynamicParameters).
DynamicParameters base_parameters(const ManipulatorModel& model);

/// Regressor column count for an n-link arm.
inline int base_parameter_count(int n) { return 3 * n - 1; }

/// Planar end-effector position (x, y) of the revolute chain.
Eigen::Vector2d forward_kinematics(const ManipulatorModel& model,
                                   const JointVector& q);

/// Grasper end-effector position via DH composition; q = (q1, q2, q3) with
/// q3 the prismatic extension. Throws InvalidInputError if |q3| > L2.
Eigen::Vector3d forward_kinematics(const GrasperChain& chain,
                                   const Eigen::Vector3d& q);

/// Kinetic energy 0.5 qdot^T M(q) qdot.
double kinetic_energy(const ManipulatorModel& model, const JointVector& q,
                      const JointVector& qdot);

/// Gravitational potential energy (zero level at the base joint).
double potential_energy(const ManipulatorModel& model, const JointVector& q);

/// Samples the workspace (dense per-joint grid plus `samples` random
/// configurations) and stores the observed eigenvalue range of M, widened by
/// a small relative margin, into model.alpha1/alpha2. Returns (alpha1, alpha2).
std::pair<double, double> certify_inertia_bounds(ManipulatorModel& model,
                                                 int samples = 1000,
                                                 unsigned seed = 0x5eed);

}  // namespace graspsim
