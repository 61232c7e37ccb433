#pragma once

#include <Eigen/Dense>

#include "geps/algebra.hpp"

namespace geps {

/// Total (body + fluid) inertia of the planar body in the body frame,
///   [[ J, -L2, L1 ],
///    [ -L2, M,  Z ],
///    [ L1,  Z,  N ]].
/// Construction validates positive definiteness and D = M J - L2^2 > 0.
class InertiaTensor {
 public:
  InertiaTensor(double J, double L1, double L2, double M, double Z, double N);
  static InertiaTensor from_matrix(const Eigen::Matrix3d& m);

  double J() const { return J_; }
  double L1() const { return L1_; }
  double L2() const { return L2_; }
  double M() const { return M_; }
  double Z() const { return Z_; }
  double N() const { return N_; }
  double D() const { return M_ * J_ - L2_ * L2_; }

  Eigen::Matrix3d matrix() const;

  /// Closed-form inverse via the printed adjugate/determinant expressions;
  /// kept separate from the linear-algebra route on purpose so the two can be
  /// checked against each other.
  Eigen::Matrix3d inverse_explicit() const;

  double determinant_explicit() const;

 private:
  double J_, L1_, L2_, M_, Z_, N_;
};

/// Rigid-body data: mass, central moment of inertia, and the body-frame
/// offset (a, b) of the reference point from the center of mass.
struct BodyParams {
  double m = 1.0;
  double I_cm = 1.0;
  double a = 0.0;
  double b = 0.0;
};

/// Added (fluid) inertia, a symmetric contribution in the same block layout.
struct AddedInertia {
  double I_F = 0.0;
  double K1 = 0.0;
  double K2 = 0.0;
  double M11 = 0.0;
  double M12 = 0.0;
  double M22 = 0.0;

  Eigen::Matrix3d matrix() const;
};

/// Circulation strength and the fixed coefficients entering the momentum
/// equations; sigma() packs them as the fiber momentum (rho*kappa, -rho*beta,
/// rho*alpha).
struct CirculationParams {
  double rho = 1.0;
  double kappa = 0.0;
  double alpha = 0.0;
  double beta = 0.0;

  CirculationParams() = default;
  CirculationParams(double r, double k, double a, double b);

  Eigen::Vector3d sigma() const { return {rho * kappa, -rho * beta, rho * alpha}; }
};

struct SleighParams {
  InertiaTensor inertia;
  CirculationParams circulation;
};

struct HeisenbergParams {
  Eigen::Matrix2d mass = Eigen::Matrix2d::Identity();
  double charge = 1.0;
  double field = 1.0;

  void validate() const;
};

/// Rigid-body block [[I_cm + m(a^2+b^2), -m b, m a], [-m b, m, 0], [m a, 0, m]].
Eigen::Matrix3d body_inertia(const BodyParams& body);

/// Total inertia = body + added, validated positive definite.
InertiaTensor total_inertia(const BodyParams& body, const AddedInertia& added);

/// Momentum equations of the planar body without circulation, with
/// (omega, v1, v2) = I^{-1} mu:
///   k'  = v2 p1 - v1 p2,   p1' = omega p2,   p2' = -omega p1.
DualElement kirchhoff_rhs(const DualElement& mu, const InertiaTensor& inertia);

/// Momentum equations with circulation:
///   k'  = v2 p1 - v1 p2 - rho (alpha v1 + beta v2)
///   p1' = omega p2 - kappa rho v2 + rho alpha omega
///   p2' = -omega p1 + kappa rho v1 + rho beta omega.
DualElement chaplygin_lamb_rhs(const DualElement& mu, const InertiaTensor& inertia,
                               const CirculationParams& circ);

/// Effect of moving the body reference point by (r, s):
/// alpha -> alpha - r kappa, beta -> beta - s kappa.
CirculationParams frame_shift(const CirculationParams& circ, double r, double s);

/// Reduced blade dynamics on (omega, v1), with G = L1 omega + Z v1 + rho alpha
/// and D = M J - L2^2:
///   omega' = G (L2 omega - M v1) / D,   v1' = G (J omega - L2 v1) / D.
Eigen::Vector2d sleigh_reduced_rhs(const Eigen::Vector2d& w, const SleighParams& p);

/// Constraint force lambda at a general momentum state, chosen so that the
/// third body velocity component stays constant: lambda = -[I^{-1} r]_3 /
/// (I^{-1})_33 with r the circulation right-hand side.  Uses the explicit
/// inverse.
double sleigh_multiplier(const DualElement& mu, const SleighParams& p);

/// Multiplier at an admissible state given by (omega, v1) with v2 = 0.
double sleigh_multiplier(const Eigen::Vector2d& w, const SleighParams& p);

/// Full constrained momentum equations: circulation right-hand side plus the
/// multiplier acting on the constrained direction e3.
DualElement sleigh_constrained_rhs(const DualElement& mu, const SleighParams& p);

/// Admissible momentum lift mu = I (omega, v1, 0).
DualElement sleigh_momentum(const Eigen::Vector2d& w, const InertiaTensor& inertia);

/// Reduced kinetic energy (J omega^2 + M v1^2 - 2 L2 omega v1) / 2.
double reduced_energy(const Eigen::Vector2d& w, const InertiaTensor& inertia);

/// Kinetic energy mu . I^{-1} mu / 2 on momenta.
double full_hamiltonian(const DualElement& mu, const InertiaTensor& inertia);

/// Casimir of the extended structure:
/// p1^2 + p2^2 + 2 sigma0 k + 2 sigma1 p1 + 2 sigma2 p2.
double casimir_fbar(const DualElement& mu, const Eigen::Vector3d& sigma);

enum class LineStatus { Line, Empty, WholePlane };

/// The equilibrium set {L1 omega + Z v1 + rho alpha = 0} of the reduced flow.
struct EquilibriaLine {
  double coeff_omega = 0.0;  // L1
  double coeff_v1 = 0.0;     // Z
  double offset = 0.0;       // rho * alpha
  LineStatus status = LineStatus::Line;

  double evaluate(const Eigen::Vector2d& w) const {
    return coeff_omega * w[0] + coeff_v1 * w[1] + offset;
  }
  /// Euclidean distance from w to the line (status == Line only).
  double distance(const Eigen::Vector2d& w) const;
  /// Point on the line parametrized by arc length from the closest point to 0.
  Eigen::Vector2d point(double s) const;
};

EquilibriaLine equilibria_line(const SleighParams& p);

enum class EquilibriumType { Stable, Unstable, Degenerate };

struct EquilibriumClassification {
  EquilibriumType type = EquilibriumType::Degenerate;
  double transverse_eigenvalue = 0.0;  // the nonzero eigenvalue of the linearization
};

/// Analytic Jacobian of the reduced right-hand side.
Eigen::Matrix2d sleigh_jacobian(const Eigen::Vector2d& w, const SleighParams& p);

/// Classify a line equilibrium by the nonzero eigenvalue of the rank-one
/// linearization; |lambda| <= 1e-10 is reported degenerate.  Throws if w is
/// not an equilibrium.
EquilibriumClassification classify_equilibrium(const Eigen::Vector2d& w,
                                               const SleighParams& p);

struct SeparatrixEnergy {
  bool exists = false;        // false when the equilibrium line is absent
  double h0 = 0.0;            // min of the reduced energy on the line
  bool nonpositive = false;   // flagged, not rejected
  Eigen::Vector2d tangency = Eigen::Vector2d::Zero();  // argmin on the line
};

/// Closed-form constrained minimum of the reduced energy on the equilibrium
/// line: h0 = (rho alpha)^2 D / (2 (M L1^2 + 2 L2 L1 Z + J Z^2)).
SeparatrixEnergy separatrix_energy(const SleighParams& p);

/// Planar charged-particle momentum equation p' = sigma (v2 B, -v1 B) with
/// v = mass^{-1} p; sigma plays the role of the charge.
Eigen::Vector2d heisenberg_rhs(const Eigen::Vector2d& p, const HeisenbergParams& params,
                               double sigma);

/// Divergence of the reduced right-hand side,
/// [L1 (L2 omega - M v1) + Z (J omega - L2 v1)] / D.
double sleigh_divergence(const Eigen::Vector2d& w, const SleighParams& p);

/// Coefficients (of omega and of v1) of the divergence as a linear form; the
/// divergence vanishes identically exactly when both are zero.
Eigen::Vector2d sleigh_divergence_coefficients(const SleighParams& p);

}  // namespace geps
