#pragma once

#include <functional>

#include <Eigen/Dense>

#include "geps/algebra.hpp"

namespace geps {

/// Normalized two-cocycle B on the group, with values in the abelian fiber
/// R^m: central multiplication reads (g, a)(h, b) = (gh, a + b + B(g, h)).
struct GroupCocycle {
  int fiber_dim = 1;
  std::function<Eigen::VectorXd(const GroupElement&, const GroupElement&)> eval;
};

/// Antisymmetric bilinear map C on a Lie algebra with values in R^m.
/// Inputs are coordinate vectors so the same type serves se(2) and the
/// abelian planar algebra used by the charged-particle model.
struct AlgebraCocycle2 {
  int fiber_dim = 1;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&, const Eigen::VectorXd&)> eval;
};

/// Linear map A: algebra -> fiber, stored as an m x dim matrix acting on
/// coordinate vectors.
using OneCocycle = Eigen::MatrixXd;

struct ExtendedAlgebraElement {
  AlgebraElement base;
  Eigen::VectorXd fiber;
};

struct ExtendedDualElement {
  DualElement base;
  Eigen::VectorXd fiber;
};

struct ExtendedGroupElement {
  GroupElement base;
  Eigen::VectorXd fiber;
};

/// Residual of the two-cocycle identity
///   B(f, g) + B(fg, h) - B(f, gh) - B(g, h);
/// zero for every triple exactly when B defines an associative extension.
Eigen::VectorXd cocycle_identity_residual(const GroupCocycle& B, const GroupElement& f,
                                          const GroupElement& g, const GroupElement& h);

/// Multiplication in the centrally extended group G x R^m.
ExtendedGroupElement extended_mul(const GroupCocycle& B, const ExtendedGroupElement& a,
                                  const ExtendedGroupElement& b);

/// Infinitesimal cocycle of B by a central second mixed difference of
///   F(t, s) = B(g(t), h(s)) - B(h(s), g(t))
/// along the straight coordinate curves g(t) = t*xi, h(s) = s*eta.
/// Throws for non-positive step h.
Eigen::VectorXd infinitesimal_cocycle_fd(const GroupCocycle& B, const AlgebraElement& xi,
                                         const AlgebraElement& eta, double h);

/// Area cocycle on the translational part: C1(xi, eta) = v1 v2' - v2 v1'.
AlgebraCocycle2 translation_area_cocycle();

/// Combined circulation cocycle C(xi, eta) = xi x eta (coordinate cross
/// product), equal to (C1, -dA) for the circulation one-cocycle A below.
AlgebraCocycle2 circulation_cocycle();

/// Cocycle with all values zero (product extension).
AlgebraCocycle2 zero_cocycle(int fiber_dim, int base_dim);

/// Magnetic cocycle on the abelian planar algebra: C(x, y) = B (x1 y2 - x2 y1).
AlgebraCocycle2 magnetic_cocycle(double field);

/// Group cocycle B1((R,x),(R',x')) = x . J R x' / 2 with J the quarter-turn.
GroupCocycle rotation_area_group_cocycle();

/// Group cocycle B2(g, h) = R_theta x' - x', stored R^2-valued.
GroupCocycle translation_group_cocycle();

/// Fiber-R^3 cocycle packing (B1, B2); its infinitesimal cocycle is xi x eta.
GroupCocycle circulation_group_cocycle();

/// One-cocycle A(omega, v1, v2) = (0, v1, v2) used to trivialize the
/// translational part of the circulation cocycle.
OneCocycle circulation_one_cocycle();

/// Coboundary of a one-cocycle: dA(xi, eta) = -A([xi, eta]).
AlgebraCocycle2 coboundary(const StructureAlgebra& alg, const OneCocycle& A);

/// Trivialization Psi_A(xi, a) = (xi, a - A xi).
ExtendedAlgebraElement trivialization_psi(const OneCocycle& A, const ExtendedAlgebraElement& x);

/// Dual shift Phi_A(mu, sigma) = (mu - A^T sigma, sigma), the dual of Psi_A.
ExtendedDualElement dual_shift_phi(const OneCocycle& A, const ExtendedDualElement& m);

/// Bracket on the central extension: [(xi, a), (eta, b)] = ([xi, eta], C(xi, eta)).
ExtendedAlgebraElement extended_bracket(const AlgebraCocycle2& C, const ExtendedAlgebraElement& x,
                                        const ExtendedAlgebraElement& y);

/// Structure-constant table of the central extension of `alg` by C: the first
/// dim(alg) basis vectors span the base, the remaining fiber directions are
/// central.  Construction re-validates Jacobi, i.e. closedness of C.
StructureAlgebra central_extension_structure(const StructureAlgebra& alg,
                                             const AlgebraCocycle2& C);

/// Closedness defect dC(xi, eta, zeta) = C([xi,eta], zeta) + C([eta,zeta], xi)
/// + C([zeta,xi], eta); zero for cocycles.
Eigen::VectorXd cocycle_closedness_defect(const StructureAlgebra& alg, const AlgebraCocycle2& C,
                                          const Eigen::VectorXd& xi, const Eigen::VectorXd& eta,
                                          const Eigen::VectorXd& zeta);

}  // namespace geps
