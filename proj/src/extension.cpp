#include "geps/extension.hpp"

#include <stdexcept>

namespace geps {

namespace {

GroupElement scale_curve(const AlgebraElement& xi, double t) {
  // Straight coordinate curve through the identity with initial velocity xi.
  return {t * xi.omega, t * xi.v1, t * xi.v2};
}

}  // namespace

Eigen::VectorXd cocycle_identity_residual(const GroupCocycle& B, const GroupElement& f,
                                          const GroupElement& g, const GroupElement& h) {
  return B.eval(f, g) + B.eval(group_mul(f, g), h) - B.eval(f, group_mul(g, h)) -
         B.eval(g, h);
}

ExtendedGroupElement extended_mul(const GroupCocycle& B, const ExtendedGroupElement& a,
                                  const ExtendedGroupElement& b) {
  return {group_mul(a.base, b.base), a.fiber + b.fiber + B.eval(a.base, b.base)};
}

Eigen::VectorXd infinitesimal_cocycle_fd(const GroupCocycle& B, const AlgebraElement& xi,
                                         const AlgebraElement& eta, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite-difference step must be positive");
  auto F = [&](double t, double s) -> Eigen::VectorXd {
    const GroupElement g = scale_curve(xi, t), k = scale_curve(eta, s);
    return B.eval(g, k) - B.eval(k, g);
  };
  return (F(h, h) - F(h, -h) - F(-h, h) + F(-h, -h)) / (4.0 * h * h);
}

AlgebraCocycle2 translation_area_cocycle() {
  return {1, [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> Eigen::VectorXd {
            Eigen::VectorXd out(1);
            out[0] = x[1] * y[2] - x[2] * y[1];
            return out;
          }};
}

AlgebraCocycle2 circulation_cocycle() {
  return {3, [](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> Eigen::VectorXd {
            return Eigen::Vector3d(x.head<3>()).cross(Eigen::Vector3d(y.head<3>()));
          }};
}

AlgebraCocycle2 zero_cocycle(int fiber_dim, int /*base_dim*/) {
  return {fiber_dim, [fiber_dim](const Eigen::VectorXd&, const Eigen::VectorXd&) {
            return Eigen::VectorXd::Zero(fiber_dim).eval();
          }};
}

AlgebraCocycle2 magnetic_cocycle(double field) {
  return {1, [field](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> Eigen::VectorXd {
            Eigen::VectorXd out(1);
            out[0] = field * (x[0] * y[1] - x[1] * y[0]);
            return out;
          }};
}

GroupCocycle rotation_area_group_cocycle() {
  return {1, [](const GroupElement& g, const GroupElement& h) -> Eigen::VectorXd {
            Eigen::Matrix2d quarter;  // quarter-turn J
            quarter << 0.0, 1.0, -1.0, 0.0;
            Eigen::VectorXd out(1);
            out[0] = 0.5 * g.translation().dot(quarter * (g.rotation() * h.translation()));
            return out;
          }};
}

GroupCocycle translation_group_cocycle() {
  return {2, [](const GroupElement& g, const GroupElement& h) -> Eigen::VectorXd {
            return (g.rotation() * h.translation() - h.translation()).eval();
          }};
}

GroupCocycle circulation_group_cocycle() {
  return {3, [b1 = rotation_area_group_cocycle(), b2 = translation_group_cocycle()](
                 const GroupElement& g, const GroupElement& h) -> Eigen::VectorXd {
            Eigen::Vector3d out;
            out[0] = b1.eval(g, h)[0];
            out.tail<2>() = b2.eval(g, h);
            return out;
          }};
}

OneCocycle circulation_one_cocycle() {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
  a(1, 1) = 1.0;
  a(2, 2) = 1.0;
  return a;
}

AlgebraCocycle2 coboundary(const StructureAlgebra& alg, const OneCocycle& A) {
  if (A.cols() != alg.dim())
    throw std::invalid_argument("one-cocycle has wrong base dimension");
  const int m = static_cast<int>(A.rows());
  return {m, [alg, A](const Eigen::VectorXd& x, const Eigen::VectorXd& y) -> Eigen::VectorXd {
            return (-A * alg.bracket(x, y)).eval();
          }};
}

ExtendedAlgebraElement trivialization_psi(const OneCocycle& A,
                                          const ExtendedAlgebraElement& x) {
  return {x.base, x.fiber - A * x.base.vec()};
}

ExtendedDualElement dual_shift_phi(const OneCocycle& A, const ExtendedDualElement& m) {
  return {DualElement(Eigen::Vector3d(m.base.vec() - A.transpose() * m.fiber)), m.fiber};
}

ExtendedAlgebraElement extended_bracket(const AlgebraCocycle2& C,
                                        const ExtendedAlgebraElement& x,
                                        const ExtendedAlgebraElement& y) {
  return {se2_bracket(x.base, y.base), C.eval(x.base.vec(), y.base.vec())};
}

StructureAlgebra central_extension_structure(const StructureAlgebra& alg,
                                             const AlgebraCocycle2& C) {
  const int d = alg.dim(), m = C.fiber_dim, n = d + m;
  std::vector<Eigen::MatrixXd> c(n, Eigen::MatrixXd::Zero(n, n));
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) c[k](i, j) = alg.structure_constant(k, i, j);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      Eigen::VectorXd ei = Eigen::VectorXd::Zero(d), ej = Eigen::VectorXd::Zero(d);
      ei[i] = 1.0;
      ej[j] = 1.0;
      const Eigen::VectorXd cij = C.eval(ei, ej);
      for (int l = 0; l < m; ++l) c[d + l](i, j) = cij[l];
    }
  return {alg.name() + "+R" + std::to_string(m), std::move(c)};
}

Eigen::VectorXd cocycle_closedness_defect(const StructureAlgebra& alg,
                                          const AlgebraCocycle2& C, const Eigen::VectorXd& xi,
                                          const Eigen::VectorXd& eta,
                                          const Eigen::VectorXd& zeta) {
  return C.eval(alg.bracket(xi, eta), zeta) + C.eval(alg.bracket(eta, zeta), xi) +
         C.eval(alg.bracket(zeta, xi), eta);
}

}  // namespace geps
