#include "geps/poisson.hpp"

#include <stdexcept>

namespace geps {

namespace {

Eigen::Matrix3d skew(const Eigen::Vector3d& s) {
  Eigen::Matrix3d m;
  m << 0.0, -s[2], s[1], s[2], 0.0, -s[0], -s[1], s[0], 0.0;
  return m;
}

Eigen::Matrix3d se2_block(const Eigen::Vector3d& mu) {
  Eigen::Matrix3d m;
  m << 0.0, -mu[2], mu[1], mu[2], 0.0, 0.0, -mu[1], 0.0, 0.0;
  return m;
}

}  // namespace

TestFunction TestFunction::random(RandomStream& rng, int dim) {
  TestFunction f;
  f.c = rng.symmetric();
  f.l = rng.vector(dim);
  const Eigen::MatrixXd a = rng.matrix(dim, dim);
  f.Q = 0.5 * (a + a.transpose());
  return f;
}

TestFunction TestFunction::coordinate(int dim, int index) {
  TestFunction f;
  f.l = Eigen::VectorXd::Zero(dim);
  f.l[index] = 1.0;
  f.Q = Eigen::MatrixXd::Zero(dim, dim);
  return f;
}

PoissonStructure lp_se2() {
  return {3, [](const Eigen::VectorXd& mu) -> Eigen::MatrixXd { return se2_block(mu); }};
}

PoissonStructure lp_magnetic(const CirculationParams& circ) {
  const Eigen::Matrix3d shift = skew(circ.sigma());
  return {3, [shift](const Eigen::VectorXd& mu) -> Eigen::MatrixXd {
            return se2_block(mu) + shift;
          }};
}

PoissonStructure lp_extended() {
  return {6, [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
            m.topLeftCorner<3, 3>() = se2_block(x.head<3>()) + skew(x.tail<3>());
            return m;
          }};
}

PoissonStructure lp_general(const StructureAlgebra& alg, const AlgebraCocycle2& C,
                            BracketSign sign) {
  const int d = alg.dim(), m = C.fiber_dim, n = d + m;
  const double s = sign == BracketSign::Minus ? -1.0 : 1.0;
  return {n, [alg, C, d, m, n, s](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
            const Eigen::VectorXd mu = x.head(d), sigma = x.tail(m);
            Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
            for (int a = 0; a < d; ++a)
              for (int b = a + 1; b < d; ++b) {
                Eigen::VectorXd ea = Eigen::VectorXd::Zero(d), eb = Eigen::VectorXd::Zero(d);
                ea[a] = 1.0;
                eb[b] = 1.0;
                const double val =
                    s * (mu.dot(alg.bracket(ea, eb)) + sigma.dot(C.eval(ea, eb)));
                out(a, b) = val;
                out(b, a) = -val;
              }
            return out;
          }};
}

PoissonStructure reduced_sleigh_structure(const SleighParams& params) {
  const auto& I = params.inertia;
  if (!(I.D() > 0.0)) throw std::invalid_argument("reduced structure requires D > 0");
  const double L1 = I.L1(), Z = I.Z(), D = I.D();
  const double ra = params.circulation.rho * params.circulation.alpha;
  return {2, [L1, Z, D, ra](const Eigen::VectorXd& w) -> Eigen::MatrixXd {
            const double g = (L1 * w[0] + Z * w[1] + ra) / D;
            Eigen::Matrix2d m;
            m << 0.0, -g, g, 0.0;
            return m;
          }};
}

PoissonStructure corrupted_circulation_structure() {
  return {6, [](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
            Eigen::MatrixXd m = Eigen::MatrixXd::Zero(6, 6);
            m.topLeftCorner<3, 3>() = se2_block(x.head<3>()) + skew(x.tail<3>());
            const double bad = x[3] * x[0];  // sigma0 * k, not a cocycle term
            m(0, 1) -= bad;
            m(1, 0) += bad;
            return m;
          }};
}

Eigen::VectorXd ham_vf(const PoissonStructure& P, const TestFunction& H,
                       const Eigen::VectorXd& x) {
  return P.bivector(x) * H.gradient(x);
}

Eigen::VectorXd ham_vf(const PoissonStructure& P,
                       const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_h,
                       const Eigen::VectorXd& x) {
  return P.bivector(x) * grad_h(x);
}

double poisson_bracket(const PoissonStructure& P, const TestFunction& F,
                       const TestFunction& G, const Eigen::VectorXd& x) {
  return F.gradient(x).dot(P.bivector(x) * G.gradient(x));
}

double jacobi_residual(const PoissonStructure& P, const Eigen::VectorXd& x,
                       const TestFunction& F, const TestFunction& G, const TestFunction& K,
                       double fd_step) {
  auto outer = [&](const TestFunction& outer_fn, const TestFunction& a,
                   const TestFunction& b) {
    // { outer_fn, {a, b} } with the inner bracket's gradient by central differences.
    Eigen::VectorXd grad_inner(P.dim);
    for (int i = 0; i < P.dim; ++i) {
      Eigen::VectorXd xp = x, xm = x;
      xp[i] += fd_step;
      xm[i] -= fd_step;
      grad_inner[i] =
          (poisson_bracket(P, a, b, xp) - poisson_bracket(P, a, b, xm)) / (2.0 * fd_step);
    }
    return outer_fn.gradient(x).dot(P.bivector(x) * grad_inner);
  };
  return outer(F, G, K) + outer(G, K, F) + outer(K, F, G);
}

double casimir_max_violation(const PoissonStructure& P, const TestFunction& F,
                             RandomStream& rng, int samples) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Eigen::VectorXd x = rng.vector(P.dim);
    worst = std::max(worst, ham_vf(P, F, x).cwiseAbs().maxCoeff());
  }
  return worst;
}

double poisson_map_residual(const AffineMap& T, const PoissonStructure& src,
                            const PoissonStructure& dst, const TestFunction& F,
                            const TestFunction& K, const Eigen::VectorXd& x) {
  const Eigen::VectorXd y = T.apply(x);
  const Eigen::VectorXd gf = T.A.transpose() * F.gradient(y);
  const Eigen::VectorXd gk = T.A.transpose() * K.gradient(y);
  const double pulled = gf.dot(src.bivector(x) * gk);
  const double target = F.gradient(y).dot(dst.bivector(y) * K.gradient(y));
  return std::abs(pulled - target);
}

TestFunction fbar_in_momenta(const Eigen::Vector3d& sigma) {
  TestFunction f;
  f.Q = Eigen::Matrix3d::Zero();
  f.Q(1, 1) = 2.0;
  f.Q(2, 2) = 2.0;
  f.l = 2.0 * sigma;
  return f;
}

TestFunction fbar_extended() {
  TestFunction f;
  f.l = Eigen::VectorXd::Zero(6);
  f.Q = Eigen::MatrixXd::Zero(6, 6);
  f.Q(1, 1) = 2.0;
  f.Q(2, 2) = 2.0;
  f.Q(0, 3) = f.Q(3, 0) = 2.0;  // 2 sigma0 k
  f.Q(1, 4) = f.Q(4, 1) = 2.0;  // 2 sigma1 p1
  f.Q(2, 5) = f.Q(5, 2) = 2.0;  // 2 sigma2 p2
  return f;
}

LeafType fbar_leaf_type(const Eigen::Vector3d& sigma) {
  const TestFunction f = fbar_in_momenta(sigma);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(f.Q);
  if (lu.rank() != 2) throw std::logic_error("unexpected Casimir quadratic rank");
  // The quadratic part never involves k; the leaf bends exactly when the
  // linear part does.
  return f.l[0] != 0.0 ? LeafType::EllipticParaboloid : LeafType::Cylinder;
}

}  // namespace geps
