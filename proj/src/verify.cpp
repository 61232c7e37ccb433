#include "geps/verify.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "geps/algebra.hpp"
#include "geps/eps.hpp"
#include "geps/extension.hpp"
#include "geps/models.hpp"
#include "geps/poisson.hpp"
#include "geps/random.hpp"

namespace geps {
namespace {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

class Suite {
 public:
  explicit Suite(const VerifyOptions& options)
      : rng_(options.seed), samples_(options.samples) {}

  RandomStream& rng() { return rng_; }
  int samples() const { return samples_; }
  int few() const { return std::min(samples_, 100); }

  void add(std::string name, double residual, double tolerance) {
    results_.push_back(
        {std::move(name), residual, tolerance, residual <= tolerance});
  }

  /// Detection checks pass when the residual EXCEEDS the threshold.
  void add_detection(std::string name, double residual, double threshold) {
    results_.push_back(
        {std::move(name), residual, threshold, residual > threshold});
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  RandomStream rng_;
  int samples_;
  std::vector<CheckResult> results_;
};

InertiaTensor random_inertia(RandomStream& rng) {
  return InertiaTensor::from_matrix(rng.spd(3));
}

CirculationParams random_circulation(RandomStream& rng) {
  return CirculationParams(0.5 + rng.unit(), rng.symmetric(), rng.symmetric(),
                           rng.symmetric());
}

SleighParams random_sleigh(RandomStream& rng) {
  return SleighParams{random_inertia(rng), random_circulation(rng)};
}

AlgebraElement random_algebra_element(RandomStream& rng) {
  return AlgebraElement(rng.symmetric(), rng.symmetric(), rng.symmetric());
}

GroupElement random_group_element(RandomStream& rng) {
  return GroupElement(4.0 * rng.symmetric(), rng.symmetric(), rng.symmetric());
}

double max_abs(const VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Fiber-R^3 cocycle keeping only the area component (C1, 0, 0); the full
/// circulation cocycle differs from it by the coboundary of A = diag(0,1,1).
AlgebraCocycle2 area_only_cocycle() {
  AlgebraCocycle2 c;
  c.fiber_dim = 3;
  c.eval = [](const VectorXd& x, const VectorXd& y) {
    VectorXd out = VectorXd::Zero(3);
    out[0] = x[1] * y[2] - x[2] * y[1];
    return out;
  };
  return c;
}

/// Broken variant of the rotation-area cocycle: the added term theta_g * x_h
/// fails the two-cocycle identity (the translations do not add under the
/// group law once rotations act on them).
GroupCocycle broken_group_cocycle() {
  const GroupCocycle base = rotation_area_group_cocycle();
  GroupCocycle b;
  b.fiber_dim = 1;
  b.eval = [base](const GroupElement& g, const GroupElement& h) {
    VectorXd out = base.eval(g, h);
    out[0] += g.theta * h.x;
    return out;
  };
  return b;
}

// ---------------------------------------------------------------------------
// Algebra layer
// ---------------------------------------------------------------------------

void check_algebra(Suite& s) {
  RandomStream& rng = s.rng();
  double anti = 0.0, jacobi = 0.0, duality = 0.0, assoc = 0.0, inv = 0.0;
  double engine = 0.0;
  const StructureAlgebra se2 = se2_structure();
  for (int i = 0; i < s.samples(); ++i) {
    const AlgebraElement x = random_algebra_element(rng);
    const AlgebraElement y = random_algebra_element(rng);
    const AlgebraElement z = random_algebra_element(rng);
    anti = std::max(anti, max_abs(se2_bracket(x, y).vec() +
                                  se2_bracket(y, x).vec()));
    jacobi = std::max(jacobi,
                      max_abs(se2_bracket(x, se2_bracket(y, z)).vec() +
                              se2_bracket(y, se2_bracket(z, x)).vec() +
                              se2_bracket(z, se2_bracket(x, y)).vec()));

    const DualElement mu(rng.symmetric(), rng.symmetric(), rng.symmetric());
    duality = std::max(duality, std::abs(pairing(se2_coadjoint(x, mu), y) -
                                         pairing(mu, se2_bracket(x, y))));

    const GroupElement f = random_group_element(rng);
    const GroupElement g = random_group_element(rng);
    const GroupElement h = random_group_element(rng);
    const GroupElement ab = group_mul(group_mul(f, g), h);
    const GroupElement ba = group_mul(f, group_mul(g, h));
    assoc = std::max(assoc, std::abs(ab.theta - ba.theta));
    assoc = std::max(assoc, (ab.translation() - ba.translation())
                                .cwiseAbs()
                                .maxCoeff());
    const GroupElement e = group_mul(f, group_inv(f));
    inv = std::max(inv, std::max(std::abs(e.theta),
                                 e.translation().cwiseAbs().maxCoeff()));

    engine = std::max(engine, max_abs(se2.bracket(x.vec(), y.vec()) -
                                      se2_bracket(x, y).vec()));
    engine = std::max(engine, max_abs(se2.coad(x.vec(), mu.vec()) -
                                      se2_coadjoint(x, mu).vec()));
  }
  s.add("planar bracket antisymmetry", anti, 1e-12);
  s.add("planar bracket jacobi identity", jacobi, 1e-12);
  s.add("coadjoint is dual to the bracket", duality, 1e-12);
  s.add("group multiplication associativity", assoc, 1e-12);
  s.add("group inverse", inv, 1e-12);
  s.add("structure-constant engine matches closed forms", engine, 1e-12);

  // Body velocity of a left-translated straight curve recovers its generator.
  double bv = 0.0;
  const double h = 1e-6;
  for (int i = 0; i < s.few(); ++i) {
    const GroupElement g = random_group_element(rng);
    const AlgebraElement xi = random_algebra_element(rng);
    const GroupElement gp =
        group_mul(g, GroupElement(h * xi.omega, h * xi.v1, h * xi.v2));
    const GroupElement gm =
        group_mul(g, GroupElement(-h * xi.omega, -h * xi.v1, -h * xi.v2));
    const Vector3d gdot = Vector3d(gp.theta - gm.theta, gp.x - gm.x,
                                   gp.y - gm.y) / (2.0 * h);
    bv = std::max(bv, max_abs(body_velocity(g, gdot).vec() - xi.vec()));
  }
  s.add("body velocity inverts left translation", bv, 1e-6);

  s.add("planar algebra is unimodular", trace_ad(se2).norm(), 0.0);

  // A structure-constant table violating the Jacobi identity must be
  // rejected at construction ([e1,e2] = e3, [e1,e3] = e1 is not a bracket).
  bool rejected = false;
  try {
    std::vector<MatrixXd> c(3, MatrixXd::Zero(3, 3));
    c[2](0, 1) = 1.0;
    c[2](1, 0) = -1.0;
    c[0](0, 2) = 1.0;
    c[0](2, 0) = -1.0;
    StructureAlgebra bad("bad", c);
  } catch (const std::invalid_argument&) {
    rejected = true;
  }
  s.add("invalid structure constants are rejected", rejected ? 0.0 : 1.0, 0.0);
}

// ---------------------------------------------------------------------------
// Extension layer
// ---------------------------------------------------------------------------

void check_extension(Suite& s) {
  RandomStream& rng = s.rng();
  const StructureAlgebra se2 = se2_structure();
  const GroupCocycle area_b = rotation_area_group_cocycle();
  const GroupCocycle combined_b = circulation_group_cocycle();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const AlgebraCocycle2 area = area_only_cocycle();
  const OneCocycle a_circ = circulation_one_cocycle();
  const AlgebraCocycle2 da_circ = coboundary(se2, a_circ);

  double id_area = 0.0, id_combined = 0.0, assoc = 0.0;
  double closed = 0.0, split = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const GroupElement f = random_group_element(rng);
    const GroupElement g = random_group_element(rng);
    const GroupElement h = random_group_element(rng);
    id_area = std::max(id_area,
                       max_abs(cocycle_identity_residual(area_b, f, g, h)));
    id_combined = std::max(
        id_combined, max_abs(cocycle_identity_residual(combined_b, f, g, h)));

    const ExtendedGroupElement ef{f, rng.vector(3)};
    const ExtendedGroupElement eg{g, rng.vector(3)};
    const ExtendedGroupElement eh{h, rng.vector(3)};
    const ExtendedGroupElement lhs =
        extended_mul(combined_b, extended_mul(combined_b, ef, eg), eh);
    const ExtendedGroupElement rhs =
        extended_mul(combined_b, ef, extended_mul(combined_b, eg, eh));
    assoc = std::max(assoc, std::abs(lhs.base.theta - rhs.base.theta));
    assoc = std::max(assoc, (lhs.base.translation() - rhs.base.translation())
                                .cwiseAbs()
                                .maxCoeff());
    assoc = std::max(assoc, max_abs(lhs.fiber - rhs.fiber));

    const VectorXd x = rng.vector(3);
    const VectorXd y = rng.vector(3);
    const VectorXd z = rng.vector(3);
    closed = std::max(closed,
                      max_abs(cocycle_closedness_defect(se2, cross, x, y, z)));
    closed = std::max(closed,
                      max_abs(cocycle_closedness_defect(se2, area, x, y, z)));
    // cross = area part minus the coboundary of A.
    split = std::max(split, max_abs(cross.eval(x, y) -
                                    (area.eval(x, y) - da_circ.eval(x, y))));
  }
  s.add("group cocycle identity: rotation area", id_area, 1e-12);
  s.add("group cocycle identity: combined circulation", id_combined, 1e-12);
  s.add("extended group multiplication associativity", assoc, 1e-12);
  s.add("algebra cocycles are closed", closed, 1e-12);
  s.add("combined cocycle splits into area and coboundary", split, 1e-12);

  // The broken fixture must be caught by the identity test; the residual at
  // f = g = h = (pi/2, 1, 0) is pi/2.
  {
    const GroupCocycle bad = broken_group_cocycle();
    const GroupElement t(M_PI / 2.0, 1.0, 0.0);
    double detect = max_abs(cocycle_identity_residual(bad, t, t, t));
    for (int i = 0; i < s.few(); ++i) {
      detect = std::max(detect, max_abs(cocycle_identity_residual(
                                    bad, random_group_element(rng),
                                    random_group_element(rng),
                                    random_group_element(rng))));
    }
    s.add_detection("broken group cocycle is detected", detect, 1e-3);
  }

  // Differencing the group cocycle recovers the cross-product cocycle.
  double fd = 0.0;
  for (int i = 0; i < s.few(); ++i) {
    const AlgebraElement xi = random_algebra_element(rng);
    const AlgebraElement eta = random_algebra_element(rng);
    fd = std::max(fd, max_abs(infinitesimal_cocycle_fd(combined_b, xi, eta,
                                                       1e-4) -
                              cross.eval(xi.vec(), eta.vec())));
  }
  s.add("finite differencing recovers the infinitesimal cocycle", fd, 1e-6);

  // Second-order convergence of the difference quotient (Richardson slopes).
  {
    std::vector<std::pair<AlgebraElement, AlgebraElement>> pairs;
    for (int i = 0; i < 20; ++i) {
      pairs.emplace_back(random_algebra_element(rng),
                         random_algebra_element(rng));
    }
    const double steps[3] = {1e-2, 5e-3, 2.5e-3};
    double err[3] = {0.0, 0.0, 0.0};
    for (int level = 0; level < 3; ++level) {
      for (const auto& [xi, eta] : pairs) {
        err[level] = std::max(
            err[level],
            max_abs(infinitesimal_cocycle_fd(combined_b, xi, eta,
                                             steps[level]) -
                    cross.eval(xi.vec(), eta.vec())));
      }
    }
    const double order = std::min(std::log2(err[0] / err[1]),
                                  std::log2(err[1] / err[2]));
    s.add("finite-difference cocycle converges at second order",
          1.9 - order, 0.0);
  }

  // Psi_A turns the product bracket into the coboundary-extended bracket,
  // and Phi_A is its dual.
  double hom = 0.0, dual = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const MatrixXd a = rng.matrix(3, 3);
    const AlgebraCocycle2 da = coboundary(se2, a);
    const ExtendedAlgebraElement x{random_algebra_element(rng), rng.vector(3)};
    const ExtendedAlgebraElement y{random_algebra_element(rng), rng.vector(3)};
    const ExtendedAlgebraElement lhs =
        extended_bracket(da, trivialization_psi(a, x), trivialization_psi(a, y));
    const ExtendedAlgebraElement product_bracket{
        se2_bracket(x.base, y.base), VectorXd::Zero(3)};
    const ExtendedAlgebraElement rhs = trivialization_psi(a, product_bracket);
    hom = std::max(hom, max_abs(lhs.base.vec() - rhs.base.vec()));
    hom = std::max(hom, max_abs(lhs.fiber - rhs.fiber));

    const ExtendedDualElement m{
        DualElement(rng.symmetric(), rng.symmetric(), rng.symmetric()),
        rng.vector(3)};
    const ExtendedDualElement shifted = dual_shift_phi(a, m);
    const ExtendedAlgebraElement psi_x = trivialization_psi(a, x);
    const double lhs_pair = pairing(shifted.base, x.base) +
                            shifted.fiber.dot(x.fiber);
    const double rhs_pair = pairing(m.base, psi_x.base) +
                            m.fiber.dot(psi_x.fiber);
    dual = std::max(dual, std::abs(lhs_pair - rhs_pair));
  }
  s.add("trivialization intertwines product and coboundary brackets", hom,
        1e-12);
  s.add("dual shift is adjoint to the trivialization", dual, 1e-12);

  // The assembled extension tables are honest Lie algebras.
  const StructureAlgebra ext = central_extension_structure(se2, cross);
  const StructureAlgebra heis =
      central_extension_structure(abelian_structure(2), magnetic_cocycle(1.0));
  s.add("extension structure constants satisfy jacobi",
        std::max(ext.jacobi_defect(), heis.jacobi_defect()), 1e-12);
}

// ---------------------------------------------------------------------------
// Bracket layer
// ---------------------------------------------------------------------------

void check_poisson(Suite& s, bool inject_corrupted) {
  RandomStream& rng = s.rng();
  const StructureAlgebra se2 = se2_structure();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const PoissonStructure base = lp_se2();
  const PoissonStructure extended =
      inject_corrupted ? corrupted_circulation_structure() : lp_extended();
  const PoissonStructure extended_true = lp_extended();

  double antisym = 0.0;
  double j_base = 0.0, j_magnetic = 0.0, j_extended = 0.0, j_reduced = 0.0;
  double general = 0.0;
  const PoissonStructure general_extended =
      lp_general(se2, cross, BracketSign::Minus);
  for (int i = 0; i < s.samples(); ++i) {
    const CirculationParams circ = random_circulation(rng);
    const PoissonStructure magnetic = lp_magnetic(circ);
    const SleighParams sleigh = random_sleigh(rng);
    const PoissonStructure reduced = reduced_sleigh_structure(sleigh);

    const VectorXd x3 = rng.vector(3);
    const VectorXd x6 = rng.vector(6);
    const VectorXd x2 = rng.vector(2);
    const MatrixXd pb = base.bivector(x3);
    const MatrixXd pm = magnetic.bivector(x3);
    const MatrixXd pe = extended.bivector(x6);
    const MatrixXd pr = reduced.bivector(x2);
    antisym = std::max(antisym, (pb + pb.transpose()).cwiseAbs().maxCoeff());
    antisym = std::max(antisym, (pm + pm.transpose()).cwiseAbs().maxCoeff());
    antisym = std::max(antisym, (pe + pe.transpose()).cwiseAbs().maxCoeff());
    antisym = std::max(antisym, (pr + pr.transpose()).cwiseAbs().maxCoeff());

    const TestFunction f3 = TestFunction::random(rng, 3);
    const TestFunction g3 = TestFunction::random(rng, 3);
    const TestFunction k3 = TestFunction::random(rng, 3);
    j_base = std::max(j_base, std::abs(jacobi_residual(base, x3, f3, g3, k3)));
    j_magnetic = std::max(j_magnetic,
                          std::abs(jacobi_residual(magnetic, x3, f3, g3, k3)));

    const TestFunction f6 = TestFunction::random(rng, 6);
    const TestFunction g6 = TestFunction::random(rng, 6);
    const TestFunction k6 = TestFunction::random(rng, 6);
    j_extended = std::max(
        j_extended, std::abs(jacobi_residual(extended, x6, f6, g6, k6)));

    const TestFunction f2 = TestFunction::random(rng, 2);
    const TestFunction g2 = TestFunction::random(rng, 2);
    const TestFunction k2 = TestFunction::random(rng, 2);
    j_reduced = std::max(
        j_reduced, std::abs(jacobi_residual(reduced, x2, f2, g2, k2)));

    general = std::max(general, (extended_true.bivector(x6) -
                                 general_extended.bivector(x6))
                                    .cwiseAbs()
                                    .maxCoeff());
  }
  s.add("bivector antisymmetry", antisym, 1e-12);
  s.add("jacobi identity: momentum bracket", j_base, 1e-8);
  s.add("jacobi identity: magnetic bracket", j_magnetic, 1e-8);
  s.add("jacobi identity: circulation bracket", j_extended, 1e-8);
  s.add("jacobi identity: reduced blade bracket", j_reduced, 1e-8);
  s.add("circulation bivector matches the general construction", general,
        1e-12);

  // The detector must fire on the deliberately broken structure.
  {
    const PoissonStructure bad = corrupted_circulation_structure();
    double detect = 0.0;
    for (int i = 0; i < s.few(); ++i) {
      const VectorXd x6 = rng.vector(6);
      detect = std::max(
          detect, std::abs(jacobi_residual(bad, x6,
                                           TestFunction::coordinate(6, 0),
                                           TestFunction::coordinate(6, 1),
                                           TestFunction::coordinate(6, 2))));
    }
    s.add_detection("jacobi defect detected in the broken structure", detect,
                    1e-3);
  }

  // Casimir behaviour.
  {
    RandomStream cas1(11);
    RandomStream cas2(12);
    RandomStream cas3(13);
    RandomStream cas4(14);
    TestFunction psq;  // p1^2 + p2^2 on momenta
    psq.l = VectorXd::Zero(3);
    psq.Q = MatrixXd::Zero(3, 3);
    psq.Q(1, 1) = 2.0;
    psq.Q(2, 2) = 2.0;
    s.add("squared momentum is a casimir of the momentum bracket",
          casimir_max_violation(base, psq, cas1, s.samples()), 1e-12);
    s.add("extended invariant is a casimir of the circulation bracket",
          casimir_max_violation(extended_true, fbar_extended(), cas2,
                                s.samples()),
          1e-12);
    double fiber = 0.0;
    for (int i = 3; i < 6; ++i) {
      fiber = std::max(fiber,
                       casimir_max_violation(
                           extended_true, TestFunction::coordinate(6, i), cas3,
                           s.samples()));
    }
    s.add("fiber coordinates are casimirs of the circulation bracket", fiber,
          0.0);
    s.add_detection("angular momentum is not a casimir",
                    casimir_max_violation(base,
                                          TestFunction::coordinate(3, 0), cas4,
                                          s.samples()),
                    0.5);
  }

  // Level-set geometry of the invariant.
  {
    int mismatches = 0;
    if (fbar_leaf_type(Vector3d(1.0, 0.3, -0.2)) !=
        LeafType::EllipticParaboloid) {
      ++mismatches;
    }
    if (fbar_leaf_type(Vector3d(0.0, 0.3, -0.2)) != LeafType::Cylinder) {
      ++mismatches;
    }
    s.add("invariant level sets bend only with circulation",
          static_cast<double>(mismatches), 0.0);
  }

  // Shift maps.  T_A(mu, sigma) = (mu - A^T sigma, sigma) carries the
  // C-extended bracket onto the (C - dA)-extended bracket.
  double shift_product = 0.0, shift_area = 0.0, inclusion = 0.0;
  const OneCocycle a_circ = circulation_one_cocycle();
  const PoissonStructure area_structure =
      lp_general(se2, area_only_cocycle(), BracketSign::Minus);
  AffineMap phi_circ;
  phi_circ.A = MatrixXd::Identity(6, 6);
  phi_circ.A.block(0, 3, 3, 3) = -a_circ.transpose();
  phi_circ.b = VectorXd::Zero(6);
  for (int i = 0; i < s.samples(); ++i) {
    const TestFunction f6 = TestFunction::random(rng, 6);
    const TestFunction k6 = TestFunction::random(rng, 6);
    const VectorXd x6 = rng.vector(6);

    const MatrixXd a = rng.matrix(3, 3);
    const PoissonStructure src =
        lp_general(se2, coboundary(se2, a), BracketSign::Minus);
    const PoissonStructure dst =
        lp_general(se2, zero_cocycle(3, 3), BracketSign::Minus);
    AffineMap phi;
    phi.A = MatrixXd::Identity(6, 6);
    phi.A.block(0, 3, 3, 3) = -a.transpose();
    phi.b = VectorXd::Zero(6);
    shift_product = std::max(
        shift_product, poisson_map_residual(phi, src, dst, f6, k6, x6));

    shift_area = std::max(
        shift_area, poisson_map_residual(phi_circ, area_structure,
                                         extended_true, f6, k6, x6));

    const CirculationParams circ = random_circulation(rng);
    AffineMap incl;
    incl.A = MatrixXd::Zero(6, 3);
    incl.A.topLeftCorner(3, 3) = Matrix3d::Identity();
    incl.b = VectorXd::Zero(6);
    incl.b.tail<3>() = circ.sigma();
    inclusion = std::max(
        inclusion, poisson_map_residual(incl, lp_magnetic(circ), extended_true,
                                        f6, k6, rng.vector(3)));
  }
  s.add("momentum shift maps the coboundary bracket to the product",
        shift_product, 1e-12);
  s.add("momentum shift carries the area bracket to the circulation bracket",
        shift_area, 1e-12);
  s.add("fixed-circulation slice embeds as a poisson map", inclusion, 1e-12);

  // The rank-two reduced structure generates the blade dynamics from the
  // reduced energy.
  double blade = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const SleighParams sleigh = random_sleigh(rng);
    TestFunction h2;
    h2.l = VectorXd::Zero(2);
    h2.Q = MatrixXd(2, 2);
    h2.Q << sleigh.inertia.J(), -sleigh.inertia.L2(), -sleigh.inertia.L2(),
        sleigh.inertia.M();
    const Vector2d w(rng.symmetric(), rng.symmetric());
    const VectorXd field = ham_vf(reduced_sleigh_structure(sleigh), h2, w);
    blade = std::max(blade,
                     max_abs(field - VectorXd(sleigh_reduced_rhs(w, sleigh))));
  }
  s.add("reduced bracket generates the blade field", blade, 1e-12);
}

// ---------------------------------------------------------------------------
// Constraint layer
// ---------------------------------------------------------------------------

void check_eps(Suite& s) {
  RandomStream& rng = s.rng();
  const StructureAlgebra se2 = se2_structure();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const VectorXd nu3 = Vector3d(0.0, 0.0, 1.0);

  // Frozen reference multipliers on the identity inertia.
  {
    const EpsSystem sys(se2, Matrix3d::Identity(),
                        ConstraintSet({nu3}));
    double err = std::abs(sys.multipliers(Vector3d(1.0, 0.0, 0.0))[0]);
    err = std::max(err, std::abs(sys.multipliers(Vector3d::Zero())[0]));
    err = std::max(err, std::abs(sys.multipliers(Vector3d(1.0, 1.0, 0.0))[0] -
                                 1.0));
    err = std::max(err, max_abs(sys.rhs(Vector3d(1.0, 1.0, 0.0))));

    const ExtendedEpsSystem ext(se2, Matrix3d::Identity(),
                                ConstraintSet({nu3}), cross);
    err = std::max(err,
                   std::abs(ext.multipliers(Vector3d(0.0, 1.0, 0.0),
                                            Vector3d(1.0, 0.0, 0.0))[0] +
                            1.0));
    s.add("multipliers at the frozen reference states", err, 1e-14);
  }

  double base_rate = 0.0, ext_rate = 0.0;
  double reduce0 = 0.0, fiber_free = 0.0, sigma_rate = 0.0, expanded = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const MatrixXd inertia = rng.spd(3);
    const Eigen::LLT<MatrixXd> llt(inertia);
    const VectorXd mu = rng.vector(3);
    const VectorXd sigma = rng.vector(3);

    // Single constraint and a two-covector set.
    const VectorXd nu_a = rng.vector(3) + Vector3d(0.0, 0.0, 2.0);
    const VectorXd nu_b = rng.vector(3) + Vector3d(2.0, 0.0, 0.0);
    const EpsSystem single(se2, inertia, ConstraintSet({nu_a}));
    const EpsSystem pair_sys(se2, inertia, ConstraintSet({nu_a, nu_b}));
    base_rate = std::max(base_rate,
                         std::abs(nu_a.dot(llt.solve(single.rhs(mu)))));
    const VectorXd pair_rhs = pair_sys.rhs(mu);
    base_rate = std::max(base_rate, std::abs(nu_a.dot(llt.solve(pair_rhs))));
    base_rate = std::max(base_rate, std::abs(nu_b.dot(llt.solve(pair_rhs))));

    const ExtendedEpsSystem ext(se2, inertia, ConstraintSet({nu_a}), cross);
    const auto [mu_dot, sigma_dot] = ext.rhs(mu, sigma);
    ext_rate = std::max(ext_rate, std::abs(nu_a.dot(llt.solve(mu_dot))));
    sigma_rate = std::max(sigma_rate, max_abs(sigma_dot));

    // sigma = 0 collapses to the unextended equations.
    reduce0 = std::max(reduce0, max_abs(ext.rhs(mu, VectorXd::Zero(3)).first -
                                        single.rhs(mu)));

    // The fiber quadratic form never reaches the base equations.
    const ExtendedEpsSystem ext_q(se2, inertia, ConstraintSet({nu_a}), cross,
                                  rng.spd(3));
    fiber_free = std::max(fiber_free, max_abs(ext_q.rhs(mu, sigma).first -
                                              mu_dot));

    // Multipliers agree with the expanded pairing formula
    // lambda = -(<mu,[xi,w]> + <sigma, C(xi,w)>) / <nu, I^{-1} nu>.
    const VectorXd xi = llt.solve(mu);
    const VectorXd w = llt.solve(nu_a);
    const double hand = -(mu.dot(se2.bracket(xi, w)) +
                          sigma.dot(cross.eval(xi, w))) /
                        nu_a.dot(w);
    expanded = std::max(expanded,
                        std::abs(ext.multipliers(mu, sigma)[0] - hand));
  }
  s.add("constraints are preserved by the base flow", base_rate, 1e-12);
  s.add("constraints are preserved by the extended flow", ext_rate, 1e-12);
  // The lifted factorization solves the same base block through a different
  // elimination path, so agreement is to rounding, not bitwise.
  s.add("zero fiber momentum reduces to the base flow", reduce0, 1e-13);
  s.add("fiber momentum rate vanishes identically", sigma_rate, 0.0);
  s.add("fiber quadratic form never enters the base equations", fiber_free,
        0.0);
  s.add("extension multipliers match the expanded pairing formula", expanded,
        1e-12);

  // Measure criterion: frozen diagonal case and the coupled rejections.
  {
    const Matrix3d diag = Vector3d(2.0, 3.0, 4.0).asDiagonal();
    const MeasureReport r = measure_criterion(se2, diag, nu3);
    double err = r.exists ? 0.0 : 1.0;
    err = std::max(err, std::abs(r.c));
    err = std::max(err, r.residual);
    s.add("measure criterion at the frozen diagonal inertia", err, 1e-12);

    int wrong = 0;
    const InertiaTensor coupled(2.0, 0.0, 0.3, 2.0, 1.0, 2.0);
    if (measure_criterion(se2, coupled.matrix(), nu3).exists) ++wrong;
    for (int i = 0; i < 20; ++i) {
      InertiaTensor it = random_inertia(rng);
      const bool verdict = measure_criterion(se2, it.matrix(), nu3).exists;
      const bool expected =
          std::abs(it.Z() * it.L2() + it.M() * it.L1()) <= 1e-14 &&
          std::abs(it.J() * it.Z() + it.L1() * it.L2()) <= 1e-14;
      if (verdict != expected) ++wrong;
      // Kill the couplings and the measure must reappear.
      const InertiaTensor clean(it.J(), 0.0, it.L2(), it.M(), 0.0, it.N());
      if (!measure_criterion(se2, clean.matrix(), nu3).exists) ++wrong;
    }
    s.add("measure criterion matches the coupling conditions",
          static_cast<double>(wrong), 0.0);

    bool rejected = false;
    try {
      measure_criterion(se2, diag,
                        ConstraintSet({nu3, Vector3d(0.0, 1.0, 0.0)}));
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    s.add("multi-constraint measure request is rejected",
          rejected ? 0.0 : 1.0, 0.0);

    int disagree = 0;
    double residual_gap = 0.0;
    for (int i = 0; i < 50; ++i) {
      const MatrixXd inertia = rng.spd(3);
      VectorXd nu = rng.vector(3);
      if (i % 5 == 0) nu = nu3;  // include the blade constraint itself
      const MeasureReport b = measure_criterion(se2, inertia, nu);
      const MeasureReport e =
          measure_criterion_extended(se2, cross, inertia, nu);
      if (b.exists != e.exists) ++disagree;
      residual_gap = std::max(residual_gap, std::abs(b.residual - e.residual));
    }
    s.add("extension preserves the measure verdict",
          static_cast<double>(disagree), 0.0);
    s.add("extension preserves the measure residual", residual_gap, 1e-10);
  }
}

// ---------------------------------------------------------------------------
// Model layer
// ---------------------------------------------------------------------------

void check_models(Suite& s) {
  RandomStream& rng = s.rng();
  const StructureAlgebra se2 = se2_structure();

  // Frozen rigid-body block.
  {
    Matrix3d expect;
    expect << 3.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0, 0.0, 2.0;
    double err = (body_inertia({2.0, 1.0, 1.0, 0.0}) - expect)
                     .cwiseAbs()
                     .maxCoeff();
    err = std::max(err, (body_inertia({1.0, 1.0, 0.0, 0.0}) -
                         Matrix3d::Identity())
                            .cwiseAbs()
                            .maxCoeff());
    s.add("rigid block at the frozen offsets", err, 0.0);

    bool rejected = false;
    try {
      AddedInertia bad;
      bad.I_F = -2.0;
      bad.M11 = -2.0;
      bad.M22 = -2.0;
      total_inertia({1.0, 1.0, 0.0, 0.0}, bad);
    } catch (const std::invalid_argument&) {
      rejected = true;
    }
    s.add("indefinite total inertia is rejected", rejected ? 0.0 : 1.0, 0.0);
  }

  // Frozen momentum equations.
  {
    const InertiaTensor id(1.0, 0.0, 0.0, 1.0, 0.0, 1.0);
    double err = max_abs(kirchhoff_rhs(DualElement(1.0, 1.0, 0.0), id).vec() -
                         Vector3d(0.0, 0.0, -1.0));
    const CirculationParams circ(1.0, 1.0, 0.0, 0.0);
    err = std::max(err,
                   max_abs(chaplygin_lamb_rhs(DualElement(0.0, 1.0, 0.0), id,
                                              circ)
                               .vec() -
                           Vector3d(0.0, 0.0, 1.0)));
    for (int i = 0; i < 20; ++i) {
      const InertiaTensor it = random_inertia(rng);
      const DualElement mu(rng.symmetric(), rng.symmetric(), rng.symmetric());
      err = std::max(
          err, max_abs(chaplygin_lamb_rhs(mu, it,
                                          CirculationParams(1.0, 0.0, 0.0,
                                                            0.0))
                           .vec() -
                       kirchhoff_rhs(mu, it).vec()));
    }
    s.add("momentum equations at the frozen reference states", err, 1e-15);
  }

  // Hamiltonian form of the momentum equations, dual inverse routes.
  double kir = 0.0, lamb = 0.0, inv_gap = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const InertiaTensor it = random_inertia(rng);
    const Matrix3d inv_llt =
        it.matrix().llt().solve(Matrix3d::Identity());
    inv_gap = std::max(inv_gap, (inv_llt - it.inverse_explicit())
                                    .cwiseAbs()
                                    .maxCoeff());
    TestFunction h3;
    h3.l = VectorXd::Zero(3);
    h3.Q = inv_llt;
    const Vector3d mu = rng.vector3();
    kir = std::max(kir, max_abs(ham_vf(lp_se2(), h3, mu) -
                                kirchhoff_rhs(DualElement(mu), it).vec()));

    const CirculationParams circ = random_circulation(rng);
    TestFunction h6;
    h6.l = VectorXd::Zero(6);
    h6.Q = MatrixXd::Zero(6, 6);
    h6.Q.topLeftCorner(3, 3) = inv_llt;
    VectorXd x6(6);
    x6 << mu, circ.sigma();
    lamb = std::max(lamb,
                    max_abs(ham_vf(lp_extended(), h6, x6).head<3>() -
                            chaplygin_lamb_rhs(DualElement(mu), it, circ)
                                .vec()));
  }
  s.add("explicit inverse matches the factorized inverse", inv_gap, 1e-10);
  s.add("momentum equations are hamiltonian", kir, 1e-12);
  s.add("circulation equations are hamiltonian on the extension", lamb, 1e-12);

  // Momentum shift as a pointwise field identity: the (alpha, beta) field at
  // mu equals the (0,0)-constants bivector at mu + A^T sigma driven by the
  // untransported kinetic gradient.
  double shift_field = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const InertiaTensor it = random_inertia(rng);
    const CirculationParams circ = random_circulation(rng);
    const Vector3d mu = rng.vector3();
    const Vector3d a_sigma(0.0, circ.sigma()[1], circ.sigma()[2]);
    const CirculationParams pure(circ.rho, circ.kappa, 0.0, 0.0);
    const Vector3d xi = it.matrix().llt().solve(mu);
    const Vector3d field =
        lp_magnetic(pure).bivector(mu + a_sigma) * xi;
    shift_field = std::max(
        shift_field,
        max_abs(field - chaplygin_lamb_rhs(DualElement(mu), it, circ).vec()));
  }
  s.add("momentum shift identity for the circulation field", shift_field,
        1e-12);

  // Frame shift.
  {
    const CirculationParams c(1.2, 0.7, 0.3, -0.4);
    const CirculationParams shifted =
        frame_shift(c, c.alpha / c.kappa, c.beta / c.kappa);
    double err = std::max(std::abs(shifted.alpha), std::abs(shifted.beta));
    const CirculationParams nok(1.2, 0.0, 0.3, -0.4);
    const CirculationParams same = frame_shift(nok, 5.0, -7.0);
    err = std::max(err, std::abs(same.alpha - nok.alpha));
    err = std::max(err, std::abs(same.beta - nok.beta));
    s.add("frame shift removes the constants exactly when circulating", err,
          0.0);
  }

  // Constrained flow and its reduction.
  double annihilate = 0.0, reduce = 0.0, mult = 0.0, energy_cons = 0.0;
  double restrict_h = 0.0;
  for (int i = 0; i < s.samples(); ++i) {
    const SleighParams p = random_sleigh(rng);
    const Matrix3d inv = p.inertia.inverse_explicit();
    const Vector3d mu_any = rng.vector3();
    annihilate = std::max(
        annihilate,
        std::abs((inv * sleigh_constrained_rhs(DualElement(mu_any), p).vec())[
            2]));

    const Vector2d w(rng.symmetric(), rng.symmetric());
    const DualElement mu = sleigh_momentum(w, p.inertia);
    const Vector3d mu_dot = sleigh_constrained_rhs(mu, p).vec();
    reduce = std::max(
        reduce, max_abs(Vector2d((inv * mu_dot).head<2>()) -
                        sleigh_reduced_rhs(w, p)));
    mult = std::max(mult, std::abs(sleigh_multiplier(mu, p) -
                                   sleigh_multiplier(w, p)));

    const Vector2d grad(p.inertia.J() * w[0] - p.inertia.L2() * w[1],
                        p.inertia.M() * w[1] - p.inertia.L2() * w[0]);
    energy_cons = std::max(energy_cons,
                           std::abs(grad.dot(sleigh_reduced_rhs(w, p))));
    restrict_h = std::max(restrict_h,
                          std::abs(reduced_energy(w, p.inertia) -
                                   full_hamiltonian(mu, p.inertia)));
  }
  s.add("constrained flow annihilates the blade velocity", annihilate, 1e-12);
  s.add("constrained flow projects to the blade equations", reduce, 1e-12);
  s.add("multiplier routes agree on admissible states", mult, 1e-12);
  s.add("reduced energy is conserved by the blade field", energy_cons, 1e-12);
  s.add("reduced energy restricts the momentum hamiltonian", restrict_h,
        1e-10);

  // Generic constrained dynamics against the hand-coded blade forms.
  double generic = 0.0;
  const AlgebraCocycle2 cross = circulation_cocycle();
  const VectorXd nu3 = Vector3d(0.0, 0.0, 1.0);
  for (int draw = 0; draw < 20; ++draw) {
    const SleighParams p = random_sleigh(rng);
    const ExtendedEpsSystem sys(se2, p.inertia.matrix(), ConstraintSet({nu3}),
                                cross);
    for (int i = 0; i < 50; ++i) {
      const Vector2d w(rng.symmetric(), rng.symmetric());
      const DualElement mu = sleigh_momentum(w, p.inertia);
      const auto [mu_dot, sigma_dot] =
          sys.rhs(mu.vec(), p.circulation.sigma());
      generic = std::max(generic,
                         max_abs(mu_dot - sleigh_constrained_rhs(mu, p).vec()));
      generic = std::max(
          generic,
          std::abs(sys.multipliers(mu.vec(), p.circulation.sigma())[0] -
                   sleigh_multiplier(mu, p)));
      generic = std::max(generic, max_abs(sigma_dot));
    }
  }
  s.add("generic constrained dynamics match the blade closed forms", generic,
        1e-12);

  // Equilibrium line, classification, separatrix.
  {
    double err = 0.0;
    for (int i = 0; i < s.few(); ++i) {
      SleighParams p = random_sleigh(rng);
      const EquilibriaLine line = equilibria_line(p);
      if (line.status == LineStatus::Line) {
        err = std::max(err, max_abs(sleigh_reduced_rhs(
                                line.point(rng.symmetric() * 3.0), p)));
      }
    }
    const CirculationParams none(1.0, 0.0, 1.0, 0.0);  // rho*alpha = 1
    const SleighParams empty{InertiaTensor(2.0, 0.0, 0.3, 2.0, 0.0, 2.0),
                             none};
    if (equilibria_line(empty).status != LineStatus::Empty) err += 1.0;
    const SleighParams plane{InertiaTensor(2.0, 0.0, 0.3, 2.0, 0.0, 2.0),
                             CirculationParams(1.0, 0.0, 0.0, 0.0)};
    if (equilibria_line(plane).status != LineStatus::WholePlane) err += 1.0;
    s.add("equilibrium line consists of rest points", err, 1e-12);
  }
  {
    // N = 2 keeps the full tensor positive definite; the reduced flow and
    // the separatrix energy do not involve N.
    const SleighParams p{InertiaTensor(1.0, 1.0, 0.0, 1.0, 0.0, 2.0),
                         CirculationParams(1.0, 0.0, -1.0, 0.0)};
    double err = 0.0;
    const EquilibriumClassification stable =
        classify_equilibrium(Vector2d(1.0, 1.0), p);
    if (stable.type != EquilibriumType::Stable) err += 1.0;
    err = std::max(err, std::abs(stable.transverse_eigenvalue + 1.0));
    const EquilibriumClassification unstable =
        classify_equilibrium(Vector2d(1.0, -1.0), p);
    if (unstable.type != EquilibriumType::Unstable) err += 1.0;
    err = std::max(err, std::abs(unstable.transverse_eigenvalue - 1.0));
    const EquilibriumClassification degen =
        classify_equilibrium(Vector2d(1.0, 0.0), p);
    if (degen.type != EquilibriumType::Degenerate) err += 1.0;
    bool threw = false;
    try {
      classify_equilibrium(Vector2d(0.0, 5.0), p);
    } catch (const std::invalid_argument&) {
      threw = true;
    }
    if (!threw) err += 1.0;
    s.add("classification at the frozen reference points", err, 1e-12);

    const SeparatrixEnergy sep = separatrix_energy(p);
    double serr = sep.exists ? 0.0 : 1.0;
    serr = std::max(serr, std::abs(sep.h0 - 0.5));
    serr = std::max(serr, max_abs(sep.tangency - Vector2d(1.0, 0.0)));
    const SleighParams gone{InertiaTensor(1.0, 0.0, 0.0, 1.0, 0.0, 1.0),
                            CirculationParams(1.0, 0.0, 1.0, 0.0)};
    if (separatrix_energy(gone).exists) serr += 1.0;
    s.add("separatrix energy at the frozen parameters", serr, 1e-12);
  }
  {
    // Closed form against a primal-dual solve of the constrained minimum.
    double gap = 0.0;
    int split_bad = 0;
    for (int i = 0; i < s.few(); ++i) {
      SleighParams p = random_sleigh(rng);
      if (std::abs(p.inertia.L1()) + std::abs(p.inertia.Z()) < 1e-3) continue;
      const SeparatrixEnergy sep = separatrix_energy(p);
      MatrixXd kkt = MatrixXd::Zero(3, 3);
      kkt(0, 0) = p.inertia.J();
      kkt(0, 1) = -p.inertia.L2();
      kkt(1, 0) = -p.inertia.L2();
      kkt(1, 1) = p.inertia.M();
      kkt(0, 2) = p.inertia.L1();
      kkt(1, 2) = p.inertia.Z();
      kkt(2, 0) = p.inertia.L1();
      kkt(2, 1) = p.inertia.Z();
      VectorXd rhs = VectorXd::Zero(3);
      rhs[2] = -p.circulation.sigma()[2];  // line level: L1 w + Z v = -rho*alpha
      const VectorXd sol = kkt.fullPivLu().solve(rhs);
      const Vector2d w(sol[0], sol[1]);
      gap = std::max(gap, std::abs(reduced_energy(w, p.inertia) - sep.h0));
      gap = std::max(gap, max_abs(w - sep.tangency));

      // Along the line the energy is a quadratic in arc length; its vertex
      // value is h0, and the root count of H = h flips at h0.
      const EquilibriaLine line = equilibria_line(p);
      const Vector2d p0 = line.point(0.0);
      const Vector2d dir = line.point(1.0) - p0;
      Eigen::Matrix2d q2;
      q2 << p.inertia.J(), -p.inertia.L2(), -p.inertia.L2(), p.inertia.M();
      const double qa = 0.5 * dir.dot(q2 * dir);
      const double qb = dir.dot(q2 * p0);
      const double qc = 0.5 * p0.dot(q2 * p0);
      gap = std::max(gap, std::abs(qc - qb * qb / (4.0 * qa) - sep.h0));
      const auto discriminant = [&](double h) {
        return qb * qb - 4.0 * qa * (qc - h);
      };
      const double delta = 0.1 * (std::abs(sep.h0) + 1.0);
      if (discriminant(sep.h0 - delta) >= 0.0) ++split_bad;
      if (discriminant(sep.h0 + delta) <= 0.0) ++split_bad;
    }
    s.add("separatrix energy equals the constrained minimum", gap, 1e-10);
    s.add("energy levels split at the separatrix",
          static_cast<double>(split_bad), 0.0);
  }

  // Divergence-free blades are exactly the measure-admitting ones.
  {
    int wrong = 0;
    for (int i = 0; i < s.few(); ++i) {
      const InertiaTensor it = random_inertia(rng);
      const SleighParams p{it, random_circulation(rng)};
      const bool div_free =
          sleigh_divergence_coefficients(p).cwiseAbs().maxCoeff() <= 1e-14;
      const bool measurable =
          measure_criterion(se2, it.matrix(), nu3).exists;
      if (div_free != measurable) ++wrong;
      const InertiaTensor clean(it.J(), 0.0, it.L2(), it.M(), 0.0, it.N());
      const SleighParams pc{clean, p.circulation};
      if (sleigh_divergence_coefficients(pc).cwiseAbs().maxCoeff() > 1e-14) {
        ++wrong;
      }
      if (!measure_criterion(se2, clean.matrix(), nu3).exists) ++wrong;
    }
    s.add("divergence-free blades are exactly the measurable ones",
          static_cast<double>(wrong), 0.0);
  }

  // Charged planar particle.
  {
    HeisenbergParams hp;
    double err = max_abs(heisenberg_rhs(Vector2d(1.0, 0.0), hp, 1.0) -
                         Vector2d(0.0, -1.0));
    err = std::max(err, max_abs(heisenberg_rhs(Vector2d(1.0, 2.0), hp, 0.0)));

    const StructureAlgebra ab2 = abelian_structure(2);
    double oracle = 0.0;
    for (int i = 0; i < s.few(); ++i) {
      HeisenbergParams params;
      params.mass = rng.spd(2);
      params.field = rng.symmetric() * 2.0;
      const double sigma = rng.symmetric() * 2.0;
      const PoissonStructure lorentz =
          lp_general(ab2, magnetic_cocycle(params.field), BracketSign::Plus);
      TestFunction h;
      h.l = VectorXd::Zero(3);
      h.Q = MatrixXd::Zero(3, 3);
      h.Q.topLeftCorner(2, 2) =
          params.mass.llt().solve(Eigen::Matrix2d::Identity());
      const Vector2d p(rng.symmetric(), rng.symmetric());
      VectorXd x3(3);
      x3 << p, sigma;
      oracle = std::max(oracle,
                        max_abs(ham_vf(lorentz, h, x3).head<2>() -
                                heisenberg_rhs(p, params, sigma)));
    }
    s.add("charged momenta follow the cross-product law",
          std::max(err, oracle), 1e-12);

    // Frozen minus-sign bivector layout.
    const PoissonStructure minus_var =
        lp_general(ab2, magnetic_cocycle(2.0), BracketSign::Minus);
    VectorXd x3(3);
    x3 << 0.7, -0.3, 0.5;  // (p1, p2, sigma)
    MatrixXd expect = MatrixXd::Zero(3, 3);
    expect(0, 1) = -0.5 * 2.0;
    expect(1, 0) = 0.5 * 2.0;
    s.add("minus-sign charged bivector at the frozen layout",
          (minus_var.bivector(x3) - expect).cwiseAbs().maxCoeff(), 0.0);
  }
}

}  // namespace

std::vector<CheckResult> run_verification_suite(const VerifyOptions& options) {
  Suite suite(options);
  check_algebra(suite);
  check_extension(suite);
  check_poisson(suite, options.inject_corrupted_cocycle);
  check_eps(suite);
  check_models(suite);
  return suite.take();
}

}  // namespace geps
