#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "geps/algebra.hpp"
#include "geps/extension.hpp"
#include "geps/random.hpp"

using namespace geps;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {
GroupElement random_group(RandomStream& rng) {
  return {4.0 * rng.symmetric(), rng.symmetric(), rng.symmetric()};
}
}  // namespace

TEST_CASE("group cocycle identities hold for the shipped cocycles") {
  RandomStream rng(11);
  double worst = 0.0;
  const GroupCocycle area = rotation_area_group_cocycle();
  const GroupCocycle trans = translation_group_cocycle();
  const GroupCocycle combined = circulation_group_cocycle();
  CHECK(area.fiber_dim == 1);
  CHECK(trans.fiber_dim == 2);
  CHECK(combined.fiber_dim == 3);
  for (int i = 0; i < 300; ++i) {
    const GroupElement f = random_group(rng), g = random_group(rng), h = random_group(rng);
    worst = std::max(worst, cocycle_identity_residual(area, f, g, h).norm());
    worst = std::max(worst, cocycle_identity_residual(trans, f, g, h).norm());
    worst = std::max(worst, cocycle_identity_residual(combined, f, g, h).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("a perturbed pairing fails the cocycle identity") {
  // Adding theta_g * x_h to the rotation-area pairing breaks associativity of
  // the extension; the residual is visible at order one.
  const GroupCocycle area = rotation_area_group_cocycle();
  GroupCocycle broken;
  broken.fiber_dim = 1;
  broken.eval = [area](const GroupElement& g, const GroupElement& h) {
    VectorXd v = area.eval(g, h);
    v[0] += g.theta * h.x;
    return v;
  };
  // Residual of the added term is theta_f ((1 - cos theta_g) x_h +
  // sin theta_g * y_h); this triple makes it pi/2.
  const GroupElement f(M_PI / 2.0, 1.0, 0.0);
  const GroupElement g(M_PI / 2.0, 0.0, 0.0);
  const GroupElement h(0.0, 1.0, 0.0);
  const double residual = cocycle_identity_residual(broken, f, g, h).norm();
  CHECK(residual > 1e-3);
  CHECK(residual == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
}

TEST_CASE("extended multiplication is associative") {
  RandomStream rng(13);
  const GroupCocycle B = circulation_group_cocycle();
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const ExtendedGroupElement a{random_group(rng), rng.vector3()};
    const ExtendedGroupElement b{random_group(rng), rng.vector3()};
    const ExtendedGroupElement c{random_group(rng), rng.vector3()};
    const ExtendedGroupElement left = extended_mul(B, extended_mul(B, a, b), c);
    const ExtendedGroupElement right = extended_mul(B, a, extended_mul(B, b, c));
    worst = std::max(worst, std::abs(left.base.theta - right.base.theta));
    worst = std::max(worst, (left.base.translation() - right.base.translation()).norm());
    worst = std::max(worst, (left.fiber - right.fiber).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("algebra cocycles at frozen arguments") {
  const Vector3d xi(1.0, 2.0, 3.0), eta(4.0, 5.0, 6.0);

  const AlgebraCocycle2 area = translation_area_cocycle();
  CHECK(area.fiber_dim == 1);
  CHECK(area.eval(xi, eta)[0] == doctest::Approx(-3.0).epsilon(1e-15));  // v1 v2' - v2 v1'

  const AlgebraCocycle2 cross = circulation_cocycle();
  CHECK(cross.fiber_dim == 3);
  CHECK((cross.eval(xi, eta) - Vector3d(-3.0, 6.0, -3.0)).norm() <= 1e-15);

  const StructureAlgebra se2 = se2_structure();
  const OneCocycle A = circulation_one_cocycle();
  const AlgebraCocycle2 dA = coboundary(se2, A);
  // [xi, eta] = (0, 6, -3), so dA(xi, eta) = -A(0, 6, -3) = (0, -6, 3).
  CHECK((dA.eval(xi, eta) - Vector3d(0.0, -6.0, 3.0)).norm() <= 1e-14);

  const AlgebraCocycle2 mag = magnetic_cocycle(2.0);
  CHECK(mag.fiber_dim == 1);
  CHECK(mag.eval(Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4))[0] ==
        doctest::Approx(2.0 * (1 * 4 - 2 * 3)).epsilon(1e-15));
}

TEST_CASE("the circulation cocycle splits into area part and coboundary") {
  const StructureAlgebra se2 = se2_structure();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const AlgebraCocycle2 area = translation_area_cocycle();
  const AlgebraCocycle2 dA = coboundary(se2, circulation_one_cocycle());
  RandomStream rng(17);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const Vector3d a = rng.vector3(), b = rng.vector3();
    Vector3d expected = -dA.eval(a, b);
    expected[0] += area.eval(a, b)[0];
    worst = std::max(worst, (cross.eval(a, b) - expected).norm());
  }
  CHECK(worst <= 1e-13);
}

TEST_CASE("finite differencing the group cocycles recovers the algebra cocycles") {
  const GroupCocycle combined = circulation_group_cocycle();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const GroupCocycle area_g = rotation_area_group_cocycle();
  const AlgebraCocycle2 area_a = translation_area_cocycle();
  RandomStream rng(19);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const AlgebraElement xi(rng.vector3()), eta(rng.vector3());
    worst = std::max(worst, (infinitesimal_cocycle_fd(combined, xi, eta, 1e-4) -
                             cross.eval(xi.vec(), eta.vec()))
                                .norm());
    worst = std::max(worst, (infinitesimal_cocycle_fd(area_g, xi, eta, 1e-4) -
                             area_a.eval(xi.vec(), eta.vec()))
                                .norm());
  }
  CHECK(worst <= 1e-6);
  CHECK_THROWS_AS(infinitesimal_cocycle_fd(combined, AlgebraElement(1, 0, 0),
                                           AlgebraElement(0, 1, 0), 0.0),
                  std::invalid_argument);
}

TEST_CASE("second-order convergence of the cocycle differencing") {
  const GroupCocycle combined = circulation_group_cocycle();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const AlgebraElement xi(0.9, -0.4, 0.7), eta(-0.3, 0.8, 0.5);
  const Vector3d exact = cross.eval(xi.vec(), eta.vec());
  double prev = -1.0;
  for (const double h : {1e-2, 5e-3, 2.5e-3}) {
    const double err = (infinitesimal_cocycle_fd(combined, xi, eta, h) - exact).norm();
    if (prev > 0.0) {
      const double order = std::log2(prev / err);
      CHECK(order >= 1.9);
    }
    prev = err;
  }
}

TEST_CASE("trivialization and dual shift are adjoint") {
  const OneCocycle A = circulation_one_cocycle();
  CHECK(A.rows() == 3);
  CHECK(A.cols() == 3);
  CHECK((A - (Eigen::Matrix3d() << 0, 0, 0, 0, 1, 0, 0, 0, 1).finished()).norm() == 0.0);
  RandomStream rng(23);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const ExtendedAlgebraElement x{AlgebraElement(rng.vector3()), rng.vector3()};
    const ExtendedDualElement m{DualElement(rng.vector3()), rng.vector3()};
    const ExtendedAlgebraElement px = trivialization_psi(A, x);
    const ExtendedDualElement pm = dual_shift_phi(A, m);
    const double lhs = pairing(pm.base, x.base) + pm.fiber.dot(x.fiber);
    const double rhs = pairing(m.base, px.base) + m.fiber.dot(px.fiber);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("trivialization intertwines the two extension brackets") {
  // Psi_A maps the bracket with cocycle C to the bracket with C + dA; for
  // C = cross and A the circulation one-cocycle this lands on the pure area
  // cocycle padded into the first fiber slot.
  const StructureAlgebra se2 = se2_structure();
  const OneCocycle A = circulation_one_cocycle();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const AlgebraCocycle2 area = translation_area_cocycle();
  AlgebraCocycle2 area_pad;
  area_pad.fiber_dim = 3;
  area_pad.eval = [area](const VectorXd& a, const VectorXd& b) {
    Vector3d v = Vector3d::Zero();
    v[0] = area.eval(a, b)[0];
    return VectorXd(v);
  };
  RandomStream rng(29);
  double worst = 0.0;
  for (int i = 0; i < 300; ++i) {
    const ExtendedAlgebraElement x{AlgebraElement(rng.vector3()), rng.vector3()};
    const ExtendedAlgebraElement y{AlgebraElement(rng.vector3()), rng.vector3()};
    const ExtendedAlgebraElement lhs =
        trivialization_psi(A, extended_bracket(cross, x, y));
    const ExtendedAlgebraElement rhs =
        extended_bracket(area_pad, trivialization_psi(A, x), trivialization_psi(A, y));
    worst = std::max(worst, (lhs.base.vec() - rhs.base.vec()).norm());
    worst = std::max(worst, (lhs.fiber - rhs.fiber).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("central extension structure constants") {
  const StructureAlgebra se2 = se2_structure();
  const StructureAlgebra ext = central_extension_structure(se2, circulation_cocycle());
  CHECK(ext.dim() == 6);
  CHECK(ext.jacobi_defect() <= 1e-12);
  // Base block survives; C(e1, e2) = e1 x e2 = e3 lands in the third fiber slot.
  CHECK(ext.structure_constant(2, 0, 1) == 1.0);
  CHECK(ext.structure_constant(5, 0, 1) == 1.0);
  CHECK(ext.structure_constant(3, 1, 2) == 1.0);  // C(e2, e3) = e1
  // Fiber directions are central.
  RandomStream rng(31);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    VectorXd fib = VectorXd::Zero(6);
    fib.tail<3>() = rng.vector3();
    worst = std::max(worst, ext.bracket(fib, rng.vector(6)).norm());
  }
  CHECK(worst == 0.0);

  const StructureAlgebra heis =
      central_extension_structure(abelian_structure(2), magnetic_cocycle(1.5));
  CHECK(heis.dim() == 3);
  CHECK(heis.structure_constant(2, 0, 1) == 1.5);
  CHECK(heis.jacobi_defect() <= 1e-12);
}

TEST_CASE("closedness defects vanish for cocycles and flag the bad bilinear form") {
  const StructureAlgebra se2 = se2_structure();
  RandomStream rng(37);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    worst = std::max(worst, cocycle_closedness_defect(se2, circulation_cocycle(),
                                                      rng.vector3(), rng.vector3(),
                                                      rng.vector3())
                                .norm());
  }
  CHECK(worst <= 1e-12);

  // Quadratic, non-bilinear form: the pointwise defect fires even though its
  // restriction to basis pairs tabulates to a harmless bilinear cocycle (on
  // se(2) every antisymmetric bilinear form is closed).
  AlgebraCocycle2 bad;
  bad.fiber_dim = 1;
  bad.eval = [](const VectorXd& a, const VectorXd& b) {
    VectorXd v(1);
    v[0] = a[0] * b[1] * b[1] - b[0] * a[1] * a[1];
    return v;
  };
  const Vector3d x(1, 1, 0), y(0, 1, 1), z(1, 0, 1);
  CHECK(cocycle_closedness_defect(se2, bad, x, y, z).norm() > 1e-3);

  // On the solvable algebra [e0, e1] = e1, [e0, e2] = e2 the area form on the
  // (e1, e2) plane is antisymmetric yet not closed (defect 2 on the basis
  // triple), so building the extension must be rejected.
  std::vector<Eigen::MatrixXd> book(3, Eigen::MatrixXd::Zero(3, 3));
  book[1](0, 1) = 1.0;
  book[1](1, 0) = -1.0;
  book[2](0, 2) = 1.0;
  book[2](2, 0) = -1.0;
  const StructureAlgebra solvable("book", book);
  AlgebraCocycle2 area12;
  area12.fiber_dim = 1;
  area12.eval = [](const VectorXd& a, const VectorXd& b) {
    VectorXd v(1);
    v[0] = a[1] * b[2] - a[2] * b[1];
    return v;
  };
  CHECK(cocycle_closedness_defect(solvable, area12, Vector3d::UnitX(),
                                  Vector3d::UnitY(), Vector3d::UnitZ())
            .norm() == doctest::Approx(2.0));
  CHECK_THROWS_AS(central_extension_structure(solvable, area12),
                  std::invalid_argument);
}
