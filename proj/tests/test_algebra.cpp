#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

#include "geps/algebra.hpp"
#include "geps/random.hpp"

using namespace geps;
using Eigen::Vector3d;

TEST_CASE("planar bracket at frozen arguments") {
  const AlgebraElement x(1.0, 2.0, 3.0);
  const AlgebraElement y(4.0, 5.0, 6.0);
  const AlgebraElement b = se2_bracket(x, y);
  CHECK(b.omega == 0.0);
  CHECK(b.v1 == doctest::Approx(6.0).epsilon(1e-15));
  CHECK(b.v2 == doctest::Approx(-3.0).epsilon(1e-15));

  // Basis relations: [e1, e2] = e3, [e1, e3] = -e2, [e2, e3] = 0.
  CHECK((se2_bracket({1, 0, 0}, {0, 1, 0}).vec() - Vector3d(0, 0, 1)).norm() == 0.0);
  CHECK((se2_bracket({1, 0, 0}, {0, 0, 1}).vec() - Vector3d(0, -1, 0)).norm() == 0.0);
  CHECK(se2_bracket({0, 1, 0}, {0, 0, 1}).vec().norm() == 0.0);
}

TEST_CASE("coadjoint action at frozen arguments and by duality") {
  const DualElement mu(4.0, 5.0, 6.0);
  const AlgebraElement xi(1.0, 2.0, 3.0);
  const DualElement c = se2_coadjoint(xi, mu);
  CHECK(c.k == doctest::Approx(3.0).epsilon(1e-15));   // p1 v2 - p2 v1
  CHECK(c.p1 == doctest::Approx(6.0).epsilon(1e-15));  // omega p2
  CHECK(c.p2 == doctest::Approx(-5.0).epsilon(1e-15)); // -omega p1

  RandomStream rng(2);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const AlgebraElement a(rng.vector3());
    const AlgebraElement b(rng.vector3());
    const DualElement m(rng.vector3());
    const double lhs = pairing(se2_coadjoint(a, m), b);
    const double rhs = pairing(m, se2_bracket(a, b));
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("group multiplication, inverseposition and associativity") {
  const GroupElement g(M_PI / 2.0, 1.0, 0.0);
  const GroupElement h(0.0, 1.0, 0.0);
  const GroupElement gh = group_mul(g, h);
  CHECK(gh.theta == doctest::Approx(M_PI / 2.0).epsilon(1e-15));
  CHECK(gh.x == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(gh.y == doctest::Approx(1.0).epsilon(1e-12));

  RandomStream rng(3);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const GroupElement a(4.0 * rng.symmetric(), rng.symmetric(), rng.symmetric());
    const GroupElement b(4.0 * rng.symmetric(), rng.symmetric(), rng.symmetric());
    const GroupElement c(4.0 * rng.symmetric(), rng.symmetric(), rng.symmetric());
    const GroupElement left = group_mul(group_mul(a, b), c);
    const GroupElement right = group_mul(a, group_mul(b, c));
    worst = std::max(worst, std::abs(left.theta - right.theta));
    worst = std::max(worst, (left.translation() - right.translation()).norm());

    const GroupElement e = group_mul(a, group_inv(a));
    worst = std::max(worst, std::abs(e.theta));
    worst = std::max(worst, e.translation().norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("body velocity of the unit-speed circular motion") {
  // theta(t) = t, x(t) = sin t, y(t) = 1 - cos t has constant body velocity
  // (1, 1, 0): the frame moves forward along its own first axis while turning.
  for (const double t : {0.0, 0.7, 2.4}) {
    const GroupElement g(t, std::sin(t), 1.0 - std::cos(t));
    const Vector3d gdot(1.0, std::cos(t), std::sin(t));
    const AlgebraElement v = body_velocity(g, gdot);
    CHECK(v.omega == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(v.v1 == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(v.v2) <= 1e-14);
  }
}

TEST_CASE("body velocity inverts left translation of the rate") {
  // gdot reconstructed from the body velocity gives back the input.
  RandomStream rng(5);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const GroupElement g(4.0 * rng.symmetric(), rng.symmetric(), rng.symmetric());
    const Vector3d gdot = rng.vector3();
    const AlgebraElement v = body_velocity(g, gdot);
    Vector3d back;
    back[0] = v.omega;
    back.tail<2>() = g.rotation() * Eigen::Vector2d(v.v1, v.v2);
    worst = std::max(worst, (back - gdot).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("structure-constant engine reproduces the closed forms") {
  const StructureAlgebra se2 = se2_structure();
  CHECK(se2.dim() == 3);
  CHECK(se2.structure_constant(2, 0, 1) == 1.0);
  CHECK(se2.structure_constant(1, 0, 2) == -1.0);
  CHECK(se2.structure_constant(2, 1, 0) == -1.0);
  CHECK(se2.jacobi_defect() <= 1e-12);

  RandomStream rng(7);
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const Vector3d a = rng.vector3(), b = rng.vector3(), m = rng.vector3();
    worst = std::max(
        worst,
        (se2.bracket(a, b) - se2_bracket(AlgebraElement(a), AlgebraElement(b)).vec()).norm());
    worst = std::max(worst, (se2.ad(a) * b - se2.bracket(a, b)).norm());
    worst = std::max(
        worst,
        (se2.coad(a, m) - se2_coadjoint(AlgebraElement(a), DualElement(m)).vec()).norm());
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("unimodularity and the abelian table") {
  CHECK(trace_ad(se2_structure()).norm() == 0.0);
  const StructureAlgebra ab = abelian_structure(2);
  CHECK(ab.dim() == 2);
  CHECK(ab.bracket(Eigen::Vector2d(1, 2), Eigen::Vector2d(3, 4)).norm() == 0.0);
  CHECK(trace_ad(ab).norm() == 0.0);
}

TEST_CASE("invalid structure-constant tables are rejected") {
  // c^3_12 = 1 together with c^1_13 = 1 breaks the Jacobi identity.
  std::vector<Eigen::MatrixXd> c(3, Eigen::MatrixXd::Zero(3, 3));
  c[2](0, 1) = 1.0;
  c[2](1, 0) = -1.0;
  c[0](0, 2) = 1.0;
  c[0](2, 0) = -1.0;
  CHECK_THROWS_AS(StructureAlgebra("bad", c), std::invalid_argument);

  // A non-antisymmetric table is rejected before the Jacobi test.
  std::vector<Eigen::MatrixXd> s(2, Eigen::MatrixXd::Zero(2, 2));
  s[0](0, 1) = 1.0;
  s[0](1, 0) = 1.0;
  CHECK_THROWS_AS(StructureAlgebra("sym", s), std::invalid_argument);
}
