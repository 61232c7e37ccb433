// Acceptance harness: eleven end-to-end criteria spanning the bracket layer,
// the central-extension machinery, the constrained momentum dynamics, the
// invariant-measure criterion, and the phase-portrait pipeline.  Each
// criterion prints exactly one line; the exit code is the failure count.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geps/algebra.hpp"
#include "geps/eps.hpp"
#include "geps/extension.hpp"
#include "geps/integrate.hpp"
#include "geps/io.hpp"
#include "geps/models.hpp"
#include "geps/poisson.hpp"
#include "geps/random.hpp"

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;

using namespace geps;

namespace {

using Verdict = std::pair<bool, std::string>;

std::string residual_note(const char* label, double value) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "(%s %.2e)", label, value);
  return buf;
}

/// Shared fixture: hydrodynamically loaded blade with all couplings active.
InertiaTensor fixture_inertia() {
  return InertiaTensor(2.0, 0.5, 0.2, 1.0, 0.3, 2.0);
}

Trajectory integrate_model(const Rhs& f, const VectorXd& x0, double h,
                           double t_final, int stride) {
  IntegratorConfig cfg;
  cfg.h = h;
  cfg.t_final = t_final;
  cfg.stride = stride;
  return integrate(f, x0, cfg);
}

// --- 1 -----------------------------------------------------------------

Verdict bracket_identities_hold() {
  RandomStream rng(11);
  const SleighParams blade{fixture_inertia(), CirculationParams(1, 0, 1, 0)};
  const std::vector<PoissonStructure> structures = {
      lp_se2(), lp_magnetic(CirculationParams(1, 0.7, 0.4, -0.3)),
      lp_extended(), reduced_sleigh_structure(blade)};
  double worst = 0.0;
  for (const PoissonStructure& P : structures) {
    for (int i = 0; i < 1000; ++i) {
      const VectorXd x = 1.5 * rng.vector(P.dim);
      const TestFunction F = TestFunction::random(rng, P.dim);
      const TestFunction G = TestFunction::random(rng, P.dim);
      const TestFunction K = TestFunction::random(rng, P.dim);
      worst = std::max(worst, std::abs(jacobi_residual(P, x, F, G, K)));
    }
  }
  if (worst > 1e-8) return {false, residual_note("max", worst)};

  // The deliberately broken structure must trip the same detector.
  VectorXd bad(6);
  bad << 1, 2, 3, 2, 0.5, 0.5;
  const double fired = std::abs(jacobi_residual(
      corrupted_circulation_structure(), bad, TestFunction::coordinate(6, 0),
      TestFunction::coordinate(6, 1), TestFunction::coordinate(6, 2)));
  if (fired <= 1e-3) return {false, residual_note("detector", fired)};
  return {true, residual_note("max", worst)};
}

// --- 2 -----------------------------------------------------------------

Verdict extended_field_matches_circulation_model() {
  RandomStream rng(23);
  const PoissonStructure P = lp_extended();
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const MatrixXd m = rng.spd(3);
    const InertiaTensor inertia = InertiaTensor::from_matrix(m);
    const CirculationParams circ(rng.range(0.5, 2.0), rng.symmetric(),
                                 rng.symmetric(), rng.symmetric());
    const Matrix3d inv = inertia.inverse_explicit();
    const auto grad = [&inv](const VectorXd& x) -> VectorXd {
      VectorXd g = VectorXd::Zero(6);
      g.head<3>() = inv * Vector3d(x.head<3>());
      return g;
    };
    for (int i = 0; i < 50; ++i) {
      VectorXd x(6);
      x.head<3>() = 1.2 * rng.vector3();
      x.tail<3>() = circ.sigma();
      const VectorXd field = ham_vf(P, grad, x);
      const Vector3d model =
          chaplygin_lamb_rhs(DualElement(Vector3d(x.head<3>())), inertia, circ)
              .vec();
      worst = std::max(worst, (field.head<3>() - model).norm());
      if (field.tail<3>().norm() != 0.0) {
        return {false, "(fiber rows leaked into the field)"};
      }
    }
  }
  return {worst <= 1e-12, residual_note("max", worst)};
}

// --- 3 -----------------------------------------------------------------

Verdict constrained_extension_matches_blade() {
  RandomStream rng(37);
  const StructureAlgebra se2 = se2_structure();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const VectorXd nu = Vector3d::UnitZ();
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const InertiaTensor inertia = InertiaTensor::from_matrix(rng.spd(3));
    const CirculationParams circ(rng.range(0.5, 2.0), rng.symmetric(),
                                 rng.symmetric(), rng.symmetric());
    const SleighParams params{inertia, circ};
    const ExtendedEpsSystem sys(se2, inertia.matrix(), ConstraintSet({nu}),
                                cross);
    const Vector3d sigma = circ.sigma();
    for (int i = 0; i < 50; ++i) {
      const Vector3d mu = 1.5 * rng.vector3();
      const VectorXd lambda = sys.multipliers(mu, sigma);
      const double model_lambda = sleigh_multiplier(DualElement(mu), params);
      worst = std::max(worst, std::abs(lambda[0] - model_lambda));
      const auto [mu_dot, sigma_dot] = sys.rhs(mu, sigma);
      const Vector3d model_rhs =
          sleigh_constrained_rhs(DualElement(mu), params).vec();
      worst = std::max(worst, (Vector3d(mu_dot) - model_rhs).norm());
      if (sigma_dot.norm() != 0.0) {
        return {false, "(fiber momentum drifted)"};
      }
    }
  }
  return {worst <= 1e-12, residual_note("max", worst)};
}

// --- 4 -----------------------------------------------------------------

Verdict long_run_invariants_preserved() {
  const InertiaTensor inertia = fixture_inertia();

  // Reduced blade energy over t = 100.
  const SleighParams blade{inertia, CirculationParams(1, 0, 1, 0)};
  const Rhs reduced = [&blade](double, const VectorXd& x) -> VectorXd {
    return sleigh_reduced_rhs(Vector2d(x[0], x[1]), blade);
  };
  const Trajectory tr =
      integrate_model(reduced, Vector2d(0.4, -0.3), 1e-3, 100.0, 10);
  if (tr.aborted) return {false, "(reduced run aborted)"};
  const double h_ref = reduced_energy(Vector2d(0.4, -0.3), inertia);
  double drift_reduced = 0.0;
  for (const VectorXd& s : tr.states) {
    drift_reduced = std::max(
        drift_reduced,
        std::abs(reduced_energy(Vector2d(s[0], s[1]), inertia) - h_ref));
  }
  if (drift_reduced > 1e-8) return {false, residual_note("blade", drift_reduced)};

  // Extended circulation model: the fiber momentum must not move at all,
  // while the energy and the leaf invariant drift at integrator order only.
  const CirculationParams circ(1, 0.7, 0.4, -0.3);
  VectorXd x0(6);
  x0 << 0.5, 0.3, -0.2, circ.sigma();
  const Rhs lamb = [&inertia, &circ](double, const VectorXd& x) -> VectorXd {
    VectorXd out = VectorXd::Zero(6);
    out.head<3>() =
        chaplygin_lamb_rhs(DualElement(Vector3d(x.head<3>())), inertia, circ)
            .vec();
    return out;
  };
  const Trajectory tl = integrate_model(lamb, x0, 1e-3, 100.0, 10);
  if (tl.aborted) return {false, "(extended run aborted)"};
  const double h0 = full_hamiltonian(DualElement(Vector3d(x0.head<3>())), inertia);
  const double f0 = casimir_fbar(DualElement(Vector3d(x0.head<3>())), circ.sigma());
  double drift_h = 0.0, drift_f = 0.0;
  for (const VectorXd& s : tl.states) {
    if ((s.tail<3>() - circ.sigma()).norm() != 0.0) {
      return {false, "(fiber momentum drifted)"};
    }
    const DualElement mu(Vector3d(s.head<3>()));
    drift_h = std::max(drift_h, std::abs(full_hamiltonian(mu, inertia) - h0));
    drift_f = std::max(drift_f, std::abs(casimir_fbar(mu, circ.sigma()) - f0));
  }
  if (drift_h > 1e-8) return {false, residual_note("energy", drift_h)};
  if (drift_f > 1e-8) return {false, residual_note("leaf", drift_f)};

  // Full constrained run: the lateral velocity stays pinned to zero.
  const Rhs full = [&blade](double, const VectorXd& x) -> VectorXd {
    return sleigh_constrained_rhs(DualElement(Vector3d(x)), blade).vec();
  };
  const VectorXd mu0 = sleigh_momentum(Vector2d(0.4, -0.3), inertia).vec();
  const Trajectory tf = integrate_model(full, mu0, 1e-3, 100.0, 10);
  if (tf.aborted) return {false, "(constrained run aborted)"};
  const Matrix3d inv = inertia.inverse_explicit();
  double worst_v2 = 0.0;
  for (const VectorXd& s : tf.states) {
    worst_v2 = std::max(worst_v2, std::abs((inv * Vector3d(s))[2]));
  }
  if (worst_v2 > 1e-8) return {false, residual_note("v2", worst_v2)};
  return {true, residual_note("worst", std::max({drift_reduced, drift_h,
                                                 drift_f, worst_v2}))};
}

// --- 5 -----------------------------------------------------------------

Verdict measure_criterion_grid() {
  const StructureAlgebra se2 = se2_structure();
  const Vector3d nu = Vector3d::UnitZ();
  const std::vector<double> values = {-1.0, -0.5, 0.0, 0.5, 1.0};
  int exist_count = 0;
  double origin_c = 1.0, origin_residual = 1.0, min_off = 1e300;
  for (const double z : values) {
    for (const double l1 : values) {
      Matrix3d m;
      m << 2.0, -0.3, l1, -0.3, 2.0, z, l1, z, 2.0;
      if (m.llt().info() != Eigen::Success) {
        return {false, "(grid point not positive definite)"};
      }
      const MeasureReport report = measure_criterion(se2, m, nu);
      const bool closed_form =
          std::abs(0.3 * z + 2.0 * l1) <= 1e-12 &&
          std::abs(2.0 * z + l1 * 0.3) <= 1e-12;
      if (report.exists != closed_form) {
        return {false, "(verdict disagrees with the closed form)"};
      }
      if (report.exists) {
        ++exist_count;
        origin_c = std::abs(report.c);
        origin_residual = report.residual;
      } else {
        min_off = std::min(min_off, report.residual);
      }
    }
  }
  if (exist_count != 1) return {false, "(density should exist only at 0,0)"};
  if (origin_residual > 1e-10 || origin_c > 1e-12) {
    return {false, residual_note("origin", origin_residual)};
  }
  if (min_off <= 1e-6) return {false, residual_note("margin", min_off)};
  return {true, residual_note("origin", origin_residual)};
}

// --- 6 -----------------------------------------------------------------

Verdict measure_extension_invariance() {
  RandomStream rng(59);
  const StructureAlgebra se2 = se2_structure();
  const AlgebraCocycle2 cross = circulation_cocycle();
  int exists_seen = 0, missing_seen = 0;
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    MatrixXd m;
    VectorXd nu;
    if (i % 3 == 0) {
      // Decoupled draws, where the density exists.
      m = Vector3d(rng.range(0.5, 3.0), rng.range(0.5, 3.0),
                   rng.range(0.5, 3.0))
              .asDiagonal();
      nu = Vector3d::UnitZ();
    } else {
      m = rng.spd(3);
      nu = rng.vector3();
      while (nu.norm() < 0.3) nu = rng.vector3();
    }
    const MeasureReport base = measure_criterion(se2, m, nu);
    const MeasureReport ext = measure_criterion_extended(se2, cross, m, nu);
    if (base.exists != ext.exists) {
      return {false, "(extension changed the verdict)"};
    }
    worst = std::max(worst, std::abs(base.residual - ext.residual));
    (base.exists ? exists_seen : missing_seen) += 1;
  }
  if (exists_seen == 0 || missing_seen == 0) {
    return {false, "(sweep failed to cover both verdicts)"};
  }
  return {worst <= 1e-12, residual_note("max", worst)};
}

// --- 7 -----------------------------------------------------------------

Verdict group_cocycle_differentiation() {
  RandomStream rng(71);
  const std::vector<GroupCocycle> cocycles = {rotation_area_group_cocycle(),
                                              translation_group_cocycle(),
                                              circulation_group_cocycle()};
  double worst_identity = 0.0;
  for (const GroupCocycle& B : cocycles) {
    for (int i = 0; i < 1000; ++i) {
      const GroupElement f(rng.symmetric() * 3.0, rng.symmetric(), rng.symmetric());
      const GroupElement g(rng.symmetric() * 3.0, rng.symmetric(), rng.symmetric());
      const GroupElement h(rng.symmetric() * 3.0, rng.symmetric(), rng.symmetric());
      worst_identity = std::max(
          worst_identity, cocycle_identity_residual(B, f, g, h).norm());
    }
  }
  if (worst_identity > 1e-12) {
    return {false, residual_note("identity", worst_identity)};
  }

  const GroupCocycle combined = circulation_group_cocycle();
  const AlgebraCocycle2 cross = circulation_cocycle();
  double worst_fd = 0.0;
  for (int i = 0; i < 100; ++i) {
    const AlgebraElement xi(rng.symmetric(), rng.symmetric(), rng.symmetric());
    const AlgebraElement eta(rng.symmetric(), rng.symmetric(), rng.symmetric());
    const VectorXd fd = infinitesimal_cocycle_fd(combined, xi, eta, 1e-4);
    worst_fd = std::max(worst_fd,
                        (fd - cross.eval(xi.vec(), eta.vec())).norm());
  }
  if (worst_fd > 1e-6) return {false, residual_note("fd", worst_fd)};

  // Richardson: the differencing error must fall at second order, averaged
  // over pairs so a single accidental cancellation cannot skew the slopes.
  const std::vector<double> steps = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> errors;
  for (const double h : steps) {
    RandomStream pair_rng(97);
    double accum = 0.0;
    for (int i = 0; i < 10; ++i) {
      const AlgebraElement xi(pair_rng.symmetric(), pair_rng.symmetric(),
                              pair_rng.symmetric());
      const AlgebraElement eta(pair_rng.symmetric(), pair_rng.symmetric(),
                               pair_rng.symmetric());
      accum += (infinitesimal_cocycle_fd(combined, xi, eta, h) -
                cross.eval(xi.vec(), eta.vec()))
                   .norm();
    }
    errors.push_back(accum / 10.0);
  }
  const double order1 = std::log2(errors[0] / errors[1]);
  const double order2 = std::log2(errors[1] / errors[2]);
  if (!(order1 >= 1.9 && order2 >= 1.9 && order1 <= 2.5 && order2 <= 2.5)) {
    return {false, residual_note("order", std::min(order1, order2))};
  }
  return {true, residual_note("order", order2)};
}

// --- 8 -----------------------------------------------------------------

Verdict momentum_shift_poisson_maps() {
  RandomStream rng(83);
  const StructureAlgebra se2 = se2_structure();
  const OneCocycle A = circulation_one_cocycle();

  AffineMap shift;
  shift.A = MatrixXd::Identity(6, 6);
  shift.A.block<3, 3>(0, 3) = -A.transpose();
  shift.b = VectorXd::Zero(6);

  AlgebraCocycle2 area_pad;
  area_pad.fiber_dim = 3;
  area_pad.eval = [](const VectorXd& x, const VectorXd& y) -> VectorXd {
    Vector3d out = Vector3d::Zero();
    out[0] = x[1] * y[2] - x[2] * y[1];
    return out;
  };

  const PoissonStructure lp_db = lp_general(se2, coboundary(se2, A),
                                            BracketSign::Minus);
  const PoissonStructure lp_flat =
      lp_general(se2, zero_cocycle(3, 3), BracketSign::Minus);
  const PoissonStructure lp_area = lp_general(se2, area_pad, BracketSign::Minus);
  const PoissonStructure lp_cross = lp_extended();

  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const VectorXd x = 1.5 * rng.vector(6);
    const TestFunction F = TestFunction::random(rng, 6);
    const TestFunction K = TestFunction::random(rng, 6);
    worst = std::max(worst,
                     std::abs(poisson_map_residual(shift, lp_db, lp_flat, F, K, x)));
    worst = std::max(
        worst, std::abs(poisson_map_residual(shift, lp_area, lp_cross, F, K, x)));
  }
  if (worst > 1e-12) return {false, residual_note("bracket", worst)};

  // Trajectory correspondence: shifting the momentum by A^T sigma turns the
  // circulation dynamics into the area-deformed dynamics.
  const InertiaTensor inertia = fixture_inertia();
  const CirculationParams circ(1, 0.7, 0.4, -0.3);
  const Vector3d a_sigma = A.transpose() * circ.sigma();
  const Vector3d mu0(0.5, 0.3, -0.2);

  const Rhs mu_flow = [&inertia, &circ](double, const VectorXd& x) -> VectorXd {
    return chaplygin_lamb_rhs(DualElement(Vector3d(x)), inertia, circ).vec();
  };
  const PoissonStructure lp_mag = lp_magnetic(CirculationParams(1, 0.7, 0, 0));
  const Matrix3d inv = inertia.inverse_explicit();
  const auto grad = [&inv, &a_sigma](const VectorXd& x) -> VectorXd {
    return inv * (Vector3d(x) - a_sigma);
  };
  const Rhs nu_flow = [&lp_mag, &grad](double, const VectorXd& x) -> VectorXd {
    return ham_vf(lp_mag, grad, x);
  };
  const Trajectory tm = integrate_model(mu_flow, mu0, 1e-3, 1.0, 1000000);
  const Trajectory tn =
      integrate_model(nu_flow, Vector3d(mu0 + a_sigma), 1e-3, 1.0, 1000000);
  const double gap =
      (Vector3d(tn.states.back()) - (Vector3d(tm.states.back()) + a_sigma))
          .norm();
  if (gap > 1e-8) return {false, residual_note("orbit", gap)};
  return {true, residual_note("max", std::max(worst, gap))};
}

// --- 9 -----------------------------------------------------------------

Verdict portrait_classification() {
  RunConfig cfg;
  cfg.model = ModelKind::SleighReduced;
  cfg.inertia = fixture_inertia();
  cfg.circulation = CirculationParams(1, 0, 1, 0);
  cfg.integrator.h = 1e-3;
  cfg.integrator.stride = 100;
  PortraitSpec spec;
  spec.energies = {0.5, 1.2, 2.0, 2.8, 3.5};
  spec.t_final = 150.0;
  cfg.portrait = spec;

  const std::filesystem::path outdir =
      std::filesystem::temp_directory_path() / "geps_acceptance_portrait";
  std::filesystem::remove_all(outdir);
  const auto start = std::chrono::steady_clock::now();
  const PortraitResult result = run_portrait(cfg, outdir.string());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (!result.line_exists) return {false, "(no equilibrium line found)"};
  if (std::abs(result.h0_closed_form - 2.0) > 1e-12) {
    return {false, residual_note("h0", result.h0_closed_form - 2.0)};
  }
  if (std::abs(result.h0_variational - result.h0_closed_form) > 1e-12) {
    return {false, "(variational route disagrees with the closed form)"};
  }
  if (result.orbits.size() != 5) return {false, "(wrong orbit count)"};

  const auto cls = [&](int i) { return result.orbits[i].cls; };
  for (int i : {0, 1}) {
    if (cls(i) != OrbitClass::Periodic ||
        result.orbits[i].return_distance > 1e-4) {
      return {false, residual_note("subcritical return",
                                   result.orbits[i].return_distance)};
    }
  }
  if (cls(2) != OrbitClass::Separatrix) {
    return {false, "(critical orbit not flagged as separatrix)"};
  }
  for (int i : {3, 4}) {
    if (cls(i) != OrbitClass::Heteroclinic ||
        result.orbits[i].line_distance_end > 1e-3) {
      return {false, residual_note("supercritical line gap",
                                   result.orbits[i].line_distance_end)};
    }
  }
  bool has_stable = false, has_unstable = false;
  for (const auto& [point, classification] : result.equilibria) {
    has_stable = has_stable || classification.type == EquilibriumType::Stable;
    has_unstable =
        has_unstable || classification.type == EquilibriumType::Unstable;
  }
  if (!has_stable || !has_unstable) {
    return {false, "(equilibria sampling missed a stability type)"};
  }
  if (elapsed >= 20.0) return {false, residual_note("seconds", elapsed)};
  return {true, residual_note("seconds", elapsed)};
}

// --- 10 ----------------------------------------------------------------

Verdict decoupled_harmonic_limit() {
  RandomStream rng(101);
  const InertiaTensor inertia(1.0, 0.0, 0.0, 1.0, 0.0, 1.0);
  const SleighParams params{inertia, CirculationParams(1, 0, 1, 0)};
  for (int i = 0; i < 100; ++i) {
    const Vector2d w = 2.0 * Vector2d(rng.symmetric(), rng.symmetric());
    const Vector2d field = sleigh_reduced_rhs(w, params);
    if ((field - Vector2d(-w[1], w[0])).norm() != 0.0) {
      return {false, "(field is not the exact rotation)"};
    }
  }
  const Rhs f = [&params](double, const VectorXd& x) -> VectorXd {
    return sleigh_reduced_rhs(Vector2d(x[0], x[1]), params);
  };
  const Trajectory tr = integrate_model(f, Vector2d(1.0, 0.0), 1e-3,
                                        2.0 * M_PI, 1000000);
  const double gap = (Vector2d(tr.states.back()) - Vector2d(1.0, 0.0)).norm();
  if (gap > 1e-6) return {false, residual_note("return", gap)};
  return {true, residual_note("return", gap)};
}

// --- 11 ----------------------------------------------------------------

Verdict magnetic_particle_extension() {
  RandomStream rng(113);
  const double field_strength = 0.9;
  const PoissonStructure P = lp_general(
      abelian_structure(2), magnetic_cocycle(field_strength), BracketSign::Plus);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    HeisenbergParams params;
    params.mass = rng.spd(2);
    params.field = field_strength;
    const double sigma = rng.range(-2.0, 2.0);
    const Eigen::Matrix2d minv =
        params.mass.llt().solve(Eigen::Matrix2d::Identity());
    const auto grad = [&minv](const VectorXd& x) -> VectorXd {
      VectorXd g = VectorXd::Zero(3);
      g.head<2>() = minv * Vector2d(x.head<2>());
      return g;
    };
    VectorXd x(3);
    x << rng.symmetric(), rng.symmetric(), sigma;
    const VectorXd hv = ham_vf(P, grad, x);
    const Vector2d model = heisenberg_rhs(Vector2d(x.head<2>()), params, sigma);
    worst = std::max(worst, (hv.head<2>() - model).norm());
    if (hv[2] != 0.0) return {false, "(charge coordinate moved)"};
  }
  if (worst > 1e-12) return {false, residual_note("field", worst)};

  // Cyclotron closure: period 2 pi m / (sigma B) for a scalar mass.
  HeisenbergParams params;
  params.mass = 1.3 * Eigen::Matrix2d::Identity();
  params.field = field_strength;
  const double sigma = 0.7;
  const Rhs f = [&params, sigma](double, const VectorXd& x) -> VectorXd {
    return heisenberg_rhs(Vector2d(x[0], x[1]), params, sigma);
  };
  const double period = 2.0 * M_PI * 1.3 / (sigma * field_strength);
  const Trajectory tr =
      integrate_model(f, Vector2d(1.0, 0.0), 1e-3, period, 1000000);
  const double gap = (Vector2d(tr.states.back()) - Vector2d(1.0, 0.0)).norm();
  if (gap > 1e-6) return {false, residual_note("cyclotron", gap)};
  return {true, residual_note("max", std::max(worst, gap))};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    Verdict (*run)();
  };
  const std::vector<Criterion> criteria = {
      {"bracket-identities-hold", bracket_identities_hold},
      {"extended-field-matches-circulation-model",
       extended_field_matches_circulation_model},
      {"constrained-extension-matches-blade", constrained_extension_matches_blade},
      {"long-run-invariants-preserved", long_run_invariants_preserved},
      {"measure-criterion-grid", measure_criterion_grid},
      {"measure-extension-invariance", measure_extension_invariance},
      {"group-cocycle-differentiation", group_cocycle_differentiation},
      {"momentum-shift-poisson-maps", momentum_shift_poisson_maps},
      {"portrait-classification", portrait_classification},
      {"decoupled-harmonic-limit", decoupled_harmonic_limit},
      {"magnetic-particle-extension", magnetic_particle_extension},
  };

  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Verdict verdict = criteria[i].run();
    if (!verdict.first) ++failures;
    std::printf("criterion %2zu/11  %-44s  %s  %s\n", i + 1, criteria[i].name,
                verdict.first ? "pass" : "FAIL", verdict.second.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
  return failures;
}
