#include "geps/models.hpp"

#include <cmath>
#include <stdexcept>

namespace geps {

namespace {

void require_spd_inertia(double J, double L2, double M, double det) {
  const double d2 = J * M - L2 * L2;
  if (!(J > 0.0) || !(d2 > 0.0) || !(det > 0.0))
    throw std::invalid_argument("inertia not positive definite");
}

}  // namespace

InertiaTensor::InertiaTensor(double J, double L1, double L2, double M, double Z, double N)
    : J_(J), L1_(L1), L2_(L2), M_(M), Z_(Z), N_(N) {
  require_spd_inertia(J_, L2_, M_, determinant_explicit());
}

InertiaTensor InertiaTensor::from_matrix(const Eigen::Matrix3d& m) {
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("inertia matrix not symmetric");
  return {m(0, 0), m(0, 2), -m(0, 1), m(1, 1), m(1, 2), m(2, 2)};
}

Eigen::Matrix3d InertiaTensor::matrix() const {
  Eigen::Matrix3d m;
  m << J_, -L2_, L1_, -L2_, M_, Z_, L1_, Z_, N_;
  return m;
}

double InertiaTensor::determinant_explicit() const {
  return J_ * (M_ * N_ - Z_ * Z_) - L2_ * (L2_ * N_ + Z_ * L1_) -
         L1_ * (L2_ * Z_ + M_ * L1_);
}

Eigen::Matrix3d InertiaTensor::inverse_explicit() const {
  Eigen::Matrix3d adj;
  adj << M_ * N_ - Z_ * Z_, Z_ * L1_ + N_ * L2_, -Z_ * L2_ - M_ * L1_,
      Z_ * L1_ + N_ * L2_, J_ * N_ - L1_ * L1_, -L1_ * L2_ - J_ * Z_,
      -Z_ * L2_ - M_ * L1_, -L1_ * L2_ - J_ * Z_, J_ * M_ - L2_ * L2_;
  return adj / determinant_explicit();
}

Eigen::Matrix3d AddedInertia::matrix() const {
  Eigen::Matrix3d m;
  m << I_F, K1, K2, K1, M11, M12, K2, M12, M22;
  return m;
}

CirculationParams::CirculationParams(double r, double k, double a, double b)
    : rho(r), kappa(k), alpha(a), beta(b) {
  if (!(rho > 0.0)) throw std::invalid_argument("circulation density must be positive");
}

void HeisenbergParams::validate() const {
  if ((mass - mass.transpose()).cwiseAbs().maxCoeff() > 1e-12 || !(mass(0, 0) > 0.0) ||
      !(mass.determinant() > 0.0))
    throw std::invalid_argument("mass matrix not positive definite");
}

Eigen::Matrix3d body_inertia(const BodyParams& body) {
  if (!(body.m > 0.0)) throw std::invalid_argument("mass must be positive");
  if (!(body.I_cm > 0.0)) throw std::invalid_argument("central inertia must be positive");
  Eigen::Matrix3d m;
  m << body.I_cm + body.m * (body.a * body.a + body.b * body.b), -body.m * body.b,
      body.m * body.a, -body.m * body.b, body.m, 0.0, body.m * body.a, 0.0, body.m;
  return m;
}

InertiaTensor total_inertia(const BodyParams& body, const AddedInertia& added) {
  return InertiaTensor::from_matrix(body_inertia(body) + added.matrix());
}

DualElement kirchhoff_rhs(const DualElement& mu, const InertiaTensor& inertia) {
  const Eigen::Vector3d xi = inertia.inverse_explicit() * mu.vec();
  const double omega = xi[0], v1 = xi[1], v2 = xi[2];
  return {v2 * mu.p1 - v1 * mu.p2, omega * mu.p2, -omega * mu.p1};
}

DualElement chaplygin_lamb_rhs(const DualElement& mu, const InertiaTensor& inertia,
                               const CirculationParams& c) {
  const Eigen::Vector3d xi = inertia.inverse_explicit() * mu.vec();
  const double omega = xi[0], v1 = xi[1], v2 = xi[2];
  return {v2 * mu.p1 - v1 * mu.p2 - c.rho * (c.alpha * v1 + c.beta * v2),
          omega * mu.p2 - c.kappa * c.rho * v2 + c.rho * c.alpha * omega,
          -omega * mu.p1 + c.kappa * c.rho * v1 + c.rho * c.beta * omega};
}

CirculationParams frame_shift(const CirculationParams& c, double r, double s) {
  return {c.rho, c.kappa, c.alpha - r * c.kappa, c.beta - s * c.kappa};
}

Eigen::Vector2d sleigh_reduced_rhs(const Eigen::Vector2d& w, const SleighParams& p) {
  const auto& I = p.inertia;
  const double omega = w[0], v1 = w[1];
  const double G = I.L1() * omega + I.Z() * v1 + p.circulation.rho * p.circulation.alpha;
  return {G * (I.L2() * omega - I.M() * v1) / I.D(),
          G * (I.J() * omega - I.L2() * v1) / I.D()};
}

double sleigh_multiplier(const DualElement& mu, const SleighParams& p) {
  const Eigen::Matrix3d inv = p.inertia.inverse_explicit();
  const Eigen::Vector3d r = chaplygin_lamb_rhs(mu, p.inertia, p.circulation).vec();
  return -(inv.row(2) * r)(0) / inv(2, 2);
}

double sleigh_multiplier(const Eigen::Vector2d& w, const SleighParams& p) {
  return sleigh_multiplier(sleigh_momentum(w, p.inertia), p);
}

DualElement sleigh_constrained_rhs(const DualElement& mu, const SleighParams& p) {
  const DualElement r = chaplygin_lamb_rhs(mu, p.inertia, p.circulation);
  const double lambda = sleigh_multiplier(mu, p);
  return {r.k, r.p1, r.p2 + lambda};
}

DualElement sleigh_momentum(const Eigen::Vector2d& w, const InertiaTensor& inertia) {
  return DualElement(Eigen::Vector3d(inertia.matrix() * Eigen::Vector3d(w[0], w[1], 0.0)));
}

double reduced_energy(const Eigen::Vector2d& w, const InertiaTensor& I) {
  return 0.5 * (I.J() * w[0] * w[0] + I.M() * w[1] * w[1] - 2.0 * I.L2() * w[0] * w[1]);
}

double full_hamiltonian(const DualElement& mu, const InertiaTensor& inertia) {
  return 0.5 * mu.vec().dot(inertia.inverse_explicit() * mu.vec());
}

double casimir_fbar(const DualElement& mu, const Eigen::Vector3d& sigma) {
  return mu.p1 * mu.p1 + mu.p2 * mu.p2 + 2.0 * sigma[0] * mu.k + 2.0 * sigma[1] * mu.p1 +
         2.0 * sigma[2] * mu.p2;
}

double EquilibriaLine::distance(const Eigen::Vector2d& w) const {
  const double norm = std::hypot(coeff_omega, coeff_v1);
  return std::abs(evaluate(w)) / norm;
}

Eigen::Vector2d EquilibriaLine::point(double s) const {
  const Eigen::Vector2d n(coeff_omega, coeff_v1);
  const double n2 = n.squaredNorm();
  const Eigen::Vector2d base = -offset / n2 * n;
  const Eigen::Vector2d tangent(-coeff_v1, coeff_omega);
  return base + s / std::sqrt(n2) * tangent;
}

EquilibriaLine equilibria_line(const SleighParams& p) {
  EquilibriaLine line;
  line.coeff_omega = p.inertia.L1();
  line.coeff_v1 = p.inertia.Z();
  line.offset = p.circulation.rho * p.circulation.alpha;
  if (line.coeff_omega != 0.0 || line.coeff_v1 != 0.0)
    line.status = LineStatus::Line;
  else
    line.status = line.offset != 0.0 ? LineStatus::Empty : LineStatus::WholePlane;
  return line;
}

Eigen::Matrix2d sleigh_jacobian(const Eigen::Vector2d& w, const SleighParams& p) {
  const auto& I = p.inertia;
  const double omega = w[0], v1 = w[1];
  const double G = I.L1() * omega + I.Z() * v1 + p.circulation.rho * p.circulation.alpha;
  const double u = I.L2() * omega - I.M() * v1;  // omega-equation factor
  const double q = I.J() * omega - I.L2() * v1;  // v1-equation factor
  Eigen::Matrix2d jac;
  jac << I.L1() * u + G * I.L2(), I.Z() * u - G * I.M(), I.L1() * q + G * I.J(),
      I.Z() * q - G * I.L2();
  return jac / I.D();
}

EquilibriumClassification classify_equilibrium(const Eigen::Vector2d& w,
                                               const SleighParams& p) {
  const EquilibriaLine line = equilibria_line(p);
  if (std::abs(line.evaluate(w)) > 1e-8)
    throw std::invalid_argument("point is not an equilibrium of the reduced flow");
  EquilibriumClassification out;
  // On the line the linearization has rank one; its spectrum is {0, trace}.
  out.transverse_eigenvalue = sleigh_jacobian(w, p).trace();
  if (std::abs(out.transverse_eigenvalue) <= 1e-10)
    out.type = EquilibriumType::Degenerate;
  else
    out.type = out.transverse_eigenvalue < 0.0 ? EquilibriumType::Stable
                                               : EquilibriumType::Unstable;
  return out;
}

SeparatrixEnergy separatrix_energy(const SleighParams& p) {
  SeparatrixEnergy out;
  const auto& I = p.inertia;
  const double L1 = I.L1(), Z = I.Z();
  if (L1 == 0.0 && Z == 0.0) return out;  // no equilibrium line
  const double ra = p.circulation.rho * p.circulation.alpha;
  const double quad = I.M() * L1 * L1 + 2.0 * I.L2() * L1 * Z + I.J() * Z * Z;
  out.exists = true;
  out.h0 = ra * ra * I.D() / (2.0 * quad);
  out.nonpositive = !(out.h0 > 0.0);
  // argmin: -(rho alpha) Q^{-1} a / (a^T Q^{-1} a), with Q^{-1} = [[M, L2], [L2, J]] / D.
  const Eigen::Vector2d qinv_a(I.M() * L1 + I.L2() * Z, I.L2() * L1 + I.J() * Z);
  out.tangency = -ra / quad * qinv_a;
  return out;
}

Eigen::Vector2d heisenberg_rhs(const Eigen::Vector2d& p, const HeisenbergParams& params,
                               double sigma) {
  const Eigen::Vector2d v = params.mass.ldlt().solve(p);
  return {sigma * v[1] * params.field, -sigma * v[0] * params.field};
}

double sleigh_divergence(const Eigen::Vector2d& w, const SleighParams& p) {
  const auto& I = p.inertia;
  const double omega = w[0], v1 = w[1];
  return (I.L1() * (I.L2() * omega - I.M() * v1) + I.Z() * (I.J() * omega - I.L2() * v1)) /
         I.D();
}

Eigen::Vector2d sleigh_divergence_coefficients(const SleighParams& p) {
  const auto& I = p.inertia;
  return {(I.L1() * I.L2() + I.Z() * I.J()) / I.D(),
          -(I.L1() * I.M() + I.Z() * I.L2()) / I.D()};
}

}  // namespace geps
