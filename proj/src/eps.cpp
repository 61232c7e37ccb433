#include "geps/eps.hpp"

#include <stdexcept>

namespace geps {

namespace {

Eigen::MatrixXd block_inertia(const Eigen::MatrixXd& inertia, const Eigen::MatrixXd& fiber) {
  const int d = static_cast<int>(inertia.rows()), m = static_cast<int>(fiber.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d + m, d + m);
  out.topLeftCorner(d, d) = inertia;
  out.bottomRightCorner(m, m) = fiber;
  return out;
}

ConstraintSet lift_constraints(const ConstraintSet& constraints, int fiber_dim) {
  std::vector<Eigen::VectorXd> lifted;
  lifted.reserve(constraints.size());
  for (int i = 0; i < constraints.size(); ++i) {
    Eigen::VectorXd nu = Eigen::VectorXd::Zero(constraints.dim() + fiber_dim);
    nu.head(constraints.dim()) = constraints[i];
    lifted.push_back(std::move(nu));
  }
  return ConstraintSet(std::move(lifted));
}

}  // namespace

ConstraintSet::ConstraintSet(std::vector<Eigen::VectorXd> covectors)
    : nu_(std::move(covectors)) {
  if (nu_.empty()) throw std::invalid_argument("constraint set must be nonempty");
  dim_ = static_cast<int>(nu_.front().size());
  Eigen::MatrixXd stack(static_cast<int>(nu_.size()), dim_);
  for (int i = 0; i < size(); ++i) {
    if (nu_[i].size() != dim_)
      throw std::invalid_argument("constraint covectors have mixed dimensions");
    stack.row(i) = nu_[i].transpose();
  }
  if (Eigen::ColPivHouseholderQR<Eigen::MatrixXd>(stack).rank() != size())
    throw std::invalid_argument("constraint covectors are linearly dependent");
}

EpsSystem::EpsSystem(StructureAlgebra alg, Eigen::MatrixXd inertia, ConstraintSet constraints)
    : alg_(std::move(alg)), inertia_(std::move(inertia)), constraints_(std::move(constraints)) {
  if (inertia_.rows() != alg_.dim() || inertia_.cols() != alg_.dim())
    throw std::invalid_argument("inertia dimension does not match the algebra");
  if (constraints_.dim() != alg_.dim())
    throw std::invalid_argument("constraint dimension does not match the algebra");
  if ((inertia_ - inertia_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("inertia not symmetric");
  inertia_llt_.compute(inertia_);
  if (inertia_llt_.info() != Eigen::Success)
    throw std::invalid_argument("inertia not positive definite");
  const int n = constraints_.size();
  inv_nu_.resize(alg_.dim(), n);
  for (int i = 0; i < n; ++i) inv_nu_.col(i) = inertia_llt_.solve(constraints_[i]);
  Eigen::MatrixXd d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) d(i, j) = constraints_[i].dot(inv_nu_.col(j));
  d_llt_.compute(d);
  if (d_llt_.info() != Eigen::Success)
    throw std::invalid_argument("constraint Gram matrix not positive definite");
}

Eigen::VectorXd EpsSystem::velocity(const Eigen::VectorXd& mu) const {
  return inertia_llt_.solve(mu);
}

Eigen::VectorXd EpsSystem::multipliers(const Eigen::VectorXd& mu) const {
  const Eigen::VectorXd coad = alg_.coad(velocity(mu), mu);
  Eigen::VectorXd b(constraints_.size());
  for (int i = 0; i < constraints_.size(); ++i) b[i] = coad.dot(inv_nu_.col(i));
  return -d_llt_.solve(b);
}

Eigen::VectorXd EpsSystem::rhs(const Eigen::VectorXd& mu) const {
  Eigen::VectorXd out = alg_.coad(velocity(mu), mu);
  const Eigen::VectorXd lambda = multipliers(mu);
  for (int i = 0; i < constraints_.size(); ++i) out += lambda[i] * constraints_[i];
  return out;
}

ExtendedEpsSystem::ExtendedEpsSystem(const StructureAlgebra& alg,
                                     const Eigen::MatrixXd& inertia,
                                     const ConstraintSet& constraints,
                                     const AlgebraCocycle2& cocycle,
                                     const Eigen::MatrixXd& fiber_form)
    : base_dim_(alg.dim()),
      fiber_dim_(cocycle.fiber_dim),
      lifted_(central_extension_structure(alg, cocycle), block_inertia(inertia, fiber_form),
              lift_constraints(constraints, cocycle.fiber_dim)) {
  if (fiber_form.rows() != fiber_dim_ || fiber_form.cols() != fiber_dim_)
    throw std::invalid_argument("fiber form dimension does not match the cocycle");
}

ExtendedEpsSystem::ExtendedEpsSystem(const StructureAlgebra& alg,
                                     const Eigen::MatrixXd& inertia,
                                     const ConstraintSet& constraints,
                                     const AlgebraCocycle2& cocycle)
    : ExtendedEpsSystem(alg, inertia, constraints, cocycle,
                        Eigen::MatrixXd::Identity(cocycle.fiber_dim, cocycle.fiber_dim)) {}

Eigen::VectorXd ExtendedEpsSystem::multipliers(const Eigen::VectorXd& mu,
                                               const Eigen::VectorXd& sigma) const {
  Eigen::VectorXd state(base_dim_ + fiber_dim_);
  state << mu, sigma;
  return lifted_.multipliers(state);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> ExtendedEpsSystem::rhs(
    const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma) const {
  Eigen::VectorXd state(base_dim_ + fiber_dim_);
  state << mu, sigma;
  const Eigen::VectorXd full = lifted_.rhs(state);
  return {full.head(base_dim_), full.tail(fiber_dim_)};
}

Eigen::VectorXd ExtendedEpsSystem::rhs_stacked(const Eigen::VectorXd& state) const {
  return lifted_.rhs(state);
}

MeasureReport measure_criterion(const StructureAlgebra& alg, const Eigen::MatrixXd& inertia,
                                const Eigen::VectorXd& nu) {
  if (nu.size() != alg.dim())
    throw std::invalid_argument("constraint dimension does not match the algebra");
  const double norm = nu.norm();
  if (!(norm > 0.0)) throw std::invalid_argument("constraint covector must be nonzero");
  const Eigen::VectorXd unit = nu / norm;
  const Eigen::LLT<Eigen::MatrixXd> llt(inertia);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("inertia not positive definite");
  const Eigen::VectorXd inv_nu = llt.solve(unit);
  const double gram = unit.dot(inv_nu);
  const Eigen::VectorXd w = alg.coad(inv_nu, unit) / gram + trace_ad(alg);
  MeasureReport report;
  report.c = w.dot(unit);  // least-squares projection onto the unit constraint
  report.residual = (w - report.c * unit).norm();
  report.exists = report.residual <= 1e-10;
  return report;
}

MeasureReport measure_criterion(const StructureAlgebra& alg, const Eigen::MatrixXd& inertia,
                                const ConstraintSet& constraints) {
  if (constraints.size() != 1)
    throw std::invalid_argument(
        "invariant-measure criterion implemented for a single constraint only");
  return measure_criterion(alg, inertia, constraints[0]);
}

MeasureReport measure_criterion_extended(const StructureAlgebra& alg,
                                         const AlgebraCocycle2& cocycle,
                                         const Eigen::MatrixXd& inertia,
                                         const Eigen::VectorXd& nu) {
  const StructureAlgebra ext = central_extension_structure(alg, cocycle);
  const Eigen::MatrixXd ext_inertia = block_inertia(
      inertia, Eigen::MatrixXd::Identity(cocycle.fiber_dim, cocycle.fiber_dim));
  Eigen::VectorXd ext_nu = Eigen::VectorXd::Zero(ext.dim());
  ext_nu.head(nu.size()) = nu;
  return measure_criterion(ext, ext_inertia, ext_nu);
}

}  // namespace geps
