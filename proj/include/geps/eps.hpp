#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geps/algebra.hpp"
#include "geps/extension.hpp"

namespace geps {

/// Left-invariant velocity constraints <nu_i, xi> = 0, given by covectors on
/// the algebra.  Construction rejects linearly dependent sets.
class ConstraintSet {
 public:
  explicit ConstraintSet(std::vector<Eigen::VectorXd> covectors);

  int size() const { return static_cast<int>(nu_.size()); }
  int dim() const { return dim_; }
  const Eigen::VectorXd& operator[](int i) const { return nu_[i]; }

 private:
  std::vector<Eigen::VectorXd> nu_;
  int dim_;
};

/// Constrained momentum dynamics on the dual of a Lie algebra:
///   mu' = ad*_{I^{-1} mu} mu + sum_i lambda_i nu_i,
/// with multipliers chosen so that <nu_i, I^{-1} mu> stays constant.
class EpsSystem {
 public:
  EpsSystem(StructureAlgebra alg, Eigen::MatrixXd inertia, ConstraintSet constraints);

  const StructureAlgebra& algebra() const { return alg_; }
  const Eigen::MatrixXd& inertia() const { return inertia_; }
  const ConstraintSet& constraints() const { return constraints_; }

  Eigen::VectorXd velocity(const Eigen::VectorXd& mu) const;
  Eigen::VectorXd multipliers(const Eigen::VectorXd& mu) const;
  Eigen::VectorXd rhs(const Eigen::VectorXd& mu) const;

 private:
  StructureAlgebra alg_;
  Eigen::MatrixXd inertia_;
  ConstraintSet constraints_;
  Eigen::LLT<Eigen::MatrixXd> inertia_llt_;
  Eigen::MatrixXd inv_nu_;        // columns I^{-1} nu_i
  Eigen::LLT<Eigen::MatrixXd> d_llt_;  // Gram matrix <nu_i, I^{-1} nu_j>
};

/// The same dynamics on a central extension, realized literally as an
/// EpsSystem over the extension algebra with block inertia diag(I, Q) and
/// lifted constraints (nu_i, 0).  The fiber momentum sigma is conserved by
/// structure, and the base equations do not depend on the fiber form Q.
class ExtendedEpsSystem {
 public:
  ExtendedEpsSystem(const StructureAlgebra& alg, const Eigen::MatrixXd& inertia,
                    const ConstraintSet& constraints, const AlgebraCocycle2& cocycle,
                    const Eigen::MatrixXd& fiber_form);
  /// Identity fiber form.
  ExtendedEpsSystem(const StructureAlgebra& alg, const Eigen::MatrixXd& inertia,
                    const ConstraintSet& constraints, const AlgebraCocycle2& cocycle);

  int base_dim() const { return base_dim_; }
  int fiber_dim() const { return fiber_dim_; }
  const EpsSystem& lifted() const { return lifted_; }

  Eigen::VectorXd multipliers(const Eigen::VectorXd& mu, const Eigen::VectorXd& sigma) const;
  std::pair<Eigen::VectorXd, Eigen::VectorXd> rhs(const Eigen::VectorXd& mu,
                                                  const Eigen::VectorXd& sigma) const;
  /// Right-hand side on the stacked state (mu; sigma).
  Eigen::VectorXd rhs_stacked(const Eigen::VectorXd& state) const;

 private:
  int base_dim_;
  int fiber_dim_;
  EpsSystem lifted_;
};

struct MeasureReport {
  bool exists = false;
  double c = 0.0;      // proportionality constant in the alignment condition
  double residual = 0.0;
};

/// Smooth-density invariant-measure criterion for a single constraint:
/// with w = ad*_{I^{-1} nu} nu / <nu, I^{-1} nu> + T, a measure exists exactly
/// when w is parallel to nu.  Evaluated on the unit-normalized constraint
/// with absolute residual tolerance 1e-10.
MeasureReport measure_criterion(const StructureAlgebra& alg, const Eigen::MatrixXd& inertia,
                                const Eigen::VectorXd& nu);

/// Overload guarding scope: multi-constraint systems are rejected.
MeasureReport measure_criterion(const StructureAlgebra& alg, const Eigen::MatrixXd& inertia,
                                const ConstraintSet& constraints);

/// The same criterion evaluated on the central extension (lifted constraint
/// (nu, 0), block inertia); agrees with the base verdict for every cocycle.
MeasureReport measure_criterion_extended(const StructureAlgebra& alg,
                                         const AlgebraCocycle2& cocycle,
                                         const Eigen::MatrixXd& inertia,
                                         const Eigen::VectorXd& nu);

}  // namespace geps
