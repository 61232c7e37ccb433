#pragma once

#include <functional>

#include <Eigen/Dense>

#include "geps/algebra.hpp"
#include "geps/extension.hpp"
#include "geps/models.hpp"
#include "geps/random.hpp"

namespace geps {

/// Point-dependent antisymmetric structure matrix (bivector) on R^dim.
struct PoissonStructure {
  int dim = 0;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> bivector;
};

/// Quadratic polynomial c + l.x + x.Q x / 2 with exact gradient, used as the
/// test-function class for bracket identities.
struct TestFunction {
  double c = 0.0;
  Eigen::VectorXd l;
  Eigen::MatrixXd Q;  // symmetric

  double value(const Eigen::VectorXd& x) const { return c + l.dot(x) + 0.5 * x.dot(Q * x); }
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const { return l + Q * x; }

  static TestFunction random(RandomStream& rng, int dim);
  static TestFunction coordinate(int dim, int index);
};

struct AffineMap {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;

  Eigen::VectorXd apply(const Eigen::VectorXd& x) const { return A * x + b; }
};

/// Bivector of the momentum equations without circulation,
/// [[0, -p2, p1], [p2, 0, 0], [-p1, 0, 0]].
PoissonStructure lp_se2();

/// Magnetic deformation on momenta: base bivector plus the constant
/// antisymmetric block built from sigma = (rho kappa, -rho beta, rho alpha).
PoissonStructure lp_magnetic(const CirculationParams& circ);

/// Six-dimensional structure on (mu, sigma) whose momentum block is
/// [[0, -p2-s2, p1+s1], [p2+s2, 0, -s0], [-p1-s1, s0, 0]] and whose sigma
/// rows and columns vanish (so sigma is conserved along every flow).
PoissonStructure lp_extended();

enum class BracketSign { Minus, Plus };

/// Lie-Poisson structure of a central extension from structure constants and
/// an algebra cocycle: on (mu, sigma), the base block is
///   sign * ( <mu, [e_a, e_b]> + <sigma, C(e_a, e_b)> ).
PoissonStructure lp_general(const StructureAlgebra& alg, const AlgebraCocycle2& C,
                            BracketSign sign);

/// Rank-two structure [[0, -G/D], [G/D, 0]] on (omega, v1) with
/// G = L1 omega + Z v1 + rho alpha; reproduces the reduced blade dynamics.
PoissonStructure reduced_sleigh_structure(const SleighParams& params);

/// Deliberately broken six-dimensional structure: the (k, p1) entry carries an
/// extra state-weighted term -sigma0*k coming from a non-closed bilinear form.
/// Exists so the bracket-identity detector can be shown to fire.
PoissonStructure corrupted_circulation_structure();

/// Hamiltonian vector field P(x) grad H(x).
Eigen::VectorXd ham_vf(const PoissonStructure& P, const TestFunction& H,
                       const Eigen::VectorXd& x);
Eigen::VectorXd ham_vf(const PoissonStructure& P,
                       const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& grad_h,
                       const Eigen::VectorXd& x);

double poisson_bracket(const PoissonStructure& P, const TestFunction& F,
                       const TestFunction& G, const Eigen::VectorXd& x);

/// Cyclic sum {F,{G,K}} + {G,{K,F}} + {K,{F,G}} at x.  Inner brackets use the
/// exact gradients; the gradient of the inner bracket is taken by central
/// differences with the given step.
double jacobi_residual(const PoissonStructure& P, const Eigen::VectorXd& x,
                       const TestFunction& F, const TestFunction& G, const TestFunction& K,
                       double fd_step = 1e-5);

/// Largest |P grad F| over seeded sample points; zero for Casimirs.
double casimir_max_violation(const PoissonStructure& P, const TestFunction& F,
                             RandomStream& rng, int samples);

/// |{F o T, K o T}_src(x) - {F, K}_dst(T x)| for an affine map T.
double poisson_map_residual(const AffineMap& T, const PoissonStructure& src,
                            const PoissonStructure& dst, const TestFunction& F,
                            const TestFunction& K, const Eigen::VectorXd& x);

/// Casimir of lp_extended restricted to fixed sigma, as a quadratic in mu.
TestFunction fbar_in_momenta(const Eigen::Vector3d& sigma);

/// Casimir of lp_extended as a quadratic on the full (mu, sigma) space.
TestFunction fbar_extended();

enum class LeafType { EllipticParaboloid, Cylinder };

/// Geometry of the Casimir level sets for fixed sigma, read off from the
/// coefficient structure: quadratic rank two always; a nonzero linear k term
/// (sigma0 != 0) bends the cylinder into an elliptic paraboloid.
LeafType fbar_leaf_type(const Eigen::Vector3d& sigma);

}  // namespace geps
