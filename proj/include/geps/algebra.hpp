#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace geps {

/// Element of the planar Euclidean Lie algebra se(2) in body coordinates:
/// angular rate omega and the two body-frame translational rates.
struct AlgebraElement {
  double omega = 0.0;
  double v1 = 0.0;
  double v2 = 0.0;

  AlgebraElement() = default;
  AlgebraElement(double w, double a, double b) : omega(w), v1(a), v2(b) {}
  explicit AlgebraElement(const Eigen::Vector3d& v) : omega(v[0]), v1(v[1]), v2(v[2]) {}

  Eigen::Vector3d vec() const { return {omega, v1, v2}; }
};

/// Covector on se(2): angular momentum k and linear momenta (p1, p2),
/// paired with (omega, v1, v2) by the Euclidean dot product.
struct DualElement {
  double k = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;

  DualElement() = default;
  DualElement(double kk, double a, double b) : k(kk), p1(a), p2(b) {}
  explicit DualElement(const Eigen::Vector3d& v) : k(v[0]), p1(v[1]), p2(v[2]) {}

  Eigen::Vector3d vec() const { return {k, p1, p2}; }
};

/// Element of SE(2): rotation angle theta (kept unwrapped so that winding is
/// visible in reconstructed trajectories) and spatial translation (x, y).
struct GroupElement {
  double theta = 0.0;
  double x = 0.0;
  double y = 0.0;

  GroupElement() = default;
  GroupElement(double t, double xx, double yy) : theta(t), x(xx), y(yy) {}

  Eigen::Vector2d translation() const { return {x, y}; }
  Eigen::Matrix2d rotation() const;
};

Eigen::Matrix2d rotation_matrix(double theta);

/// se(2) commutator: [(w,a,b), (w',a',b')] = (0, b w' - w b', w a' - a w').
AlgebraElement se2_bracket(const AlgebraElement& x, const AlgebraElement& y);

/// Duality pairing <mu, xi> = k*omega + p1*v1 + p2*v2.
double pairing(const DualElement& mu, const AlgebraElement& xi);

/// Coadjoint action ad*_xi mu, defined by <ad*_xi mu, eta> = <mu, [xi, eta]>.
DualElement se2_coadjoint(const AlgebraElement& xi, const DualElement& mu);

/// Group multiplication (theta, x)(theta', x') = (theta + theta', x + R_theta x').
GroupElement group_mul(const GroupElement& g, const GroupElement& h);

GroupElement group_inv(const GroupElement& g);

/// Left-trivialized (body) velocity of a curve through g with spatial rate
/// gdot = (theta_dot, x_dot, y_dot):
///   omega = theta_dot,  v1 = x_dot cos + y_dot sin,  v2 = -x_dot sin + y_dot cos.
AlgebraElement body_velocity(const GroupElement& g, const Eigen::Vector3d& gdot);

/// Finite-dimensional Lie algebra given by structure constants
/// [e_i, e_j] = sum_k c^k_ij e_k.  Construction validates antisymmetry and
/// the Jacobi identity to 1e-10 and rejects invalid tables.
class StructureAlgebra {
 public:
  /// c[k](i, j) = c^k_ij.
  StructureAlgebra(std::string name, std::vector<Eigen::MatrixXd> c);

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  double structure_constant(int k, int i, int j) const { return c_[k](i, j); }

  Eigen::VectorXd bracket(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  /// Matrix of ad_xi acting on coordinates: (ad_xi)_kj = sum_i c^k_ij xi_i.
  Eigen::MatrixXd ad(const Eigen::VectorXd& xi) const;

  /// Coadjoint action: (ad*_xi mu)_j = <mu, [xi, e_j]> = (ad_xi)^T mu restricted
  /// appropriately; computed from the structure constants.
  Eigen::VectorXd coad(const Eigen::VectorXd& xi, const Eigen::VectorXd& mu) const;

  /// Largest absolute Jacobi defect of the structure-constant table.
  double jacobi_defect() const;

 private:
  std::string name_;
  int dim_;
  std::vector<Eigen::MatrixXd> c_;
};

/// se(2) as a structure-constant table (basis e1 = rotation, e2, e3 = translations).
StructureAlgebra se2_structure();

/// Abelian algebra of the given dimension (all brackets zero).
StructureAlgebra abelian_structure(int dim);

/// Modular covector T with <T, xi> = trace(ad_xi), i.e. T_i = trace(ad_{e_i}).
/// Unimodular algebras (such as se(2)) give T = 0.
Eigen::VectorXd trace_ad(const StructureAlgebra& alg);

}  // namespace geps
