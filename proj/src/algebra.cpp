#include "geps/algebra.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace geps {

Eigen::Matrix2d rotation_matrix(double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  Eigen::Matrix2d r;
  r << c, -s, s, c;
  return r;
}

Eigen::Matrix2d GroupElement::rotation() const { return rotation_matrix(theta); }

AlgebraElement se2_bracket(const AlgebraElement& x, const AlgebraElement& y) {
  return {0.0, x.v2 * y.omega - x.omega * y.v2, x.omega * y.v1 - x.v1 * y.omega};
}

double pairing(const DualElement& mu, const AlgebraElement& xi) {
  return mu.k * xi.omega + mu.p1 * xi.v1 + mu.p2 * xi.v2;
}

DualElement se2_coadjoint(const AlgebraElement& xi, const DualElement& mu) {
  return {mu.p1 * xi.v2 - mu.p2 * xi.v1, xi.omega * mu.p2, -xi.omega * mu.p1};
}

GroupElement group_mul(const GroupElement& g, const GroupElement& h) {
  const Eigen::Vector2d t = g.translation() + g.rotation() * h.translation();
  return {g.theta + h.theta, t[0], t[1]};
}

GroupElement group_inv(const GroupElement& g) {
  const Eigen::Vector2d t = -(rotation_matrix(-g.theta) * g.translation());
  return {-g.theta, t[0], t[1]};
}

AlgebraElement body_velocity(const GroupElement& g, const Eigen::Vector3d& gdot) {
  const double c = std::cos(g.theta), s = std::sin(g.theta);
  const double xd = gdot[1], yd = gdot[2];
  return {gdot[0], xd * c + yd * s, -xd * s + yd * c};
}

StructureAlgebra::StructureAlgebra(std::string name, std::vector<Eigen::MatrixXd> c)
    : name_(std::move(name)), dim_(static_cast<int>(c.size())), c_(std::move(c)) {
  for (const auto& ck : c_) {
    if (ck.rows() != dim_ || ck.cols() != dim_)
      throw std::invalid_argument("structure constants: inconsistent dimensions");
    if ((ck + ck.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("structure constants not antisymmetric");
  }
  if (jacobi_defect() > 1e-10)
    throw std::invalid_argument("structure constants violate the Jacobi identity");
}

Eigen::VectorXd StructureAlgebra::bracket(const Eigen::VectorXd& x,
                                          const Eigen::VectorXd& y) const {
  Eigen::VectorXd out(dim_);
  for (int k = 0; k < dim_; ++k) out[k] = x.dot(c_[k] * y);
  return out;
}

Eigen::MatrixXd StructureAlgebra::ad(const Eigen::VectorXd& xi) const {
  Eigen::MatrixXd m(dim_, dim_);
  for (int k = 0; k < dim_; ++k) m.row(k) = xi.transpose() * c_[k];
  return m;
}

Eigen::VectorXd StructureAlgebra::coad(const Eigen::VectorXd& xi,
                                       const Eigen::VectorXd& mu) const {
  // <ad*_xi mu, e_j> = <mu, ad_xi e_j>
  return ad(xi).transpose() * mu;
}

double StructureAlgebra::jacobi_defect() const {
  double worst = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j)
      for (int k = j + 1; k < dim_; ++k)
        for (int l = 0; l < dim_; ++l) {
          double r = 0.0;
          for (int m = 0; m < dim_; ++m)
            r += c_[m](i, j) * c_[l](m, k) + c_[m](j, k) * c_[l](m, i) +
                 c_[m](k, i) * c_[l](m, j);
          worst = std::max(worst, std::abs(r));
        }
  return worst;
}

StructureAlgebra se2_structure() {
  std::vector<Eigen::MatrixXd> c(3, Eigen::MatrixXd::Zero(3, 3));
  // [e1, e2] = e3, [e1, e3] = -e2, [e2, e3] = 0.
  c[2](0, 1) = 1.0;
  c[2](1, 0) = -1.0;
  c[1](0, 2) = -1.0;
  c[1](2, 0) = 1.0;
  return {"se2", std::move(c)};
}

StructureAlgebra abelian_structure(int dim) {
  std::vector<Eigen::MatrixXd> c(dim, Eigen::MatrixXd::Zero(dim, dim));
  return {"abelian", std::move(c)};
}

Eigen::VectorXd trace_ad(const StructureAlgebra& alg) {
  const int d = alg.dim();
  Eigen::VectorXd t(d);
  for (int i = 0; i < d; ++i) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(d);
    e[i] = 1.0;
    t[i] = alg.ad(e).trace();
  }
  return t;
}

}  // namespace geps
