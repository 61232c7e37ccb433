#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace geps {

/// Deterministic sampling stream for property checks and verification runs.
///
/// The mapping from raw 64-bit draws to doubles is fixed here (rather than
/// using std::uniform_real_distribution, whose output is implementation
/// defined) so that identical seeds give identical samples on every platform.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed = 0) : eng_(seed) {}

  /// Uniform draw in [0, 1).
  double unit() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  /// Uniform draw in [-1, 1].
  double symmetric() { return 2.0 * unit() - 1.0; }

  /// Uniform draw in [lo, hi].
  double range(double lo, double hi) { return lo + (hi - lo) * unit(); }

  Eigen::VectorXd vector(int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = symmetric();
    return v;
  }

  Eigen::Vector3d vector3() {
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) v[i] = symmetric();
    return v;
  }

  Eigen::MatrixXd matrix(int rows, int cols) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
      for (int j = 0; j < cols; ++j) m(i, j) = symmetric();
    return m;
  }

  /// Random symmetric positive-definite matrix A^T A + shift * I.
  Eigen::MatrixXd spd(int n, double shift = 0.4) {
    const Eigen::MatrixXd a = matrix(n, n);
    return a.transpose() * a + shift * Eigen::MatrixXd::Identity(n, n);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace geps
