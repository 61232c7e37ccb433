#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geps/algebra.hpp"

namespace geps {

struct IntegratorConfig {
  enum class Method { RK4, RK45 };

  Method method = Method::RK4;
  double h = 1e-3;        // fixed step (RK4) or initial step (RK45)
  double t_final = 100.0;
  int stride = 10;        // record every stride-th accepted step
  double abs_tol = 1e-9;  // RK45 only
  double rel_tol = 1e-9;  // RK45 only
};

/// Sampled solution with optional named scalar series (energies, constraint
/// values, reconstructed coordinates, ...).
struct Trajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> states;
  std::vector<std::pair<std::string, std::vector<double>>> monitors;
  bool aborted = false;
  std::string diagnostic;

  void add_monitor(const std::string& name,
                   const std::function<double(const Eigen::VectorXd&)>& fn);
  void add_series(const std::string& name, std::vector<double> values);
  const std::vector<double>* monitor(const std::string& name) const;
};

using Rhs = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

Eigen::VectorXd rk4_step(const Rhs& f, double t, const Eigen::VectorXd& x, double h);

/// Integrate x' = f(t, x) from t = 0 to t_final.  The final time is hit
/// exactly (the last step is shortened).  A non-finite state aborts the run,
/// returning the partial trajectory with a diagnostic.
Trajectory integrate(const Rhs& f, const Eigen::VectorXd& x0, const IntegratorConfig& cfg);

/// Relative drift max_t |Q(t) - Q(0)| / max(1, |Q(0)|) for each named monitor.
std::vector<std::pair<std::string, double>> drift_report(
    const Trajectory& traj, const std::vector<std::string>& names);

/// Piecewise-cubic Hermite interpolant on a sorted sample grid, with
/// finite-difference slopes; used to drive reconstruction between samples.
class CubicInterpolant {
 public:
  CubicInterpolant(std::vector<double> t, std::vector<double> y);
  double operator()(double t) const;

 private:
  std::vector<double> t_, y_, m_;
};

/// Integrate the kinematic system
///   theta' = omega,  x' = v1 cos - v2 sin,  y' = v1 sin + v2 cos
/// from g0, driven by cubically interpolated body velocities, returning the
/// pose at each sample time.  Substeps are bounded by cfg.h.
std::vector<GroupElement> reconstruct(const std::vector<double>& times,
                                      const std::vector<Eigen::Vector3d>& body_velocities,
                                      const GroupElement& g0, const IntegratorConfig& cfg);

}  // namespace geps
