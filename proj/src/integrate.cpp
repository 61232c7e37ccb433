#include "geps/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace geps {

void Trajectory::add_monitor(const std::string& name,
                             const std::function<double(const Eigen::VectorXd&)>& fn) {
  std::vector<double> values;
  values.reserve(states.size());
  for (const auto& x : states) values.push_back(fn(x));
  monitors.emplace_back(name, std::move(values));
}

void Trajectory::add_series(const std::string& name, std::vector<double> values) {
  monitors.emplace_back(name, std::move(values));
}

const std::vector<double>* Trajectory::monitor(const std::string& name) const {
  for (const auto& [n, v] : monitors)
    if (n == name) return &v;
  return nullptr;
}

Eigen::VectorXd rk4_step(const Rhs& f, double t, const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + 0.5 * h, x + 0.5 * h * k1);
  const Eigen::VectorXd k3 = f(t + 0.5 * h, x + 0.5 * h * k2);
  const Eigen::VectorXd k4 = f(t + h, x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

namespace {

struct Dopri45Result {
  Eigen::VectorXd y5;
  double error_norm;  // scaled; accept when <= 1
};

Dopri45Result dopri45_step(const Rhs& f, double t, const Eigen::VectorXd& x, double h,
                           double atol, double rtol) {
  const Eigen::VectorXd k1 = f(t, x);
  const Eigen::VectorXd k2 = f(t + h / 5.0, x + h * (k1 / 5.0));
  const Eigen::VectorXd k3 = f(t + 3.0 * h / 10.0, x + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2));
  const Eigen::VectorXd k4 =
      f(t + 4.0 * h / 5.0, x + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3));
  const Eigen::VectorXd k5 =
      f(t + 8.0 * h / 9.0, x + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2 +
                                    64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4));
  const Eigen::VectorXd k6 =
      f(t + h, x + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3 +
                        49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5));
  const Eigen::VectorXd y5 = x + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 +
                                      125.0 / 192.0 * k4 - 2187.0 / 6784.0 * k5 +
                                      11.0 / 84.0 * k6);
  const Eigen::VectorXd k7 = f(t + h, y5);
  const Eigen::VectorXd y4 = x + h * (5179.0 / 57600.0 * k1 + 7571.0 / 16695.0 * k3 +
                                      393.0 / 640.0 * k4 - 92097.0 / 339200.0 * k5 +
                                      187.0 / 2100.0 * k6 + 1.0 / 40.0 * k7);
  double acc = 0.0;
  for (int i = 0; i < x.size(); ++i) {
    const double scale = atol + rtol * std::max(std::abs(x[i]), std::abs(y5[i]));
    const double e = (y5[i] - y4[i]) / scale;
    acc += e * e;
  }
  return {y5, std::sqrt(acc / static_cast<double>(x.size()))};
}

}  // namespace

Trajectory integrate(const Rhs& f, const Eigen::VectorXd& x0, const IntegratorConfig& cfg) {
  if (!(cfg.h > 0.0)) throw std::invalid_argument("step size must be positive");
  if (!(cfg.t_final > 0.0)) throw std::invalid_argument("final time must be positive");
  if (cfg.stride < 1) throw std::invalid_argument("stride must be at least 1");

  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(x0);

  double t = 0.0;
  Eigen::VectorXd x = x0;
  long accepted = 0;
  double h = cfg.h;
  const double tiny = 1e-12 * cfg.t_final;

  auto record = [&](bool force) {
    if (force || accepted % cfg.stride == 0) {
      traj.times.push_back(t);
      traj.states.push_back(x);
    }
  };

  while (t < cfg.t_final - tiny) {
    double step = std::min(h, cfg.t_final - t);
    Eigen::VectorXd next;
    if (cfg.method == IntegratorConfig::Method::RK4) {
      next = rk4_step(f, t, x, step);
    } else {
      bool accepted_step = false;
      for (int tries = 0; tries < 60 && !accepted_step; ++tries) {
        const Dopri45Result r = dopri45_step(f, t, x, step, cfg.abs_tol, cfg.rel_tol);
        if (!r.y5.allFinite()) {
          step *= 0.5;
          continue;
        }
        if (r.error_norm <= 1.0) {
          next = r.y5;
          accepted_step = true;
          const double grow = 0.9 * std::pow(std::max(r.error_norm, 1e-10), -0.2);
          h = step * std::clamp(grow, 0.2, 5.0);
        } else {
          step *= std::clamp(0.9 * std::pow(r.error_norm, -0.2), 0.2, 0.9);
        }
      }
      if (!accepted_step) {
        traj.aborted = true;
        traj.diagnostic = "step control failed to converge at t = " + std::to_string(t);
        return traj;
      }
    }
    if (!next.allFinite()) {
      traj.aborted = true;
      traj.diagnostic = "non-finite state encountered at t = " + std::to_string(t + step);
      return traj;
    }
    x = std::move(next);
    t += step;
    ++accepted;
    record(t >= cfg.t_final - tiny);
  }
  return traj;
}

std::vector<std::pair<std::string, double>> drift_report(
    const Trajectory& traj, const std::vector<std::string>& names) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto& name : names) {
    const std::vector<double>* series = traj.monitor(name);
    if (!series || series->empty())
      throw std::invalid_argument("unknown monitor: " + name);
    const double q0 = series->front();
    double worst = 0.0;
    for (const double q : *series) worst = std::max(worst, std::abs(q - q0));
    out.emplace_back(name, worst / std::max(1.0, std::abs(q0)));
  }
  return out;
}

CubicInterpolant::CubicInterpolant(std::vector<double> t, std::vector<double> y)
    : t_(std::move(t)), y_(std::move(y)) {
  const int n = static_cast<int>(t_.size());
  if (n < 2 || y_.size() != t_.size())
    throw std::invalid_argument("interpolant needs at least two matching samples");
  m_.resize(n);
  for (int i = 1; i + 1 < n; ++i) {
    const double hl = t_[i] - t_[i - 1], hr = t_[i + 1] - t_[i];
    const double sl = (y_[i] - y_[i - 1]) / hl, sr = (y_[i + 1] - y_[i]) / hr;
    m_[i] = (sl * hr + sr * hl) / (hl + hr);
  }
  m_[0] = (y_[1] - y_[0]) / (t_[1] - t_[0]);
  m_[n - 1] = (y_[n - 1] - y_[n - 2]) / (t_[n - 1] - t_[n - 2]);
}

double CubicInterpolant::operator()(double t) const {
  const auto upper = std::upper_bound(t_.begin(), t_.end(), t);
  int i = static_cast<int>(upper - t_.begin()) - 1;
  i = std::clamp(i, 0, static_cast<int>(t_.size()) - 2);
  const double h = t_[i + 1] - t_[i];
  const double s = std::clamp((t - t_[i]) / h, 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s;
  return (2.0 * s3 - 3.0 * s2 + 1.0) * y_[i] + (s3 - 2.0 * s2 + s) * h * m_[i] +
         (-2.0 * s3 + 3.0 * s2) * y_[i + 1] + (s3 - s2) * h * m_[i + 1];
}

std::vector<GroupElement> reconstruct(const std::vector<double>& times,
                                      const std::vector<Eigen::Vector3d>& body_velocities,
                                      const GroupElement& g0, const IntegratorConfig& cfg) {
  if (times.size() != body_velocities.size())
    throw std::invalid_argument("times and velocities must have equal length");
  std::vector<GroupElement> poses;
  poses.reserve(times.size());
  poses.push_back(g0);
  if (times.size() < 2) return poses;

  std::vector<double> w(times.size()), a(times.size()), b(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    w[i] = body_velocities[i][0];
    a[i] = body_velocities[i][1];
    b[i] = body_velocities[i][2];
  }
  const CubicInterpolant omega(times, std::move(w));
  const CubicInterpolant v1(times, std::move(a));
  const CubicInterpolant v2(times, std::move(b));

  const Rhs kinematics = [&](double t, const Eigen::VectorXd& g) -> Eigen::VectorXd {
    const double c = std::cos(g[0]), s = std::sin(g[0]);
    const double u1 = v1(t), u2 = v2(t);
    return Eigen::Vector3d(omega(t), u1 * c - u2 * s, u1 * s + u2 * c);
  };

  Eigen::VectorXd g(3);
  g << g0.theta, g0.x, g0.y;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double span = times[i + 1] - times[i];
    const int nsub = std::max(1, static_cast<int>(std::ceil(span / cfg.h)));
    const double sub = span / nsub;
    double t = times[i];
    for (int k = 0; k < nsub; ++k, t += sub) g = rk4_step(kinematics, t, g, sub);
    poses.push_back({g[0], g[1], g[2]});
  }
  return poses;
}

}  // namespace geps
