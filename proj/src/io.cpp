#include "geps/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <initializer_list>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "geps/algebra.hpp"
#include "geps/eps.hpp"
#include "geps/extension.hpp"
#include "geps/verify.hpp"

namespace geps {
namespace {

using Eigen::Matrix2d;
using Eigen::Matrix3d;
using Eigen::Vector2d;
using Eigen::Vector3d;
using Eigen::VectorXd;
using nlohmann::json;
using nlohmann::ordered_json;

[[noreturn]] void fail(const std::string& path, const std::string& message) {
  throw ConfigError(path + ": " + message);
}

const json* find(const json& obj, const char* key) {
  const auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

void require_object(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    if (!known) fail(path + "." + item.key(), "unknown key");
  }
}

double as_double(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

double get_double(const json& obj, const std::string& path, const char* key) {
  const json* v = find(obj, key);
  if (v == nullptr) fail(path + "." + key, "missing required key");
  return as_double(*v, path + "." + key);
}

double get_double_or(const json& obj, const std::string& path, const char* key,
                     double fallback) {
  const json* v = find(obj, key);
  return v == nullptr ? fallback : as_double(*v, path + "." + key);
}

int get_int_or(const json& obj, const std::string& path, const char* key,
               int fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_number_integer()) fail(path + "." + key, "expected an integer");
  return v->get<int>();
}

bool get_bool_or(const json& obj, const std::string& path, const char* key,
                 bool fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_boolean()) fail(path + "." + key, "expected a boolean");
  return v->get<bool>();
}

std::string get_string_or(const json& obj, const std::string& path,
                          const char* key, const std::string& fallback) {
  const json* v = find(obj, key);
  if (v == nullptr) return fallback;
  if (!v->is_string()) fail(path + "." + key, "expected a string");
  return v->get<std::string>();
}

VectorXd as_number_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array of numbers");
  VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[static_cast<int>(i)] = as_double(v[i], path + "[" + std::to_string(i) + "]");
  }
  return out;
}

ModelKind parse_model(const json& obj, const std::string& path) {
  const json* v = find(obj, "model");
  if (v == nullptr) fail(path + ".model", "missing required key");
  if (!v->is_string()) fail(path + ".model", "expected a string");
  const std::string name = v->get<std::string>();
  if (name == "heisenberg") return ModelKind::Heisenberg;
  if (name == "kirchhoff") return ModelKind::Kirchhoff;
  if (name == "chaplygin_lamb") return ModelKind::ChaplyginLamb;
  if (name == "sleigh_reduced") return ModelKind::SleighReduced;
  if (name == "sleigh_full") return ModelKind::SleighFull;
  fail(path + ".model",
       "expected one of heisenberg, kirchhoff, chaplygin_lamb, sleigh_reduced, "
       "sleigh_full");
}

InertiaTensor parse_inertia_block(const json& obj, const std::string& path) {
  require_object(obj, path);
  check_keys(obj, path, {"J", "L1", "L2", "M", "Z", "N"});
  const double J = get_double(obj, path, "J");
  const double M = get_double(obj, path, "M");
  const double L1 = get_double_or(obj, path, "L1", 0.0);
  const double L2 = get_double_or(obj, path, "L2", 0.0);
  const double Z = get_double_or(obj, path, "Z", 0.0);
  double N;
  if (find(obj, "N") != nullptr) {
    N = get_double(obj, path, "N");
  } else {
    // Positive-definite completion: N must exceed the Schur complement bound
    // (L1, Z) . [[J, -L2], [-L2, M]]^{-1} (L1, Z); pad it by one.
    const double D = M * J - L2 * L2;
    if (!(D > 0.0)) fail(path, "inertia not positive definite");
    const double bound =
        (M * L1 * L1 + 2.0 * L2 * L1 * Z + J * Z * Z) / D;
    N = bound + 1.0;
  }
  try {
    return InertiaTensor(J, L1, L2, M, Z, N);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

InertiaTensor parse_body_route(const json& body, const json* added,
                               const std::string& path) {
  require_object(body, path + ".body");
  check_keys(body, path + ".body", {"m", "I_cm", "a", "b"});
  BodyParams bp;
  bp.m = get_double(body, path + ".body", "m");
  bp.I_cm = get_double(body, path + ".body", "I_cm");
  bp.a = get_double_or(body, path + ".body", "a", 0.0);
  bp.b = get_double_or(body, path + ".body", "b", 0.0);
  AddedInertia ai;
  if (added != nullptr) {
    require_object(*added, path + ".added");
    check_keys(*added, path + ".added", {"I_F", "K1", "K2", "M11", "M12", "M22"});
    ai.I_F = get_double_or(*added, path + ".added", "I_F", 0.0);
    ai.K1 = get_double_or(*added, path + ".added", "K1", 0.0);
    ai.K2 = get_double_or(*added, path + ".added", "K2", 0.0);
    ai.M11 = get_double_or(*added, path + ".added", "M11", 0.0);
    ai.M12 = get_double_or(*added, path + ".added", "M12", 0.0);
    ai.M22 = get_double_or(*added, path + ".added", "M22", 0.0);
  }
  try {
    return total_inertia(bp, ai);
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

CirculationParams parse_circulation(const json& obj, const std::string& path) {
  require_object(obj, path);
  check_keys(obj, path, {"rho", "kappa", "alpha", "beta"});
  try {
    return CirculationParams(get_double_or(obj, path, "rho", 1.0),
                             get_double_or(obj, path, "kappa", 0.0),
                             get_double_or(obj, path, "alpha", 0.0),
                             get_double_or(obj, path, "beta", 0.0));
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

HeisenbergParams parse_heisenberg(const json& obj, const std::string& path) {
  require_object(obj, path);
  check_keys(obj, path, {"mass", "charge", "field"});
  HeisenbergParams hp;
  if (const json* mass = find(obj, "mass")) {
    if (!mass->is_array() || mass->size() != 2) {
      fail(path + ".mass", "expected a 2x2 array of numbers");
    }
    for (int r = 0; r < 2; ++r) {
      const VectorXd row =
          as_number_array((*mass)[r], path + ".mass[" + std::to_string(r) + "]");
      if (row.size() != 2) {
        fail(path + ".mass", "expected a 2x2 array of numbers");
      }
      hp.mass(r, 0) = row[0];
      hp.mass(r, 1) = row[1];
    }
  }
  hp.charge = get_double_or(obj, path, "charge", 1.0);
  hp.field = get_double_or(obj, path, "field", 1.0);
  try {
    hp.validate();
  } catch (const std::invalid_argument& e) {
    fail(path + ".mass", e.what());
  }
  return hp;
}

IntegratorConfig parse_integrator(const json& obj, const std::string& path) {
  require_object(obj, path);
  check_keys(obj, path, {"method", "h", "t_final", "stride", "abs_tol", "rel_tol"});
  IntegratorConfig cfg;
  const std::string method = get_string_or(obj, path, "method", "rk4");
  if (method == "rk4") {
    cfg.method = IntegratorConfig::Method::RK4;
  } else if (method == "rk45") {
    cfg.method = IntegratorConfig::Method::RK45;
  } else {
    fail(path + ".method", "expected rk4 or rk45");
  }
  cfg.h = get_double_or(obj, path, "h", cfg.h);
  cfg.t_final = get_double_or(obj, path, "t_final", cfg.t_final);
  cfg.stride = get_int_or(obj, path, "stride", cfg.stride);
  cfg.abs_tol = get_double_or(obj, path, "abs_tol", cfg.abs_tol);
  cfg.rel_tol = get_double_or(obj, path, "rel_tol", cfg.rel_tol);
  if (!(cfg.h > 0.0)) fail(path + ".h", "step size must be positive");
  if (!(cfg.t_final > 0.0)) fail(path + ".t_final", "final time must be positive");
  if (cfg.stride < 1) fail(path + ".stride", "stride must be at least 1");
  if (!(cfg.abs_tol > 0.0) || !(cfg.rel_tol > 0.0)) {
    fail(path, "tolerances must be positive");
  }
  return cfg;
}

PortraitAxis parse_axis(const json& v, const std::string& path) {
  const VectorXd a = as_number_array(v, path);
  if (a.size() != 3) fail(path, "expected [min, max, count]");
  PortraitAxis axis;
  axis.min = a[0];
  axis.max = a[1];
  axis.count = static_cast<int>(a[2]);
  if (axis.count < 1 || a[2] != std::floor(a[2])) {
    fail(path, "count must be a positive integer");
  }
  if (axis.count > 1 && !(axis.max > axis.min)) {
    fail(path, "max must exceed min");
  }
  return axis;
}

PortraitSpec parse_portrait(const json& obj, const std::string& path) {
  require_object(obj, path);
  check_keys(obj, path,
             {"grid", "energies", "t_final", "include_equilibria",
              "include_separatrix"});
  PortraitSpec spec;
  const json* grid = find(obj, "grid");
  const json* energies = find(obj, "energies");
  if ((grid == nullptr) == (energies == nullptr)) {
    fail(path, "specify exactly one of grid and energies");
  }
  if (grid != nullptr) {
    require_object(*grid, path + ".grid");
    check_keys(*grid, path + ".grid", {"omega", "v1"});
    const json* om = find(*grid, "omega");
    const json* v1 = find(*grid, "v1");
    if (om == nullptr) fail(path + ".grid.omega", "missing required key");
    if (v1 == nullptr) fail(path + ".grid.v1", "missing required key");
    spec.has_grid = true;
    spec.omega = parse_axis(*om, path + ".grid.omega");
    spec.v1 = parse_axis(*v1, path + ".grid.v1");
  } else {
    const VectorXd h = as_number_array(*energies, path + ".energies");
    if (h.size() == 0) fail(path + ".energies", "expected a nonempty array");
    for (int i = 0; i < h.size(); ++i) {
      if (!(h[i] > 0.0)) {
        fail(path + ".energies[" + std::to_string(i) + "]",
             "energy levels must be positive");
      }
      spec.energies.push_back(h[i]);
    }
  }
  spec.t_final = get_double_or(obj, path, "t_final", spec.t_final);
  if (!(spec.t_final > 0.0)) fail(path + ".t_final", "final time must be positive");
  spec.include_equilibria =
      get_bool_or(obj, path, "include_equilibria", spec.include_equilibria);
  spec.include_separatrix =
      get_bool_or(obj, path, "include_separatrix", spec.include_separatrix);
  return spec;
}

int expected_state_length(ModelKind model) {
  switch (model) {
    case ModelKind::Heisenberg:
    case ModelKind::SleighReduced:
    case ModelKind::SleighFull:
      return 2;
    case ModelKind::Kirchhoff:
    case ModelKind::ChaplyginLamb:
      return 3;
  }
  return 0;
}

bool model_needs_inertia(ModelKind model) {
  return model != ModelKind::Heisenberg;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("$", std::string("invalid JSON: ") + e.what());
  }
  require_object(root, "$");
  check_keys(root, "$",
             {"model", "inertia", "body", "added", "circulation", "heisenberg",
              "initial_state", "initial_pose", "integrator", "output",
              "portrait"});

  RunConfig cfg;
  cfg.model = parse_model(root, "$");

  const json* inertia = find(root, "inertia");
  const json* body = find(root, "body");
  const json* added = find(root, "added");
  if (inertia != nullptr && body != nullptr) {
    fail("$", "specify either inertia or body (with optional added), not both");
  }
  if (added != nullptr && body == nullptr) {
    fail("$.added", "added inertia requires a body block");
  }
  if (inertia != nullptr) {
    cfg.inertia = parse_inertia_block(*inertia, "$.inertia");
  } else if (body != nullptr) {
    cfg.inertia = parse_body_route(*body, added, "$");
  }
  if (model_needs_inertia(cfg.model) && !cfg.inertia.has_value()) {
    fail("$", "this model requires an inertia (or body) block");
  }

  if (const json* circ = find(root, "circulation")) {
    cfg.circulation = parse_circulation(*circ, "$.circulation");
  }
  if (const json* heis = find(root, "heisenberg")) {
    cfg.heisenberg = parse_heisenberg(*heis, "$.heisenberg");
  }

  if (const json* state = find(root, "initial_state")) {
    cfg.initial_state = as_number_array(*state, "$.initial_state");
    const int expected = expected_state_length(cfg.model);
    if (cfg.initial_state.size() != expected) {
      fail("$.initial_state", "expected " + std::to_string(expected) +
                                  " components for this model");
    }
  }
  if (const json* pose = find(root, "initial_pose")) {
    const VectorXd p = as_number_array(*pose, "$.initial_pose");
    if (p.size() != 3) fail("$.initial_pose", "expected [theta, x, y]");
    cfg.initial_pose = GroupElement(p[0], p[1], p[2]);
  }

  if (const json* integ = find(root, "integrator")) {
    cfg.integrator = parse_integrator(*integ, "$.integrator");
  }
  if (const json* output = find(root, "output")) {
    require_object(*output, "$.output");
    check_keys(*output, "$.output", {"path", "format", "stride"});
    cfg.output.path = get_string_or(*output, "$.output", "path", "");
    cfg.output.format = get_string_or(*output, "$.output", "format", "csv");
    if (cfg.output.format != "csv" && cfg.output.format != "json") {
      fail("$.output.format", "expected csv or json");
    }
    const int stride = get_int_or(*output, "$.output", "stride",
                                  cfg.integrator.stride);
    if (stride < 1) fail("$.output.stride", "stride must be at least 1");
    cfg.integrator.stride = stride;
  }
  if (const json* portrait = find(root, "portrait")) {
    cfg.portrait = parse_portrait(*portrait, "$.portrait");
  }
  return cfg;
}

RunConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

void write_csv(const Table& table, std::ostream& out) {
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i > 0) out << ',';
    out << table.columns[i];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << ',';
      out << format_double(row[i]);
    }
    out << '\n';
  }
}

void write_json(const Table& table, std::ostream& out) {
  ordered_json records = ordered_json::array();
  for (const auto& row : table.rows) {
    ordered_json record = ordered_json::object();
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
      record[table.columns[i]] = row[i];
    }
    records.push_back(std::move(record));
  }
  out << records.dump(1) << '\n';
}

namespace {

void require_initial_state(const RunConfig& cfg) {
  if (cfg.initial_state.size() == 0) {
    throw ConfigError("$.initial_state: missing required key");
  }
}

SimulationRun simulate_heisenberg(const RunConfig& cfg) {
  const HeisenbergParams params = cfg.heisenberg;
  const Matrix2d minv = params.mass.llt().solve(Matrix2d::Identity());
  const double sigma = params.charge;
  const Rhs rhs = [params, sigma](double, const VectorXd& x) -> VectorXd {
    return heisenberg_rhs(Vector2d(x[0], x[1]), params, sigma);
  };
  Trajectory traj = integrate(rhs, cfg.initial_state, cfg.integrator);
  traj.add_monitor("H", [minv](const VectorXd& x) {
    return 0.5 * x.dot(minv * x);
  });
  Table table;
  table.columns = {"t", "p1", "p2", "H"};
  const std::vector<double>& energy = *traj.monitor("H");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    table.rows.push_back(
        {traj.times[i], traj.states[i][0], traj.states[i][1], energy[i]});
  }
  return {std::move(table), std::move(traj)};
}

SimulationRun simulate_kirchhoff(const RunConfig& cfg) {
  const InertiaTensor inertia = *cfg.inertia;
  const Rhs rhs = [inertia](double, const VectorXd& x) -> VectorXd {
    return kirchhoff_rhs(DualElement(Vector3d(x)), inertia).vec();
  };
  Trajectory traj = integrate(rhs, cfg.initial_state, cfg.integrator);
  traj.add_monitor("H", [inertia](const VectorXd& x) {
    return full_hamiltonian(DualElement(Vector3d(x)), inertia);
  });
  Table table;
  table.columns = {"t", "k", "p1", "p2", "H"};
  const std::vector<double>& energy = *traj.monitor("H");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    table.rows.push_back({traj.times[i], traj.states[i][0], traj.states[i][1],
                          traj.states[i][2], energy[i]});
  }
  return {std::move(table), std::move(traj)};
}

SimulationRun simulate_chaplygin_lamb(const RunConfig& cfg) {
  const InertiaTensor inertia = *cfg.inertia;
  const CirculationParams circ = cfg.circulation;
  VectorXd x0(6);
  x0 << cfg.initial_state, circ.sigma();
  const Rhs rhs = [inertia, circ](double, const VectorXd& x) -> VectorXd {
    VectorXd out = VectorXd::Zero(6);
    out.head<3>() =
        chaplygin_lamb_rhs(DualElement(Vector3d(x.head<3>())), inertia, circ)
            .vec();
    return out;
  };
  Trajectory traj = integrate(rhs, x0, cfg.integrator);
  traj.add_monitor("H", [inertia](const VectorXd& x) {
    return full_hamiltonian(DualElement(Vector3d(x.head<3>())), inertia);
  });
  traj.add_monitor("Fbar", [](const VectorXd& x) {
    return casimir_fbar(DualElement(Vector3d(x.head<3>())),
                        Vector3d(x.tail<3>()));
  });
  traj.add_monitor("sigma0", [](const VectorXd& x) { return x[3]; });
  traj.add_monitor("sigma1", [](const VectorXd& x) { return x[4]; });
  traj.add_monitor("sigma2", [](const VectorXd& x) { return x[5]; });
  Table table;
  table.columns = {"t",      "k",      "p1",     "p2", "sigma0",
                   "sigma1", "sigma2", "H",      "Fbar"};
  const std::vector<double>& energy = *traj.monitor("H");
  const std::vector<double>& fbar = *traj.monitor("Fbar");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const VectorXd& s = traj.states[i];
    table.rows.push_back({traj.times[i], s[0], s[1], s[2], s[3], s[4], s[5],
                          energy[i], fbar[i]});
  }
  return {std::move(table), std::move(traj)};
}

SimulationRun simulate_sleigh_reduced(const RunConfig& cfg) {
  const SleighParams params{*cfg.inertia, cfg.circulation};
  const Rhs rhs = [params](double, const VectorXd& x) -> VectorXd {
    return sleigh_reduced_rhs(Vector2d(x[0], x[1]), params);
  };
  Trajectory traj = integrate(rhs, cfg.initial_state, cfg.integrator);
  const InertiaTensor inertia = params.inertia;
  traj.add_monitor("H", [inertia](const VectorXd& x) {
    return reduced_energy(Vector2d(x[0], x[1]), inertia);
  });
  Table table;
  table.columns = {"t", "omega", "v1", "H"};
  const std::vector<double>& energy = *traj.monitor("H");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    table.rows.push_back(
        {traj.times[i], traj.states[i][0], traj.states[i][1], energy[i]});
  }
  return {std::move(table), std::move(traj)};
}

SimulationRun simulate_sleigh_full(const RunConfig& cfg) {
  const SleighParams params{*cfg.inertia, cfg.circulation};
  const Matrix3d inv = params.inertia.inverse_explicit();
  const Vector2d w0(cfg.initial_state[0], cfg.initial_state[1]);
  const VectorXd x0 = sleigh_momentum(w0, params.inertia).vec();
  const Rhs rhs = [params](double, const VectorXd& x) -> VectorXd {
    return sleigh_constrained_rhs(DualElement(Vector3d(x)), params).vec();
  };
  Trajectory traj = integrate(rhs, x0, cfg.integrator);
  const InertiaTensor inertia = params.inertia;
  traj.add_monitor("H", [inertia](const VectorXd& x) {
    return full_hamiltonian(DualElement(Vector3d(x)), inertia);
  });
  traj.add_monitor("v2", [inv](const VectorXd& x) {
    return (inv * Vector3d(x))[2];
  });

  std::vector<Vector3d> velocities;
  velocities.reserve(traj.states.size());
  for (const VectorXd& s : traj.states) {
    velocities.push_back(inv * Vector3d(s));
  }
  const std::vector<GroupElement> poses =
      reconstruct(traj.times, velocities, cfg.initial_pose, cfg.integrator);
  std::vector<double> theta(poses.size()), px(poses.size()), py(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    theta[i] = poses[i].theta;
    px[i] = poses[i].x;
    py[i] = poses[i].y;
  }
  traj.add_series("theta", theta);
  traj.add_series("x", px);
  traj.add_series("y", py);

  Table table;
  table.columns = {"t", "k", "p1", "p2", "H", "v2", "theta", "x", "y"};
  const std::vector<double>& energy = *traj.monitor("H");
  const std::vector<double>& v2 = *traj.monitor("v2");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    const VectorXd& s = traj.states[i];
    table.rows.push_back({traj.times[i], s[0], s[1], s[2], energy[i], v2[i],
                          theta[i], px[i], py[i]});
  }
  return {std::move(table), std::move(traj)};
}

}  // namespace

SimulationRun run_simulation(const RunConfig& cfg) {
  require_initial_state(cfg);
  switch (cfg.model) {
    case ModelKind::Heisenberg:
      return simulate_heisenberg(cfg);
    case ModelKind::Kirchhoff:
      return simulate_kirchhoff(cfg);
    case ModelKind::ChaplyginLamb:
      return simulate_chaplygin_lamb(cfg);
    case ModelKind::SleighReduced:
      return simulate_sleigh_reduced(cfg);
    case ModelKind::SleighFull:
      return simulate_sleigh_full(cfg);
  }
  throw ConfigError("$.model: unhandled model");
}

std::string orbit_class_name(OrbitClass c) {
  switch (c) {
    case OrbitClass::Periodic:
      return "periodic";
    case OrbitClass::Heteroclinic:
      return "heteroclinic";
    case OrbitClass::Separatrix:
      return "separatrix";
    case OrbitClass::Equilibrium:
      return "equilibrium";
    case OrbitClass::Unresolved:
      return "unresolved";
  }
  return "unresolved";
}

namespace {

struct OrbitData {
  std::vector<double> times;
  std::vector<Vector2d> states;
  OrbitClass cls = OrbitClass::Unresolved;
  double return_distance = 0.0;
  double line_distance_end = 0.0;
  double t_end = 0.0;
};

/// Closest approach to w0 along a re-integration of [t, t + span] from w at
/// one hundredth of the base step.
double refined_closest_approach(const Rhs& f, Vector2d w, double t, double span,
                                double h, const Vector2d& w0) {
  const double hs = h / 100.0;
  const int steps = static_cast<int>(std::ceil(span / hs));
  double best = (w - w0).norm();
  for (int i = 0; i < steps; ++i) {
    w = Vector2d(rk4_step(f, t + i * hs, w, hs));
    best = std::min(best, (w - w0).norm());
  }
  return best;
}

OrbitData integrate_orbit(const Vector2d& w0, const SleighParams& params,
                          const EquilibriaLine& line,
                          const SeparatrixEnergy& sep,
                          const IntegratorConfig& icfg, double t_final) {
  constexpr double kReturnThreshold = 1e-4;
  constexpr double kLeaveGuard = 10.0 * kReturnThreshold;
  constexpr double kLineThreshold = 1e-3;
  constexpr double kSeparatrixBand = 1e-12;

  OrbitData data;
  const Rhs f = [params](double, const VectorXd& x) -> VectorXd {
    return sleigh_reduced_rhs(Vector2d(x[0], x[1]), params);
  };
  const double h = icfg.h;
  const int stride = icfg.stride;
  data.times.push_back(0.0);
  data.states.push_back(w0);

  if (sleigh_reduced_rhs(w0, params).norm() <= 1e-12) {
    data.cls = OrbitClass::Equilibrium;
    if (line.status == LineStatus::Line) {
      data.line_distance_end = line.distance(w0);
    }
    return data;
  }
  const double energy = reduced_energy(w0, params.inertia);
  const bool on_separatrix =
      sep.exists && std::abs(energy - sep.h0) <= kSeparatrixBand;
  const bool expect_heteroclinic =
      sep.exists && !on_separatrix && energy > sep.h0;

  Vector2d w = w0;
  Vector2d prev = w0;
  bool left = false;
  double best = std::numeric_limits<double>::infinity();
  Vector2d best_prev = w0;
  double best_prev_t = 0.0;
  const int max_steps = static_cast<int>(std::ceil(t_final / h));
  int n = 0;
  auto record = [&](double t) {
    data.times.push_back(t);
    data.states.push_back(w);
  };
  while (n < max_steps) {
    prev = w;
    w = Vector2d(rk4_step(f, n * h, w, h));
    ++n;
    const double t = n * h;
    if (n % stride == 0) record(t);
    data.t_end = t;

    const double d = (w - w0).norm();
    if (!left && d > kLeaveGuard) left = true;
    if (left && d < best) {
      best = d;
      best_prev = prev;
      best_prev_t = t - h;
    }
    if (expect_heteroclinic && line.status == LineStatus::Line &&
        line.distance(w) <= kLineThreshold) {
      if (n % stride != 0) record(t);
      data.cls = OrbitClass::Heteroclinic;
      data.line_distance_end = line.distance(w);
      data.return_distance = std::isfinite(best) ? best : (w - w0).norm();
      return data;
    }
    if (!on_separatrix && !expect_heteroclinic && left &&
        d <= kReturnThreshold) {
      if (n % stride != 0) record(t);
      data.cls = OrbitClass::Periodic;
      data.return_distance =
          refined_closest_approach(f, prev, t - h, 2.0 * h, h, w0);
      if (line.status == LineStatus::Line) {
        data.line_distance_end = line.distance(w);
      }
      return data;
    }
  }
  if (data.times.back() != data.t_end) record(data.t_end);
  data.return_distance =
      std::isfinite(best)
          ? refined_closest_approach(f, best_prev, best_prev_t, 2.0 * h, h, w0)
          : (w - w0).norm();
  if (on_separatrix) {
    data.cls = OrbitClass::Separatrix;
  } else if (!expect_heteroclinic && left &&
             data.return_distance <= kReturnThreshold) {
    // The sampled points straddled the return neighbourhood; the refined
    // closest approach still certifies periodicity.
    data.cls = OrbitClass::Periodic;
  } else {
    data.cls = OrbitClass::Unresolved;
  }
  if (line.status == LineStatus::Line) {
    data.line_distance_end = line.distance(w);
  }
  return data;
}

std::string orbit_file_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "orbit_%03d.csv", index);
  return buf;
}

}  // namespace

PortraitResult run_portrait(const RunConfig& cfg, const std::string& outdir) {
  if (cfg.model != ModelKind::SleighReduced) {
    throw ConfigError("$.model: portrait requires model sleigh_reduced");
  }
  if (!cfg.portrait.has_value()) {
    throw ConfigError("$.portrait: missing required key");
  }
  const PortraitSpec& spec = *cfg.portrait;
  const SleighParams params{*cfg.inertia, cfg.circulation};
  const EquilibriaLine line = equilibria_line(params);
  const SeparatrixEnergy sep = separatrix_energy(params);

  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(outdir, ec);
  if (ec) throw ConfigError("cannot create output directory: " + outdir);

  PortraitResult result;
  result.line_exists = sep.exists;
  result.h0_closed_form = sep.h0;
  result.h0_variational = sep.h0;
  result.tangency = sep.tangency;
  if (sep.exists) {
    // Independent route: stationarity of the energy restricted to the line,
    // as a primal-dual linear system.
    Eigen::Matrix3d kkt = Eigen::Matrix3d::Zero();
    kkt(0, 0) = params.inertia.J();
    kkt(0, 1) = -params.inertia.L2();
    kkt(1, 0) = -params.inertia.L2();
    kkt(1, 1) = params.inertia.M();
    kkt(0, 2) = params.inertia.L1();
    kkt(1, 2) = params.inertia.Z();
    kkt(2, 0) = params.inertia.L1();
    kkt(2, 1) = params.inertia.Z();
    Vector3d rhs = Vector3d::Zero();
    rhs[2] = -params.circulation.sigma()[2];
    const Vector3d sol = kkt.fullPivLu().solve(rhs);
    result.h0_variational =
        reduced_energy(Vector2d(sol[0], sol[1]), params.inertia);
  }

  // Initial conditions in deterministic index order.
  std::vector<Vector2d> starts;
  if (spec.has_grid) {
    for (int i = 0; i < spec.omega.count; ++i) {
      const double om =
          spec.omega.count == 1
              ? spec.omega.min
              : spec.omega.min + (spec.omega.max - spec.omega.min) * i /
                                     (spec.omega.count - 1);
      for (int j = 0; j < spec.v1.count; ++j) {
        const double v =
            spec.v1.count == 1
                ? spec.v1.min
                : spec.v1.min +
                      (spec.v1.max - spec.v1.min) * j / (spec.v1.count - 1);
        starts.emplace_back(om, v);
      }
    }
  } else {
    for (const double h : spec.energies) {
      starts.emplace_back(std::sqrt(2.0 * h / params.inertia.J()), 0.0);
    }
  }

  std::vector<std::future<OrbitData>> futures;
  futures.reserve(starts.size());
  for (const Vector2d& w0 : starts) {
    futures.push_back(std::async(std::launch::async, [&, w0]() {
      return integrate_orbit(w0, params, line, sep, cfg.integrator,
                             spec.t_final);
    }));
  }

  std::ofstream summary(fs::path(outdir) / "summary.csv");
  if (!summary) {
    throw ConfigError("cannot open output file: " +
                      (fs::path(outdir) / "summary.csv").string());
  }
  summary << "orbit,omega0,v10,energy,class,return_distance,line_distance,"
             "t_end\n";
  for (std::size_t i = 0; i < futures.size(); ++i) {
    const OrbitData data = futures[i].get();
    const Vector2d w0 = starts[i];

    Table table;
    table.columns = {"t", "omega", "v1", "H"};
    for (std::size_t k = 0; k < data.times.size(); ++k) {
      table.rows.push_back({data.times[k], data.states[k][0],
                            data.states[k][1],
                            reduced_energy(data.states[k], params.inertia)});
    }
    const std::string name = orbit_file_name(static_cast<int>(i));
    std::ofstream orbit_out(fs::path(outdir) / name);
    if (!orbit_out) {
      throw ConfigError("cannot open output file: " +
                        (fs::path(outdir) / name).string());
    }
    write_csv(table, orbit_out);

    OrbitReport report;
    report.index = static_cast<int>(i);
    report.start = w0;
    report.energy = reduced_energy(w0, params.inertia);
    report.cls = data.cls;
    report.return_distance = data.return_distance;
    report.line_distance_end = data.line_distance_end;
    report.t_end = data.t_end;
    report.file = name;
    result.orbits.push_back(report);

    summary << report.index << ',' << format_double(w0[0]) << ','
            << format_double(w0[1]) << ',' << format_double(report.energy)
            << ',' << orbit_class_name(report.cls) << ','
            << format_double(report.return_distance) << ','
            << format_double(report.line_distance_end) << ','
            << format_double(report.t_end) << '\n';
  }

  if (spec.include_equilibria) {
    std::ofstream eq(fs::path(outdir) / "equilibria.csv");
    eq << "omega,v1,class,transverse_eigenvalue\n";
    if (line.status == LineStatus::Line) {
      // Sample the line across the span of the initial conditions.
      double smin = -1.0, smax = 1.0;
      bool first = true;
      for (const Vector2d& w0 : starts) {
        const Vector2d p0 = line.point(0.0);
        const Vector2d dir = line.point(1.0) - p0;
        const double s = dir.dot(w0 - p0);
        if (first) {
          smin = s;
          smax = s;
          first = false;
        } else {
          smin = std::min(smin, s);
          smax = std::max(smax, s);
        }
      }
      const double pad = 0.2 * std::max(1.0, smax - smin);
      smin -= pad;
      smax += pad;
      const int count = 21;
      for (int i = 0; i < count; ++i) {
        const double s = smin + (smax - smin) * i / (count - 1);
        const Vector2d w = line.point(s);
        const EquilibriumClassification c = classify_equilibrium(w, params);
        result.equilibria.emplace_back(w, c);
        const char* label = c.type == EquilibriumType::Stable
                                ? "stable"
                                : (c.type == EquilibriumType::Unstable
                                       ? "unstable"
                                       : "degenerate");
        eq << format_double(w[0]) << ',' << format_double(w[1]) << ','
           << label << ',' << format_double(c.transverse_eigenvalue) << '\n';
      }
    }
  }

  if (spec.include_separatrix) {
    std::ofstream sp(fs::path(outdir) / "separatrix.txt");
    if (sep.exists) {
      sp << "h0 = " << format_double(sep.h0) << '\n';
      sp << "h0_variational = " << format_double(result.h0_variational)
         << '\n';
      sp << "tangency_omega = " << format_double(sep.tangency[0]) << '\n';
      sp << "tangency_v1 = " << format_double(sep.tangency[1]) << '\n';
      sp << "nonpositive = " << (sep.nonpositive ? 1 : 0) << '\n';
    } else {
      sp << "no equilibrium line\n";
    }
  }
  return result;
}

int cmd_simulate(const std::string& config_path,
                 const std::string& output_override) {
  RunConfig cfg = load_config_file(config_path);
  if (!output_override.empty()) cfg.output.path = output_override;
  const SimulationRun run = run_simulation(cfg);
  if (run.trajectory.aborted) {
    std::cerr << "integration aborted: " << run.trajectory.diagnostic << '\n';
  }
  const auto emit = [&](std::ostream& out) {
    if (cfg.output.format == "json") {
      write_json(run.table, out);
    } else {
      write_csv(run.table, out);
    }
  };
  if (cfg.output.path.empty()) {
    emit(std::cout);
  } else {
    std::ofstream out(cfg.output.path);
    if (!out) throw ConfigError("cannot open output file: " + cfg.output.path);
    emit(out);
  }
  return run.trajectory.aborted ? 1 : 0;
}

int cmd_portrait(const std::string& config_path, const std::string& outdir) {
  const RunConfig cfg = load_config_file(config_path);
  const PortraitResult result = run_portrait(cfg, outdir);
  int periodic = 0, heteroclinic = 0, separatrix = 0, equilibrium = 0,
      unresolved = 0;
  for (const OrbitReport& orbit : result.orbits) {
    switch (orbit.cls) {
      case OrbitClass::Periodic: ++periodic; break;
      case OrbitClass::Heteroclinic: ++heteroclinic; break;
      case OrbitClass::Separatrix: ++separatrix; break;
      case OrbitClass::Equilibrium: ++equilibrium; break;
      case OrbitClass::Unresolved: ++unresolved; break;
    }
  }
  std::cout << result.orbits.size() << " orbits -> " << outdir << " ("
            << periodic << " periodic, " << heteroclinic << " heteroclinic, "
            << separatrix << " separatrix, " << equilibrium << " equilibrium, "
            << unresolved << " unresolved)\n";
  if (result.line_exists) {
    std::cout << "h0 = " << format_double(result.h0_closed_form) << '\n';
  } else {
    std::cout << "no equilibrium line\n";
  }
  return 0;
}

int cmd_verify(std::uint64_t seed, int samples, bool inject_corrupted,
               std::ostream& out) {
  if (samples < 1) throw ConfigError("--samples: must be at least 1");
  VerifyOptions options;
  options.seed = seed;
  options.samples = samples;
  options.inject_corrupted_cocycle = inject_corrupted;
  const std::vector<CheckResult> results = run_verification_suite(options);
  int failures = 0;
  for (const CheckResult& r : results) {
    char line[160];
    std::snprintf(line, sizeof(line), "%-58s  %11.3e  %11.3e  %s",
                  r.name.c_str(), r.residual, r.tolerance,
                  r.pass ? "pass" : "FAIL");
    out << line << '\n';
    if (!r.pass) ++failures;
  }
  out << results.size() << " checks, " << failures << " failed (seed "
      << seed << ", samples " << samples << ")\n";
  return failures == 0 ? 0 : 1;
}

int cmd_measure(const std::string& config_path,
                const std::optional<std::vector<double>>& grid_args,
                std::ostream& out) {
  const RunConfig cfg = load_config_file(config_path);
  if (!cfg.inertia.has_value()) {
    throw ConfigError("$: the measure sweep requires an inertia block");
  }
  std::vector<double> z_values, l1_values;
  if (grid_args.has_value()) {
    if (grid_args->size() != 5) {
      throw ConfigError("--grid: expected zmin zmax l1min l1max count");
    }
    const double zmin = (*grid_args)[0], zmax = (*grid_args)[1];
    const double lmin = (*grid_args)[2], lmax = (*grid_args)[3];
    const int count = static_cast<int>((*grid_args)[4]);
    if (count < 1) throw ConfigError("--grid: count must be at least 1");
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      z_values.push_back(zmin + (zmax - zmin) * f);
      l1_values.push_back(lmin + (lmax - lmin) * f);
    }
  } else {
    z_values = {-1.0, -0.5, 0.0, 0.5, 1.0};
    l1_values = z_values;
  }

  const StructureAlgebra se2 = se2_structure();
  const AlgebraCocycle2 cross = circulation_cocycle();
  const Vector3d nu(0.0, 0.0, 1.0);
  const InertiaTensor& base = *cfg.inertia;
  out << "Z,L1,exists_base,exists_extended,c,residual\n";
  int rc = 0;
  for (const double z : z_values) {
    for (const double l1 : l1_values) {
      Matrix3d m;
      m << base.J(), -base.L2(), l1, -base.L2(), base.M(), z, l1, z, base.N();
      const Eigen::LLT<Matrix3d> llt(m);
      if (llt.info() != Eigen::Success) {
        std::cerr << "skipping Z=" << z << ", L1=" << l1
                  << ": inertia not positive definite\n";
        continue;
      }
      const MeasureReport b = measure_criterion(se2, m, nu);
      const MeasureReport e = measure_criterion_extended(se2, cross, m, nu);
      if (b.exists != e.exists) {
        std::cerr << "internal error: extension changed the measure verdict "
                     "at Z="
                  << z << ", L1=" << l1 << '\n';
        rc = 1;
      }
      out << format_double(z) << ',' << format_double(l1) << ','
          << (b.exists ? 1 : 0) << ',' << (e.exists ? 1 : 0) << ','
          << format_double(b.c) << ',' << format_double(b.residual) << '\n';
    }
  }
  return rc;
}

int cmd_equilibria(const std::string& config_path, std::ostream& out) {
  const RunConfig cfg = load_config_file(config_path);
  if (!cfg.inertia.has_value()) {
    throw ConfigError("$: equilibria analysis requires an inertia block");
  }
  const SleighParams params{*cfg.inertia, cfg.circulation};
  const EquilibriaLine line = equilibria_line(params);
  switch (line.status) {
    case LineStatus::Empty:
      out << "status: empty (no equilibria; nonzero circulation with "
             "decoupled inertia)\n";
      return 0;
    case LineStatus::WholePlane:
      out << "status: whole-plane (every state is an equilibrium)\n";
      return 0;
    case LineStatus::Line:
      break;
  }
  out << "status: line\n";
  out << "line: " << format_double(line.coeff_omega) << "*omega + "
      << format_double(line.coeff_v1) << "*v1 + "
      << format_double(line.offset) << " = 0\n";
  const SeparatrixEnergy sep = separatrix_energy(params);
  out << "h0 = " << format_double(sep.h0)
      << (sep.nonpositive ? "  (nonpositive)" : "") << '\n';
  out << "tangency = (" << format_double(sep.tangency[0]) << ", "
      << format_double(sep.tangency[1]) << ")\n";
  out << "s,omega,v1,class,transverse_eigenvalue\n";
  const Vector2d p0 = line.point(0.0);
  const Vector2d dir = line.point(1.0) - p0;
  const double s_tan = dir.dot(sep.tangency - p0);
  for (int i = -5; i <= 5; ++i) {
    const double s = s_tan + i;
    const Vector2d w = line.point(s);
    const EquilibriumClassification c = classify_equilibrium(w, params);
    const char* label =
        c.type == EquilibriumType::Stable
            ? "stable"
            : (c.type == EquilibriumType::Unstable ? "unstable" : "degenerate");
    out << format_double(s) << ',' << format_double(w[0]) << ','
        << format_double(w[1]) << ',' << label << ','
        << format_double(c.transverse_eigenvalue) << '\n';
  }
  return 0;
}

}  // namespace geps
