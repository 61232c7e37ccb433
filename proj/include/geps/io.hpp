#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "geps/integrate.hpp"
#include "geps/models.hpp"

namespace geps {

/// Configuration or usage problem; the command layer maps it to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ModelKind {
  Heisenberg,
  Kirchhoff,
  ChaplyginLamb,
  SleighReduced,
  SleighFull,
};

struct OutputSpec {
  std::string path;            // empty = standard output
  std::string format = "csv";  // csv | json
};

struct PortraitAxis {
  double min = 0.0;
  double max = 0.0;
  int count = 0;
};

struct PortraitSpec {
  bool has_grid = false;
  PortraitAxis omega;
  PortraitAxis v1;
  std::vector<double> energies;  // used when has_grid is false
  double t_final = 100.0;
  bool include_equilibria = true;
  bool include_separatrix = true;
};

struct RunConfig {
  ModelKind model = ModelKind::SleighReduced;
  std::optional<InertiaTensor> inertia;
  CirculationParams circulation;
  HeisenbergParams heisenberg;
  Eigen::VectorXd initial_state;
  GroupElement initial_pose;
  IntegratorConfig integrator;
  OutputSpec output;
  std::optional<PortraitSpec> portrait;
};

/// Parse and validate a JSON configuration.  Unknown keys are rejected with a
/// path-qualified message ("$.inertia.gamma: unknown key"); model-required
/// blocks and state lengths are enforced here so downstream code never sees a
/// partially valid configuration.
RunConfig parse_config(const std::string& text);

RunConfig load_config_file(const std::string& path);

/// Column-oriented result table; one row per retained sample.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Render a double with 17 significant digits (lossless round trip).
std::string format_double(double value);

void write_csv(const Table& table, std::ostream& out);
void write_json(const Table& table, std::ostream& out);

struct SimulationRun {
  Table table;
  Trajectory trajectory;
};

/// Integrate the configured model and assemble its column contract:
///   heisenberg      t, p1, p2, H
///   kirchhoff       t, k, p1, p2, H
///   chaplygin_lamb  t, k, p1, p2, sigma0, sigma1, sigma2, H, Fbar
///   sleigh_reduced  t, omega, v1, H
///   sleigh_full     t, k, p1, p2, H, v2, theta, x, y
SimulationRun run_simulation(const RunConfig& config);

enum class OrbitClass {
  Periodic,
  Heteroclinic,
  Separatrix,
  Equilibrium,
  Unresolved,
};

std::string orbit_class_name(OrbitClass c);

struct OrbitReport {
  int index = 0;
  Eigen::Vector2d start = Eigen::Vector2d::Zero();
  double energy = 0.0;
  OrbitClass cls = OrbitClass::Unresolved;
  /// Refined closest approach to the start after first leaving its
  /// neighbourhood; the periodicity metric.
  double return_distance = 0.0;
  /// Distance to the equilibrium line at termination; the heteroclinic metric.
  double line_distance_end = 0.0;
  double t_end = 0.0;
  std::string file;
};

struct PortraitResult {
  bool line_exists = false;
  double h0_closed_form = 0.0;
  /// The same minimum obtained from a primal-dual linear solve, kept as an
  /// independent cross-check of the closed form.
  double h0_variational = 0.0;
  Eigen::Vector2d tangency = Eigen::Vector2d::Zero();
  std::vector<OrbitReport> orbits;
  std::vector<std::pair<Eigen::Vector2d, EquilibriumClassification>> equilibria;
};

/// Integrate every configured initial condition of the reduced blade model
/// (concurrently), classify the orbits against the separatrix energy, and
/// write orbit_###.csv, equilibria.csv, separatrix.txt and summary.csv under
/// `outdir`.
PortraitResult run_portrait(const RunConfig& config, const std::string& outdir);

// Command layer.  Each returns the process exit code: 0 success, 1 a check
// reported failure, 2 configuration/usage problems (via ConfigError).
int cmd_simulate(const std::string& config_path, const std::string& output_override);
int cmd_portrait(const std::string& config_path, const std::string& outdir);
int cmd_verify(std::uint64_t seed, int samples, bool inject_corrupted,
               std::ostream& out);
int cmd_measure(const std::string& config_path,
                const std::optional<std::vector<double>>& grid_args,
                std::ostream& out);
int cmd_equilibria(const std::string& config_path, std::ostream& out);

}  // namespace geps
