#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "geps/io.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "geps - momentum dynamics on the planar motion group and its central "
      "extensions: fluid-body models, nonholonomic blades, phase portraits "
      "and a structural verification suite"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  std::string outdir;
  std::uint64_t seed = 0;
  int samples = 1000;
  bool inject_corrupted = false;
  std::vector<double> grid_args;

  CLI::App* simulate =
      app.add_subcommand("simulate", "Integrate a configured model and write "
                                     "the sampled trajectory (csv or json)");
  simulate->add_option("-c,--config", config_path, "JSON configuration file")
      ->required();
  simulate->add_option("-o,--output", output_override,
                       "Override the configured output path");

  CLI::App* portrait = app.add_subcommand(
      "portrait", "Integrate a family of reduced blade orbits, classify them "
                  "against the separatrix energy, and write per-orbit files");
  portrait->add_option("-c,--config", config_path, "JSON configuration file")
      ->required();
  portrait->add_option("-d,--outdir", outdir, "Output directory")->required();

  CLI::App* verify = app.add_subcommand(
      "verify", "Run the structural verification suite (bracket identities, "
                "Poisson maps, conserved quantities, measure criteria)");
  verify->add_option("--seed", seed, "Random seed (default 0)");
  verify->add_option("--samples", samples,
                     "Random samples per randomized check (default 1000)");
  verify->add_flag("--inject-corrupted-cocycle", inject_corrupted,
                   "Swap a deliberately broken cocycle into the circulation "
                   "bracket; the suite must then report failures");

  CLI::App* measure = app.add_subcommand(
      "measure", "Sweep the coupling parameters (Z, L1) and report where a "
                 "smooth invariant measure exists, on the base algebra and "
                 "on its central extension");
  measure->add_option("-c,--config", config_path, "JSON configuration file")
      ->required();
  measure->add_option("--grid", grid_args,
                      "zmin zmax l1min l1max count "
                      "(default: 5x5 lattice on [-1,1]^2)")
      ->expected(5);

  CLI::App* equilibria = app.add_subcommand(
      "equilibria", "Report the equilibrium line of the reduced blade model, "
                    "the separatrix energy, and stability along the line");
  equilibria->add_option("-c,--config", config_path, "JSON configuration file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (simulate->parsed()) {
      return geps::cmd_simulate(config_path, output_override);
    }
    if (portrait->parsed()) {
      return geps::cmd_portrait(config_path, outdir);
    }
    if (verify->parsed()) {
      return geps::cmd_verify(seed, samples, inject_corrupted, std::cout);
    }
    if (measure->parsed()) {
      std::optional<std::vector<double>> grid;
      if (!grid_args.empty()) grid = grid_args;
      return geps::cmd_measure(config_path, grid, std::cout);
    }
    if (equilibria->parsed()) {
      return geps::cmd_equilibria(config_path, std::cout);
    }
  } catch (const geps::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
