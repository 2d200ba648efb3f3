#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "guidewave/cli/pipeline.hpp"
#include "guidewave/core/errors.hpp"
#include "guidewave/floquet/serialization.hpp"

using namespace guidewave;

int main(int argc, char** argv) {
  CLI::App app{"Scattering in junctions of periodic waveguides"};
  app.require_subcommand(1);

  std::string config;
  cli::RunOptions run;
  auto* solve = app.add_subcommand("solve", "Solve one configuration and write field, mesh and manifest");
  solve->add_option("config", config, "Problem configuration")->required()->check(CLI::ExistingFile);
  solve->add_option("--out", run.output_dir, "Output directory (default <name>_out)");
  solve->add_option("--cache", run.cache_dir, "Mode cache directory (default <out>/cache)");
  solve->add_flag("!--no-cache", run.use_cache, "Ignore cached mode bases");
  solve->add_option("--plot-nx", run.plot_nx, "Plot grid points along x1 (0 disables)");
  solve->add_option("--plot-ny", run.plot_ny, "Plot grid points along x2");

  std::vector<int> M_list;
  std::string ref_name = "self";
  int ref_M = 10;
  std::string csv_path;
  auto* converge = app.add_subcommand("converge", "Relative L2 error against a reference for several M");
  converge->add_option("config", config, "Problem configuration")->required()->check(CLI::ExistingFile);
  converge->add_option("--M", M_list, "Ascending truncation heights")->delimiter(',')->required();
  converge->add_option("--ref", ref_name, "Reference: self (richest M) or lap")->check(CLI::IsMember({"self", "lap"}));
  converge->add_option("--ref-M", ref_M, "Truncation of the self reference");
  converge->add_option("--out", csv_path, "CSV output file (default stdout)");

  std::string side_name = "plus";
  std::string modes_out;
  auto* modes = app.add_subcommand("modes", "Dump the outgoing mode basis of one guide");
  modes->add_option("config", config, "Problem configuration")->required()->check(CLI::ExistingFile);
  modes->add_option("--side", side_name, "plus (right guide) or minus (left guide)")
      ->check(CLI::IsMember({"plus", "minus"}));
  modes->add_option("--out", modes_out, "Output file (default stdout)");

  auto* check = app.add_subcommand("check", "Run the closed-form oracle invariants");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      const auto res = cli::run_solve(config, run);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      std::cout << res.manifest.dump(2) << "\n";
    } else if (*converge) {
      const auto table = cli::run_convergence(config, M_list, cli::reference_from_string(ref_name), ref_M);
      if (csv_path.empty()) {
        std::cout << table.to_csv();
      } else {
        std::ofstream(csv_path) << table.to_csv();
      }
    } else if (*modes) {
      const ProblemConfig cfg = load_config(config);
      const Side side = side_from_string(side_name);
      const auto& guide = side == Side::Plus ? cfg.right : cfg.left;
      if (!guide) throw ConfigError("configuration has no guide on side " + side_name);
      const auto spectrum = cli::compute_spectrum(*guide, cfg.k, cfg.N, cfg.M, cfg.tol);
      const std::string text = floquet::basis_to_json(cli::outgoing_basis(spectrum, *guide, cfg.M, cfg.tol));
      if (modes_out.empty()) {
        std::cout << text << "\n";
      } else {
        std::ofstream(modes_out) << text << "\n";
      }
    } else if (*check) {
      return cli::check(std::cout) ? 0 : 1;
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
