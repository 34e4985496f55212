// mispar: theory/simulation sweeps, phase tables and SVG rendering.
//
//   mispar sweep --axis mu --grid 0.05:4.0:80 --alpha 0.8 --rho 0.2 --sigma 0.1
//       --lambda 0 --outputs ge_l2,ge_l1,sim_l1 --n 200 --trials 100 --seed 42 --out fig1.csv
//   mispar phase --rho 0.05:0.6:40 --alpha 0.8 --out fig4.csv
//   mispar render --in fig1.csv --x mu --y ge_l2,ge_l1 --errbars sim_l1 --logy --out fig1.svg
//
// Exit status: 0 ok, 1 usage error, 2 more than 10% of sweep points failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mispar/errors.hpp"
#include "mispar/sweep.hpp"
#include "mispar/svg.hpp"
#include "mispar/table.hpp"

namespace {

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw mispar::UsageError("cannot open '" + path + "' for writing");
  f << text;
}

std::string slurp(const std::string& path) {
  if (path.empty() || path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return ss.str();
  }
  std::ifstream f(path, std::ios::binary);
  if (!f) throw mispar::UsageError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Risk curves for misparametrized sparse regression"};
  app.require_subcommand(1);

  // sweep
  auto* sw = app.add_subcommand("sweep", "theory and/or simulation along one or two axes");
  std::string recipe_name, axis = "mu", grid_text, axis2, grid2_text, outputs_text = "te_l2,ge_l2",
                           out_path;
  double alpha = 0.8, mu = 1.0, rho = 0.2, sigma = 0.1, lambda = 0.0;
  int n = 200, trials = 100;
  std::uint64_t seed = 42;
  bool include_singularity = false;
  sw->add_option("--recipe", recipe_name, "fig1 | fig1c | fig2 | fig3");
  auto* o_axis = sw->add_option("--axis", axis, "mu | alpha | lambda | rho | sigma");
  auto* o_grid = sw->add_option("--grid", grid_text, "a:b:N, a:b:N:log or a comma list");
  auto* o_axis2 = sw->add_option("--axis2", axis2, "second axis (long-format output)");
  auto* o_grid2 = sw->add_option("--grid2", grid2_text, "grid for --axis2");
  auto* o_alpha = sw->add_option("--alpha", alpha);
  auto* o_mu = sw->add_option("--mu", mu);
  auto* o_rho = sw->add_option("--rho", rho);
  auto* o_sigma = sw->add_option("--sigma", sigma);
  auto* o_lambda = sw->add_option("--lambda", lambda, "0 selects the interpolating limit");
  auto* o_outputs = sw->add_option("--outputs", outputs_text, "te_l2,ge_l2,te_l1,ge_l1,sim_l2,sim_l1");
  auto* o_n = sw->add_option("--n", n, "generative dimension for simulations");
  auto* o_trials = sw->add_option("--trials", trials);
  auto* o_seed = sw->add_option("--seed", seed);
  auto* o_sing = sw->add_flag("--include-singularity", include_singularity, "keep mu = 1 in mu grids");
  sw->add_option("--out", out_path, "CSV path (default stdout)");

  // phase
  auto* ph = app.add_subcommand("phase", "critical overparametrization table");
  std::string ph_recipe, ph_rho, ph_out;
  double ph_alpha = 0.8;
  ph->add_option("--recipe", ph_recipe, "fig4");
  auto* o_ph_rho = ph->add_option("--rho", ph_rho, "rho grid in (0, 1)");
  auto* o_ph_alpha = ph->add_option("--alpha", ph_alpha);
  ph->add_option("--out", ph_out, "CSV path (default stdout)");

  // render
  auto* rd = app.add_subcommand("render", "static SVG from a CSV table");
  mispar::PlotSpec plot;
  std::string rd_in, rd_y, rd_err, rd_out;
  rd->add_option("--in", rd_in, "CSV path (default stdin)");
  rd->add_option("--x", plot.x)->required();
  rd->add_option("--y", rd_y, "comma-separated columns")->required();
  rd->add_option("--errbars", rd_err, "simulation prefixes, e.g. sim_l1");
  rd->add_flag("--logx", plot.logx);
  rd->add_flag("--logy", plot.logy);
  rd->add_option("--title", plot.title);
  rd->add_option("--z", plot.z, "heatmap colour column");
  rd->add_option("--zmax", plot.zmax, "heatmap colour cap");
  rd->add_option("--width", plot.width);
  rd->add_option("--height", plot.height);
  rd->add_option("--out", rd_out, "SVG path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*sw) {
      mispar::SweepSpec spec;
      if (!recipe_name.empty()) {
        const auto r = mispar::recipe(recipe_name);
        if (r.is_phase) throw mispar::UsageError("recipe '" + recipe_name + "' belongs to `phase`");
        spec = r.sweep;
      } else {
        spec.fixed = {alpha, mu, rho, sigma, lambda};
        spec.outputs = split_list(outputs_text);
        spec.sim_n = n;
        spec.sim_trials = trials;
        spec.seed = seed;
      }
      // Explicit flags refine a recipe.
      if (o_axis->count() || recipe_name.empty()) spec.axis = axis;
      if (o_grid->count()) spec.grid = mispar::parse_grid(grid_text);
      if (o_axis2->count()) spec.axis2 = axis2;
      if (o_grid2->count()) spec.grid2 = mispar::parse_grid(grid2_text);
      if (o_alpha->count()) spec.fixed.alpha = alpha;
      if (o_mu->count()) spec.fixed.mu = mu;
      if (o_rho->count()) spec.fixed.rho = rho;
      if (o_sigma->count()) spec.fixed.sigma = sigma;
      if (o_lambda->count()) spec.fixed.lambda = lambda;
      if (o_outputs->count()) spec.outputs = split_list(outputs_text);
      if (o_n->count()) spec.sim_n = n;
      if (o_trials->count()) spec.sim_trials = trials;
      if (o_seed->count()) spec.seed = seed;
      if (o_sing->count()) spec.include_singularity = include_singularity;
      if (spec.grid.empty() && !o_grid->count() && recipe_name.empty())
        throw mispar::UsageError("--grid is required without --recipe");
      if (!spec.axis2.empty() && spec.grid2.empty())
        throw mispar::UsageError("--axis2 needs --grid2");
      try {
        mispar::ModelConfig probe = spec.fixed;
        probe.validate();
      } catch (const mispar::DomainError& e) {
        throw mispar::UsageError(e.what());
      }

      const auto res = mispar::sweep(spec);
      for (const auto& w : res.warnings) std::cerr << "warning: " << w << "\n";
      emit(out_path, res.table.to_csv());
      if (res.partial_failure()) {
        std::cerr << "error: " << res.failed_points << " of " << res.points
                  << " points failed\n";
        return 2;
      }
      return 0;
    }

    if (*ph) {
      std::vector<double> rhos;
      double a = ph_alpha;
      if (!ph_recipe.empty()) {
        const auto r = mispar::recipe(ph_recipe);
        if (!r.is_phase) throw mispar::UsageError("recipe '" + ph_recipe + "' belongs to `sweep`");
        rhos = r.phase_rho;
        a = r.phase_alpha;
      }
      if (o_ph_rho->count()) rhos = mispar::parse_grid(ph_rho);
      if (o_ph_alpha->count()) a = ph_alpha;
      if (ph_recipe.empty() && !o_ph_rho->count())
        throw mispar::UsageError("--rho is required without --recipe");
      const auto res = mispar::phase(rhos, a);
      emit(ph_out, res.table.to_csv());
      return 0;
    }

    if (*rd) {
      plot.y = split_list(rd_y);
      plot.errbars = split_list(rd_err);
      const auto table = mispar::Table::from_csv(slurp(rd_in));
      emit(rd_out, mispar::render_svg(table, plot));
      return 0;
    }
  } catch (const mispar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
