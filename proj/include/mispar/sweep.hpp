#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mispar/model.hpp"
#include "mispar/table.hpp"

namespace mispar {

/// Parses "a:b:N" (N points, both ends included), "a:b:N:log", a comma list, or a
/// single number. Values within 1e-12 (relative) of a six-decimal number are snapped
/// onto it so that e.g. mu = 1 is hit exactly. Throws UsageError.
std::vector<double> parse_grid(const std::string& text);

/// Axis names accepted by sweeps: mu, alpha, lambda, rho, sigma.
void set_axis(ModelConfig& cfg, const std::string& axis, double value);

struct SweepSpec {
  std::string axis = "mu";
  std::vector<double> grid;
  /// Optional second axis; the table is then in long format (axis2 outer, axis inner).
  std::string axis2;
  std::vector<double> grid2;
  ModelConfig fixed;
  /// Any of te_l2, ge_l2, te_l1, ge_l1, sim_l2, sim_l1.
  std::vector<std::string> outputs;
  int sim_n = 200;
  int sim_trials = 100;
  std::uint64_t seed = 42;
  bool include_singularity = false;
  int workers = 0;

  /// Throws UsageError.
  void validate() const;
};

struct SweepResult {
  Table table;
  int points = 0;
  int failed_points = 0;
  std::vector<std::string> warnings;

  /// More than 10% of points failed.
  bool partial_failure() const { return points > 0 && failed_points * 10 > points; }
};

SweepResult sweep(const SweepSpec& spec);

struct PhaseResult {
  Table table;
  int no_window = 0;
};

/// Columns rho, rho_over_alpha, mu_c, mu_c_approx, alpha_c, status.
PhaseResult phase(const std::vector<double>& rho_grid, double alpha);

/// Named presets pinning the figure parameters.
struct Recipe {
  std::string name;
  bool is_phase = false;
  SweepSpec sweep;
  std::vector<double> phase_rho;
  double phase_alpha = 1.0;
};

/// fig1, fig1c, fig2, fig3, fig4. Throws UsageError for unknown names.
Recipe recipe(const std::string& name);

std::vector<std::string> recipe_names();

}  // namespace mispar
