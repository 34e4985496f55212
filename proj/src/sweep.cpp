#include "mispar/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mispar/errors.hpp"
#include "mispar/lasso.hpp"
#include "mispar/parallel.hpp"
#include "mispar/ridge.hpp"
#include "mispar/simulator.hpp"

namespace mispar {

namespace {

double snap(double v) {
  const double r = std::round(v * 1e6) / 1e6;
  return std::fabs(v - r) <= 1e-12 * std::max(1.0, std::fabs(v)) ? r : v;
}

double number_or_usage(const std::string& s) {
  try {
    const double v = parse_number(s);
    if (std::isnan(v)) throw DomainError("nan");
    return v;
  } catch (const DomainError&) {
    throw UsageError("bad number in grid: '" + s + "'");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

const std::vector<std::string> kOutputs = {"te_l2", "ge_l2", "te_l1", "ge_l1", "sim_l2", "sim_l1"};
const std::vector<std::string> kAxes = {"mu", "alpha", "lambda", "rho", "sigma"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<double> drop_singularity(const std::vector<double>& grid, const std::string& axis,
                                     bool keep) {
  if (keep || axis != "mu") return grid;
  std::vector<double> out;
  for (double v : grid)
    if (v != 1.0) out.push_back(v);
  return out;
}

}  // namespace

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  if (text.empty()) return out;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() < 3 || parts.size() > 4)
      throw UsageError("grid '" + text + "' must be a:b:N or a:b:N:log");
    const double a = number_or_usage(parts[0]);
    const double b = number_or_usage(parts[1]);
    const double nd = number_or_usage(parts[2]);
    const bool log = parts.size() == 4;
    if (log && parts[3] != "log") throw UsageError("grid spacing must be 'log', got '" + parts[3] + "'");
    if (nd < 1 || nd != std::floor(nd)) throw UsageError("grid point count must be a positive integer");
    const int n = static_cast<int>(nd);
    if (log && !(a > 0.0 && b > 0.0)) throw UsageError("log grid needs positive endpoints");
    for (int i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
      const double v = log ? std::exp(std::log(a) + t * (std::log(b) - std::log(a))) : a + t * (b - a);
      out.push_back(snap(i == n - 1 ? b : v));
    }
  } else {
    for (const auto& p : split(text, ',')) out.push_back(snap(number_or_usage(p)));
  }
  return out;
}

void set_axis(ModelConfig& cfg, const std::string& axis, double value) {
  if (axis == "mu") cfg.mu = value;
  else if (axis == "alpha") cfg.alpha = value;
  else if (axis == "lambda") cfg.lambda = value;
  else if (axis == "rho") cfg.rho = value;
  else if (axis == "sigma") cfg.sigma = value;
  else throw UsageError("unknown axis '" + axis + "' (mu, alpha, lambda, rho, sigma)");
}

void SweepSpec::validate() const {
  if (!contains(kAxes, axis)) throw UsageError("unknown axis '" + axis + "'");
  if (!axis2.empty() && (!contains(kAxes, axis2) || axis2 == axis))
    throw UsageError("bad second axis '" + axis2 + "'");
  auto increasing = [](const std::vector<double>& g) {
    for (std::size_t i = 1; i < g.size(); ++i)
      if (!(g[i] > g[i - 1])) return false;
    return true;
  };
  if (!increasing(grid) || !increasing(grid2)) throw UsageError("grid must be strictly increasing");
  if (outputs.empty()) throw UsageError("no outputs requested");
  for (const auto& o : outputs)
    if (!contains(kOutputs, o)) throw UsageError("unknown output '" + o + "'");
  if (sim_trials < 1) throw UsageError("--trials must be >= 1");
  if (sim_n < 10) throw UsageError("--n must be >= 10");
}

SweepResult sweep(const SweepSpec& spec) {
  spec.validate();
  const auto g1 = drop_singularity(spec.grid, spec.axis, spec.include_singularity);
  const bool two = !spec.axis2.empty();
  const auto g2 = two ? drop_singularity(spec.grid2, spec.axis2, spec.include_singularity)
                      : std::vector<double>{0.0};

  std::vector<std::string> cols = {spec.axis};
  if (two) cols.push_back(spec.axis2);
  for (const auto& o : spec.outputs) {
    if (o.rfind("sim_", 0) == 0) {
      for (const char* q : {"_te", "_te_stderr", "_ge", "_ge_stderr"}) cols.push_back(o + q);
    } else {
      cols.push_back(o);
    }
  }

  struct Point {
    std::vector<std::string> cells;
    bool failed = false;
    std::vector<std::string> warnings;
  };
  const std::size_t n1 = g1.size();
  const std::size_t total = n1 * g2.size();
  std::vector<Point> points(total);

  auto compute = [&](int idx) {
    const double v1 = g1[idx % n1];
    const double v2 = g2[idx / n1];
    ModelConfig cfg = spec.fixed;
    set_axis(cfg, spec.axis, v1);
    if (two) set_axis(cfg, spec.axis2, v2);
    Point& pt = points[idx];
    pt.cells.push_back(format_number(v1));
    if (two) pt.cells.push_back(format_number(v2));

    auto warn = [&](const std::string& what, const std::exception& e) {
      std::ostringstream os;
      os << spec.axis << "=" << format_number(v1);
      if (two) os << " " << spec.axis2 << "=" << format_number(v2);
      os << ": " << what << " failed: " << e.what();
      pt.warnings.push_back(os.str());
      pt.failed = true;
    };

    bool l2_done = false, l1_done = false;
    RiskPoint l2{NAN, NAN}, l1{NAN, NAN};
    auto need_l2 = [&] {
      if (l2_done) return;
      l2_done = true;
      try {
        l2 = ridge::risk_l2_any(cfg);
      } catch (const std::exception& e) {
        warn("l2 theory", e);
      }
    };
    auto need_l1 = [&] {
      if (l1_done) return;
      l1_done = true;
      try {
        l1 = lasso::solve_l1(cfg).risk;
      } catch (const std::exception& e) {
        warn("l1 theory", e);
      }
    };

    for (const auto& o : spec.outputs) {
      if (o == "te_l2" || o == "ge_l2") {
        need_l2();
        pt.cells.push_back(format_number(o == "te_l2" ? l2.te : l2.ge));
      } else if (o == "te_l1" || o == "ge_l1") {
        need_l1();
        pt.cells.push_back(format_number(o == "te_l1" ? l1.te : l1.ge));
      } else {
        const auto pen = o == "sim_l2" ? sim::Penalty::l2 : sim::Penalty::l1;
        sim::TrialSummary s;
        s.te_mean = s.te_stderr = s.ge_mean = s.ge_stderr = NAN;
        try {
          s = sim::run_trials(cfg, spec.sim_n, spec.sim_trials, pen, spec.seed, 1);
        } catch (const std::exception& e) {
          warn(o, e);
        }
        for (double v : {s.te_mean, s.te_stderr, s.ge_mean, s.ge_stderr})
          pt.cells.push_back(format_number(v));
      }
    }
  };

  parallel_for(static_cast<int>(total), compute, worker_count(spec.workers));

  SweepResult out;
  out.table = Table(cols);
  out.points = static_cast<int>(total);
  for (auto& pt : points) {
    out.table.append_row(std::move(pt.cells));
    if (pt.failed) ++out.failed_points;
    for (auto& w : pt.warnings) out.warnings.push_back(std::move(w));
  }
  return out;
}

PhaseResult phase(const std::vector<double>& rho_grid, double alpha) {
  if (!(alpha > 0.0)) throw UsageError("--alpha must be > 0");
  for (double r : rho_grid)
    if (!(r > 0.0 && r < 1.0)) throw UsageError("rho grid values must lie in (0, 1)");
  PhaseResult out;
  out.table = Table({"rho", "rho_over_alpha", "mu_c", "mu_c_approx", "alpha_c", "status"});
  for (double r : rho_grid) {
    const auto pb = lasso::alpha_c(r);
    std::string mc = "nan", status = "ok";
    try {
      mc = format_number(lasso::mu_c(r, alpha).mu_c);
    } catch (const NoWindow&) {
      status = "no_window";
      ++out.no_window;
    }
    out.table.append_row({format_number(r), format_number(r / alpha), mc,
                          format_number(lasso::mu_c_approx(r, alpha)), format_number(pb.alpha_c),
                          status});
  }
  return out;
}

std::vector<std::string> recipe_names() { return {"fig1", "fig1c", "fig2", "fig3", "fig4"}; }

Recipe recipe(const std::string& name) {
  Recipe r;
  r.name = name;
  SweepSpec& s = r.sweep;
  s.fixed = ModelConfig{0.8, 1.0, 0.2, 0.1, 0.0};
  s.sim_n = 200;
  s.sim_trials = 100;
  s.seed = 42;
  if (name == "fig1" || name == "fig2") {
    s.axis = "mu";
    s.grid = parse_grid("0.05:4:80");
    s.outputs = {"te_l2", "ge_l2", "te_l1", "ge_l1", "sim_l2", "sim_l1"};
    if (name == "fig2") s.sim_trials = 1;
  } else if (name == "fig1c") {
    s.axis = "mu";
    s.grid = parse_grid("0.05:4:80");
    s.fixed.lambda = 0.1;
    s.outputs = {"te_l2", "ge_l2", "sim_l2"};
  } else if (name == "fig3") {
    s.axis = "mu";
    s.grid = parse_grid("0.02:4:200");
    s.axis2 = "alpha";
    s.grid2 = parse_grid("0.2:3:15");
    s.fixed.sigma = 0.01;
    s.include_singularity = true;
    s.outputs = {"ge_l2"};
  } else if (name == "fig4") {
    r.is_phase = true;
    r.phase_rho = parse_grid("0.05:0.6:56");
    r.phase_alpha = 1.0;
  } else {
    throw UsageError("unknown recipe '" + name + "' (fig1, fig1c, fig2, fig3, fig4)");
  }
  return r;
}

}  // namespace mispar
