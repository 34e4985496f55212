// Acceptance suite: `acceptance N` checks criterion N (1-10) and prints one line;
// with no argument every criterion runs. Exit status is 0 only if all checked pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mispar/lasso.hpp"
#include "mispar/ridge.hpp"
#include "mispar/simulator.hpp"
#include "mispar/sweep.hpp"

using mispar::ModelConfig;
namespace ls = mispar::lasso;
namespace rg = mispar::ridge;
namespace sim = mispar::sim;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> v;
  for (int i = 0; i < n; ++i) v.push_back(a + (b - a) * i / (n - 1));
  return v;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

// Slope of log f(d) against log d on a geometric grid over [lo, hi].
template <class F>
double loglog_slope(F f, double lo, double hi, int pts = 11) {
  std::vector<double> x, y;
  for (int i = 0; i < pts; ++i) {
    const double d = lo * std::pow(hi / lo, static_cast<double>(i) / (pts - 1));
    x.push_back(std::log(d));
    y.push_back(std::log(f(d)));
  }
  return ls_slope(x, y);
}

double ge1(const ModelConfig& c) { return ls::solve_l1(c).risk.ge; }

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double alpha : {0.8, 2.0})
    for (double mu : linspace(0.1, 4.0, 20))
      for (int k = 0; k < 10; ++k) {
        const double lam = 1e-3 * std::pow(1e4, k / 9.0);
        const ModelConfig c{alpha, mu, 0.2, 0.1, lam};
        const auto a = rg::risk_l2(c), b = rg::risk_l2_oracle(c);
        worst = std::max({worst, std::fabs(a.te - b.te), std::fabs(a.ge - b.ge)});
      }
  const double t = seconds_since(t0);
  return {worst <= 1e-7 && t < 10.0, "max |closed - oracle| = " + fmt("%.2e", worst) + " (<= 1e-7), " +
                                         fmt("%.2f", t) + " s (< 10 s), alpha in {0.8, 2}"};
}

Outcome c2() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> grid = linspace(0.1, 0.9, 16);
  for (double mu : linspace(1.1, 4.0, 24)) grid.push_back(mu);
  // theory/simulation pairs: l2 TE, l2 GE, l1 TE, l1 GE
  int hits[4] = {0, 0, 0, 0};
  for (double mu : grid) {
    const ModelConfig c{0.8, mu, 0.2, 0.1, 0.0};
    const auto t2 = rg::risk_l2_interp(c);
    const auto t1 = ls::risk_l1_interp(c).risk;
    const auto s2 = sim::run_trials(c, 200, 100, sim::Penalty::l2, 42);
    const auto s1 = sim::run_trials(c, 200, 100, sim::Penalty::l1, 42);
    auto within = [](double theory, double mean, double se) {
      return std::fabs(mean - theory) <= std::max(3.0 * se, 1e-6);
    };
    hits[0] += within(t2.te, s2.te_mean, s2.te_stderr);
    hits[1] += within(t2.ge, s2.ge_mean, s2.ge_stderr);
    hits[2] += within(t1.te, s1.te_mean, s1.te_stderr);
    hits[3] += within(t1.ge, s1.ge_mean, s1.ge_stderr);
  }
  const double t = seconds_since(t0);
  const int need = 36;
  bool pass = t < 600.0;
  std::ostringstream os;
  const char* names[] = {"l2 TE", "l2 GE", "l1 TE", "l1 GE"};
  for (int i = 0; i < 4; ++i) {
    pass = pass && hits[i] >= need;
    os << names[i] << " " << hits[i] << "/40, ";
  }
  os << "need >= " << need << "/40 each; " << fmt("%.0f", t) << " s (< 600 s)";
  return {pass, os.str()};
}

Outcome c3() {
  auto ge = [](double mu) { return rg::risk_l2_interp({0.8, mu, 0.2, 0.1, 0.0}).ge; };
  std::vector<double> xr, yr, xl, yl;
  for (double mu : linspace(1.02, 1.2, 19)) xr.push_back(std::log(mu - 1)), yr.push_back(std::log(ge(mu)));
  for (double mu : linspace(0.8, 0.98, 19)) xl.push_back(std::log(1 - mu)), yl.push_back(std::log(ge(mu)));
  const double r = ls_slope(xr, yr), l = ls_slope(xl, yl);
  return {std::fabs(r + 1.0) <= 0.05 && std::fabs(l + 1.0) <= 0.05,
          "slope right " + fmt("%.4f", r) + ", left " + fmt("%.4f", l) + " (want -1.00 +- 0.05)"};
}

Outcome c4() {
  double worst = 0.0;
  for (int k = 1; k <= 9; ++k) {
    const ModelConfig c{0.8, 0.1 * k, 0.2, 0.1, 0.0};
    worst = std::max(worst, std::fabs(ge1(c) - rg::risk_l2_interp(c).ge));
  }
  return {worst <= 1e-9, "max |GE1 - GE2| = " + fmt("%.2e", worst) + " (<= 1e-9)"};
}

Outcome c5() {
  const double par = ls::mu_c(0.2, 0.8).mu_c;
  const double imp = ls::mu_c_implicit(0.2, 0.8);
  const double apx = ls::mu_c_approx(0.2, 0.8);
  const bool a = par >= 18.6 && par <= 18.8;
  const bool b = std::fabs(apx / 18.52 - 1.0) <= 0.02;
  const bool c = std::fabs(imp / par - 1.0) <= 1e-4;
  return {a && b && c, "mu_c = " + fmt("%.4f", par) + (a ? " in" : " NOT in") + " [18.6, 18.8]; approx " +
                           fmt("%.4f", apx) + (b ? " within" : " NOT within") + " 2% of 18.52; implicit/parametric - 1 = " +
                           fmt("%.1e", imp / par - 1.0)};
}

Outcome c6() {
  std::ostringstream os;
  bool pass = true;
  os << "GE1:";
  for (double mu : {1.5, 5.0, 10.0, 18.0}) {
    const double g = ge1({0.8, mu, 0.2, 0.0, 0.0});
    pass = pass && g <= 1e-8;
    os << " mu=" << mu << " " << fmt("%.3g", g);
  }
  const double g2 = rg::risk_l2_interp({0.8, 10.0, 0.2, 0.0, 0.0}).ge;
  pass = pass && g2 > 0.3;
  os << " (<= 1e-8); GE2(mu=10) " << fmt("%.4f", g2) << " (> 0.3)";
  const auto s = sim::run_trials({0.8, 5.0, 0.2, 0.0, 0.0}, 1000, 4, sim::Penalty::l1, 42);
  pass = pass && s.ge_mean < 1e-3;
  os << "; sim l1 GE n=1000 mu=5 (4 trials) " << fmt("%.3g", s.ge_mean) << " (< 1e-3)";
  return {pass, os.str()};
}

Outcome c7() {
  const double mc = ls::mu_c(0.2, 0.8).mu_c;
  const double a = loglog_slope([mc](double d) { return ge1({0.8, mc * (1 + d), 0.2, 0.0, 0.0}); }, 1e-3, 1e-2);
  const double ac = ls::alpha_c(0.2).alpha_c;
  const double b = loglog_slope([ac](double d) { return ge1({ac, 1.0 / ac - d, 0.2, 0.0, 0.0}); }, 1e-5, 1e-3);
  const double c = loglog_slope([](double d) { return ge1({0.8, 1.25 - d, 0.2, 0.0, 0.0}); }, 1e-5, 1e-3);
  const bool pass = std::fabs(a - 2.0) <= 0.1 && std::fabs(b - 2.0 / 3.0) <= 0.03 && std::fabs(c - 1.0) <= 0.05;
  return {pass, "(a) " + fmt("%.4f", a) + " (2.0 +- 0.1, dmu/mu_c in [1e-3, 1e-2]); (b) " + fmt("%.4f", b) +
                    " (0.667 +- 0.03); (c) " + fmt("%.4f", c) + " (1.0 +- 0.05)"};
}

Outcome c8() {
  const ModelConfig c{0.8, 1e6, 0.2, 0.1, 0.0};
  const double g1 = ge1(c), g2 = rg::risk_l2_interp(c).ge;
  return {std::fabs(g1 - 1) <= 0.02 && std::fabs(g2 - 1) <= 0.02,
          "GE1 = " + fmt("%.4f", g1) + ", GE2 = " + fmt("%.4f", g2) + " (1 +- 0.02)"};
}

Outcome c9() {
  const auto r = mispar::recipe("fig3");
  const auto res = mispar::sweep(r.sweep);
  const auto mu = res.table.numeric("mu"), alpha = res.table.numeric("alpha"), ge = res.table.numeric("ge_l2");
  const double cell = r.sweep.grid[1] - r.sweep.grid[0];
  bool pass = true;
  int checked = 0;
  std::ostringstream os;
  double worst = 0.0;
  for (double a : r.sweep.grid2) {
    if (a < 1.2 - 1e-9 || a > 3.0 + 1e-9) continue;
    double onset = NAN;
    for (std::size_t i = 0; i < mu.size(); ++i)
      if (alpha[i] == a && ge[i] < 0.1) {
        onset = mu[i];
        break;
      }
    const double off = std::fabs(onset - 1.0 / a);
    worst = std::isnan(off) ? INFINITY : std::max(worst, off);
    pass = pass && off <= cell * (1 + 1e-9) && std::fabs(onset - 1.0) > cell;
    ++checked;
  }
  os << checked << " alphas in [1.2, 3]; max |onset - 1/alpha| = " << fmt("%.4f", worst) << " (cell " << fmt("%.4f", cell) << ")";
  return {pass && checked > 0, os.str()};
}

Outcome c10() {
  mispar::SweepSpec s;
  s.grid = {0.5, 2.0};
  s.fixed = {0.8, 1.0, 0.2, 0.1, 0.0};
  s.outputs = {"sim_l2", "sim_l1"};
  s.sim_n = 60;
  s.sim_trials = 8;
  s.workers = 1;
  const auto a = mispar::sweep(s).table.to_csv();
  s.workers = 4;
  const bool same = mispar::sweep(s).table.to_csv() == a;

  std::vector<double> x, y;
  for (int k : {25, 100, 400}) {
    const auto t = sim::run_trials({0.8, 2.0, 0.2, 0.1, 0.0}, 100, k, sim::Penalty::l2, 42);
    x.push_back(std::log(k));
    y.push_back(std::log(t.ge_stderr));
  }
  const double e = ls_slope(x, y);
  return {same && std::fabs(e + 0.5) <= 0.1,
          std::string("identical CSV across runs/workers: ") + (same ? "yes" : "no") + "; stderr exponent " +
              fmt("%.4f", e) + " (-0.5 +- 0.1)"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<Outcome()>> all = {c1, c2, c3, c4, c5, c6, c7, c8, c9, c10};
  std::vector<int> which;
  if (argc > 1) {
    const int n = std::atoi(argv[1]);
    if (n < 1 || n > 10) {
      std::fprintf(stderr, "usage: acceptance [1-10]\n");
      return 1;
    }
    which.push_back(n);
  } else {
    for (int i = 1; i <= 10; ++i) which.push_back(i);
  }
  bool ok = true;
  for (int n : which) {
    Outcome o;
    try {
      o = all[n - 1]();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d: %s  %s\n", n, o.pass ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
    ok = ok && o.pass;
  }
  return ok ? 0 : 1;
}
