#include <cmath>
#include <vector>

#include "doctest.h"
#include "mispar/ridge.hpp"

using mispar::ModelConfig;
namespace rg = mispar::ridge;

namespace {

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) sxy += (x[i] - mx) * (y[i] - my), sxx += (x[i] - mx) * (x[i] - mx);
  return sxy / sxx;
}

}  // namespace

TEST_SUITE("ridge") {

TEST_CASE("mp_average normalization and point mass") {
  for (double mu : {0.2, 0.9, 1.0, 1.5, 4.0})
    CHECK(rg::mp_average([](double) { return 1.0; }, mu, 0.8) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rg::mp_average([](double x) { return x; }, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rg::mp_support(4.0).point_mass_at_zero == doctest::Approx(0.75));
  CHECK(rg::mp_average([](double x) { return x == 0.0 ? 1.0 : 0.0; }, 4.0, 1.0) == doctest::Approx(0.75));
  const auto s = rg::mp_support(0.25);
  CHECK(s.mu_minus == doctest::Approx(0.25));
  CHECK(s.mu_plus == doctest::Approx(2.25));
}

TEST_CASE("mp quadrature converges under panel doubling") {
  for (double mu : {0.5, 0.95, 1.05, 2.0})
    for (double lam : {1e-3, 0.1, 1.0}) {
      const double alpha = 0.8;
      auto f = [lam](double z) { return lam * lam / ((z + lam) * (z + lam)); };
      const int panels = rg::mp_panels(mu, alpha, lam);
      const double a = rg::mp_average(f, mu, alpha, panels);
      const double b = rg::mp_average(f, mu, alpha, 2 * panels);
      CHECK(std::fabs(a - b) < 1e-8);
    }
}

TEST_CASE("heavy penalty sends TE and GE to 1") {
  for (double mu : {0.5, 2.0}) {
    const ModelConfig c{0.8, mu, 0.2, 0.1, 1e6};
    const auto r = rg::risk_l2(c);
    CHECK(std::fabs(r.te - 1.0) < 1e-3);
    CHECK(std::fabs(r.ge - 1.0) < 1e-3);
    const auto o = rg::risk_l2_oracle(c);
    CHECK(std::fabs(o.te - 1.0) < 1e-3);
    CHECK(std::fabs(o.ge - 1.0) < 1e-3);
  }
}

TEST_CASE("closed form matches the quadrature oracle") {
  for (double mu : {0.5, 1.0, 2.5})
    for (double alpha : {0.8, 2.0}) {
      const ModelConfig c{alpha, mu, 0.2, 0.1, 0.1};
      const auto r = rg::risk_l2(c);
      const auto o = rg::risk_l2_oracle(c);
      CHECK(std::isfinite(r.ge));
      CHECK(std::fabs(r.te - o.te) <= 1e-7);
      CHECK(std::fabs(r.ge - o.ge) <= 1e-7);
    }
}

TEST_CASE("interpolating limit examples") {
  CHECK(rg::risk_l2_interp({0.8, 0.5, 0.2, 0.1, 0.0}).ge == doctest::Approx(0.13 / (0.21 * 0.5)).epsilon(1e-12));
  CHECK(rg::risk_l2_interp({2.0, 0.7, 0.2, 0.0, 0.0}).ge == doctest::Approx(0.0));
  CHECK(rg::risk_l2_interp({0.8, 2.0, 0.2, 0.0, 0.0}).ge == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rg::risk_l2_interp({0.8, 1e8, 0.2, 0.1, 0.0}).ge == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rg::risk_l2_interp({0.8, 1.0, 0.2, 0.1, 0.0}).ge == mispar::kDiverged);
  CHECK(rg::risk_l2_any({0.8, 1.0, 0.2, 0.1, 0.1}).ge < 10.0);
}

TEST_CASE("training error vanishes once the data are interpolated") {
  for (double mu : {1.0, 1.3, 2.0, 10.0}) CHECK(rg::risk_l2_interp({0.8, mu, 0.2, 0.1, 0.0}).te == 0.0);
}

TEST_CASE("small lambda matches the interpolating limit") {
  for (double mu = 0.1; mu <= 4.0; mu += 0.05) {
    if (std::fabs(mu - 1.0) < 0.05) continue;
    const auto a = rg::risk_l2({0.8, mu, 0.2, 0.1, 1e-8});
    const auto b = rg::risk_l2_interp({0.8, mu, 0.2, 0.1, 0.0});
    CHECK(std::fabs(a.te - b.te) < 1e-4);
    CHECK(std::fabs(a.ge - b.ge) < 1e-4);
  }
}

TEST_CASE("regime formulas join continuously at mu alpha = 1") {
  for (double lam : {0.0, 0.01, 1.0})
    for (double alpha : {0.5, 2.0}) {
      const double mu = 1.0 / alpha;
      const auto lo = rg::risk_l2_any({alpha, mu * (1 - 1e-13), 0.2, 0.1, lam});
      const auto at = rg::risk_l2_any({alpha, mu, 0.2, 0.1, lam});
      const auto hi = rg::risk_l2_any({alpha, mu * (1 + 1e-13), 0.2, 0.1, lam});
      CHECK(std::fabs(lo.ge - at.ge) < 1e-10);
      CHECK(std::fabs(hi.ge - at.ge) < 1e-10);
      CHECK(std::fabs(lo.te - hi.te) < 1e-10);
    }
}

TEST_CASE("TE is non-decreasing in lambda") {
  for (double mu : {0.3, 0.9, 1.0, 1.7, 3.0}) {
    double prev = rg::risk_l2_any({0.8, mu, 0.2, 0.1, 0.0}).te;
    for (double lam = 1e-4; lam < 1e4; lam *= 1.5) {
      const double te = rg::risk_l2({0.8, mu, 0.2, 0.1, lam}).te;
      CHECK(te >= prev - 1e-12);
      prev = te;
    }
  }
}

TEST_CASE("GE |1 - mu| tends to a constant at the peak") {
  for (double side : {-1.0, 1.0}) {
    std::vector<double> lx, ly;
    for (double d = 1e-5; d <= 1e-4; d *= 1.2) {
      lx.push_back(std::log(d));
      ly.push_back(std::log(rg::risk_l2_interp({0.8, 1.0 + side * d, 0.2, 0.1, 0.0}).ge));
    }
    CHECK(ls_slope(lx, ly) == doctest::Approx(-1.0).epsilon(0.02));
  }
}

TEST_CASE("small mu: GE approaches sigma_eff^2 / (sigma^2 + rho) linearly") {
  auto gap = [](double mu) {
    const ModelConfig c{0.8, mu, 0.2, 0.1, 0.0};
    return rg::risk_l2_interp(c).ge - mispar::sigma_eff_sq(c) / c.signal_power();
  };
  CHECK(std::fabs(gap(1e-4)) < 1e-3);
  CHECK(gap(2e-4) / gap(1e-4) == doctest::Approx(2.0).epsilon(1e-3));
}

}  // TEST_SUITE
