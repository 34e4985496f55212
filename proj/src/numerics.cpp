#include "mispar/numerics.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/special_functions/erf.hpp>

#include "mispar/errors.hpp"

namespace mispar::numerics {

double erf(double x) { return std::erf(x); }

double erfc(double x) { return std::erfc(x); }

double erf_inv(double y) {
  if (!(std::fabs(y) < 1.0)) {
    std::ostringstream os;
    os << "erf_inv: argument " << y << " outside (-1, 1)";
    throw DomainError(os.str());
  }
  return boost::math::erf_inv(y);
}

double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_sf(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double brent_root(const ScalarFn& f, const Bracket& br) {
  if (!(br.lo < br.hi)) throw DomainError("brent_root: bracket requires lo < hi");
  if (!(br.tol_abs > 0.0) || br.max_iter < 1)
    throw DomainError("brent_root: tol_abs must be > 0 and max_iter >= 1");

  double a = br.lo, b = br.hi;
  double fa = f(a), fb = f(b);
  if (std::isnan(fa) || std::isnan(fb)) throw NonFinite("brent_root: f is nan at a bracket end");
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    std::ostringstream os;
    os << "brent_root: no sign change on [" << a << ", " << b << "], f = (" << fa << ", " << fb
       << ")";
    throw NoSignChange(os.str());
  }

  constexpr double eps = std::numeric_limits<double>::epsilon();
  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int iter = 0; iter < br.max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::fabs(fc) < std::fabs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::fabs(b) + 0.5 * br.tol_rel * std::fabs(b) +
                       4.0 * std::numeric_limits<double>::min();
    const double m = 0.5 * (c - b);
    if (std::fabs(fb) <= br.tol_abs || std::fabs(m) <= tol) return b;

    if (std::fabs(e) >= tol && std::fabs(fa) > std::fabs(fb)) {
      double p, q;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        const double qa = fa / fc, r = fb / fc;
        p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
        q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0)
        q = -q;
      else
        p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::fabs(tol * q), std::fabs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::fabs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
    if (std::isnan(fb)) throw NonFinite("brent_root: f returned nan");
  }
  std::ostringstream os;
  os << "brent_root: " << br.max_iter << " iterations exceeded near x = " << b << " (f = " << fb
     << ")";
  throw MaxIterExceeded(os.str());
}

namespace {

// 8-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGlNodes = {0.1834346424956498, 0.5255324099163290,
                                            0.7966664774136267, 0.9602898564975363};
constexpr std::array<double, 4> kGlWeights = {0.3626837833783620, 0.3137066458778873,
                                              0.2223810344533745, 0.1012285362903763};

template <class G>
double composite_gauss(const G& g, double lo, double hi, int panels) {
  const double h = (hi - lo) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double mid = lo + (k + 0.5) * h;
    double acc = 0.0;
    for (std::size_t i = 0; i < kGlNodes.size(); ++i) {
      const double dx = 0.5 * h * kGlNodes[i];
      acc += kGlWeights[i] * (g(mid - dx) + g(mid + dx));
    }
    total += 0.5 * h * acc;
  }
  return total;
}

}  // namespace

double integrate(const ScalarFn& f, const QuadratureSpec& spec) {
  if (!(spec.a < spec.b)) throw DomainError("integrate: requires a < b");
  if (spec.panels < 8) throw DomainError("integrate: panels must be >= 8");

  auto checked = [&](double x) {
    const double v = f(x);
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "integrate: integrand is " << v << " at x = " << x;
      throw NonFinite(os.str());
    }
    return v;
  };

  if (spec.endpoint_weight == EndpointWeight::none)
    return composite_gauss(checked, spec.a, spec.b, spec.panels);

  const double width = spec.b - spec.a;
  auto in_theta = [&](double theta) {
    const double s = std::sin(theta);
    const double x = spec.a + width * s * s;
    return checked(x) * width * std::sin(2.0 * theta);
  };
  return composite_gauss(in_theta, 0.0, 0.5 * std::numbers::pi, spec.panels);
}

}  // namespace mispar::numerics
