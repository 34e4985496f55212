#pragma once

#include <functional>

namespace mispar::numerics {

using ScalarFn = std::function<double(double)>;

double erf(double x);
double erfc(double x);

/// Inverse error function on (-1, 1). Throws DomainError for |y| >= 1.
double erf_inv(double y);

/// Standard normal density and upper tail.
double normal_pdf(double x);
double normal_sf(double x);

/// Search interval and stopping rule for brent_root.
///
/// The solve stops when |f(x)| <= tol_abs or when the bracket has shrunk to
/// tol_rel * |x| (plus a few ulps, so roots at the origin terminate).
struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
  double tol_abs = 1e-300;
  double tol_rel = 4e-16;
  int max_iter = 300;
};

/// Brent's method (inverse quadratic interpolation with bisection fallback).
/// Requires f(lo) * f(hi) <= 0, otherwise NoSignChange.
double brent_root(const ScalarFn& f, const Bracket& bracket);

enum class EndpointWeight { none, sqrt_both_ends };

struct QuadratureSpec {
  double a = 0.0;
  double b = 1.0;
  int panels = 512;
  EndpointWeight endpoint_weight = EndpointWeight::none;
};

/// Composite 8-point Gauss-Legendre on `panels` equal panels.
///
/// With sqrt_both_ends the rule is applied in theta after x = a + (b-a) sin^2(theta),
/// which removes square-root behaviour at both endpoints. Throws NonFinite if f
/// returns inf/nan at a node.
double integrate(const ScalarFn& f, const QuadratureSpec& spec);

}  // namespace mispar::numerics
