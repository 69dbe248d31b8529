#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "crossdecode/errors.hpp"
#include "crossdecode/stats.hpp"

namespace crossdecode {
namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min() / kEps;

// exp(-x + a ln x - lgamma(a)), the common prefactor of both expansions.
double prefactor(double a, double x) { return std::exp(-x + a * std::log(x) - std::lgamma(a)); }

// P(a, x) by the power series; converges quickly for x < a + 1.
double lower_series(double a, double x) {
  double ap = a;
  double term = 1.0 / a;
  double sum = term;
  for (int n = 0; n < kMaxIterations; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * kEps) return sum * prefactor(a, x);
  }
  throw NumericalError(fmt::format("incomplete gamma series did not converge (a={}, x={})", a, x));
}

// Q(a, x) by the continued fraction, modified Lentz; converges quickly for x >= a + 1.
double upper_fraction(double a, double x) {
  double b = x + 1.0 - a;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return prefactor(a, x) * h;
  }
  throw NumericalError(fmt::format("incomplete gamma continued fraction did not converge (a={}, x={})", a, x));
}

void check_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x))
    throw InputError(fmt::format("incomplete gamma needs a > 0 and x >= 0 (a={}, x={})", a, x));
}

}  // namespace

double gamma_p(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return x < a + 1.0 ? lower_series(a, x) : 1.0 - upper_fraction(a, x);
}

double gamma_q(double a, double x) {
  check_args(a, x);
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return x < a + 1.0 ? 1.0 - lower_series(a, x) : upper_fraction(a, x);
}

double chi2_sf(double x, int df) {
  if (df < 1) throw InputError(fmt::format("chi-square degrees of freedom must be >= 1, got {}", df));
  if (!(x >= 0.0)) throw InputError(fmt::format("chi-square statistic must be >= 0, got {}", x));
  return gamma_q(0.5 * df, 0.5 * x);
}

}  // namespace crossdecode
