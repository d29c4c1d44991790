#include <cmath>
#include <numbers>

#include "critpatch/errors.hpp"
#include "critpatch/spectral.hpp"

namespace critpatch {

double bessel_j(double order, double x) {
  if (!(order >= -0.5)) throw ParameterError("Bessel order must be at least -1/2");
  if (!(x > 0.0) || x > 12.0) throw ParameterError("Bessel series evaluated outside (0, 12]");

  const double half = 0.5 * x;
  const double q = half * half;
  double term = std::pow(half, order) / std::tgamma(order + 1.0);
  double sum = term;
  for (int k = 0; k < 200; ++k) {
    term *= -q / ((k + 1.0) * (k + 1.0 + order));
    sum += term;
    if (k > x && std::abs(term) <= 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double bessel_first_zero(double order) {
  if (!(order >= -0.5) || order > 5.0) {
    throw ParameterError("first Bessel zero supported for orders in [-1/2, 5]");
  }
  const double lo_end = std::max(order, 1e-6);
  const double hi_end = order + std::numbers::pi + 2.0;
  constexpr double kScanStep = 0.05;

  double a = lo_end;
  double fa = bessel_j(order, a);
  while (a < hi_end) {
    const double b = std::min(a + kScanStep, hi_end);
    const double fb = bessel_j(order, b);
    if ((fa > 0.0) != (fb > 0.0) || fb == 0.0) {
      double lo = a;
      double hi = b;
      double flo = fa;
      while (hi - lo > 1e-15 * hi) {
        const double mid = 0.5 * (lo + hi);
        const double fm = bessel_j(order, mid);
        if (fm == 0.0) return mid;
        if ((fm > 0.0) == (flo > 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      return 0.5 * (lo + hi);
    }
    a = b;
    fa = fb;
  }
  throw NumericError("no sign change of J_m found in (m, m + pi + 2]");
}

double ball_bessel_zero(int n) {
  if (n < 1) throw ParameterError("dimension must be at least 1");
  return bessel_first_zero(n / 2.0 - 1.0);
}

}  // namespace critpatch
