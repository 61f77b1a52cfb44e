#include "dphase/quadrature.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dphase/errors.hpp"

namespace dphase {

namespace {
constexpr double kHalfPi = 1.5707963267948966;
constexpr double kTMax = 6.0;
}  // namespace

double tanh_sinh_sum(const EndpointIntegrand& f, double lower, double upper, int level) {
  const double half = 0.5 * (upper - lower);
  const double mid = 0.5 * (upper + lower);
  const double h = std::ldexp(1.0, -level);
  const long steps = static_cast<long>(std::ceil(kTMax / h));
  double sum = 0.0;
  for (long k = -steps; k <= steps; ++k) {
    const double t = k * h;
    const double u = kHalfPi * std::sinh(t);
    const double cu = std::cosh(u);
    const double weight = kHalfPi * std::cosh(t) / (cu * cu);
    // Distances to the endpoints without forming 1 - tanh(u).
    const double to_upper = 2.0 * half / (1.0 + std::exp(2.0 * u));
    const double from_lower = 2.0 * half / (1.0 + std::exp(-2.0 * u));
    if (to_upper <= 0.0 || from_lower <= 0.0) continue;
    const double x = mid + half * std::tanh(u);
    const double fx = f(x, from_lower, to_upper);
    if (!std::isfinite(fx)) continue;
    sum += weight * fx;
  }
  return half * h * sum;
}

QuadratureEstimate tanh_sinh(const EndpointIntegrand& f, double lower, double upper, double rel_tol,
                             int max_level) {
  double previous = tanh_sinh_sum(f, lower, upper, 0);
  for (int level = 1; level <= max_level; ++level) {
    const double current = tanh_sinh_sum(f, lower, upper, level);
    const double err = std::abs(current - previous);
    if (err <= rel_tol * std::abs(current)) return {current, err, level};
    previous = current;
  }
  throw NumericalError(fmt::format("tanh-sinh quadrature did not reach rel. tol {} by level {}", rel_tol,
                                   max_level));
}

}  // namespace dphase
