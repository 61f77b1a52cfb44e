#pragma once

#include <functional>

namespace dphase {

/// Integrand evaluated with the distances to both endpoints, so that
/// endpoint singularities can be computed without cancellation.
using EndpointIntegrand = std::function<double(double x, double from_lower, double to_upper)>;

struct QuadratureEstimate {
  double value = 0.0;
  double error = 0.0;  // |I_level - I_{level-1}|
  int level = 0;
};

/// Tanh-sinh (double exponential) sum at step 2^-level.
double tanh_sinh_sum(const EndpointIntegrand& f, double lower, double upper, int level);

/// Refines level by level until two consecutive levels agree to `rel_tol`;
/// throws NumericalError when `max_level` is reached first.
QuadratureEstimate tanh_sinh(const EndpointIntegrand& f, double lower, double upper, double rel_tol,
                             int max_level = 12);

}  // namespace dphase
