#include "dphase/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dphase/errors.hpp"
#include "dphase/quadrature.hpp"

namespace dphase {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double power(double x, double e) { return e == 2.0 ? x * x : std::pow(x, e); }

inline double log_add(double a, double b) {
  if (a == kNegInf) return b;
  if (b == kNegInf) return a;
  const double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

void check_samples(std::span<const double> samples, const DoublePhase& H) {
  if (samples.size() != H.points()) {
    throw ShapeError(fmt::format("{} samples but the weight has {} quadrature points", samples.size(),
                                 H.points()));
  }
}

// log t with t^p + e^{log_weight} t^q = e^{log_y}. Bisection on log t until
// the bracket is narrower than 1e-3, then Newton (the left side is convex and
// increasing in log t, so Newton from the right end never overshoots).
double w_inverse_log(double log_y, double p, double q, double log_weight) {
  if (log_weight == kNegInf) return log_y / p;
  auto g = [&](double x) { return log_add(p * x, log_weight + q * x) - log_y; };
  const double log_one_plus_w = log_add(0.0, log_weight);
  double hi = std::min(log_y / p, (log_y - log_weight) / q);
  double lo = std::min((log_y - log_one_plus_w) / p, (log_y - log_one_plus_w) / q);
  if (lo > hi) std::swap(lo, hi);
  int iterations = 0;
  while (hi - lo >= 1e-3 && iterations < 60) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
    ++iterations;
  }
  double x = hi;
  while (iterations < 60) {
    const double a = p * x;
    const double b = log_weight + q * x;
    const double total = log_add(a, b);
    const double slope = p * std::exp(a - total) + q * std::exp(b - total);
    const double step = (total - log_y) / slope;
    x -= step;
    ++iterations;
    if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(x))) break;
  }
  return x;
}

// s = log(gamma) solving log(e^{Lp - p s} + e^{Lq - q s}) = target.
double solve_log_scale(const PhaseMoments& m, double p, double q, double target, double initial_log_guess) {
  if (m.log_p == kNegInf && m.log_q == kNegInf) return kNegInf;
  if (m.log_q == kNegInf) return (m.log_p - target) / p;
  if (m.log_p == kNegInf) return (m.log_q - target) / q;
  auto g = [&](double s) { return log_add(m.log_p - p * s, m.log_q - q * s) - target; };
  const double step = std::log(2.0);
  double lo = initial_log_guess;
  double hi = initial_log_guess;
  int expansions = 0;
  while (g(lo) < 0.0) {
    lo -= step;
    if (++expansions > 4000) throw NumericalError("Luxemburg norm bracket not found (shrink)");
  }
  while (g(hi) > 0.0) {
    hi += step;
    if (++expansions > 4000) throw NumericalError("Luxemburg norm bracket not found (expand)");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double initial_log_guess(const PhaseMoments& m, const DoublePhase& H) {
  // max(||u||_p, ||u||_{q,a} (1 + ||a||_inf))
  double guess = m.log_p / H.p();
  if (m.log_q != kNegInf) guess = std::max(guess, m.log_q / H.q() + std::log1p(H.weight().sup_norm));
  return guess;
}

double log_rescale_target(const DoublePhase& H, ModularKind kind) {
  if (kind == ModularKind::standard) return 0.0;
  return std::log(H.domain_measure() + H.weight().l1_norm);
}

}  // namespace

WeightPtr WeightField::make(std::vector<double> values, double point_measure) {
  if (!(point_measure > 0.0)) throw DomainError("weight point measure must be positive");
  auto w = std::make_shared<WeightField>();
  double sup = 0.0;
  double sum = 0.0;
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError(fmt::format("weight value {} is not >= 0", v));
    sup = std::max(sup, v);
    sum += v;
  }
  w->values = std::move(values);
  w->point_measure = point_measure;
  w->sup_norm = sup;
  w->l1_norm = sum * point_measure;
  return w;
}

WeightPtr WeightField::constant(std::size_t points, double value, double point_measure) {
  return make(std::vector<double>(points, value), point_measure);
}

DoublePhase::DoublePhase(double p, double q, WeightPtr weight, int scale)
    : p_(p), q_(q), weight_(std::move(weight)), scale_(scale) {
  if (!(p > 1.0) || !(q >= p) || !std::isfinite(q)) {
    throw DomainError(fmt::format("exponents must satisfy 1 < p <= q (got p={}, q={})", p, q));
  }
  if (!weight_) throw DomainError("double-phase integrand needs a weight");
  if (scale < 1) throw DomainError("scale h must be a positive integer");
}

double DoublePhase::operator()(std::size_t point, double t) const {
  return power(t, p()) + weight_->values[point] * power(t, q());
}

bool satisfies_delta2(const DoublePhase& H) {
  const double factor = std::pow(2.0, H.q());
  for (std::size_t i = 0; i < H.points(); ++i) {
    for (double t : {1e-3, 1.0, 1e3}) {
      const double lhs = H(i, 2.0 * t);
      const double rhs = factor * H(i, t);
      if (std::isfinite(rhs) && lhs > rhs * (1.0 + 1e-12)) return false;
    }
  }
  return true;
}

PhaseMoments phase_moments(std::span<const double> samples, const DoublePhase& H) {
  check_samples(samples, H);
  double top = 0.0;
  for (double v : samples) top = std::max(top, std::abs(v));
  if (top == 0.0) return {kNegInf, kNegInf};
  const double p = H.p();
  const double q = H.q();
  const auto& a = H.weight().values;
  const double inv = 1.0 / top;
  double sp = 0.0;
  double sq = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double r = std::abs(samples[i]) * inv;
    if (r == 0.0) continue;
    sp += power(r, p);
    if (a[i] > 0.0) sq += a[i] * power(r, q);
  }
  const double lm = std::log(H.point_measure());
  const double lt = std::log(top);
  return {std::log(sp) + lm + p * lt, sq > 0.0 ? std::log(sq) + lm + q * lt : kNegInf};
}

double modular(std::span<const double> samples, const DoublePhase& H) {
  check_samples(samples, H);
  const double p = H.p();
  const double q = H.q();
  const auto& a = H.weight().values;
  double sum = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = std::abs(samples[i]);
    sum += power(t, p) + a[i] * power(t, q);
  }
  return sum * H.point_measure();
}

double rescaled_modular(std::span<const double> samples, const DoublePhase& H) {
  return modular(samples, H) / (H.domain_measure() + H.weight().l1_norm);
}

NormResult luxemburg_norm(std::span<const double> samples, const DoublePhase& H, ModularKind kind) {
  const PhaseMoments m = phase_moments(samples, H);
  NormResult result;
  result.method = NormMethod::bisection;
  if (m.log_p == kNegInf && m.log_q == kNegInf) return result;
  const double target = log_rescale_target(H, kind);
  const double s = solve_log_scale(m, H.p(), H.q(), target, initial_log_guess(m, H));
  result.value = std::exp(s);
  if (!std::isfinite(result.value) || result.value <= 0.0) {
    throw NumericalError("Luxemburg norm outside the representable range");
  }
  // Direct evaluation of the modular at u/gamma, independent of the moments.
  std::vector<double> unit(samples.begin(), samples.end());
  for (double& v : unit) v /= result.value;
  result.modular_at_unit = kind == ModularKind::standard ? modular(unit, H) : rescaled_modular(unit, H);
  return result;
}

NormResult closed_form_norm(std::span<const double> samples, const DoublePhase& H) {
  if (H.p() == H.q()) throw DomainError("closed-form norm undefined for p == q");
  const PhaseMoments m = phase_moments(samples, H);
  if (m.log_q == kNegInf) {
    throw FallbackRequired("int a|u|^q vanishes; closed form needs the L^p fallback");
  }
  const double p = H.p();
  const double q = H.q();
  const double log_theta = q / (q - p) * (m.log_q / q - m.log_p / p);
  const double log_w_inv = w_inverse_log(p * log_theta, p, q, 0.0);
  NormResult result;
  result.method = NormMethod::closed_form;
  result.value = std::exp(m.log_p / p + log_theta - log_w_inv);
  std::vector<double> unit(samples.begin(), samples.end());
  for (double& v : unit) v /= result.value;
  result.modular_at_unit = modular(unit, H);
  return result;
}

double rescaled_norm(std::span<const double> samples, const DoublePhase& H) {
  return luxemburg_norm(samples, H, ModularKind::rescaled).value;
}

double w_inverse(double y, double p, double q, double weight) {
  if (!(y >= 0.0)) throw DomainError(fmt::format("W^-1 needs y >= 0 (got {})", y));
  if (!(p > 1.0) || !(q >= p)) throw DomainError("W^-1 needs 1 < p <= q");
  if (weight < 0.0) throw DomainError("W^-1 needs a nonnegative weight");
  if (y == 0.0) return 0.0;
  const double lw = weight == 0.0 ? kNegInf : std::log(weight);
  return std::exp(w_inverse_log(std::log(y), p, q, lw));
}

double lp_norm(std::span<const double> samples, double r, double point_measure) {
  double top = 0.0;
  for (double v : samples) top = std::max(top, std::abs(v));
  if (top == 0.0) return 0.0;
  double sum = 0.0;
  for (double v : samples) sum += power(std::abs(v) / top, r);
  return top * std::pow(sum * point_measure, 1.0 / r);
}

double weighted_lq_norm(std::span<const double> samples, const DoublePhase& H) {
  const PhaseMoments m = phase_moments(samples, H);
  return m.log_q == kNegInf ? 0.0 : std::exp(m.log_q / H.q());
}

double embedding_constant(const DoublePhase& Htilde, const DoublePhase& H, double omega_measure,
                          double a_l1) {
  const double p = H.p(), q = H.q();
  const double pt = Htilde.p(), qt = Htilde.q();
  if (!(p <= pt && pt < 2.0 * p && q <= qt && qt < 2.0 * q)) {
    throw DomainError(fmt::format("embedding needs p <= p~ < 2p and q <= q~ < 2q (p={}, p~={}, q={}, q~={})",
                                  p, pt, q, qt));
  }
  if (pt == p && qt == q) return 1.0;
  const double eps = qt / q <= pt / p ? (pt - p) / p : (qt - q) / q;
  return eps * (omega_measure + a_l1) + std::pow(eps, -eps);
}

double modular(const Field& u, const DoublePhase& H) { return modular(cell_values(u), H); }

NormResult luxemburg_norm(const Field& u, const DoublePhase& H, ModularKind kind) {
  return luxemburg_norm(cell_values(u), H, kind);
}

NormResult closed_form_norm(const Field& u, const DoublePhase& H) { return closed_form_norm(cell_values(u), H); }

double rescaled_norm(const Field& u, const DoublePhase& H) { return rescaled_norm(cell_values(u), H); }

double gradient_norm(const Field& u, const DoublePhase& H, ModularKind kind) {
  return luxemburg_norm(gradient(u).magnitude, H, kind).value;
}

SandwichRatios sandwich_ratios(const Field& u, const DoublePhase& H) {
  const auto cells = cell_values(u);
  const auto grad = gradient(u);
  const double meas = H.point_measure();
  const double w = 1.0 + H.weight().sup_norm + H.domain_measure();
  const double u_p = lp_norm(cells, H.p(), meas);
  const double u_q = lp_norm(cells, H.q(), meas);
  if (u_p == 0.0) throw DomainError("sandwich ratios need a nonzero field");
  const double g_p = lp_norm(grad.magnitude, H.p(), meas);
  const double g_q = lp_norm(grad.magnitude, H.q(), meas);
  const double mid = luxemburg_norm(grad.magnitude, H).value / luxemburg_norm(cells, H).value;
  SandwichRatios r{g_p / u_q / w, mid, w * g_q / u_p, w};
  const double slack = 1e-12;
  if (r.lower > r.mid * (1.0 + slack) || r.mid > r.upper * (1.0 + slack)) {
    throw ContractError(fmt::format("sandwich violated: {} <= {} <= {}", r.lower, r.mid, r.upper));
  }
  return r;
}

double sobolev_conjugate_inverse(const DoublePhase& H, std::size_t point, double s, int n) {
  if (n < 1) throw DomainError("dimension must be positive");
  if (!(H.p() < n)) throw DomainError(fmt::format("Sobolev conjugate needs p < n (p={}, n={})", H.p(), n));
  if (point >= H.points()) throw ShapeError("quadrature point index out of range");
  if (!(s >= 0.0)) throw DomainError("upper limit must be nonnegative");
  if (s == 0.0) return 0.0;
  const double a = H.weight().values[point];
  const double lw = a == 0.0 ? kNegInf : std::log(a);
  const double exponent = (n + 1.0) / n;
  const double p = H.p(), q = H.q();
  auto integrand = [&](double, double tau, double) {
    const double lt = std::log(tau);
    return std::exp(w_inverse_log(lt, p, q, lw) - exponent * lt);
  };
  return tanh_sinh(integrand, 0.0, s, 1e-13, 14).value;
}

}  // namespace dphase
