#pragma once

#include <memory>
#include <span>
#include <vector>

#include "dphase/mesh.hpp"

namespace dphase {

/// Weight a(x) sampled at quadrature points that share one point measure.
struct WeightField {
  std::vector<double> values;
  double point_measure = 0.0;
  double sup_norm = 0.0;
  double l1_norm = 0.0;

  /// Validates a >= 0 and finite, then fills the norms.
  static std::shared_ptr<const WeightField> make(std::vector<double> values, double point_measure);
  static std::shared_ptr<const WeightField> constant(std::size_t points, double value, double point_measure);

  std::size_t size() const { return values.size(); }
  double domain_measure() const { return point_measure * static_cast<double>(values.size()); }
};

using WeightPtr = std::shared_ptr<const WeightField>;

/// The double-phase integrand H(x,t) = t^p + a(x) t^q, optionally in its
/// scaled form (hH)(x,t) = t^{hp} + a(x) t^{hq}.
class DoublePhase {
 public:
  DoublePhase(double p, double q, WeightPtr weight, int scale = 1);

  /// Effective exponents (scale * base).
  double p() const { return scale_ * p_; }
  double q() const { return scale_ * q_; }
  double base_p() const { return p_; }
  double base_q() const { return q_; }
  int scale() const { return scale_; }

  const WeightField& weight() const { return *weight_; }
  const WeightPtr& weight_ptr() const { return weight_; }
  std::size_t points() const { return weight_->size(); }
  double point_measure() const { return weight_->point_measure; }
  double domain_measure() const { return weight_->domain_measure(); }

  double operator()(std::size_t point, double t) const;

  DoublePhase scaled(int h) const { return DoublePhase(p_, q_, weight_, h); }
  DoublePhase with_exponents(double p, double q) const { return DoublePhase(p, q, weight_, scale_); }
  /// Same exponents, weight sampled elsewhere (e.g. at nodes instead of cells).
  DoublePhase with_weight(WeightPtr weight) const { return DoublePhase(p_, q_, std::move(weight), scale_); }

 private:
  double p_;
  double q_;
  WeightPtr weight_;
  int scale_;
};

/// Spot check of H(x,2t) <= 2^q H(x,t) at t in {1e-3, 1, 1e3} per point.
bool satisfies_delta2(const DoublePhase& H);

enum class NormMethod { bisection, closed_form };

struct NormResult {
  double value = 0.0;
  NormMethod method = NormMethod::bisection;
  double modular_at_unit = 0.0;  // rho(u / value); 0 when value == 0
};

/// Which modular the Luxemburg norm is taken against.
enum class ModularKind {
  standard,  // rho_H
  rescaled,  // rho_H / (|Omega| + ||a||_1)
};

/// log of the two phase integrals: log int |u|^p and log int a |u|^q
/// (-inf when the integral vanishes).
struct PhaseMoments {
  double log_p;
  double log_q;
};

PhaseMoments phase_moments(std::span<const double> samples, const DoublePhase& H);

/// Quadrature of int H(x, |u|) dx over the sample points.
double modular(std::span<const double> samples, const DoublePhase& H);
double rescaled_modular(std::span<const double> samples, const DoublePhase& H);

/// Luxemburg norm by bracketing and bisection of gamma -> rho(u/gamma) = 1.
NormResult luxemburg_norm(std::span<const double> samples, const DoublePhase& H,
                          ModularKind kind = ModularKind::standard);

/// Closed-form norm ||u||_p Theta / W^{-1}(Theta^p). Throws FallbackRequired
/// when int a|u|^q = 0 and DomainError when p == q.
NormResult closed_form_norm(std::span<const double> samples, const DoublePhase& H);

/// Norm against the rescaled modular.
double rescaled_norm(std::span<const double> samples, const DoublePhase& H);

/// Unique t >= 0 with t^p + weight t^q = y.
double w_inverse(double y, double p, double q, double weight = 1.0);

/// Plain L^r norm over samples of equal measure.
double lp_norm(std::span<const double> samples, double r, double point_measure);
/// (int a |u|^q)^{1/q}.
double weighted_lq_norm(std::span<const double> samples, const DoublePhase& H);

/// Embedding constant C such that ||u||_H <= C ||u||_{Htilde}, for
/// p <= p~ < 2p and q <= q~ < 2q. Returns 1 for identical exponents.
double embedding_constant(const DoublePhase& Htilde, const DoublePhase& H, double omega_measure, double a_l1);

/// Field-level conveniences: cell-averaged samples of u and per-cell |grad u|.
double modular(const Field& u, const DoublePhase& H);
NormResult luxemburg_norm(const Field& u, const DoublePhase& H, ModularKind kind = ModularKind::standard);
NormResult closed_form_norm(const Field& u, const DoublePhase& H);
double rescaled_norm(const Field& u, const DoublePhase& H);
double gradient_norm(const Field& u, const DoublePhase& H, ModularKind kind = ModularKind::standard);

struct SandwichRatios {
  double lower;  // (1/w) ||grad u||_p / ||u||_q
  double mid;    // ||grad u||_H / ||u||_H
  double upper;  // w ||grad u||_q / ||u||_p
  double w;      // 1 + ||a||_inf + |Omega|
};

/// Two-sided bound on the Rayleigh quotient. Throws DomainError for u == 0
/// and ContractError if the computed triple is not ordered.
SandwichRatios sandwich_ratios(const Field& u, const DoublePhase& H);

/// int_0^s H^{-1}(x_point, tau) / tau^{(n+1)/n} dtau by tanh-sinh quadrature.
/// Requires p < n.
double sobolev_conjugate_inverse(const DoublePhase& H, std::size_t point, double s, int n);

}  // namespace dphase
