#include "dphase/oracle1d.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dphase/errors.hpp"
#include "dphase/quadrature.hpp"

namespace dphase {

namespace {

// (1 - s^p)^{-1/p} with 1 - s computed from the distance to the upper end.
double arc_integrand(double p, double s, double to_upper) {
  const double one_minus = s < 0.5 ? 1.0 - std::pow(s, p) : -std::expm1(p * std::log1p(-to_upper));
  return std::pow(one_minus, -1.0 / p);
}

double bare_integral(double p, int level) {
  return tanh_sinh_sum([p](double s, double, double to_upper) { return arc_integrand(p, s, to_upper); }, 0.0,
                       1.0, level);
}

// int_0^y (1 - s^p)^{-1/p} ds for y in [0, 1].
double arc_partial(double p, double y, double full) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return full;
  auto head = [p](double s, double, double) { return std::pow(1.0 - std::pow(s, p), -1.0 / p); };
  if (y <= 0.5) return tanh_sinh(head, 0.0, y, 1e-13, 12).value;
  // Tail [y, 1] carries the singularity; its upper endpoint distance is exact.
  auto tail = [p](double, double, double to_upper) {
    return std::pow(-std::expm1(p * std::log1p(-to_upper)), -1.0 / p);
  };
  return full - tanh_sinh(tail, y, 1.0, 1e-13, 12).value;
}

inline double signed_power(double s, double e) {
  const double m = std::pow(std::abs(s), e);
  return s < 0.0 ? -m : m;
}

struct Shot {
  double u;
  double v;
};

class QuasilinearSystem {
 public:
  QuasilinearSystem(double p, double lambda) : p_(p), pc_(p / (p - 1.0)), lambda_(lambda) {}

  Shot operator()(const Shot& y) const {
    return {signed_power(y.v, pc_ - 1.0), -lambda_ * signed_power(y.u, p_ - 1.0)};
  }

 private:
  double p_;
  double pc_;
  double lambda_;
};

// Adaptive Dormand-Prince 5(4). `on_step(x, y)` sees every accepted point.
template <class OnStep>
Shot integrate(const QuasilinearSystem& f, Shot y, double x0, double x1, double max_step, double tol,
               OnStep&& on_step) {
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;
  double x = x0;
  double h = std::min(max_step, (x1 - x0));
  int rejected = 0;
  Shot k1 = f(y);
  while (x < x1) {
    if (x + h > x1) h = x1 - x;
    auto add = [&](std::initializer_list<std::pair<double, const Shot*>> terms) {
      Shot out = y;
      for (const auto& [c, k] : terms) {
        out.u += h * c * k->u;
        out.v += h * c * k->v;
      }
      return out;
    };
    const Shot k2 = f(add({{a21, &k1}}));
    const Shot k3 = f(add({{a31, &k1}, {a32, &k2}}));
    const Shot k4 = f(add({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const Shot k5 = f(add({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const Shot k6 = f(add({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
    const Shot next = add({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const Shot k7 = f(next);
    const double eu = h * (e1 * k1.u + e3 * k3.u + e4 * k4.u + e5 * k5.u + e6 * k6.u + e7 * k7.u);
    const double ev = h * (e1 * k1.v + e3 * k3.v + e4 * k4.v + e5 * k5.v + e6 * k6.v + e7 * k7.v);
    const double su = tol + tol * std::max(std::abs(y.u), std::abs(next.u));
    const double sv = tol + tol * std::max(std::abs(y.v), std::abs(next.v));
    const double err = std::max(std::abs(eu) / su, std::abs(ev) / sv);
    if (err <= 1.0 || h <= 1e-14 * (x1 - x0)) {
      x = (x + h >= x1) ? x1 : x + h;
      y = next;
      k1 = k7;
      on_step(x, y);
      const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      h = std::min(max_step, h * grow);
    } else {
      h *= std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
      if (++rejected > 1000000) throw NumericalError("shooting integrator step size collapsed");
    }
  }
  return y;
}

constexpr double kShootTol = 1e-10;

// Number of sign changes of u on (a, b] for the shot with parameter lambda.
int count_sign_changes(double p, double lambda, double a, double b) {
  const QuasilinearSystem f(p, lambda);
  int changes = 0;
  double previous = 0.0;
  integrate(f, {0.0, 1.0}, a, b, (b - a) / 256.0, kShootTol, [&](double, const Shot& y) {
    if (y.u == 0.0) return;
    if (previous != 0.0 && (previous < 0.0) != (y.u < 0.0)) ++changes;
    previous = y.u;
  });
  return changes;
}

}  // namespace

PiP pi_p_at_level(double p, int level) {
  if (!(p > 1.0)) throw DomainError(fmt::format("pi_p needs p > 1 (got {})", p));
  PiP out;
  out.p = p;
  out.level = level;
  out.integral = bare_integral(p, level);
  out.error = level > 0 ? std::abs(out.integral - bare_integral(p, level - 1)) : std::abs(out.integral);
  out.value = 2.0 * std::pow(p - 1.0, 1.0 / p) * out.integral;
  return out;
}

PiP pi_p(double p) {
  if (!(p > 1.0)) throw DomainError(fmt::format("pi_p needs p > 1 (got {})", p));
  const auto est = tanh_sinh([p](double s, double, double to_upper) { return arc_integrand(p, s, to_upper); },
                             0.0, 1.0, 1e-14, 12);
  PiP out;
  out.p = p;
  out.integral = est.value;
  out.error = est.error;
  out.level = est.level;
  out.value = 2.0 * std::pow(p - 1.0, 1.0 / p) * out.integral;
  return out;
}

Field sinp_profile(double p, MeshPtr mesh) {
  if (!(p > 1.0)) throw DomainError("sin_p profile needs p > 1");
  if (mesh->dim() != 1) throw GeometryError("sin_p profile lives on an interval mesh");
  const double a = mesh->lower().x;
  const double length = mesh->upper().x - a;
  const double full = pi_p(p).integral;
  Field u = Field::zeros(mesh);
  for (int n = 0; n < mesh->num_nodes(); ++n) {
    const auto [i, j] = mesh->node_grid_index(n);
    (void)j;
    // Index-based reflection keeps the profile symmetric to rounding.
    const int mirrored = std::min(i, mesh->nx() - i);
    const double z = 2.0 * full * (mirrored * mesh->hx()) / length;
    // Invert F(y) = z with safeguarded Newton; F' = (1 - y^p)^{-1/p} >= 1.
    double lo = 0.0, hi = 1.0;
    double y = std::min(z, 1.0);
    for (int it = 0; it < 100; ++it) {
      const double g = arc_partial(p, y, full) - z;
      if (g > 0.0) {
        hi = y;
      } else {
        lo = y;
      }
      if (g == 0.0) break;
      const double slope = std::pow(1.0 - std::pow(y, p), -1.0 / p);
      double next = y - g / slope;
      if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
      const bool done = std::abs(next - y) <= 1e-15 || hi - lo < 1e-15;
      y = next;
      if (done) break;
    }
    u.values[n] = y;
  }
  return u;
}

ShootingEigenpair plap_shooting(double p, double a, double b, int m, int profile_cells) {
  if (!(p > 1.0)) throw DomainError("shooting needs p > 1");
  if (m < 1) throw DomainError("mode index must be >= 1");
  if (!(b > a)) throw DomainError("shooting interval must have b > a");
  double lo = 0.0;
  double hi = 1.0;
  int doublings = 0;
  while (count_sign_changes(p, hi, a, b) < m) {
    lo = hi;
    hi *= 2.0;
    if (++doublings > 200) {
      throw NumericalError(fmt::format("shooting bracket exhausted at [{}, {}]", lo, hi));
    }
  }
  int steps = 0;
  while ((hi - lo) > 1e-10 * hi) {
    const double mid = 0.5 * (lo + hi);
    if (count_sign_changes(p, mid, a, b) >= m) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (++steps > 400) throw NumericalError(fmt::format("shooting bisection stalled at [{}, {}]", lo, hi));
  }

  ShootingEigenpair out;
  out.m = m;
  out.p = p;
  out.length = b - a;
  out.lambda = 0.5 * (lo + hi);
  out.bisection_steps = steps;
  out.exponent_p_minus_1 = std::pow(pi_p(p).value / (b - a), p - 1.0);

  const MeshPtr mesh = Mesh::interval(a, b, profile_cells);
  out.profile = Field::zeros(mesh);
  const QuasilinearSystem f(p, out.lambda);
  Shot y{0.0, 1.0};
  for (int n = 0; n < mesh->num_nodes(); ++n) {
    const double x0 = a + n * mesh->hx();
    const double x1 = mesh->node_coord(n).x;
    y = integrate(f, y, x0, x1, mesh->hx(), kShootTol, [](double, const Shot&) {});
    out.profile.values[n] = y.u;
  }
  double top = 0.0;
  for (double v : out.profile.values) top = std::max(top, std::abs(v));
  for (double& v : out.profile.values) v /= top;
  double previous = 0.0;
  for (double v : out.profile.values) {
    if (v == 0.0) continue;
    if (previous != 0.0 && (previous < 0.0) != (v < 0.0)) ++out.sign_changes;
    previous = v;
  }
  return out;
}

double ode_residual(const Field& u, double p, double lambda) {
  const Mesh& mesh = *u.mesh;
  if (mesh.dim() != 1) throw GeometryError("ODE residual is defined on interval meshes");
  const double h = mesh.hx();
  auto value = [&](int i) {
    const int n = mesh.node_at(i);
    return n == Mesh::kGhost ? 0.0 : u.values[n];
  };
  double top = 0.0;
  for (double v : u.values) top = std::max(top, std::abs(v));
  // Flux through the midpoint of cell i against the integrated source.
  auto flux = [&](int i) { return signed_power((value(i + 1) - value(i)) / h, p - 1.0); };
  const double first = flux(0);
  double source = 0.0;
  double worst = 0.0;
  for (int i = 1; i < mesh.nx(); ++i) {
    source += h * signed_power(value(i), p - 1.0);
    worst = std::max(worst, std::abs(flux(i) - first + lambda * source));
  }
  const double length = mesh.upper().x - mesh.lower().x;
  return worst / (lambda * length * std::pow(top, p - 1.0));
}

void write_oracle_table(std::ostream& out, const std::vector<OracleRow>& rows) {
  out << "# schema=1\np,m,L,lambda\n";
  for (const auto& r : rows) fmt::print(out, "{:.17g},{},{:.17g},{:.17g}\n", r.p, r.m, r.length, r.lambda);
}

void write_oracle_table(const std::string& path, const std::vector<OracleRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  write_oracle_table(out, rows);
}

}  // namespace dphase
