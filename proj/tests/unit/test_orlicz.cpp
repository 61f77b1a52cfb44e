#include <doctest.h>

#include <cmath>
#include <random>

#include "dphase/errors.hpp"
#include "dphase/orlicz.hpp"
#include "dphase/weights.hpp"
#include "oracles.hpp"

using namespace dphase;

namespace {

DoublePhase constant_phase(std::size_t n, double h, double a, double p, double q) {
  return DoublePhase(p, q, WeightField::constant(n, a, h), 1);
}

std::vector<double> random_samples(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  std::vector<double> u(n);
  for (auto& v : u) v = d(rng);
  return u;
}

}  // namespace

TEST_CASE("modular of simple fields") {
  const std::size_t n = 64;
  const double h = 1.0 / n;
  std::vector<double> zero(n, 0.0), one(n, 1.0);
  CHECK(modular(zero, constant_phase(n, h, 1.0, 2.0, 3.0)) == 0.0);
  CHECK(modular(one, constant_phase(n, h, 0.0, 2.0, 3.0)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(modular(one, constant_phase(n, h, 1.0, 2.0, 3.0)) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK_THROWS_AS(modular(std::vector<double>(n + 1, 1.0), constant_phase(n, h, 1.0, 2.0, 3.0)), ShapeError);
}

TEST_CASE("golden ratio norm from both routes") {
  const std::size_t n = 128;
  const double h = 1.0 / n;
  const auto H = constant_phase(n, h, 1.0, 2.0, 4.0);
  std::vector<double> one(n, 1.0);
  const double gamma = oracle::golden_norm();
  CHECK(gamma * gamma == doctest::Approx((1.0 + std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  const auto lux = luxemburg_norm(one, H);
  const auto cf = closed_form_norm(one, H);
  CHECK(std::abs(lux.value - gamma) < 1e-9);
  CHECK(std::abs(cf.value - gamma) < 1e-9);
  CHECK(lux.method == NormMethod::bisection);
  CHECK(cf.method == NormMethod::closed_form);
  CHECK(std::abs(lux.modular_at_unit - 1.0) < 1e-9);
}

TEST_CASE("w_inverse") {
  CHECK(w_inverse(0.0, 2.0, 4.0) == 0.0);
  CHECK(w_inverse(2.0, 2.0, 4.0) == doctest::Approx(1.0).epsilon(1e-13));
  const double ref = oracle::bisect([](double t) { return t * t + t * t * t * t - 1.0; }, 0.0, 1.0);
  CHECK(std::abs(w_inverse(1.0, 2.0, 4.0) - ref) < 1e-12);
  CHECK(std::abs(ref - 0.7861514) < 1e-7);
  const double t = w_inverse(5.0, 1.5, 3.5, 0.25);
  CHECK(std::pow(t, 1.5) + 0.25 * std::pow(t, 3.5) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(w_inverse(1e-30, 2.0, 4.0) == doctest::Approx(1e-15).epsilon(1e-10));
  CHECK_THROWS_AS(w_inverse(-1.0, 2.0, 4.0), DomainError);
}

TEST_CASE("closed form with Theta^p = 2 reduces to ||u||_p Theta") {
  // a = 2, u = 1 on (0, 1), p = 2, q = 4: Theta = (2^{1/4})^2 = sqrt 2 and W^{-1}(2) = 1.
  const std::size_t n = 50;
  const auto H = constant_phase(n, 1.0 / n, 2.0, 2.0, 4.0);
  std::vector<double> one(n, 1.0);
  CHECK(closed_form_norm(one, H).value == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
  CHECK(oracle::luxemburg(one, std::vector<double>(n, 2.0), 2.0, 4.0, 1.0 / n) ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("closed form equals bisection on random fields with x-dependent weights") {
  std::mt19937_64 rng(7);
  const int n = 100;
  const auto mesh = Mesh::interval(0.0, 1.0, n);
  const std::vector<std::string> weights{"constant:1.5", "ramp:0,2", "checkerboard:3,4"};
  std::uniform_real_distribution<double> pd(1.2, 3.0), gap(0.1, 2.0);
  double worst = 0.0;
  for (int trial = 0; trial < 60; ++trial) {
    const auto w = WeightSpec::parse(weights[trial % 3]).on_cells(*mesh);
    const double p = pd(rng), q = p + gap(rng);
    const DoublePhase H(p, q, w);
    const auto u = random_samples(rng, n);
    const double lux = luxemburg_norm(u, H).value;
    const double cf = closed_form_norm(u, H).value;
    const double ref = oracle::luxemburg(u, w->values, p, q, 1.0 / n);
    worst = std::max(worst, std::abs(cf - lux) / lux);
    CHECK(lux == doctest::Approx(ref).epsilon(1e-10));
  }
  CHECK(worst <= 1e-9);
}

TEST_CASE("closed form degenerate cases") {
  const std::size_t n = 10;
  const double h = 0.1;
  std::vector<double> u(n, 1.0);
  CHECK_THROWS_AS(closed_form_norm(u, constant_phase(n, h, 1.0, 2.0, 2.0)), DomainError);
  CHECK_THROWS_AS(closed_form_norm(u, constant_phase(n, h, 0.0, 2.0, 3.0)), FallbackRequired);
}

TEST_CASE("norm properties") {
  std::mt19937_64 rng(11);
  const int n = 80;
  const double h = 1.0 / n;
  const auto mesh = Mesh::interval(0.0, 1.0, n);
  const auto w = WeightSpec::parse("ramp:0.5,3").on_cells(*mesh);
  const DoublePhase H(1.7, 3.1, w);
  for (int trial = 0; trial < 20; ++trial) {
    auto u = random_samples(rng, n);
    const double g = luxemburg_norm(u, H).value;
    std::vector<double> scaled(n);
    for (int i = 0; i < n; ++i) scaled[i] = u[i] / g;
    CHECK(std::abs(modular(scaled, H) - 1.0) <= 1e-9);
    for (double c : {-2.0, 0.5, 10.0}) {
      std::vector<double> cu(n);
      for (int i = 0; i < n; ++i) cu[i] = c * u[i];
      CHECK(std::abs(luxemburg_norm(cu, H).value - std::abs(c) * g) <= 1e-10 * std::abs(c) * g);
    }
    // Embedding chain.
    CHECK(lp_norm(u, H.p(), h) <= g * (1 + 1e-12));
    CHECK(weighted_lq_norm(u, H) <= g * (1 + 1e-12));
    CHECK(g <= (1.0 + w->sup_norm + 1.0) * lp_norm(u, H.q(), h) * (1 + 1e-12));
  }
  CHECK(luxemburg_norm(std::vector<double>(n, 0.0), H).value == 0.0);
}

TEST_CASE("a = 0 gives the L^p norm") {
  const int n = 40;
  std::mt19937_64 rng(3);
  const auto u = random_samples(rng, n);
  const auto H = constant_phase(n, 1.0 / n, 0.0, 2.5, 4.0);
  CHECK(luxemburg_norm(u, H).value == doctest::Approx(lp_norm(u, 2.5, 1.0 / n)).epsilon(1e-11));
}

TEST_CASE("rescaled norm and the equivalence bracket") {
  const int n = 64;
  const double h = 2.0 / n;  // |Omega| = 2
  std::vector<double> c(n, 0.3);
  CHECK(rescaled_norm(c, constant_phase(n, h, 0.0, 2.0, 3.0)) == doctest::Approx(0.3).epsilon(1e-11));
  CHECK(rescaled_norm(std::vector<double>(n, 0.0), constant_phase(n, h, 1.0, 2.0, 3.0)) == 0.0);

  std::mt19937_64 rng(5);
  for (double a : {0.0, 0.2, 1.0, 3.0}) {
    const auto H = constant_phase(n, h, a, 2.0, 3.0);
    const double factor = 2.0 + a * 2.0;
    for (int t = 0; t < 10; ++t) {
      const auto u = random_samples(rng, n);
      const double r = rescaled_norm(u, H);
      const double s = luxemburg_norm(u, H).value;
      CHECK(r == doctest::Approx(oracle::luxemburg(u, std::vector<double>(n, a), 2.0, 3.0, h, factor)).epsilon(1e-10));
      CHECK(r <= s * (1 + 1e-12));
      CHECK(s <= factor * r * (1 + 1e-12));
    }
  }
  // |Omega| + ||a||_1 < 1 flips the bracket.
  const int m = 32;
  const double hs = 0.25 / m;
  const auto H = constant_phase(m, hs, 1.0, 2.0, 3.0);
  const double factor = 0.5;
  for (int t = 0; t < 10; ++t) {
    const auto u = random_samples(rng, m);
    const double r = rescaled_norm(u, H);
    const double s = luxemburg_norm(u, H).value;
    CHECK(factor * r <= s * (1 + 1e-12));
    CHECK(s <= r * (1 + 1e-12));
  }
}

TEST_CASE("rescaled norm of hH tends to the sup norm") {
  const int n = 64;
  const double h = 1.0 / n;
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = i < 16 ? 0.4 : (i < 40 ? 1.3 : 0.8);
  const DoublePhase H(2.0, 3.0, WeightField::constant(n, 1.0, h));
  double previous = 1e300;
  double last = 0.0;
  for (int s : {1, 2, 4, 8, 16, 32}) {
    last = rescaled_norm(u, H.scaled(s));
    const double gap = std::abs(last - 1.3);
    CHECK(gap < previous);
    previous = gap;
  }
  CHECK(std::abs(last - 1.3) / 1.3 <= 0.05);
  // Log-space evaluation survives exponents far beyond double range.
  const double huge = rescaled_norm(u, H.scaled(400));
  CHECK(std::isfinite(huge));
  CHECK(std::abs(huge - 1.3) / 1.3 <= 0.01);
}

TEST_CASE("embedding constant") {
  const std::size_t n = 8;
  const auto w = WeightField::constant(n, 0.5, 0.125);
  const DoublePhase H(2.0, 3.0, w);
  CHECK(embedding_constant(H, H, 1.0, 0.5) == 1.0);
  const DoublePhase Ht(2.5, 3.3, w);
  CHECK(embedding_constant(Ht, H, 1.5, 0.5) == doctest::Approx(0.5 + std::sqrt(2.0)).epsilon(1e-12));
  CHECK_THROWS_AS(embedding_constant(DoublePhase(4.5, 5.0, w), H, 1.0, 0.5), DomainError);

  std::mt19937_64 rng(13);
  const int m = 50;
  const auto mesh = Mesh::interval(0.0, 1.5, m);
  const auto wr = WeightSpec::parse("ramp:0,1").on_cells(*mesh);
  const DoublePhase base(2.0, 3.0, wr), tilde(2.6, 4.1, wr);
  const double C = embedding_constant(tilde, base, 1.5, wr->l1_norm);
  for (int t = 0; t < 30; ++t) {
    const auto u = random_samples(rng, m);
    CHECK(luxemburg_norm(u, base).value <= C * luxemburg_norm(u, tilde).value * (1 + 1e-12));
  }
}

TEST_CASE("sandwich ratios") {
  std::mt19937_64 rng(17);
  const auto mesh = Mesh::interval(0.0, 1.0, 64);
  const DoublePhase H(2.0, 3.0, WeightField::constant(64, 1.0, 1.0 / 64));
  for (int t = 0; t < 10; ++t) {
    const Field u = oracle::smooth_field(mesh, rng);
    const auto r = sandwich_ratios(u, H);
    CHECK(r.w == doctest::Approx(3.0));
    CHECK(r.lower <= r.mid);
    CHECK(r.mid <= r.upper);
  }
  CHECK_THROWS_AS(sandwich_ratios(Field::zeros(mesh), H), DomainError);
  // Single phase without weight: the three quotients coincide up to w.
  const DoublePhase P(2.0, 2.0, WeightField::constant(64, 0.0, 1.0 / 64));
  const Field u = oracle::smooth_field(mesh, rng);
  const auto r = sandwich_ratios(u, P);
  CHECK(r.lower * r.w == doctest::Approx(r.mid).epsilon(1e-10));
  CHECK(r.upper / r.w == doctest::Approx(r.mid).epsilon(1e-10));
}

TEST_CASE("Sobolev conjugate inverse") {
  const DoublePhase H(2.0, 2.5, WeightField::constant(4, 0.0, 0.25));
  for (double s : {0.5, 1.0, 7.0}) {
    CHECK(sobolev_conjugate_inverse(H, 0, s, 3) == doctest::Approx(6.0 * std::pow(s, 1.0 / 6.0)).epsilon(1e-8));
  }
  CHECK(sobolev_conjugate_inverse(H, 0, 1e-12, 3) < 1e-1);
  CHECK_THROWS_AS(sobolev_conjugate_inverse(H, 0, 1.0, 2), DomainError);

  // Weighted case against a substitution-based reference: tau = s x^6 turns
  // the endpoint singularity into a smooth integrand.
  const DoublePhase G(1.5, 2.5, WeightField::constant(4, 0.7, 0.25));
  const double s = 2.0;
  auto f = [&](double x) {
    const double tau = s * std::pow(x, 6.0);
    return oracle::bisect([&](double t) { return std::pow(t, 1.5) + 0.7 * std::pow(t, 2.5) - tau; }, 0.0, 10.0) /
           std::pow(tau, 4.0 / 3.0) * 6.0 * s * std::pow(x, 5.0);
  };
  // Composite Simpson on [0, 1] with Richardson agreement.
  auto simpson = [&](int k) {
    double acc = f(1.0);
    const double step = 1.0 / k;
    for (int i = 1; i < k; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(i * step);
    return acc * step / 3.0;
  };
  const double a = simpson(400), b = simpson(800);
  REQUIRE(std::abs(a - b) < 1e-8 * b);
  CHECK(sobolev_conjugate_inverse(G, 0, s, 3) == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("Delta2 spot check and constructor validation") {
  CHECK(satisfies_delta2(DoublePhase(2.0, 3.0, WeightField::constant(3, 1.0, 1.0))));
  CHECK_THROWS_AS(DoublePhase(1.0, 3.0, WeightField::constant(3, 1.0, 1.0)), DomainError);
  CHECK_THROWS_AS(DoublePhase(3.0, 2.0, WeightField::constant(3, 1.0, 1.0)), DomainError);
  CHECK_THROWS_AS(WeightField::make({1.0, -0.5}, 1.0), DomainError);
}
