#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "dphase/errors.hpp"
#include "dphase/experiments.hpp"

using namespace dphase;

namespace {

const Check& check(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.checks()) {
    if (c.name == name) return c;
  }
  FAIL("missing check " << name);
  throw std::logic_error("unreachable");
}

std::string csv(const ExperimentReport& r) {
  std::ostringstream out;
  r.write_csv(out);
  r.write_checks_csv(out);
  return out.str();
}

ExperimentOptions threads(unsigned n) {
  ExperimentOptions o;
  o.threads = n;
  return o;
}

}  // namespace

TEST_CASE("experiment names") {
  CHECK(experiment_names() ==
        std::vector<std::string>{"stability", "domains", "faberkrahn", "largeexp", "weyl", "symmetry"});
}

TEST_CASE("lumped modular is permutation exact") {
  const auto mesh = Mesh::interval(0.0, 1.0, 64);
  Field u = Field::from_function(mesh, [](Point x) { return std::sin(3.0 * x.x) + 0.1 * x.x; });
  Field v = u;
  std::reverse(v.values.begin(), v.values.end());
  CHECK(lumped_modular(u, 2.0, 3.3, 0.7) == lumped_modular(v, 2.0, 3.3, 0.7));
  double direct = 0.0;
  for (double s : u.values) direct += mesh->cell_measure() * (s * s + 0.7 * std::pow(std::abs(s), 3.3));
  CHECK(lumped_modular(u, 2.0, 3.3, 0.7) == doctest::Approx(direct).epsilon(1e-13));
}

TEST_CASE("nested families") {
  const auto f = nested_family("intervals:0.5,1", 64);
  REQUIRE(f.meshes.size() == 2);
  CHECK(f.intervals);
  CHECK(f.meshes[0]->num_nodes() == 31);
  CHECK(f.meshes[1]->num_nodes() == 63);
  const auto s = nested_family("squares:0.5,1", 16);
  CHECK_FALSE(s.intervals);
  CHECK(s.meshes[0]->total_measure() == doctest::Approx(0.25));
  CHECK_THROWS_AS(nested_family("intervals:1,0.5", 64), GeometryError);
  CHECK_THROWS_AS(nested_family("intervals:0.3,1", 8), ConfigError);
  CHECK_THROWS_AS(nested_family("circles:1", 8), ConfigError);
  CHECK_THROWS_AS(nested_family("intervals:", 8), ConfigError);
  CHECK_THROWS_AS(nested_family("intervals:a,b", 8), ConfigError);
}

TEST_CASE("stability sweep") {
  StabilityConfig cfg;
  cfg.domain = DomainSpec::interval(0.0, 1.0, 128);
  cfg.steps = 8;
  cfg.tolerance = 0.05;
  const auto r = run_stability(cfg, threads(4));
  CHECK(r.rows() == 8);
  CHECK(r.all_passed());
  const auto gaps = r.column("rel_gap");
  CHECK(gaps.back() < gaps.front());
  CHECK(r.at(3, "seed") == 3.0);
  CHECK(r.at(7, "p_h") == doctest::Approx(2.0 + 1.0 / 8));
  CHECK(csv(r) == csv(run_stability(cfg, threads(1))));
}

TEST_CASE("domain monotonicity") {
  DomainsConfig cfg;
  cfg.family = "intervals:0.5,0.75,1";
  cfg.resolution = 128;
  cfg.final_gap = 0.5;
  const auto r = run_domain_monotonicity(cfg, threads(3));
  CHECK(r.all_passed());
  CHECK(r.at(2, "lambda") == doctest::Approx(std::numbers::pi).epsilon(0.01));
  CHECK(check(r, "oracle_agreement").passed);

  cfg.final_gap = 0.01;
  CHECK_FALSE(check(run_domain_monotonicity(cfg, threads(3)), "final_gap").passed);

  DomainsConfig sq;
  sq.family = "squares:0.5,0.75,1";
  sq.resolution = 16;
  sq.q = 2.4;
  sq.final_gap = 0.6;
  const auto r2 = run_domain_monotonicity(sq, threads(3));
  CHECK(check(r2, "non_increasing_chain").passed);
  CHECK(check(r2, "all_converged").passed);
  for (const auto& c : r2.checks()) CHECK(c.name != "oracle_agreement");
}

TEST_CASE("faber-krahn on a coarse square") {
  FaberKrahnConfig cfg;
  cfg.domain = DomainSpec::square(1.0, 32);
  const auto r = run_faber_krahn(cfg, threads(4));
  CHECK(r.rows() == 4);
  CHECK(check(r, "disk_not_above_domain").passed);
  CHECK(check(r, "symmetrization_modular").passed);
  CHECK(check(r, "polya_szego").passed);
  CHECK(check(r, "all_converged").passed);
  // square lambda_1 = sqrt(2) pi for p = q = 2
  CHECK(r.at(0, "lambda") == doctest::Approx(std::sqrt(2.0) * std::numbers::pi).epsilon(0.02));
}

TEST_CASE("large exponents") {
  LargeExpConfig cfg;
  cfg.domain = DomainSpec::interval(0.0, 1.0, 128);
  cfg.h_list = {1, 2, 4};
  cfg.final_gap = 0.5;
  const auto r = run_large_exponents(cfg, threads(4));
  CHECK(r.rows() == 3);
  CHECK(r.all_passed());
  CHECK(r.at(0, "target") == doctest::Approx(2.0));
  for (std::size_t i = 0; i < r.rows(); ++i) {
    CHECK(r.at(i, "bracket_lo") <= r.at(i, "lambda_standard") * (1 + 1e-8));
    CHECK(r.at(i, "lambda_standard") <= r.at(i, "bracket_hi") * (1 + 1e-8));
  }
}

TEST_CASE("weyl table") {
  WeylConfig cfg;
  cfg.domain = DomainSpec::interval(0.0, 1.0, 128);
  cfg.m_max = 4;
  cfg.p = 2.0;
  cfg.q = 2.0;
  const auto r = run_weyl(cfg, threads(2));
  CHECK(r.rows() == 4);
  CHECK(r.all_passed());
  CHECK(r.at(3, "bound") == doctest::Approx(4.0 * std::numbers::pi).epsilon(0.05));
  cfg.m_max = 2;
  CHECK_THROWS_AS(run_weyl(cfg, threads(2)), DomainError);
}

TEST_CASE("symmetry") {
  SymmetryConfig cfg;
  cfg.domain = DomainSpec::interval(0.0, 1.0, 128);
  const auto r = run_symmetry(cfg, threads(1));
  CHECK(r.all_passed());
  CHECK(r.at(0, "modular_u") == r.at(0, "modular_uH"));
  SymmetryConfig sq;
  sq.domain = DomainSpec::square(1.0, 16);
  sq.axis = 1;
  CHECK(run_symmetry(sq, threads(1)).all_passed());
}
