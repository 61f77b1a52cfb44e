#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dphase/domain.hpp"
#include "dphase/eigensolver.hpp"
#include "dphase/rearrange.hpp"
#include "dphase/report.hpp"
#include "dphase/weights.hpp"

namespace dphase {

/// Settings shared by every driver. Row r of a sweep solves with seed
/// `seed + r`; the seed is stored in the row.
struct ExperimentOptions {
  SolverOptions solver;
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct StabilityConfig {
  DomainSpec domain = DomainSpec::interval(0.0, 1.0, 512);
  WeightSpec weight;
  double p = 2.0;
  double q = 2.4;
  int steps = 16;
  double delta0 = 1.0;
  double tolerance = 0.01;  // final gap relative to the limit value
  int trend_from = 4;
};

/// lambda for (p + delta0/h, q + delta0/h), h = 1..steps, against the limit
/// (p, q) on one mesh.
ExperimentReport run_stability(const StabilityConfig& cfg, const ExperimentOptions& opts);

/// Nested domains on one grid. Descriptors:
///   intervals:L1,L2,...  (0, L_i), spacing 1/resolution
///   squares:s1,s2,...    [0, s_i]^2 masks on the grid over [0, max s]^2
struct NestedFamily {
  std::vector<MeshPtr> meshes;
  std::vector<double> sizes;
  bool intervals = true;
  int resolution = 512;
};

/// Throws ConfigError for malformed descriptors or sizes that are not whole
/// cell counts, GeometryError if the family is not nested.
NestedFamily nested_family(const std::string& descriptor, int resolution);

struct DomainsConfig {
  std::string family = "intervals:0.5,0.75,0.875,0.9375,0.96875,0.984375,1";
  int resolution = 512;
  WeightSpec weight;
  double p = 2.0;
  double q = 2.0;
  double slack = 1e-3;       // relative slack of the non-increasing chain
  double final_gap = 0.02;   // between the last two domains
  double oracle_tol = 0.01;  // interval rows against the shooting oracle
};

ExperimentReport run_domain_monotonicity(const DomainsConfig& cfg, const ExperimentOptions& opts);

struct FaberKrahnConfig {
  DomainSpec domain = DomainSpec::square(1.0, 96);
  double p = 2.0;
  double q = 2.0;
  double polya_slack = 0.05;
};

/// lambda of the domain and of the equal-measure disk at N and N/2; the
/// margin must exceed the N vs N/2 drift of both. a = 1.
ExperimentReport run_faber_krahn(const FaberKrahnConfig& cfg, const ExperimentOptions& opts);

struct LargeExpConfig {
  DomainSpec domain = DomainSpec::interval(0.0, 1.0, 512);
  WeightSpec weight;
  double p = 2.0;
  double q = 3.0;
  std::vector<int> h_list{1, 2, 4, 8, 16};
  double final_gap = 0.15;
};

/// Rescaled-norm eigenvalues of hH against 1 / inradius, with the standard
/// eigenvalue and its equivalence bracket per row.
ExperimentReport run_large_exponents(const LargeExpConfig& cfg, const ExperimentOptions& opts);

struct WeylConfig {
  DomainSpec domain = DomainSpec::interval(0.0, 1.0, 512);
  WeightSpec weight;
  double p = 2.0;
  double q = 2.4;
  int m_max = 6;
  double widen = 0.25;
  double first_tol = 0.01;  // m = 1 bound against first_eigenpair
};

ExperimentReport run_weyl(const WeylConfig& cfg, const ExperimentOptions& opts);

struct SymmetryConfig {
  DomainSpec domain = DomainSpec::interval(0.0, 1.0, 512);
  double p = 2.0;
  double q = 2.4;
  int axis = 0;
  double defect_tol = 0.01;
};

/// Polarizes the first eigenfunction through the domain's mid-plane. a = 1.
ExperimentReport run_symmetry(const SymmetryConfig& cfg, const ExperimentOptions& opts);

/// stability, domains, faberkrahn, largeexp, weyl, symmetry.
const std::vector<std::string>& experiment_names();

/// Lumped nodal modular sum_i |Omega_i| (|u_i|^p + a |u_i|^q) with the terms
/// summed in sorted order, so any permutation of the values gives the same
/// bits.
double lumped_modular(const Field& u, double p, double q, double a = 1.0);

}  // namespace dphase
