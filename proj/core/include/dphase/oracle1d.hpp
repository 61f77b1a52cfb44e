#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "dphase/mesh.hpp"

namespace dphase {

/// pi_p = 2 (p-1)^{1/p} int_0^1 (1 - s^p)^{-1/p} ds.
struct PiP {
  double p = 0.0;
  double value = 0.0;     // pi_p
  double integral = 0.0;  // the bare integral
  double error = 0.0;     // refinement difference of the integral
  int level = 0;
};

/// Adaptive tanh-sinh evaluation to relative tolerance 1e-14.
PiP pi_p(double p);
/// Fixed refinement level; `error` is |I_level - I_{level-1}|.
PiP pi_p_at_level(double p, int level);

/// First eigenfunction of the 1D p-Laplacian on the mesh interval, peak 1,
/// built by inverting s -> int_0^s (1 - t^p)^{-1/p} dt on the rising
/// quarter-period and reflecting.
Field sinp_profile(double p, MeshPtr interval_mesh);

struct ShootingEigenpair {
  int m = 1;
  double p = 2.0;
  double length = 1.0;
  double lambda = 0.0;  // eigenvalue of -(|u'|^{p-2}u')' = lambda |u|^{p-2} u
  Field profile;        // peak |u| = 1, zero Dirichlet data
  int sign_changes = 0;
  double exponent_p_minus_1 = 0.0;  // (pi_p / L)^{p-1}, recorded for comparison only
  int bisection_steps = 0;
};

/// Shooting with u(a) = 0, u'(a) = 1 and adaptive Dormand-Prince integration;
/// bisects lambda until the m-th zero reaches b. The profile is sampled on
/// `profile_cells` uniform cells.
ShootingEigenpair plap_shooting(double p, double a, double b, int m, int profile_cells = 512);

/// Integrated form of the ODE: with phi(s) = |s|^{p-2}s and cell fluxes
/// F_i = phi((u_{i+1} - u_i)/h), returns
/// max_i |F_i - F_0 + lambda h sum_{k=1..i} phi(u_k)| / (lambda L max|u|^{p-1}).
double ode_residual(const Field& u, double p, double lambda);

struct OracleRow {
  double p;
  int m;
  double length;
  double lambda;
};

/// CSV fixture: `# schema=1` then `p,m,L,lambda`.
void write_oracle_table(std::ostream& out, const std::vector<OracleRow>& rows);
void write_oracle_table(const std::string& path, const std::vector<OracleRow>& rows);

}  // namespace dphase
