#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dphase/discrete_operators.hpp"
#include "dphase/mesh.hpp"
#include "dphase/orlicz.hpp"

namespace dphase {

struct SolverOptions {
  double tol_lambda = 1e-10;    // relative change of lambda between accepted steps
  double tol_residual = 1e-7;   // weak residual
  int max_iter = 4000;
  int restarts = 5;
  std::uint64_t rng_seed = 0;
  double initial_step = 1.0;
  double shrink = 0.5;
  double slope_fraction = 1e-4;
  double noise = 0.05;  // relative amplitude of the smoothed start perturbation
  int memory = 8;       // quasi-Newton history; 0 is plain preconditioned descent
  ModularKind modular = ModularKind::standard;

  /// Throws DomainError on non-positive tolerances, restarts < 1 and similar.
  void validate() const;
};

struct Eigenpair {
  double lambda = 0.0;
  Field u;  // ||u||_H = 1, u >= 0, lambda = ||grad u||_H
  double residual = 0.0;
  int iterations = 0;
  bool converged = false;
  double s_of_u = 0.0;
  int restart = 0;                     // restart that produced the result
  std::vector<double> restart_lambdas; // one entry per restart
  std::uint64_t seed = 0;
};

/// Luxemburg norm of a sample vector together with its derivative with
/// respect to the samples.
struct NormDerivative {
  double value = 0.0;
  std::vector<double> derivative;  // d value / d sample_i
  double energy = 0.0;             // int (p t^p + q a t^q), t = |sample| / value
};

NormDerivative norm_derivative(std::span<const double> samples, const DoublePhase& H,
                               ModularKind kind = ModularKind::standard);

/// k(x) = ||u||_H and K(x) = ||grad u||_H as functions of the free-node
/// values, with gradients. The weight must live on the mesh cells.
class RayleighFunctional {
 public:
  RayleighFunctional(MeshPtr mesh, DoublePhase H, ModularKind kind = ModularKind::standard);

  struct Evaluation {
    double K = 0.0;
    double k = 0.0;
    double ratio = 0.0;
    Eigen::VectorXd dK;  // <K'(u), phi_j>
    Eigen::VectorXd dk;  // <k'(u), phi_j>
    double energy_K = 0.0;
    double energy_k = 0.0;
  };

  double function_norm(const Eigen::VectorXd& x) const;
  double gradient_norm(const Eigen::VectorXd& x) const;
  double ratio(const Eigen::VectorXd& x) const;
  Evaluation evaluate(const Eigen::VectorXd& x) const;

  /// max_j energy_K |dK_j - lambda dk_j| / ||grad phi_j||_1.
  double residual(const Evaluation& e, double lambda) const;

  const Mesh& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  const DoublePhase& phase() const { return H_; }
  ModularKind kind() const { return kind_; }
  int size() const { return mesh_->num_nodes(); }

 private:
  MeshPtr mesh_;
  DoublePhase H_;
  ModularKind kind_;
  std::vector<double> hat_scale_;  // ||grad phi_j||_{L^1}
};

/// ||grad u||_H / ||u||_H. Throws DomainError for u == 0.
double rayleigh(const Field& u, const DoublePhase& H, ModularKind kind = ModularKind::standard);

/// S(u) for u on the unit sphere with lambda = ||grad u||_H. Throws
/// ContractError if either precondition is off by more than 1e-6.
double s_of_u(const Field& u, double lambda, const DoublePhase& H);

/// <k'(u), v> and <K'(u), v>.
double kprime_pairing(const Field& u, const Field& v, const DoublePhase& H);
double Kprime_pairing(const Field& u, const Field& v, const DoublePhase& H);

struct DerivativeCheck {
  double analytic_k;
  double numeric_k;
  double analytic_K;
  double numeric_K;
};

/// Central differences of k and K at u along v against the pairings.
DerivativeCheck directional_derivative_check(const Field& u, const Field& v, const DoublePhase& H,
                                             double eps = 1e-5);

/// Weak-form residual of the eigenvalue equation tested with every nodal hat
/// function, each normalized by ||grad phi_j||_{L^1}. Expects ||u||_H = 1.
double weak_residual(const Field& u, double lambda, const DoublePhase& H);

/// Projected quasi-Newton descent of K on the unit sphere, preconditioned by
/// (S + M)^{-1}, Armijo backtracking, renormalization after every step and
/// the best of `restarts` seeded starts.
Eigenpair first_eigenpair(MeshPtr mesh, const DoublePhase& H, const SolverOptions& opts);

struct MinimaxBound {
  int m = 1;
  double value = 0.0;           // upper bound for the m-th variational eigenvalue
  int outer_iterations = 0;
  int inner_starts = 0;
};

/// Upper bounds for lambda^1..lambda^m_max: inf over m-dimensional subspaces
/// of the max of ||grad u||_H on their unit spheres. Each frame is seeded
/// with the previous one plus the next Laplacian mode.
std::vector<MinimaxBound> minimax_table(MeshPtr mesh, const DoublePhase& H, int m_max,
                                        const SolverOptions& opts);
/// Last row of minimax_table(mesh, H, m, opts).
double minimax_upper_bound(MeshPtr mesh, const DoublePhase& H, int m, const SolverOptions& opts);

/// Number of entries strictly below lambda in an ascending list.
int spectrum_counting(std::span<const double> lambdas, double lambda);

struct EigenpairMetadata {
  std::string weight;  // descriptor text
  std::string mesh;    // Mesh::describe()
};

/// Nodal CSV of u plus a JSON sidecar with p, q, weight, mesh, lambda,
/// residual, S(u), iterations, converged and seed.
void save_eigenpair(const Eigenpair& pair, const DoublePhase& H, const EigenpairMetadata& meta,
                    const std::string& csv_path, const std::string& json_path);
std::string eigenpair_metadata_json(const Eigenpair& pair, const DoublePhase& H, const EigenpairMetadata& meta);

}  // namespace dphase
