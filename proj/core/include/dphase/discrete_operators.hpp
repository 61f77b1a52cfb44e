#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dphase/mesh.hpp"

namespace dphase {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// The three linear maps from free-node values to per-cell samples used by
/// the quadrature: corner average, d/dx and d/dy (empty in 1D).
struct CellOperators {
  SparseMatrix average;
  SparseMatrix grad_x;
  SparseMatrix grad_y;
};

CellOperators cell_operators(const Mesh& mesh);

/// Quadrature of int grad u . grad v with the cell gradients above.
SparseMatrix bilinear_stiffness(const Mesh& mesh);
/// Quadrature of int u v with cell-averaged values.
SparseMatrix averaged_mass(const Mesh& mesh);

/// Standard 3-point (1D) / 5-point (2D) Dirichlet stiffness, scaled by the
/// cell measure, and the matching lumped mass.
SparseMatrix five_point_stiffness(const Mesh& mesh);
SparseMatrix lumped_mass(const Mesh& mesh);

/// (S + M)^{-1} with the quadrature stiffness and mass above, factored once.
class Preconditioner {
 public:
  explicit Preconditioner(const Mesh& mesh);
  Eigen::VectorXd apply(const Eigen::VectorXd& covector) const;
  const SparseMatrix& matrix() const { return matrix_; }

 private:
  SparseMatrix matrix_;
  std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> solver_;
};

using PreconditionerPtr = std::shared_ptr<const Preconditioner>;

/// Lowest generalized eigenpairs A x = mu B x with B-orthonormal columns,
/// ascending. Block inverse iteration with Rayleigh-Ritz; A must be SPD.
struct LinearModes {
  std::vector<double> values;
  Eigen::MatrixXd vectors;
};

LinearModes lowest_modes(const SparseMatrix& A, const SparseMatrix& B, int count, double rel_tol = 1e-12,
                         int max_iter = 2000);

/// Lowest modes of the quadrature Laplacian (bilinear stiffness, averaged mass).
LinearModes laplacian_modes(const Mesh& mesh, int count);

}  // namespace dphase
