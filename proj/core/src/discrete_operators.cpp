#include "dphase/discrete_operators.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "dphase/errors.hpp"

namespace dphase {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

void push(Triplets& t, int row, int node, double value) {
  if (node != Mesh::kGhost) t.emplace_back(row, node, value);
}

SparseMatrix assemble(int rows, int cols, const Triplets& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

CellOperators cell_operators(const Mesh& mesh) {
  const int nc = mesh.num_cells();
  const int nn = mesh.num_nodes();
  Triplets avg, gx, gy;
  for (int c = 0; c < nc; ++c) {
    const auto& nd = mesh.cell_nodes(c);
    if (mesh.dim() == 1) {
      push(avg, c, nd[0], 0.5);
      push(avg, c, nd[1], 0.5);
      push(gx, c, nd[0], -1.0 / mesh.hx());
      push(gx, c, nd[1], 1.0 / mesh.hx());
      continue;
    }
    const double ix = 0.5 / mesh.hx();
    const double iy = 0.5 / mesh.hy();
    for (int k = 0; k < 4; ++k) push(avg, c, nd[k], 0.25);
    push(gx, c, nd[0], -ix);
    push(gx, c, nd[1], ix);
    push(gx, c, nd[2], -ix);
    push(gx, c, nd[3], ix);
    push(gy, c, nd[0], -iy);
    push(gy, c, nd[1], -iy);
    push(gy, c, nd[2], iy);
    push(gy, c, nd[3], iy);
  }
  CellOperators ops;
  ops.average = assemble(nc, nn, avg);
  ops.grad_x = assemble(nc, nn, gx);
  ops.grad_y = mesh.dim() == 1 ? SparseMatrix(nc, nn) : assemble(nc, nn, gy);
  return ops;
}

SparseMatrix bilinear_stiffness(const Mesh& mesh) {
  const auto ops = cell_operators(mesh);
  SparseMatrix s = SparseMatrix(ops.grad_x.transpose()) * ops.grad_x;
  if (mesh.dim() == 2) s += SparseMatrix(ops.grad_y.transpose()) * ops.grad_y;
  return s * mesh.cell_measure();
}

SparseMatrix averaged_mass(const Mesh& mesh) {
  const auto ops = cell_operators(mesh);
  return SparseMatrix(ops.average.transpose()) * ops.average * mesh.cell_measure();
}

SparseMatrix five_point_stiffness(const Mesh& mesh) {
  const int nn = mesh.num_nodes();
  Triplets t;
  for (int n = 0; n < nn; ++n) {
    const auto [i, j] = mesh.node_grid_index(n);
    if (mesh.dim() == 1) {
      const double w = 1.0 / mesh.hx();
      t.emplace_back(n, n, 2.0 * w);
      push(t, n, mesh.node_at(i - 1), -w);
      push(t, n, mesh.node_at(i + 1), -w);
      continue;
    }
    const double wx = mesh.hy() / mesh.hx();
    const double wy = mesh.hx() / mesh.hy();
    t.emplace_back(n, n, 2.0 * (wx + wy));
    push(t, n, mesh.node_at(i - 1, j), -wx);
    push(t, n, mesh.node_at(i + 1, j), -wx);
    push(t, n, mesh.node_at(i, j - 1), -wy);
    push(t, n, mesh.node_at(i, j + 1), -wy);
  }
  return assemble(nn, nn, t);
}

SparseMatrix lumped_mass(const Mesh& mesh) {
  SparseMatrix m(mesh.num_nodes(), mesh.num_nodes());
  m.setIdentity();
  return m * mesh.cell_measure();
}

Preconditioner::Preconditioner(const Mesh& mesh)
    : matrix_(bilinear_stiffness(mesh) + averaged_mass(mesh)),
      solver_(std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>()) {
  if (mesh.num_nodes() == 0) throw GeometryError("mesh has no free nodes");
  solver_->compute(matrix_);
  if (solver_->info() != Eigen::Success) throw NumericalError("preconditioner factorization failed");
}

Eigen::VectorXd Preconditioner::apply(const Eigen::VectorXd& covector) const { return solver_->solve(covector); }

LinearModes lowest_modes(const SparseMatrix& A, const SparseMatrix& B, int count, double rel_tol,
                         int max_iter) {
  const int n = static_cast<int>(A.rows());
  if (count < 1 || count > n) throw DomainError(fmt::format("cannot extract {} modes from {} unknowns", count, n));
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  if (solver.info() != Eigen::Success) throw NumericalError("stiffness factorization failed");

  const int block = std::min(n, count + std::max(4, count / 2));
  // Deterministic start: low-frequency-rich columns from a fixed pattern.
  Eigen::MatrixXd X(n, block);
  for (int c = 0; c < block; ++c) {
    for (int r = 0; r < n; ++r) X(r, c) = std::cos(0.7 * (c + 1) * r + 0.3 * c * c) + (c == 0 ? 1.0 : 0.0);
  }
  std::vector<double> previous(count, 0.0);
  LinearModes out;
  for (int it = 0; it < max_iter; ++it) {
    X = solver.solve(B * X);
    const Eigen::MatrixXd Ar = X.transpose() * (A * X);
    const Eigen::MatrixXd Br = X.transpose() * (B * X);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ritz(Ar, Br);
    if (ritz.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz step failed");
    X = X * ritz.eigenvectors();
    bool done = it > 0;
    for (int k = 0; k < count; ++k) {
      const double mu = ritz.eigenvalues()(k);
      if (std::abs(mu - previous[k]) > rel_tol * std::abs(mu)) done = false;
      previous[k] = mu;
    }
    if (done) {
      out.values.assign(previous.begin(), previous.end());
      out.vectors = X.leftCols(count);
      return out;
    }
  }
  throw NumericalError(fmt::format("inverse iteration did not settle {} modes in {} sweeps", count, max_iter));
}

LinearModes laplacian_modes(const Mesh& mesh, int count) {
  return lowest_modes(bilinear_stiffness(mesh), averaged_mass(mesh), count);
}

}  // namespace dphase
