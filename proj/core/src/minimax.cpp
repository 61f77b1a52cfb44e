#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "dphase/eigensolver.hpp"
#include "dphase/errors.hpp"

namespace dphase {

namespace {

constexpr int kOuterIterations = 25;
constexpr int kInnerIterations = 200;

struct InnerMax {
  double value = 0.0;
  Eigen::VectorXd coeff;
};

// Orthonormalizes V in place and maps a coefficient vector of the old basis
// onto the new one.
Eigen::VectorXd orthonormalize(Eigen::MatrixXd& V, const Eigen::VectorXd& c) {
  const Eigen::Index m = V.cols();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(V);
  const Eigen::MatrixXd R = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  Eigen::MatrixXd Q = qr.householderQ() * Eigen::MatrixXd::Identity(V.rows(), m);
  // Keep the orientation of every column so warm starts stay meaningful.
  Eigen::VectorXd mapped = R * c;
  for (Eigen::Index k = 0; k < m; ++k) {
    if (R(k, k) < 0.0) {
      Q.col(k) = -Q.col(k);
      mapped(k) = -mapped(k);
    }
  }
  V = std::move(Q);
  const double n = mapped.norm();
  return n > 0.0 ? Eigen::VectorXd(mapped / n) : mapped;
}

// Projected ascent of c -> R(V c) on the unit sphere from one start.
InnerMax ascend(const RayleighFunctional& F, const Eigen::MatrixXd& V, Eigen::VectorXd c) {
  c.normalize();
  auto e = F.evaluate(V * c);
  double value = e.ratio;
  Eigen::VectorXd g = V.transpose() * ((e.dK - e.ratio * e.dk) / e.k);
  double step = 1.0;
  for (int it = 0; it < kInnerIterations; ++it) {
    Eigen::VectorXd tangent = g - c.dot(g) * c;
    const double slope = tangent.squaredNorm();
    if (slope <= 1e-24 * value * value) break;
    bool accepted = false;
    Eigen::VectorXd trial;
    for (int ls = 0; ls < 50; ++ls) {
      trial = (c + step * tangent).normalized();
      const double r = F.ratio(V * trial);
      if (r >= value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
    c = trial;
    e = F.evaluate(V * c);
    const double gain = e.ratio - value;
    value = e.ratio;
    g = V.transpose() * ((e.dK - e.ratio * e.dk) / e.k);
    step *= 2.0;
    if (gain <= 1e-13 * value) break;
  }
  return {value, c};
}

InnerMax inner_max(const RayleighFunctional& F, const Eigen::MatrixXd& V, const std::vector<Eigen::VectorXd>& starts) {
  InnerMax best;
  best.value = -1.0;
  for (const auto& s : starts) {
    InnerMax r = ascend(F, V, s);
    if (r.value > best.value) best = std::move(r);
  }
  return best;
}

std::vector<Eigen::VectorXd> start_set(Eigen::Index m, const Eigen::VectorXd& warm, int random_starts,
                                       std::mt19937_64& rng) {
  std::vector<Eigen::VectorXd> starts;
  if (warm.size() == m && warm.norm() > 0.0) starts.push_back(warm);
  for (Eigen::Index k = 0; k < m; ++k) starts.push_back(Eigen::VectorXd::Unit(m, k));
  std::normal_distribution<double> normal;
  for (int s = 0; s < random_starts; ++s) {
    Eigen::VectorXd c(m);
    for (Eigen::Index k = 0; k < m; ++k) c(k) = normal(rng);
    starts.push_back(c);
  }
  return starts;
}

}  // namespace

std::vector<MinimaxBound> minimax_table(MeshPtr mesh, const DoublePhase& H, int m_max, const SolverOptions& opts) {
  opts.validate();
  if (m_max < 1 || m_max > mesh->num_nodes()) {
    throw DomainError(fmt::format("m = {} outside [1, {}]", m_max, mesh->num_nodes()));
  }
  const RayleighFunctional F(mesh, H, opts.modular);
  const Preconditioner P(*mesh);
  const LinearModes modes = laplacian_modes(*mesh, m_max);
  std::seed_seq seq{static_cast<std::uint32_t>(opts.rng_seed & 0xffffffffu),
                    static_cast<std::uint32_t>(opts.rng_seed >> 32), 0x6d6d78u};
  std::mt19937_64 rng(seq);

  std::vector<MinimaxBound> table;
  Eigen::MatrixXd V(mesh->num_nodes(), 0);
  Eigen::VectorXd warm;
  for (int m = 1; m <= m_max; ++m) {
    V.conservativeResize(Eigen::NoChange, m);
    V.col(m - 1) = modes.vectors.col(m - 1);
    Eigen::VectorXd padded = Eigen::VectorXd::Zero(m);
    if (warm.size() == m - 1) padded.head(m - 1) = warm;
    padded = orthonormalize(V, padded);

    MinimaxBound row;
    row.m = m;
    auto starts = start_set(m, padded, opts.restarts, rng);
    row.inner_starts += static_cast<int>(starts.size());
    InnerMax current = inner_max(F, V, starts);
    const Eigen::MatrixXd seeded_frame = V;
    const InnerMax seeded = current;

    for (int outer = 0; outer < kOuterIterations; ++outer) {
      const Eigen::VectorXd u = V * current.coeff;
      const auto e = F.evaluate(u);
      const Eigen::VectorXd g = (e.dK - e.ratio * e.dk) / e.k;
      const Eigen::VectorXd dir = -e.ratio * P.apply(g);
      const double slope = g.dot(dir);
      if (!(slope < 0.0)) break;
      double step = opts.initial_step;
      bool accepted = false;
      for (int ls = 0; ls < 30; ++ls) {
        Eigen::MatrixXd trial = V + step * dir * current.coeff.transpose();
        const Eigen::VectorXd mapped = orthonormalize(trial, current.coeff);
        InnerMax next = inner_max(F, trial, {mapped});
        if (next.value <= current.value + opts.slope_fraction * step * slope) {
          const double gain = current.value - next.value;
          V = std::move(trial);
          current = std::move(next);
          accepted = true;
          if (gain <= opts.tol_lambda * current.value) outer = kOuterIterations;
          break;
        }
        step *= opts.shrink;
      }
      ++row.outer_iterations;
      if (!accepted) break;
    }

    // Final multi-start maximization on the settled frame.
    starts = start_set(m, current.coeff, opts.restarts, rng);
    row.inner_starts += static_cast<int>(starts.size());
    current = inner_max(F, V, starts);
    // Descent steps are judged with warm-started maxima; keep the seeded
    // frame if the full search shows no real gain.
    if (current.value > seeded.value) {
      V = seeded_frame;
      current = seeded;
    }
    row.value = current.value;
    warm = current.coeff;
    table.push_back(row);
  }
  return table;
}

double minimax_upper_bound(MeshPtr mesh, const DoublePhase& H, int m, const SolverOptions& opts) {
  return minimax_table(std::move(mesh), H, m, opts).back().value;
}

}  // namespace dphase
