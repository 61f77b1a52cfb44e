#include "dphase/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <random>

#include <fmt/format.h>
#include <json.hpp>

#include "dphase/errors.hpp"
#include "dphase/field_io.hpp"

namespace dphase {

namespace {

inline double power(double x, double e) { return e == 2.0 ? x * x : std::pow(x, e); }

std::span<const double> view(const Eigen::VectorXd& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

Eigen::VectorXd to_vector(const Field& u) {
  return Eigen::Map<const Eigen::VectorXd>(u.values.data(), static_cast<Eigen::Index>(u.values.size()));
}

Field to_field(MeshPtr mesh, const Eigen::VectorXd& x) {
  Field u;
  u.mesh = std::move(mesh);
  u.values.assign(x.data(), x.data() + x.size());
  return u;
}

void check_cell_weight(const Mesh& mesh, const DoublePhase& H) {
  if (H.points() != static_cast<std::size_t>(mesh.num_cells())) {
    throw ShapeError(fmt::format("weight has {} points, mesh has {} cells", H.points(), mesh.num_cells()));
  }
}

}  // namespace

void SolverOptions::validate() const {
  if (!(tol_lambda > 0.0) || !(tol_residual > 0.0)) throw DomainError("solver tolerances must be positive");
  if (max_iter < 1) throw DomainError("solver.max_iter must be >= 1");
  if (restarts < 1) throw DomainError("solver.restarts must be >= 1");
  if (!(initial_step > 0.0)) throw DomainError("solver.initial_step must be positive");
  if (!(shrink > 0.0 && shrink < 1.0)) throw DomainError("solver.shrink must lie in (0, 1)");
  if (!(slope_fraction > 0.0 && slope_fraction < 1.0)) throw DomainError("solver.slope_fraction must lie in (0, 1)");
  if (!(noise >= 0.0)) throw DomainError("solver.noise must be >= 0");
  if (memory < 0) throw DomainError("solver.memory must be >= 0");
}

NormDerivative norm_derivative(std::span<const double> samples, const DoublePhase& H, ModularKind kind) {
  NormDerivative out;
  out.derivative.assign(samples.size(), 0.0);
  out.value = luxemburg_norm(samples, H, kind).value;
  if (out.value == 0.0) return out;
  const double p = H.p();
  const double q = H.q();
  const auto& a = H.weight().values;
  const double inv = 1.0 / out.value;
  double denom = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double t = std::abs(samples[i]) * inv;
    if (t == 0.0) continue;
    const double d = p * power(t, p - 1.0) + (a[i] > 0.0 ? q * a[i] * power(t, q - 1.0) : 0.0);
    denom += d * t;
    out.derivative[i] = samples[i] < 0.0 ? -d : d;
  }
  for (double& d : out.derivative) d /= denom;
  out.energy = denom * H.point_measure();
  return out;
}

RayleighFunctional::RayleighFunctional(MeshPtr mesh, DoublePhase H, ModularKind kind)
    : mesh_(std::move(mesh)), H_(std::move(H)), kind_(kind) {
  check_cell_weight(*mesh_, H_);
  hat_scale_.assign(mesh_->num_nodes(), 0.0);
  const double meas = mesh_->cell_measure();
  const double corner = mesh_->dim() == 1
                            ? 1.0 / mesh_->hx()
                            : 0.5 * std::hypot(1.0 / mesh_->hx(), 1.0 / mesh_->hy());
  const int corners = mesh_->dim() == 1 ? 2 : 4;
  for (int c = 0; c < mesh_->num_cells(); ++c) {
    const auto& nd = mesh_->cell_nodes(c);
    for (int k = 0; k < corners; ++k) {
      if (nd[k] != Mesh::kGhost) hat_scale_[nd[k]] += corner * meas;
    }
  }
}

double RayleighFunctional::function_norm(const Eigen::VectorXd& x) const {
  return luxemburg_norm(cell_values(*mesh_, view(x)), H_, kind_).value;
}

double RayleighFunctional::gradient_norm(const Eigen::VectorXd& x) const {
  return luxemburg_norm(gradient(*mesh_, view(x)).magnitude, H_, kind_).value;
}

double RayleighFunctional::ratio(const Eigen::VectorXd& x) const {
  const double k = function_norm(x);
  if (k == 0.0) return std::numeric_limits<double>::infinity();
  return gradient_norm(x) / k;
}

RayleighFunctional::Evaluation RayleighFunctional::evaluate(const Eigen::VectorXd& x) const {
  const Mesh& mesh = *mesh_;
  Evaluation e;
  const auto cells = cell_values(mesh, view(x));
  const auto fn = norm_derivative(cells, H_, kind_);
  if (fn.value == 0.0) throw DomainError("Rayleigh quotient of the zero field");
  const auto grad = gradient(mesh, view(x));
  const auto gn = norm_derivative(grad.magnitude, H_, kind_);

  e.k = fn.value;
  e.K = gn.value;
  e.ratio = e.K / e.k;
  e.energy_k = fn.energy;
  e.energy_K = gn.energy;
  e.dk = Eigen::VectorXd::Zero(x.size());
  e.dK = Eigen::VectorXd::Zero(x.size());
  add_cell_values_adjoint(mesh, fn.derivative, {e.dk.data(), static_cast<std::size_t>(x.size())});

  const int nc = mesh.num_cells();
  std::vector<double> cx(nc, 0.0), cy(mesh.dim() == 2 ? nc : 0, 0.0);
  for (int c = 0; c < nc; ++c) {
    const double m = grad.magnitude[c];
    if (m == 0.0) continue;
    // derivative[c] carries sign(m) = +1; chain through m = |(dx, dy)|.
    cx[c] = gn.derivative[c] * grad.dx[c] / m;
    if (mesh.dim() == 2) cy[c] = gn.derivative[c] * grad.dy[c] / m;
  }
  add_gradient_adjoint(mesh, cx, cy, {e.dK.data(), static_cast<std::size_t>(x.size())});
  return e;
}

double RayleighFunctional::residual(const Evaluation& e, double lambda) const {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < e.dK.size(); ++j) {
    worst = std::max(worst, std::abs(e.dK(j) - lambda * e.dk(j)) / hat_scale_[j]);
  }
  return worst * e.energy_K;
}

double rayleigh(const Field& u, const DoublePhase& H, ModularKind kind) {
  const double k = luxemburg_norm(u, H, kind).value;
  if (k == 0.0) throw DomainError("Rayleigh quotient of the zero field");
  return gradient_norm(u, H, kind) / k;
}

double s_of_u(const Field& u, double lambda, const DoublePhase& H) {
  const auto cells = cell_values(u);
  const auto grad = gradient(u);
  const double k = luxemburg_norm(cells, H).value;
  const double K = luxemburg_norm(grad.magnitude, H).value;
  if (std::abs(k - 1.0) > 1e-6) throw ContractError(fmt::format("S(u) needs ||u||_H = 1 (got {})", k));
  if (!(lambda > 0.0) || std::abs(K - lambda) > 1e-6 * lambda) {
    throw ContractError(fmt::format("S(u) needs lambda = ||grad u||_H (got {} vs {})", lambda, K));
  }
  const double p = H.p();
  const double q = H.q();
  const auto& a = H.weight().values;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double tau = grad.magnitude[c] / lambda;
    const double t = std::abs(cells[c]);
    num += p * power(tau, p) + q * a[c] * power(tau, q);
    den += p * power(t, p) + q * a[c] * power(t, q);
  }
  return num / den;
}

double kprime_pairing(const Field& u, const Field& v, const DoublePhase& H) {
  if (v.size() != u.size()) throw ShapeError("pairing fields differ in size");
  const auto nd = norm_derivative(cell_values(u), H);
  if (nd.value == 0.0) throw DomainError("k'(u) undefined at u = 0");
  const auto cv = cell_values(v);
  double s = 0.0;
  for (std::size_t c = 0; c < cv.size(); ++c) s += nd.derivative[c] * cv[c];
  return s;
}

double Kprime_pairing(const Field& u, const Field& v, const DoublePhase& H) {
  if (v.size() != u.size()) throw ShapeError("pairing fields differ in size");
  const auto gu = gradient(u);
  const auto nd = norm_derivative(gu.magnitude, H);
  if (nd.value == 0.0) throw DomainError("K'(u) undefined when grad u = 0");
  const auto gv = gradient(v);
  double s = 0.0;
  for (std::size_t c = 0; c < gu.magnitude.size(); ++c) {
    const double m = gu.magnitude[c];
    if (m == 0.0) continue;
    double dot = gu.dx[c] * gv.dx[c];
    if (gu.dim == 2) dot += gu.dy[c] * gv.dy[c];
    s += nd.derivative[c] * dot / m;
  }
  return s;
}

DerivativeCheck directional_derivative_check(const Field& u, const Field& v, const DoublePhase& H, double eps) {
  Field plus = u, minus = u;
  for (std::size_t i = 0; i < u.size(); ++i) {
    plus.values[i] += eps * v.values[i];
    minus.values[i] -= eps * v.values[i];
  }
  DerivativeCheck out;
  out.analytic_k = kprime_pairing(u, v, H);
  out.analytic_K = Kprime_pairing(u, v, H);
  out.numeric_k = (luxemburg_norm(plus, H).value - luxemburg_norm(minus, H).value) / (2.0 * eps);
  out.numeric_K = (gradient_norm(plus, H) - gradient_norm(minus, H)) / (2.0 * eps);
  return out;
}

double weak_residual(const Field& u, double lambda, const DoublePhase& H) {
  const RayleighFunctional f(u.mesh, H);
  return f.residual(f.evaluate(to_vector(u)), lambda);
}

namespace {

struct Run {
  Eigen::VectorXd x;
  double lambda = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct Pair {
  Eigen::VectorXd s;
  Eigen::VectorXd y;
  double rho;
};

Run descend(const RayleighFunctional& F, const Preconditioner& P, Eigen::VectorXd x, const SolverOptions& opts) {
  x /= F.function_norm(x);
  auto e = F.evaluate(x);
  Eigen::VectorXd g = (e.dK - e.ratio * e.dk) / e.k;
  std::deque<Pair> memory;
  Run run;
  int it = 0;
  while (it < opts.max_iter) {
    ++it;
    // Two-loop recursion with a preconditioned initial inverse Hessian.
    Eigen::VectorXd d;
    if (memory.empty()) {
      d = -e.ratio * P.apply(g);
    } else {
      Eigen::VectorXd work = g;
      std::vector<double> alpha(memory.size());
      for (std::size_t i = memory.size(); i-- > 0;) {
        alpha[i] = memory[i].rho * memory[i].s.dot(work);
        work -= alpha[i] * memory[i].y;
      }
      const Pair& last = memory.back();
      const Eigen::VectorXd Py = P.apply(last.y);
      Eigen::VectorXd r = (last.s.dot(last.y) / last.y.dot(Py)) * P.apply(work);
      for (std::size_t i = 0; i < memory.size(); ++i) {
        const double beta = memory[i].rho * memory[i].y.dot(r);
        r += (alpha[i] - beta) * memory[i].s;
      }
      d = -r;
    }
    double slope = g.dot(d);
    if (!(slope < 0.0)) {
      memory.clear();
      d = -e.ratio * P.apply(g);
      slope = g.dot(d);
      if (!(slope < 0.0)) break;
    }

    double step = opts.initial_step;
    bool accepted = false;
    Eigen::VectorXd trial;
    for (int ls = 0; ls < 60; ++ls) {
      trial = x + step * d;
      const double r = F.ratio(trial);
      if (r <= e.ratio + opts.slope_fraction * step * slope) {
        accepted = true;
        break;
      }
      step *= opts.shrink;
    }
    if (!accepted) {
      if (!memory.empty()) {
        memory.clear();
        continue;
      }
      break;
    }

    trial /= F.function_norm(trial);
    auto next = F.evaluate(trial);
    Eigen::VectorXd g_next = (next.dK - next.ratio * next.dk) / next.k;
    Pair pair{trial - x, g_next - g, 0.0};
    const double sy = pair.s.dot(pair.y);
    if (opts.memory > 0 && sy > 1e-14 * pair.s.norm() * pair.y.norm()) {
      pair.rho = 1.0 / sy;
      memory.push_back(std::move(pair));
      if (static_cast<int>(memory.size()) > opts.memory) memory.pop_front();
    }
    const double change = std::abs(next.ratio - e.ratio) / next.ratio;
    x = std::move(trial);
    e = std::move(next);
    g = std::move(g_next);
    if (change <= opts.tol_lambda && F.residual(e, e.ratio) <= opts.tol_residual) {
      run.converged = true;
      break;
    }
  }
  run.x = std::move(x);
  run.lambda = e.ratio;
  run.iterations = it;
  return run;
}

}  // namespace

Eigenpair first_eigenpair(MeshPtr mesh, const DoublePhase& H, const SolverOptions& opts) {
  opts.validate();
  const RayleighFunctional F(mesh, H, opts.modular);
  const Preconditioner P(*mesh);
  Eigen::VectorXd base = laplacian_modes(*mesh, 1).vectors.col(0);
  if (base.sum() < 0.0) base = -base;
  base /= base.cwiseAbs().maxCoeff();

  Eigenpair best;
  best.seed = opts.rng_seed;
  Run winner;
  bool have = false;
  for (int r = 0; r < opts.restarts; ++r) {
    std::seed_seq seq{static_cast<std::uint32_t>(opts.rng_seed & 0xffffffffu),
                      static_cast<std::uint32_t>(opts.rng_seed >> 32), static_cast<std::uint32_t>(r)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    Eigen::VectorXd white(base.size());
    for (Eigen::Index i = 0; i < white.size(); ++i) white(i) = uniform(rng);
    Eigen::VectorXd bump = P.apply(white);
    const double top = bump.cwiseAbs().maxCoeff();
    Eigen::VectorXd start = base;
    if (top > 0.0) start += (opts.noise / top) * bump;

    Run run = descend(F, P, start, opts);
    best.restart_lambdas.push_back(run.lambda);
    const bool better = !have || (run.converged && !winner.converged) ||
                        (run.converged == winner.converged && run.lambda < winner.lambda);
    if (better) {
      winner = std::move(run);
      best.restart = r;
      have = true;
    }
  }

  Eigen::VectorXd x = winner.x.cwiseAbs();
  x /= F.function_norm(x);
  const auto e = F.evaluate(x);
  best.u = to_field(mesh, x);
  best.lambda = e.K;
  best.residual = F.residual(e, e.K);
  best.iterations = winner.iterations;
  best.converged = winner.converged && best.residual <= opts.tol_residual;
  best.s_of_u = e.energy_K / e.energy_k;
  return best;
}

int spectrum_counting(std::span<const double> lambdas, double lambda) {
  if (!std::is_sorted(lambdas.begin(), lambdas.end())) throw DomainError("eigenvalue list must be ascending");
  return static_cast<int>(std::lower_bound(lambdas.begin(), lambdas.end(), lambda) - lambdas.begin());
}

std::string eigenpair_metadata_json(const Eigenpair& pair, const DoublePhase& H, const EigenpairMetadata& meta) {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["p"] = H.p();
  j["q"] = H.q();
  j["weight"] = meta.weight;
  j["mesh"] = meta.mesh;
  j["lambda"] = pair.lambda;
  j["residual"] = pair.residual;
  j["s_of_u"] = pair.s_of_u;
  j["iterations"] = pair.iterations;
  j["converged"] = pair.converged;
  j["restart"] = pair.restart;
  j["restart_lambdas"] = pair.restart_lambdas;
  j["seed"] = pair.seed;
  return j.dump(2) + "\n";
}

void save_eigenpair(const Eigenpair& pair, const DoublePhase& H, const EigenpairMetadata& meta,
                    const std::string& csv_path, const std::string& json_path) {
  write_field_csv(csv_path, pair.u);
  std::ofstream out(json_path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", json_path));
  out << eigenpair_metadata_json(pair, H, meta);
}

}  // namespace dphase
