#include "dphase/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <fmt/format.h>

#include "dphase/errors.hpp"
#include "dphase/oracle1d.hpp"
#include "dphase/orlicz.hpp"

namespace dphase {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigenpair solve(MeshPtr mesh, const DoublePhase& H, const ExperimentOptions& opts, std::uint64_t seed,
                ModularKind kind = ModularKind::standard) {
  SolverOptions s = opts.solver;
  s.rng_seed = seed;
  s.modular = kind;
  return first_eigenpair(std::move(mesh), H, s);
}

const char* row_status(bool converged) { return converged ? "ok" : "nonconverged"; }

Check all_converged_check(int failures, int total) {
  return {"all_converged", failures == 0, static_cast<double>(failures), 0.0, 0.0,
          fmt::format("{} of {} solves did not converge", failures, total)};
}

std::string fmt_double(double v) { return fmt::format("{:.10g}", v); }

void check_phase(double p, double q) {
  if (!(p > 1.0) || !(q >= p)) throw DomainError(fmt::format("need 1 < p <= q, got p = {}, q = {}", p, q));
}

// Lp norm of the difference of two nodal fields on their cell samples.
double relative_lp_distance(const Field& a, const Field& b, double p) {
  const auto ca = cell_values(a);
  const auto cb = cell_values(b);
  std::vector<double> diff(ca.size());
  for (std::size_t i = 0; i < ca.size(); ++i) diff[i] = ca[i] - cb[i];
  const double h = a.mesh->cell_measure();
  const double base = lp_norm(ca, p, h);
  return base > 0.0 ? lp_norm(diff, p, h) / base : 0.0;
}

double gradient_lp(const Field& u, double p) {
  return lp_norm(gradient(u).magnitude, p, u.mesh->cell_measure());
}

std::vector<double> parse_sizes(const std::string& body, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad size '{}' in family '{}'", item, text));
    }
  }
  if (out.size() < 2) throw ConfigError(fmt::format("family '{}' needs at least two domains", text));
  return out;
}

int whole_cells(double size, int resolution, const std::string& text) {
  const double cells = size * resolution;
  const long rounded = std::lround(cells);
  if (!(size > 0.0) || std::abs(cells - static_cast<double>(rounded)) > 1e-9 * std::max(1.0, cells) ||
      rounded < 2) {
    throw ConfigError(fmt::format("size {} in '{}' is not a whole number (>= 2) of cells at resolution {}", size,
                                  text, resolution));
  }
  return static_cast<int>(rounded);
}

}  // namespace

double lumped_modular(const Field& u, double p, double q, double a) {
  std::vector<double> terms(u.values.size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double t = std::abs(u.values[i]);
    terms[i] = std::pow(t, p) + a * std::pow(t, q);
  }
  std::sort(terms.begin(), terms.end());
  double sum = 0.0;
  for (double t : terms) sum += t;
  return sum * u.mesh->cell_measure();
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"stability", "domains", "faberkrahn", "largeexp", "weyl", "symmetry"};
  return names;
}

// ---------------------------------------------------------------------------

ExperimentReport run_stability(const StabilityConfig& cfg, const ExperimentOptions& opts) {
  check_phase(cfg.p, cfg.q);
  if (cfg.steps < 1) throw DomainError("stability needs steps >= 1");
  if (!(cfg.delta0 >= 0.0)) throw DomainError("stability needs delta0 >= 0");
  check_phase(cfg.p + cfg.delta0, cfg.q + cfg.delta0);
  const MeshPtr mesh = cfg.domain.build();
  const DoublePhase H(cfg.p, cfg.q, cfg.weight.on_cells(*mesh));

  const auto steps = static_cast<std::size_t>(cfg.steps);
  std::vector<Eigenpair> results(steps + 1);
  parallel_for(steps + 1, opts.threads, [&](std::size_t i) {
    if (i == steps) {
      results[i] = solve(mesh, H, opts, opts.seed + i);
      return;
    }
    const double shift = cfg.delta0 / static_cast<double>(i + 1);
    results[i] = solve(mesh, H.with_exponents(cfg.p + shift, cfg.q + shift), opts, opts.seed + i);
  });

  const Eigenpair& limit = results[steps];
  ExperimentReport report("stability", {"h", "p_h", "q_h", "lambda", "lambda_limit", "gap", "rel_gap", "residual",
                                        "iterations", "converged", "seed", "resolution"});
  int failures = limit.converged ? 0 : 1;
  std::vector<double> gaps;
  for (std::size_t i = 0; i < steps; ++i) {
    const double h = static_cast<double>(i + 1);
    const Eigenpair& r = results[i];
    const double gap = std::abs(r.lambda - limit.lambda);
    gaps.push_back(gap);
    failures += r.converged ? 0 : 1;
    report.add_row({h, cfg.p + cfg.delta0 / h, cfg.q + cfg.delta0 / h, r.lambda, limit.lambda, gap,
                    gap / limit.lambda, r.residual, static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0,
                    static_cast<double>(r.seed), static_cast<double>(cfg.domain.resolution)},
                   row_status(r.converged));
  }

  const double final_rel = gaps.back() / limit.lambda;
  report.add_check({"final_gap", final_rel <= cfg.tolerance, final_rel, cfg.tolerance, 0.0,
                    fmt::format("|lambda_h - lambda| / lambda at h = {}", cfg.steps)});
  // Solver noise on each lambda is far below this.
  const double slack = 1e-8 * limit.lambda;
  double worst_rise = 0.0;
  for (std::size_t i = static_cast<std::size_t>(std::max(1, cfg.trend_from)); i < gaps.size(); ++i) {
    worst_rise = std::max(worst_rise, gaps[i] - gaps[i - 1]);
  }
  report.add_check({"gaps_weakly_decreasing", worst_rise <= slack, worst_rise, 0.0, slack,
                    fmt::format("largest increase of the gap for h >= {}", cfg.trend_from)});
  report.add_check(all_converged_check(failures, cfg.steps + 1));

  report.add_summary("p", fmt_double(cfg.p));
  report.add_summary("q", fmt_double(cfg.q));
  report.add_summary("delta0", fmt_double(cfg.delta0));
  report.add_summary("weight", cfg.weight.to_string());
  report.add_summary("mesh", mesh->describe());
  report.add_summary("lambda_limit", fmt_double(limit.lambda));
  report.add_summary("limit_seed", std::to_string(limit.seed));
  report.set_plot({"h", {"lambda", "lambda_limit"}, false, "lambda_1 along (p + d/h, q + d/h)"});
  return report;
}

// ---------------------------------------------------------------------------

NestedFamily nested_family(const std::string& descriptor, int resolution) {
  if (resolution < 2) throw ConfigError("family resolution must be >= 2");
  const auto colon = descriptor.find(':');
  if (colon == std::string::npos) {
    throw ConfigError(fmt::format("family '{}' must look like intervals:L1,L2,... or squares:s1,s2,...", descriptor));
  }
  const std::string kind = descriptor.substr(0, colon);
  NestedFamily family;
  family.sizes = parse_sizes(descriptor.substr(colon + 1), descriptor);
  family.resolution = resolution;
  if (kind == "intervals") {
    family.intervals = true;
    for (double L : family.sizes) {
      family.meshes.push_back(Mesh::interval(0.0, L, whole_cells(L, resolution, descriptor)));
    }
  } else if (kind == "squares") {
    family.intervals = false;
    const double top = *std::max_element(family.sizes.begin(), family.sizes.end());
    const int n = whole_cells(top, resolution, descriptor);
    for (double s : family.sizes) {
      const int k = whole_cells(s, resolution, descriptor);
      std::vector<bool> inside(static_cast<std::size_t>(n) * n, false);
      for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) inside[static_cast<std::size_t>(j) * n + i] = true;
      }
      family.meshes.push_back(Mesh::masked_rectangle({0.0, 0.0}, {top, top}, n, n, std::move(inside)));
    }
  } else {
    throw ConfigError(fmt::format("unknown family kind '{}' (intervals, squares)", kind));
  }
  if (!is_nested(family.meshes)) throw GeometryError(fmt::format("family '{}' is not nested", descriptor));
  return family;
}

ExperimentReport run_domain_monotonicity(const DomainsConfig& cfg, const ExperimentOptions& opts) {
  check_phase(cfg.p, cfg.q);
  const NestedFamily family = nested_family(cfg.family, cfg.resolution);
  const std::size_t count = family.meshes.size();
  const bool with_oracle = family.intervals && cfg.p == cfg.q;

  std::vector<Eigenpair> results(count);
  std::vector<double> oracle(count, kNaN);
  parallel_for(count, opts.threads, [&](std::size_t i) {
    const MeshPtr& mesh = family.meshes[i];
    results[i] = solve(mesh, DoublePhase(cfg.p, cfg.q, cfg.weight.on_cells(*mesh)), opts, opts.seed + i);
    if (with_oracle) {
      oracle[i] = std::pow(plap_shooting(cfg.p, 0.0, family.sizes[i], 1, 64).lambda, 1.0 / cfg.p);
    }
  });

  ExperimentReport report("domains", {"index", "size", "measure", "lambda", "oracle", "oracle_rel_err", "residual",
                                      "iterations", "converged", "seed", "resolution"});
  int failures = 0;
  double worst_oracle = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    const Eigenpair& r = results[i];
    failures += r.converged ? 0 : 1;
    const double err = with_oracle ? std::abs(r.lambda - oracle[i]) / oracle[i] : kNaN;
    if (with_oracle) worst_oracle = std::max(worst_oracle, err);
    report.add_row({static_cast<double>(i), family.sizes[i], family.meshes[i]->total_measure(), r.lambda, oracle[i],
                    err, r.residual, static_cast<double>(r.iterations), r.converged ? 1.0 : 0.0,
                    static_cast<double>(r.seed), static_cast<double>(cfg.resolution)},
                   row_status(r.converged));
  }

  double worst_rise = 0.0;
  for (std::size_t i = 1; i < count; ++i) {
    worst_rise = std::max(worst_rise, (results[i].lambda - results[i - 1].lambda) / results[i - 1].lambda);
  }
  report.add_check({"non_increasing_chain", worst_rise <= cfg.slack, worst_rise, 0.0, cfg.slack,
                    "largest relative increase of lambda along the family"});
  const double last = results[count - 1].lambda;
  const double gap = std::abs(results[count - 2].lambda - last) / last;
  report.add_check({"final_gap", gap <= cfg.final_gap, gap, cfg.final_gap, 0.0,
                    "relative gap between the two largest domains"});
  if (with_oracle) {
    report.add_check({"oracle_agreement", worst_oracle <= cfg.oracle_tol, worst_oracle, cfg.oracle_tol, 0.0,
                      "largest relative deviation from the shooting value"});
  }
  report.add_check(all_converged_check(failures, static_cast<int>(count)));

  report.add_summary("family", cfg.family);
  report.add_summary("p", fmt_double(cfg.p));
  report.add_summary("q", fmt_double(cfg.q));
  report.add_summary("weight", cfg.weight.to_string());
  report.set_plot({"size", {"lambda", "oracle"}, false, "lambda_1 on nested domains"});
  return report;
}

// ---------------------------------------------------------------------------

ExperimentReport run_faber_krahn(const FaberKrahnConfig& cfg, const ExperimentOptions& opts) {
  check_phase(cfg.p, cfg.q);
  if (cfg.domain.dim() != 2) throw DomainError("Faber-Krahn comparison needs a 2D domain");
  const int fine = cfg.domain.resolution;
  if (fine < 8 || fine % 2 != 0) throw DomainError("Faber-Krahn needs an even resolution >= 8");

  // Jobs: domain N, disk N, domain N/2, disk N/2.
  std::vector<MeshPtr> meshes(4);
  for (int level = 0; level < 2; ++level) {
    meshes[2 * level] = cfg.domain.build(level == 0 ? fine : fine / 2);
    meshes[2 * level + 1] = equal_measure_ball(*meshes[2 * level]);
    if (std::abs(meshes[2 * level + 1]->num_cells() - meshes[2 * level]->num_cells()) > 1) {
      throw GeometryError("equal-measure disk differs by more than one cell");
    }
  }
  std::vector<Eigenpair> results(4);
  parallel_for(4, opts.threads, [&](std::size_t i) {
    const Mesh& m = *meshes[i];
    const DoublePhase H(cfg.p, cfg.q, WeightField::constant(m.num_cells(), 1.0, m.cell_measure()));
    results[i] = solve(meshes[i], H, opts, opts.seed + i);
  });

  ExperimentReport report("faberkrahn", {"resolution", "is_disk", "cells", "nodes", "measure", "lambda", "residual",
                                         "iterations", "converged", "seed"});
  int failures = 0;
  for (std::size_t i = 0; i < 4; ++i) {
    const Eigenpair& r = results[i];
    failures += r.converged ? 0 : 1;
    report.add_row({static_cast<double>(i < 2 ? fine : fine / 2), static_cast<double>(i % 2),
                    static_cast<double>(meshes[i]->num_cells()), static_cast<double>(meshes[i]->num_nodes()),
                    meshes[i]->total_measure(), r.lambda, r.residual, static_cast<double>(r.iterations),
                    r.converged ? 1.0 : 0.0, static_cast<double>(r.seed)},
                   row_status(r.converged));
  }

  const double lam_domain = results[0].lambda;
  const double lam_disk = results[1].lambda;
  const double slack = std::abs(results[0].lambda - results[2].lambda) + std::abs(results[1].lambda - results[3].lambda);
  const double margin = lam_domain - lam_disk;
  report.add_check({"disk_not_above_domain", lam_disk <= lam_domain + slack, lam_disk, lam_domain, slack,
                    "lambda(disk) <= lambda(domain) + resolution drift"});
  if (cfg.domain.kind != DomainSpec::Kind::disk) {
    report.add_check({"margin_exceeds_slack", margin > slack, margin, slack, 0.0,
                      "lambda(domain) - lambda(disk) against the N vs N/2 drift of both"});
  }

  // Symmetrization diagnostics on the fine eigenfunction.
  const Field& u = results[0].u;
  const Symmetrization sym = schwarz_symmetrize(u);
  const double mod_u = lumped_modular(u, cfg.p, cfg.q);
  const double mod_star = lumped_modular(sym.field, cfg.p, cfg.q);
  report.add_check({"symmetrization_modular", mod_u == mod_star, std::abs(mod_u - mod_star), 0.0, 0.0,
                    "lumped modular of u and u*"});
  const double grad_u = gradient_lp(u, cfg.p);
  const double grad_star = gradient_lp(sym.field, cfg.p);
  report.add_check({"polya_szego", grad_star <= grad_u * (1.0 + cfg.polya_slack), grad_star / grad_u, 1.0,
                    cfg.polya_slack, "||grad u*||_p / ||grad u||_p"});
  report.add_check(all_converged_check(failures, 4));

  const DoublePhase ball_phase(cfg.p, cfg.q,
                               WeightField::constant(sym.field.mesh->num_cells(), 1.0, sym.field.mesh->cell_measure()));
  report.add_summary("p", fmt_double(cfg.p));
  report.add_summary("q", fmt_double(cfg.q));
  report.add_summary("domain", meshes[0]->describe());
  report.add_summary("disk", meshes[1]->describe());
  report.add_summary("margin", fmt_double(margin));
  report.add_summary("slack", fmt_double(slack));
  report.add_summary("rayleigh_u_star", fmt_double(rayleigh(sym.field, ball_phase)));
  report.add_summary("symmetrization_node_mismatch", std::to_string(sym.node_mismatch));
  report.add_summary("symmetrization_padded_nodes", std::to_string(sym.padded_nodes));
  report.set_plot({"resolution", {"lambda"}, false, "lambda_1: domain and equal-measure disk"});
  return report;
}

// ---------------------------------------------------------------------------

ExperimentReport run_large_exponents(const LargeExpConfig& cfg, const ExperimentOptions& opts) {
  if (!(cfg.p > 1.0) || !(cfg.q > cfg.p)) throw DomainError("large exponents need 1 < p < q");
  if (cfg.h_list.empty()) throw DomainError("h_list is empty");
  for (int h : cfg.h_list) {
    if (h < 1) throw DomainError(fmt::format("scale h = {} must be >= 1", h));
  }
  const MeshPtr mesh = cfg.domain.build();
  const DoublePhase H(cfg.p, cfg.q, cfg.weight.on_cells(*mesh));
  const double target = 1.0 / inradius(*mesh);
  const double c = H.domain_measure() + H.weight().l1_norm;

  const std::size_t n = cfg.h_list.size();
  std::vector<Eigenpair> results(2 * n);
  parallel_for(2 * n, opts.threads, [&](std::size_t i) {
    const std::size_t k = i / 2;
    const auto kind = i % 2 == 0 ? ModularKind::rescaled : ModularKind::standard;
    results[i] = solve(mesh, H.scaled(cfg.h_list[k]), opts, opts.seed + i, kind);
  });

  ExperimentReport report("largeexp", {"h", "hp", "hq", "lambda_rescaled", "lambda_standard", "target", "gap",
                                       "rel_gap", "bracket_lo", "bracket_hi", "residual", "converged", "seed",
                                       "resolution"});
  int failures = 0;
  std::vector<double> gaps;
  bool bracket_ok = true;
  double worst_bracket = 0.0;
  const double bracket_slack = 1e-8;
  for (std::size_t k = 0; k < n; ++k) {
    const Eigenpair& rs = results[2 * k];
    const Eigenpair& st = results[2 * k + 1];
    const bool conv = rs.converged && st.converged;
    failures += (rs.converged ? 0 : 1) + (st.converged ? 0 : 1);
    const double gap = std::abs(rs.lambda - target);
    gaps.push_back(gap);
    const double lo = c >= 1.0 ? rs.lambda / c : c * rs.lambda;
    const double hi = c >= 1.0 ? c * rs.lambda : rs.lambda / c;
    const double below = (lo - st.lambda) / lo;
    const double above = (st.lambda - hi) / hi;
    worst_bracket = std::max({worst_bracket, below, above});
    if (below > bracket_slack || above > bracket_slack) bracket_ok = false;
    const double h = cfg.h_list[k];
    report.add_row({h, h * cfg.p, h * cfg.q, rs.lambda, st.lambda, target, gap, gap / target, lo, hi,
                    std::max(rs.residual, st.residual), conv ? 1.0 : 0.0, static_cast<double>(rs.seed),
                    static_cast<double>(cfg.domain.resolution)},
                   row_status(conv));
  }

  const std::size_t tail = (n + 1) / 2;
  bool decreasing = true;
  double worst_rise = -std::numeric_limits<double>::infinity();
  for (std::size_t k = n - tail + 1; k < n; ++k) {
    worst_rise = std::max(worst_rise, gaps[k] - gaps[k - 1]);
    if (!(gaps[k] < gaps[k - 1])) decreasing = false;
  }
  if (tail < 2) worst_rise = 0.0;
  report.add_check({"gap_decreasing_tail", decreasing, worst_rise, 0.0, 0.0,
                    fmt::format("gap strictly decreasing over the last {} values of h", tail)});
  const double final_rel = gaps.back() / target;
  report.add_check({"final_gap", final_rel <= cfg.final_gap, final_rel, cfg.final_gap, 0.0,
                    "|lambda~ - 1/R| / (1/R) at the largest h"});
  report.add_check({"equivalence_bracket", bracket_ok, worst_bracket, 0.0, bracket_slack,
                    fmt::format("standard lambda within [lambda~/c, c lambda~], c = {:.10g}", c)});
  report.add_check(all_converged_check(failures, static_cast<int>(2 * n)));

  report.add_summary("p", fmt_double(cfg.p));
  report.add_summary("q", fmt_double(cfg.q));
  report.add_summary("weight", cfg.weight.to_string());
  report.add_summary("mesh", mesh->describe());
  report.add_summary("inradius", fmt_double(1.0 / target));
  report.add_summary("target", fmt_double(target));
  report.add_summary("bracket_constant", fmt_double(c));
  report.set_plot({"h", {"lambda_rescaled", "lambda_standard", "target"}, false, "lambda~_1 of hH against 1/R"});
  return report;
}

// ---------------------------------------------------------------------------

ExperimentReport run_weyl(const WeylConfig& cfg, const ExperimentOptions& opts) {
  check_phase(cfg.p, cfg.q);
  if (cfg.m_max < 3) throw DomainError("Weyl fit needs m_max >= 3");
  const MeshPtr mesh = cfg.domain.build();
  const DoublePhase H(cfg.p, cfg.q, cfg.weight.on_cells(*mesh));
  const double n = mesh->dim();
  const double sigma = n * (1.0 / cfg.p - 1.0 / cfg.q);

  Eigenpair first;
  std::vector<MinimaxBound> table;
  parallel_for(2, opts.threads, [&](std::size_t i) {
    if (i == 0) {
      first = solve(mesh, H, opts, opts.seed);
    } else {
      SolverOptions s = opts.solver;
      s.rng_seed = opts.seed + 1;
      table = minimax_table(mesh, H, cfg.m_max, s);
    }
  });

  std::vector<double> bounds;
  for (const auto& row : table) bounds.push_back(row.value);
  std::vector<double> sorted = bounds;
  std::sort(sorted.begin(), sorted.end());

  ExperimentReport report("weyl", {"m", "bound", "log_m", "log_bound", "counting", "outer_iterations", "seed",
                                   "resolution"});
  std::vector<double> log_m, log_b;
  bool counting_ok = true;
  for (const auto& row : table) {
    const int count = spectrum_counting(sorted, row.value * (1.0 + 1e-9));
    counting_ok = counting_ok && count >= row.m;
    log_m.push_back(std::log(static_cast<double>(row.m)));
    log_b.push_back(std::log(row.value));
    report.add_row({static_cast<double>(row.m), row.value, log_m.back(), log_b.back(), static_cast<double>(count),
                    static_cast<double>(row.outer_iterations), static_cast<double>(opts.seed + 1),
                    static_cast<double>(cfg.domain.resolution)});
  }

  const double slope = fitted_slope(log_m, log_b);
  const double lo = (1.0 - sigma) / n - cfg.widen;
  const double hi = (1.0 + sigma) / n + cfg.widen;
  report.add_check({"slope_window", slope >= lo && slope <= hi, slope, hi, cfg.widen,
                    fmt::format("fitted slope in [{:.6g}, {:.6g}]", lo, hi)});
  double worst_drop = 0.0;
  for (std::size_t k = 1; k < bounds.size(); ++k) {
    worst_drop = std::max(worst_drop, (bounds[k - 1] - bounds[k]) / bounds[k - 1]);
  }
  const double order_slack = 1e-9;
  report.add_check({"non_decreasing_table", worst_drop <= order_slack, worst_drop, 0.0, order_slack,
                    "largest relative drop between consecutive bounds"});
  const double agree = std::abs(bounds.front() - first.lambda) / first.lambda;
  report.add_check({"first_bound_agreement", agree <= cfg.first_tol, agree, cfg.first_tol, 0.0,
                    "m = 1 bound against the first eigenvalue"});
  report.add_check({"counting_function", counting_ok, 0.0, 0.0, 1e-9, "N(bound_m (1 + 1e-9)) >= m for every m"});
  report.add_check(all_converged_check(first.converged ? 0 : 1, 1));

  report.add_summary("p", fmt_double(cfg.p));
  report.add_summary("q", fmt_double(cfg.q));
  report.add_summary("sigma", fmt_double(sigma));
  report.add_summary("slope", fmt_double(slope));
  report.add_summary("window", fmt::format("[{:.10g}, {:.10g}]", lo, hi));
  report.add_summary("first_eigenvalue", fmt_double(first.lambda));
  report.add_summary("weight", cfg.weight.to_string());
  report.add_summary("mesh", mesh->describe());
  report.set_plot({"m", {"bound"}, true, "minimax bounds against m"});
  return report;
}

// ---------------------------------------------------------------------------

ExperimentReport run_symmetry(const SymmetryConfig& cfg, const ExperimentOptions& opts) {
  check_phase(cfg.p, cfg.q);
  const MeshPtr mesh = cfg.domain.build();
  if (cfg.axis < 0 || cfg.axis >= mesh->dim()) throw DomainError(fmt::format("axis {} invalid", cfg.axis));
  Polarizer pol;
  pol.axis = cfg.axis;
  pol.position = cfg.axis == 0 ? 0.5 * (mesh->lower().x + mesh->upper().x) : 0.5 * (mesh->lower().y + mesh->upper().y);
  pol.side = Polarizer::Side::lower;
  // Validates the mesh symmetry before the solve.
  reflect(Field::zeros(mesh), pol);

  const DoublePhase H(cfg.p, cfg.q, WeightField::constant(mesh->num_cells(), 1.0, mesh->cell_measure()));
  const Eigenpair r = solve(mesh, H, opts, opts.seed);
  const Field uH = polarize(r.u, pol);
  const double ray_u = rayleigh(r.u, H);
  const double ray_uH = rayleigh(uH, H);
  const double moved = relative_lp_distance(uH, r.u, cfg.p);
  const double defect = relative_lp_distance(reflect(r.u, pol), r.u, cfg.p);
  const double mod_u = lumped_modular(r.u, cfg.p, cfg.q);
  const double mod_uH = lumped_modular(uH, cfg.p, cfg.q);

  ExperimentReport report("symmetry", {"lambda", "rayleigh_u", "rayleigh_uH", "polarization_distance",
                                       "symmetry_defect", "modular_u", "modular_uH", "residual", "iterations",
                                       "converged", "seed", "resolution"});
  report.add_row({r.lambda, ray_u, ray_uH, moved, defect, mod_u, mod_uH, r.residual, static_cast<double>(r.iterations),
                  r.converged ? 1.0 : 0.0, static_cast<double>(r.seed), static_cast<double>(cfg.domain.resolution)},
                 row_status(r.converged));
  report.add_check({"rayleigh_not_increased", ray_uH <= ray_u * (1.0 + 1e-6), ray_uH, ray_u, 1e-6,
                    "R(u^H) <= R(u) (1 + slack)"});
  report.add_check({"symmetry_defect", defect <= cfg.defect_tol, defect, cfg.defect_tol, 0.0,
                    "||u - u o reflection||_p / ||u||_p"});
  report.add_check({"polarization_modular", mod_u == mod_uH, std::abs(mod_u - mod_uH), 0.0, 0.0,
                    "lumped modular of u and u^H"});
  report.add_check(all_converged_check(r.converged ? 0 : 1, 1));

  report.add_summary("p", fmt_double(cfg.p));
  report.add_summary("q", fmt_double(cfg.q));
  report.add_summary("mesh", mesh->describe());
  report.add_summary("plane", fmt::format("x{} = {:.10g}", cfg.axis + 1, pol.position));
  report.set_plot({"lambda", {"rayleigh_u", "rayleigh_uH"}, false, "Rayleigh quotients before and after polarization"});
  return report;
}

}  // namespace dphase
