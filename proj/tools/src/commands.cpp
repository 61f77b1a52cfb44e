#include "dphase_cli/commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dphase/errors.hpp"
#include "dphase/experiments.hpp"
#include "dphase/field_io.hpp"
#include "dphase/orlicz.hpp"
#include "dphase_cli/config.hpp"

namespace dphase::cli {

namespace {

namespace fs = std::filesystem;

std::string out_dir(const RunConfig& cfg) {
  const std::string dir = cfg.text("output.dir");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError(fmt::format("cannot create output directory '{}': {}", dir, ec.message()));
  return dir;
}

// Phase on the cells of `mesh`, exponents from the config.
DoublePhase phase_on(const RunConfig& cfg, const Mesh& mesh) {
  const double p = cfg.real("phase.p");
  const double q = cfg.real("phase.q");
  if (!(p > 1.0) || !(q >= p)) {
    throw ConfigError(fmt::format("phase exponents violate 1 < p <= q (p = {}, q = {})", p, q));
  }
  const long scale = cfg.integer("phase.scale");
  if (scale < 1) throw ConfigError("phase.scale must be >= 1");
  return DoublePhase(p, q, cfg.weight().on_cells(mesh), static_cast<int>(scale));
}

int cmd_norm(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.is_set("norm.field")) throw ConfigError("norm needs a field file (norm.field or positional argument)");
  const std::string path = cfg.text("norm.field");
  if (!fs::exists(path)) throw ConfigError(fmt::format("field file '{}' does not exist", path));
  const double p = cfg.real("phase.p");
  const double q = cfg.real("phase.q");
  if (!(p > 1.0) || !(p < q)) {
    throw ConfigError(fmt::format("norm needs 1 < p < q (got p = {}, q = {})", p, q));
  }
  const MeshPtr mesh = cfg.domain(DomainSpec{}).build();
  const DoublePhase H = phase_on(cfg, *mesh);
  const std::vector<double> samples = cell_samples_from_file(read_field_csv(path), mesh);

  const NormResult bisect = luxemburg_norm(samples, H);
  fmt::print(out, "bisection_norm = {:.17g}\n", bisect.value);
  try {
    fmt::print(out, "closed_form_norm = {:.17g}\n", closed_form_norm(samples, H).value);
  } catch (const FallbackRequired&) {
    fmt::print(out, "closed_form_norm = {:.17g} (q-phase vanishes; L^p fallback)\n",
               lp_norm(samples, H.p(), H.point_measure()));
  }
  fmt::print(out, "modular = {:.17g}\n", modular(samples, H));
  fmt::print(out, "rescaled_norm = {:.17g}\n", rescaled_norm(samples, H));
  return kSuccess;
}

int cmd_eig(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec domain = cfg.domain(DomainSpec{});
  const MeshPtr mesh = domain.build();
  const DoublePhase H = phase_on(cfg, *mesh);
  const SolverOptions opts = cfg.solver();
  const Eigenpair pair = first_eigenpair(mesh, H, opts);

  const std::string dir = out_dir(cfg);
  const std::string csv = (fs::path(dir) / "eigenpair.csv").string();
  const std::string json = (fs::path(dir) / "eigenpair.json").string();
  save_eigenpair(pair, H, {cfg.weight().to_string(), mesh->describe()}, csv, json);

  fmt::print(out, "lambda = {:.17g}\n", pair.lambda);
  fmt::print(out, "residual = {:.6e}\n", pair.residual);
  fmt::print(out, "s_of_u = {:.17g}\n", pair.s_of_u);
  fmt::print(out, "iterations = {}\n", pair.iterations);
  fmt::print(out, "converged = {}\n", pair.converged);
  fmt::print(out, "files = {}, {}\n", csv, json);
  if (!pair.converged && cfg.boolean("strict")) return kNotConverged;
  return kSuccess;
}

int cmd_eigm(const RunConfig& cfg, std::ostream& out) {
  const DomainSpec domain = cfg.domain(DomainSpec{});
  const MeshPtr mesh = domain.build();
  const DoublePhase H = phase_on(cfg, *mesh);
  const long m_max = cfg.integer("eigm.m_max");
  if (m_max < 1) throw ConfigError("eigm.m_max must be >= 1");
  const SolverOptions opts = cfg.solver();
  const auto table = minimax_table(mesh, H, static_cast<int>(m_max), opts);

  const std::string path = (fs::path(out_dir(cfg)) / "minimax.csv").string();
  std::ofstream file(path);
  if (!file) throw ConfigError(fmt::format("cannot write '{}'", path));
  fmt::print(file, "# schema=1\n# mesh={}\nm,bound,outer_iterations,inner_starts,seed,resolution\n", mesh->describe());
  fmt::print(out, "m  bound\n");
  for (const auto& row : table) {
    fmt::print(file, "{},{:.17g},{},{},{},{}\n", row.m, row.value, row.outer_iterations, row.inner_starts,
               opts.rng_seed, domain.resolution);
    fmt::print(out, "{:<2} {:.12g}\n", row.m, row.value);
  }
  fmt::print(out, "file = {}\n", path);
  return kSuccess;
}

ExperimentReport dispatch(const std::string& name, const RunConfig& cfg, const ExperimentOptions& opts) {
  auto phase = [&](double& p, double& q) {
    p = cfg.real_or("phase.p", p);
    q = cfg.real_or("phase.q", q);
  };
  const bool weight_set = cfg.is_set("phase.weight");
  if (name == "stability") {
    StabilityConfig c;
    c.domain = cfg.domain(c.domain);
    if (weight_set) c.weight = cfg.weight();
    phase(c.p, c.q);
    c.steps = static_cast<int>(cfg.integer_or("stability.steps", c.steps));
    c.delta0 = cfg.real_or("stability.delta0", c.delta0);
    c.tolerance = cfg.real_or("stability.tolerance", c.tolerance);
    c.trend_from = static_cast<int>(cfg.integer_or("stability.trend_from", c.trend_from));
    return run_stability(c, opts);
  }
  if (name == "domains") {
    DomainsConfig c;
    if (weight_set) c.weight = cfg.weight();
    phase(c.p, c.q);
    c.family = cfg.text_or("domains.family", c.family);
    c.resolution = static_cast<int>(cfg.integer_or("domains.resolution", cfg.integer_or("mesh.resolution", c.resolution)));
    c.slack = cfg.real_or("domains.slack", c.slack);
    c.final_gap = cfg.real_or("domains.final_gap", c.final_gap);
    c.oracle_tol = cfg.real_or("domains.oracle_tol", c.oracle_tol);
    return run_domain_monotonicity(c, opts);
  }
  if (name == "faberkrahn") {
    FaberKrahnConfig c;
    c.domain = cfg.domain(c.domain);
    if (weight_set) throw ConfigError("faberkrahn uses a = 1; phase.weight must not be set");
    phase(c.p, c.q);
    c.polya_slack = cfg.real_or("faberkrahn.polya_slack", c.polya_slack);
    return run_faber_krahn(c, opts);
  }
  if (name == "largeexp") {
    LargeExpConfig c;
    c.domain = cfg.domain(c.domain);
    if (weight_set) c.weight = cfg.weight();
    phase(c.p, c.q);
    if (cfg.is_set("largeexp.h_list")) c.h_list = cfg.int_list("largeexp.h_list");
    c.final_gap = cfg.real_or("largeexp.final_gap", c.final_gap);
    return run_large_exponents(c, opts);
  }
  if (name == "weyl") {
    WeylConfig c;
    c.domain = cfg.domain(c.domain);
    if (weight_set) c.weight = cfg.weight();
    phase(c.p, c.q);
    c.m_max = static_cast<int>(cfg.integer_or("weyl.m_max", c.m_max));
    c.widen = cfg.real_or("weyl.widen", c.widen);
    c.first_tol = cfg.real_or("weyl.first_tol", c.first_tol);
    return run_weyl(c, opts);
  }
  if (name == "symmetry") {
    SymmetryConfig c;
    c.domain = cfg.domain(c.domain);
    if (weight_set) throw ConfigError("symmetry uses a = 1; phase.weight must not be set");
    phase(c.p, c.q);
    c.axis = static_cast<int>(cfg.integer_or("symmetry.axis", c.axis));
    c.defect_tol = cfg.real_or("symmetry.defect_tol", c.defect_tol);
    return run_symmetry(c, opts);
  }
  throw ConfigError(fmt::format("unknown experiment '{}' (stability, domains, faberkrahn, largeexp, weyl, symmetry)",
                                name));
}

int cmd_experiment(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.is_set("experiment.name")) throw ConfigError("experiment needs a name");
  const std::string name = cfg.text("experiment.name");
  const auto& names = experiment_names();
  if (std::find(names.begin(), names.end(), name) == names.end()) {
    throw ConfigError(fmt::format("unknown experiment '{}'", name));
  }
  ExperimentOptions opts;
  opts.solver = cfg.solver();
  opts.seed = static_cast<std::uint64_t>(cfg.integer("seed"));
  const long threads = cfg.integer("experiment.threads");
  if (threads < 0) throw ConfigError("experiment.threads must be >= 0");
  opts.threads = static_cast<unsigned>(threads);

  const ExperimentReport report = dispatch(name, cfg, opts);
  const auto files = report.write_all(out_dir(cfg));
  out << report.summary_text();
  for (const auto& f : files) fmt::print(out, "file = {}\n", f);

  bool nonconverged = false;
  for (std::size_t r = 0; r < report.rows(); ++r) nonconverged = nonconverged || report.status(r) == "nonconverged";
  if (nonconverged && cfg.boolean("strict")) return kNotConverged;
  return report.all_passed() ? kSuccess : kNumericalError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"dphase: double-phase Luxemburg norms, eigenpairs and experiments", "dphase"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_path;
  std::optional<int> resolution;
  bool strict = false;
  std::vector<std::string> assignments;
  app.add_option("--config", config_path, "key = value config file");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out_path, "output directory");
  app.add_option("--resolution", resolution, "mesh resolution");
  app.add_flag("--strict", strict, "exit 4 when a solve does not converge");
  app.add_option("--set", assignments, "override a config key (key=value)");

  std::string field_path;
  std::string experiment_name;
  auto* norm = app.add_subcommand("norm", "Luxemburg norms of a field CSV");
  norm->add_option("field", field_path, "field CSV");
  auto* eig = app.add_subcommand("eig", "first eigenpair");
  auto* eigm = app.add_subcommand("eigm", "minimax upper bounds for m = 1..m_max");
  auto* experiment = app.add_subcommand("experiment", "run an experiment driver");
  experiment->add_option("name", experiment_name, "stability, domains, faberkrahn, largeexp, weyl, symmetry");
  for (auto* sub : {norm, eig, eigm, experiment}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    fmt::print(err, "error: {}\n", e.what());
    return kConfigError;
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg.load_file(config_path);
    for (const auto& a : assignments) cfg.assign(a);
    if (seed) cfg.set("seed", std::to_string(*seed));
    if (out_path) cfg.set("output.dir", *out_path);
    if (resolution) cfg.set("mesh.resolution", std::to_string(*resolution));
    if (strict) cfg.set("strict", "true");
    if (!field_path.empty()) cfg.set("norm.field", field_path);
    if (!experiment_name.empty()) cfg.set("experiment.name", experiment_name);

    if (norm->parsed()) return cmd_norm(cfg, out);
    if (eig->parsed()) return cmd_eig(cfg, out);
    if (eigm->parsed()) return cmd_eigm(cfg, out);
    return cmd_experiment(cfg, out);
  } catch (const ConfigError& e) {
    fmt::print(err, "config error: {}\n", e.what());
    return kConfigError;
  } catch (const DomainError& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return kConfigError;
  } catch (const ShapeError& e) {
    fmt::print(err, "invalid input: {}\n", e.what());
    return kConfigError;
  } catch (const GeometryError& e) {
    fmt::print(err, "geometry error: {}\n", e.what());
    return kConfigError;
  } catch (const Error& e) {
    fmt::print(err, "numerical error: {}\n", e.what());
    return kNumericalError;
  }
}

}  // namespace dphase::cli
