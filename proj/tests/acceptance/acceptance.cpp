// One line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "dphase/eigensolver.hpp"
#include "dphase/experiments.hpp"
#include "dphase/oracle1d.hpp"
#include "dphase/rearrange.hpp"
#include "dphase_cli/commands.hpp"
#include "oracles.hpp"

using namespace dphase;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool ok = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (ok) detail += (detail.empty() ? "" : "; ") + what;
  }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

DoublePhase uniform_phase(const MeshPtr& mesh, double p, double q) {
  return DoublePhase(p, q, WeightField::constant(mesh->num_cells(), 1.0, mesh->cell_measure()));
}

std::string failed_checks(const ExperimentReport& r) {
  std::string out;
  for (const auto& c : r.checks()) {
    if (!c.passed) out += fmt::format("{}{}={:.4g}", out.empty() ? "" : ",", c.name, c.value);
  }
  return out;
}

bool check_passed(const ExperimentReport& r, const std::string& name) {
  for (const auto& c : r.checks()) {
    if (c.name == name) return c.passed;
  }
  return false;
}

// Eigenpairs solved along the way, reused by the sandwich criterion.
std::vector<std::pair<Eigenpair, DoublePhase>> solved;

Verdict norm_engine() {
  Verdict v;
  std::mt19937_64 rng(2024);
  const auto mesh = Mesh::interval(0.0, 1.0, 200);
  const char* weights[] = {"constant:1.5", "ramp:0,3", "checkerboard:2,4"};
  std::uniform_real_distribution<double> pd(1.2, 4.0), gap(0.05, 3.0), scale(0.01, 100.0);
  double worst_closed = 0, worst_ball = 0, worst_hom = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 200; ++i) {
    const double p = pd(rng);
    const DoublePhase H(p, p + gap(rng), WeightSpec::parse(weights[i % 3]).on_cells(*mesh));
    Field u = oracle::smooth_field(mesh, rng);
    for (auto& s : u.values) s *= scale(rng);
    const auto samples = cell_values(u);
    const double norm = luxemburg_norm(samples, H).value;
    worst_closed = std::max(worst_closed, std::abs(closed_form_norm(samples, H).value - norm) / norm);
    auto unit = samples;
    for (auto& s : unit) s /= norm;
    worst_ball = std::max(worst_ball, std::abs(modular(unit, H) - 1.0));
    const double c = -3.7;
    auto scaled = samples;
    for (auto& s : scaled) s *= c;
    worst_hom = std::max(worst_hom, std::abs(luxemburg_norm(scaled, H).value - std::abs(c) * norm) / (std::abs(c) * norm));
  }
  const double elapsed = seconds_since(t0);
  v.require(worst_closed <= 1e-9, fmt::format("closed form defect {:.3g}", worst_closed));
  v.require(worst_ball <= 1e-9, fmt::format("unit-ball defect {:.3g}", worst_ball));
  v.require(worst_hom <= 1e-10, fmt::format("homogeneity defect {:.3g}", worst_hom));
  v.require(elapsed < 5.0, fmt::format("runtime {:.2f} s", elapsed));
  v.note(fmt::format("closed {:.2g}, ball {:.2g}, homogeneity {:.2g}, {:.2f} s", worst_closed, worst_ball, worst_hom,
                     elapsed));
  return v;
}

Verdict golden_ratio() {
  Verdict v;
  const double ref = oracle::bisect([](double g) { return std::pow(g, -2) + std::pow(g, -4) - 1.0; }, 1.0, 2.0);
  const auto mesh = Mesh::interval(0.0, 1.0, 64);
  const std::vector<double> one(64, 1.0);
  const auto H = uniform_phase(mesh, 2.0, 4.0);
  const double bis = luxemburg_norm(one, H).value;
  const double closed = closed_form_norm(one, H).value;
  v.require(std::abs(bis - ref) <= 1e-9, fmt::format("bisection {:.12f}", bis));
  v.require(std::abs(closed - ref) <= 1e-9, fmt::format("closed form {:.12f}", closed));
  v.note(fmt::format("norm {:.10f}, oracle {:.10f}", bis, ref));
  return v;
}

Verdict pi_p_quadrature() {
  Verdict v;
  const auto two = pi_p(2.0);
  v.require(std::abs(two.value - std::numbers::pi) <= 1e-8, fmt::format("pi_2 = {:.12f}", two.value));
  for (double p : {1.5, 2.0, 3.0, 4.0}) {
    const double e1 = pi_p_at_level(p, 3).error;
    const double e2 = pi_p_at_level(p, 4).error;
    v.require(e2 * 4.0 <= e1, fmt::format("p={} refinement ratio {:.3g}", p, e1 / e2));
    v.require(std::abs(pi_p(p).value - oracle::pi_p(p)) <= 1e-8 * oracle::pi_p(p), fmt::format("p={} vs Beta", p));
  }
  v.note(fmt::format("|pi_2 - pi| = {:.2g}", std::abs(two.value - std::numbers::pi)));
  return v;
}

Verdict single_phase_oracle() {
  Verdict v;
  const auto mesh = Mesh::interval(0.0, 1.0, 512);
  std::string note;
  for (double p : {2.0, 3.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto H = uniform_phase(mesh, p, p);
    const auto pair = first_eigenpair(mesh, H, SolverOptions{});
    const double elapsed = seconds_since(t0);
    const double ref = std::pow(plap_shooting(p, 0.0, 1.0, 1).lambda, 1.0 / p);
    const double rel = std::abs(pair.lambda - ref) / ref;
    const double tol = p == 2.0 ? 0.01 : 0.02;
    v.require(pair.converged, fmt::format("p={} not converged", p));
    v.require(rel <= tol, fmt::format("p={} rel err {:.3g}", p, rel));
    v.require(elapsed < 30.0, fmt::format("p={} runtime {:.1f} s", p, elapsed));
    note += fmt::format("{}p={}: {:.6f} vs {:.6f} ({:.2f} s)", note.empty() ? "" : ", ", p, pair.lambda, ref, elapsed);
    solved.emplace_back(pair, H);
  }
  v.note(note);
  return v;
}

Verdict sandwich() {
  Verdict v;
  const auto line = Mesh::interval(0.0, 1.0, 256);
  const auto sq = Mesh::rectangle({0, 0}, {1, 1}, 24, 24);
  for (const auto& [mesh, q] : {std::pair{line, 2.4}, std::pair{line, 4.0}, std::pair{sq, 2.4}}) {
    const auto H = uniform_phase(mesh, 2.0, q);
    solved.emplace_back(first_eigenpair(mesh, H, SolverOptions{}), H);
  }
  int eigen_checked = 0;
  for (const auto& [pair, H] : solved) {
    if (!pair.converged) continue;
    const auto r = sandwich_ratios(pair.u, H);
    const double mid = rayleigh(pair.u, H);
    v.require(r.lower <= mid * (1 + 1e-12) && mid <= r.upper * (1 + 1e-12), "eigenpair outside the sandwich");
    ++eigen_checked;
  }
  std::mt19937_64 rng(77);
  for (int i = 0; i < 100; ++i) {
    const auto& mesh = i % 2 ? line : sq;
    const DoublePhase H(2.0, 2.0 + 0.05 * (i % 40 + 1), WeightSpec::parse(i % 3 ? "ramp:0,2" : "checkerboard:3,3").on_cells(*mesh));
    const Field u = oracle::smooth_field(mesh, rng);
    const auto r = sandwich_ratios(u, H);
    const double mid = rayleigh(u, H);
    v.require(r.lower <= mid * (1 + 1e-12) && mid <= r.upper * (1 + 1e-12), fmt::format("random field {} outside", i));
  }
  v.require(eigen_checked >= 5, "too few converged eigenpairs");
  v.note(fmt::format("{} eigenpairs, 100 random fields", eigen_checked));
  return v;
}

Verdict s_of_u_bounds() {
  Verdict v;
  double worst_single = 0.0;
  for (const auto& [pair, H] : solved) {
    if (H.p() == H.q()) worst_single = std::max(worst_single, std::abs(pair.s_of_u - 1.0));
    v.require(pair.s_of_u >= H.p() / H.q() - 1e-12 && pair.s_of_u <= H.q() / H.p() + 1e-12 && pair.s_of_u <= H.q(),
              "eigenpair S(u) outside [p/q, q/p]");
  }
  std::mt19937_64 rng(5);
  const auto mesh = Mesh::interval(0.0, 1.0, 128);
  for (int i = 0; i < 60; ++i) {
    const double q = 2.1 + 0.1 * i;
    const DoublePhase H(2.0, q, WeightSpec::parse("ramp:0,4").on_cells(*mesh));
    Field u = oracle::smooth_field(mesh, rng);
    const double k = luxemburg_norm(u, H).value;
    for (auto& s : u.values) s /= k;
    const double s = s_of_u(u, gradient_norm(u, H), H);
    v.require(s >= 2.0 / q && s <= q / 2.0 && s <= q, fmt::format("S = {:.4g} for q = {}", s, q));
  }
  v.require(worst_single <= 1e-8, fmt::format("single-phase defect {:.3g}", worst_single));
  v.note(fmt::format("single-phase |S - 1| = {:.2g}", worst_single));
  return v;
}

Verdict pairings() {
  Verdict v;
  std::mt19937_64 rng(31);
  const auto mesh = Mesh::interval(0.0, 1.0, 96);
  const auto sq = Mesh::rectangle({0, 0}, {1, 1}, 16, 16);
  double euler = 0, fd = 0;
  for (int i = 0; i < 100; ++i) {
    const auto& m = i % 2 ? mesh : sq;
    const DoublePhase H(1.5 + 0.02 * i, 3.8, WeightSpec::parse("checkerboard:2,2").on_cells(*m));
    const Field u = oracle::smooth_field(m, rng);
    const Field w = oracle::smooth_field(m, rng);
    const double k = luxemburg_norm(u, H).value;
    const double K = gradient_norm(u, H);
    euler = std::max({euler, std::abs(kprime_pairing(u, u, H) - k) / k, std::abs(Kprime_pairing(u, u, H) - K) / K});
    v.require(std::abs(kprime_pairing(u, w, H)) <= H.q() * luxemburg_norm(w, H).value, fmt::format("bound pair {}", i));
    if (i % 5 == 0) {
      const auto c = directional_derivative_check(u, w, H);
      fd = std::max({fd, std::abs(c.analytic_k - c.numeric_k) / std::max(std::abs(c.numeric_k), 1e-300),
                     std::abs(c.analytic_K - c.numeric_K) / std::max(std::abs(c.numeric_K), 1e-300)});
    }
  }
  v.require(euler <= 1e-8, fmt::format("Euler defect {:.3g}", euler));
  v.require(fd <= 1e-5, fmt::format("finite-difference defect {:.3g}", fd));
  v.note(fmt::format("Euler {:.2g}, FD {:.2g}, 100 bound pairs", euler, fd));
  return v;
}

Verdict domain_monotonicity() {
  Verdict v;
  const auto intervals = run_domain_monotonicity(DomainsConfig{}, {});
  v.require(intervals.all_passed(), "intervals: " + failed_checks(intervals));
  DomainsConfig sq;
  sq.family = "squares:0.5,0.625,0.75,0.875,1";
  sq.resolution = 48;
  sq.q = 2.4;
  const auto squares = run_domain_monotonicity(sq, {});
  v.require(check_passed(squares, "non_increasing_chain") && check_passed(squares, "all_converged"),
            "squares: " + failed_checks(squares));
  const auto l = squares.column("lambda");
  v.note(fmt::format("{} intervals, {} squares ({:.4f} -> {:.4f})", intervals.rows(), squares.rows(), l.front(),
                     l.back()));
  return v;
}

Verdict faber_krahn() {
  Verdict v;
  const auto t0 = std::chrono::steady_clock::now();
  std::string note;
  for (double q : {2.0, 2.4}) {
    FaberKrahnConfig cfg;
    cfg.q = q;
    const auto r = run_faber_krahn(cfg, {});
    v.require(r.all_passed(), fmt::format("q={}: {}", q, failed_checks(r)));
    note += fmt::format("{}q={}: square {:.4f}, disk {:.4f}", note.empty() ? "" : ", ", q, r.at(0, "lambda"),
                        r.at(1, "lambda"));
  }
  const double elapsed = seconds_since(t0);
  v.require(elapsed < 300.0, fmt::format("runtime {:.1f} s", elapsed));
  v.note(note + fmt::format(" ({:.1f} s)", elapsed));
  return v;
}

Verdict large_exponents() {
  Verdict v;
  const auto r = run_large_exponents(LargeExpConfig{}, {});
  v.require(r.all_passed(), failed_checks(r));
  v.note(fmt::format("final relative gap {:.4f}", r.column("rel_gap").back()));
  return v;
}

Verdict stability() {
  Verdict v;
  const auto r = run_stability(StabilityConfig{}, {});
  v.require(r.all_passed(), failed_checks(r));
  v.note(fmt::format("relative gap at h=16 {:.3g}", r.column("rel_gap").back()));
  return v;
}

Verdict weyl() {
  Verdict v;
  std::string note;
  for (double q : {2.0, 2.4}) {
    WeylConfig cfg;
    cfg.q = q;
    const auto r = run_weyl(cfg, {});
    v.require(r.all_passed(), fmt::format("q={}: {}", q, failed_checks(r)));
    double slope = 0;
    for (const auto& c : r.checks()) {
      if (c.name == "slope_window") slope = c.value;
    }
    note += fmt::format("{}q={}: slope {:.4f}", note.empty() ? "" : ", ", q, slope);
  }
  v.note(note);
  return v;
}

Verdict symmetry() {
  Verdict v;
  const auto r = run_symmetry(SymmetryConfig{}, {});
  v.require(r.all_passed(), failed_checks(r));
  std::mt19937_64 rng(13);
  const auto sq = Mesh::rectangle({0, 0}, {1, 1}, 48, 48);
  const auto line = Mesh::interval(0.0, 1.0, 200);
  double worst_ps = 0.0;
  for (int i = 0; i < 10; ++i) {
    const auto& mesh = i % 2 ? line : sq;
    Field f = oracle::smooth_field(mesh, rng, 3);
    for (auto& s : f.values) s = std::abs(s);
    Polarizer pol;
    pol.axis = 0;
    pol.position = 0.5;
    pol.side = i % 4 < 2 ? Polarizer::Side::lower : Polarizer::Side::upper;
    const Field fh = polarize(f, pol);
    const auto star = schwarz_symmetrize(f);
    for (double p : {2.0, 2.4}) {
      v.require(lumped_modular(f, p, 2.0 * p) == lumped_modular(fh, p, 2.0 * p), "polarization modular differs");
      v.require(lumped_modular(f, p, 2.0 * p) == lumped_modular(star.field, p, 2.0 * p),
                "symmetrization modular differs");
      if (mesh->dim() == 2) {
        const double before = lp_norm(gradient(f).magnitude, p, mesh->cell_measure());
        const double after = lp_norm(gradient(star.field).magnitude, p, star.field.mesh->cell_measure());
        worst_ps = std::max(worst_ps, after / before);
      }
    }
  }
  v.require(worst_ps <= 1.05, fmt::format("Polya-Szego ratio {:.4f}", worst_ps));
  v.note(fmt::format("defect {:.2g}, worst Polya-Szego ratio {:.4f}", r.at(0, "symmetry_defect"), worst_ps));
  return v;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict cli_determinism() {
  Verdict v;
  const fs::path root = fs::temp_directory_path() / "dphase_acceptance_cli";
  fs::remove_all(root);
  const std::vector<std::vector<std::string>> runs{
      {"--seed", "5", "--set", "phase.q=3", "eig"},
      {"--seed", "5", "--resolution", "128", "--set", "eigm.m_max=4", "eigm"},
      {"--seed", "5", "--resolution", "256", "experiment", "stability"},
      {"--seed", "5", "--resolution", "256", "experiment", "weyl"},
  };
  int files = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<fs::path> dirs;
    for (int rep = 0; rep < 2; ++rep) {
      const fs::path dir = root / fmt::format("run{}_{}", r, rep);
      std::vector<std::string> args{"dphase", "--out", dir.string()};
      args.insert(args.end(), runs[r].begin(), runs[r].end());
      std::vector<const char*> argv;
      for (const auto& a : args) argv.push_back(a.c_str());
      std::ostringstream out, err;
      const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
      v.require(code == 0, fmt::format("run {} exit {}: {}", r, code, err.str()));
      dirs.push_back(dir);
    }
    for (const auto& entry : fs::directory_iterator(dirs[0])) {
      if (entry.path().extension() != ".csv") continue;
      ++files;
      v.require(slurp(entry.path()) == slurp(dirs[1] / entry.path().filename()),
                fmt::format("{} differs", entry.path().filename().string()));
    }
  }
  fs::remove_all(root);
  v.require(files >= 5, "too few CSV outputs compared");
  v.note(fmt::format("{} CSV files identical across repeats", files));
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"norm engine on 200 random fields", norm_engine},
      {"golden-ratio norm", golden_ratio},
      {"pi_p quadrature", pi_p_quadrature},
      {"single-phase oracle equivalence", single_phase_oracle},
      {"sandwich bounds", sandwich},
      {"S(u) bounds", s_of_u_bounds},
      {"k' and K' pairings", pairings},
      {"domain monotonicity", domain_monotonicity},
      {"Faber-Krahn", faber_krahn},
      {"large exponents", large_exponents},
      {"stability", stability},
      {"Weyl slope", weyl},
      {"symmetry and rearrangement", symmetry},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.ok = false;
      v.detail = fmt::format("exception: {}", e.what());
    }
    if (!v.ok) ++failures;
    fmt::print("[{}] {:>2} {}: {}\n", v.ok ? "PASS" : "FAIL", i + 1, criteria[i].first, v.detail);
    std::fflush(stdout);
  }
  fmt::print("{} of {} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
