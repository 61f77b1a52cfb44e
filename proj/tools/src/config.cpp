#include "dphase_cli/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "dphase/errors.hpp"

namespace dphase::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{} = '{}' is not a number", key, value));
}

long parse_integer(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long v = std::stol(value, &used);
    if (used == value.size()) return v;
  } catch (const std::exception&) {
  }
  throw ConfigError(fmt::format("{} = '{}' is not an integer", key, value));
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError(fmt::format("{} = '{}' is not a boolean", key, value));
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(static_cast<int>(parse_integer(key, trim(item))));
  if (out.empty()) throw ConfigError(fmt::format("{} is an empty list", key));
  return out;
}

}  // namespace

const std::vector<KeySpec>& known_keys() {
  using T = ValueType;
  static const std::vector<KeySpec> keys{
      {"seed", T::integer, "0", "seed of every random choice"},
      {"strict", T::boolean, "false", "exit 4 when a solve does not converge"},
      {"output.dir", T::text, "dphase_out", "output directory"},
      {"mesh.kind", T::text, "interval", "interval, rectangle, square or disk"},
      {"mesh.a", T::real, "0", "interval left end"},
      {"mesh.b", T::real, "1", "interval right end"},
      {"mesh.lower_x", T::real, "0", ""},
      {"mesh.lower_y", T::real, "0", ""},
      {"mesh.upper_x", T::real, "1", ""},
      {"mesh.upper_y", T::real, "1", ""},
      {"mesh.center_x", T::real, "0", ""},
      {"mesh.center_y", T::real, "0", ""},
      {"mesh.radius", T::real, "0.5", ""},
      {"mesh.resolution", T::integer, "512", "cells (along x / across the disk)"},
      {"phase.p", T::real, "2", ""},
      {"phase.q", T::real, "2.4", ""},
      {"phase.weight", T::text, "constant:1", "constant:c, ramp:c0,c1, checkerboard:c,k, file:path"},
      {"phase.scale", T::integer, "1", "h in t^{hp} + a t^{hq}"},
      {"phase.modular", T::text, "standard", "standard or rescaled"},
      {"solver.tol_lambda", T::real, "", ""},
      {"solver.tol_residual", T::real, "", ""},
      {"solver.max_iter", T::integer, "", ""},
      {"solver.restarts", T::integer, "", ""},
      {"solver.initial_step", T::real, "", ""},
      {"solver.shrink", T::real, "", ""},
      {"solver.slope_fraction", T::real, "", ""},
      {"solver.noise", T::real, "", ""},
      {"solver.memory", T::integer, "", ""},
      {"norm.field", T::text, "", "field CSV to measure"},
      {"eigm.m_max", T::integer, "4", ""},
      {"experiment.name", T::text, "", ""},
      {"experiment.threads", T::integer, "0", "0: all hardware threads"},
      {"stability.steps", T::integer, "", ""},
      {"stability.delta0", T::real, "", ""},
      {"stability.tolerance", T::real, "", ""},
      {"stability.trend_from", T::integer, "", ""},
      {"domains.family", T::text, "", "intervals:L1,L2,... or squares:s1,s2,..."},
      {"domains.resolution", T::integer, "", "cells per unit length"},
      {"domains.slack", T::real, "", ""},
      {"domains.final_gap", T::real, "", ""},
      {"domains.oracle_tol", T::real, "", ""},
      {"faberkrahn.polya_slack", T::real, "", ""},
      {"largeexp.h_list", T::int_list, "", "comma separated"},
      {"largeexp.final_gap", T::real, "", ""},
      {"weyl.m_max", T::integer, "", ""},
      {"weyl.widen", T::real, "", ""},
      {"weyl.first_tol", T::real, "", ""},
      {"symmetry.axis", T::integer, "", "0 or 1"},
      {"symmetry.defect_tol", T::real, "", ""},
  };
  return keys;
}

RunConfig::RunConfig() {
  for (const auto& k : known_keys()) {
    if (!k.fallback.empty()) values_[k.name] = k.fallback;
  }
}

const KeySpec& RunConfig::spec(const std::string& key) const {
  const auto& keys = known_keys();
  const auto it = std::find_if(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
  if (it == keys.end()) throw ConfigError(fmt::format("unknown config key '{}'", key));
  return *it;
}

void RunConfig::set(const std::string& key, const std::string& raw) {
  const KeySpec& s = spec(key);
  const std::string value = trim(raw);
  switch (s.type) {
    case ValueType::real:
      parse_real(key, value);
      break;
    case ValueType::integer:
      parse_integer(key, value);
      break;
    case ValueType::boolean:
      parse_bool(key, value);
      break;
    case ValueType::int_list:
      parse_int_list(key, value);
      break;
    case ValueType::text:
      if (value.empty()) throw ConfigError(fmt::format("{} is empty", key));
      break;
  }
  values_[key] = value;
  explicit_.insert(key);
}

void RunConfig::assign(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(fmt::format("expected key=value, got '{}'", assignment));
  set(trim(assignment.substr(0, eq)), assignment.substr(eq + 1));
}

void RunConfig::load_text(const std::string& text, const std::string& origin) {
  std::stringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.find('=') == std::string::npos) {
      throw ConfigError(fmt::format("{}:{}: expected key = value", origin, number));
    }
    try {
      assign(line);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("{}:{}: {}", origin, number, e.what()));
    }
  }
}

void RunConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path));
  std::stringstream buffer;
  buffer << in.rdbuf();
  load_text(buffer.str(), path);
}

std::string RunConfig::text(const std::string& key) const {
  spec(key);
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(fmt::format("config key '{}' is required", key));
  return it->second;
}

double RunConfig::real(const std::string& key) const { return parse_real(key, text(key)); }
long RunConfig::integer(const std::string& key) const { return parse_integer(key, text(key)); }
bool RunConfig::boolean(const std::string& key) const { return parse_bool(key, text(key)); }
std::vector<int> RunConfig::int_list(const std::string& key) const { return parse_int_list(key, text(key)); }

DomainSpec RunConfig::domain(DomainSpec d) const {
  if (is_set("mesh.kind")) d.kind = DomainSpec::parse_kind(text("mesh.kind"));
  if (is_set("mesh.kind") && text("mesh.kind") == "square") {
    d.lower = {0.0, 0.0};
    d.upper = {1.0, 1.0};
  }
  d.a = real_or("mesh.a", d.a);
  d.b = real_or("mesh.b", d.b);
  d.lower = {real_or("mesh.lower_x", d.lower.x), real_or("mesh.lower_y", d.lower.y)};
  d.upper = {real_or("mesh.upper_x", d.upper.x), real_or("mesh.upper_y", d.upper.y)};
  d.center = {real_or("mesh.center_x", d.center.x), real_or("mesh.center_y", d.center.y)};
  d.radius = real_or("mesh.radius", d.radius);
  d.resolution = static_cast<int>(integer_or("mesh.resolution", d.resolution));
  if (d.kind == DomainSpec::Kind::interval && !(d.b > d.a)) throw ConfigError("mesh.b must exceed mesh.a");
  if (d.kind == DomainSpec::Kind::disk && !(d.radius > 0.0)) throw ConfigError("mesh.radius must be positive");
  if (d.resolution < 2) throw ConfigError("mesh.resolution must be >= 2");
  return d;
}

SolverOptions RunConfig::solver() const {
  SolverOptions s;
  s.tol_lambda = real_or("solver.tol_lambda", s.tol_lambda);
  s.tol_residual = real_or("solver.tol_residual", s.tol_residual);
  s.max_iter = static_cast<int>(integer_or("solver.max_iter", s.max_iter));
  s.restarts = static_cast<int>(integer_or("solver.restarts", s.restarts));
  s.initial_step = real_or("solver.initial_step", s.initial_step);
  s.shrink = real_or("solver.shrink", s.shrink);
  s.slope_fraction = real_or("solver.slope_fraction", s.slope_fraction);
  s.noise = real_or("solver.noise", s.noise);
  s.memory = static_cast<int>(integer_or("solver.memory", s.memory));
  s.rng_seed = static_cast<std::uint64_t>(integer("seed"));
  const std::string modular = text("phase.modular");
  if (modular == "standard") {
    s.modular = ModularKind::standard;
  } else if (modular == "rescaled") {
    s.modular = ModularKind::rescaled;
  } else {
    throw ConfigError(fmt::format("phase.modular = '{}' (standard, rescaled)", modular));
  }
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  return s;
}

WeightSpec RunConfig::weight() const { return WeightSpec::parse(text("phase.weight")); }

}  // namespace dphase::cli
