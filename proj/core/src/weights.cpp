#include "dphase/weights.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <fmt/format.h>

#include "dphase/errors.hpp"
#include "dphase/field_io.hpp"

namespace dphase {

namespace {

std::vector<double> parse_numbers(const std::string& body, const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("bad number '{}' in weight descriptor '{}'", item, text));
    }
  }
  return out;
}

}  // namespace

WeightSpec WeightSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw ConfigError(fmt::format("weight descriptor '{}' lacks ':'", text));
  const std::string kind = text.substr(0, colon);
  const std::string body = text.substr(colon + 1);
  WeightSpec spec;
  if (kind == "file") {
    if (body.empty()) throw ConfigError("file weight needs a path");
    spec.kind = Kind::file;
    spec.path = body;
    return spec;
  }
  const auto nums = parse_numbers(body, text);
  if (kind == "constant" && nums.size() == 1) {
    spec.kind = Kind::constant;
    spec.c0 = spec.c1 = nums[0];
  } else if (kind == "ramp" && nums.size() == 2) {
    spec.kind = Kind::ramp;
    spec.c0 = nums[0];
    spec.c1 = nums[1];
  } else if (kind == "checkerboard" && nums.size() == 2) {
    spec.kind = Kind::checkerboard;
    spec.c0 = spec.c1 = nums[0];
    if (nums[1] < 1 || nums[1] != std::floor(nums[1])) {
      throw ConfigError(fmt::format("checkerboard block count must be a positive integer in '{}'", text));
    }
    spec.blocks = static_cast<int>(nums[1]);
  } else {
    throw ConfigError(fmt::format("unrecognised weight descriptor '{}'", text));
  }
  if (spec.c0 < 0.0 || spec.c1 < 0.0) throw ConfigError(fmt::format("weight must be >= 0 in '{}'", text));
  return spec;
}

std::string WeightSpec::to_string() const {
  switch (kind) {
    case Kind::constant: return fmt::format("constant:{}", c0);
    case Kind::ramp: return fmt::format("ramp:{},{}", c0, c1);
    case Kind::checkerboard: return fmt::format("checkerboard:{},{}", c0, blocks);
    case Kind::file: return "file:" + path;
  }
  return {};
}

double WeightSpec::at(const Mesh& mesh, Point x) const {
  const double x0 = mesh.lower().x, x1 = mesh.upper().x;
  const double sx = (x.x - x0) / (x1 - x0);
  switch (kind) {
    case Kind::constant: return c0;
    case Kind::ramp: return c0 + (c1 - c0) * std::clamp(sx, 0.0, 1.0);
    case Kind::checkerboard: {
      const int bx = std::min(blocks - 1, static_cast<int>(std::floor(sx * blocks)));
      int by = 0;
      if (mesh.dim() == 2) {
        const double sy = (x.y - mesh.lower().y) / (mesh.upper().y - mesh.lower().y);
        by = std::min(blocks - 1, static_cast<int>(std::floor(sy * blocks)));
      }
      return (bx + by) % 2 == 0 ? c0 : 0.0;
    }
    case Kind::file: break;
  }
  throw ConfigError("file weights have no pointwise formula");
}

WeightPtr WeightSpec::on_cells(const Mesh& mesh) const {
  if (kind == Kind::file) {
    const FieldFile file = read_field_csv(path);
    if (file.location != SampleLocation::cell || file.values.size() != static_cast<std::size_t>(mesh.num_cells())) {
      throw ShapeError(fmt::format("weight file '{}' must hold {} cell values", path, mesh.num_cells()));
    }
    return WeightField::make(file.values, mesh.cell_measure());
  }
  std::vector<double> values(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) values[c] = at(mesh, mesh.cell_center(c));
  return WeightField::make(std::move(values), mesh.cell_measure());
}

WeightPtr WeightSpec::on_nodes(const Mesh& mesh) const {
  if (kind == Kind::file) return node_weight_from_cells(mesh, *on_cells(mesh));
  std::vector<double> values(mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) values[n] = at(mesh, mesh.node_coord(n));
  return WeightField::make(std::move(values), mesh.cell_measure());
}

WeightPtr node_weight_from_cells(const Mesh& mesh, const WeightField& cells) {
  std::vector<double> sum(mesh.num_nodes(), 0.0);
  std::vector<int> count(mesh.num_nodes(), 0);
  const int corners = mesh.dim() == 1 ? 2 : 4;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& nd = mesh.cell_nodes(c);
    for (int k = 0; k < corners; ++k) {
      if (nd[k] == Mesh::kGhost) continue;
      sum[nd[k]] += cells.values[c];
      ++count[nd[k]];
    }
  }
  for (int n = 0; n < mesh.num_nodes(); ++n) sum[n] /= count[n];
  return WeightField::make(std::move(sum), mesh.cell_measure());
}

}  // namespace dphase
