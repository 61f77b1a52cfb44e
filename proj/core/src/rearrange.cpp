#include "dphase/rearrange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "dphase/errors.hpp"

namespace dphase {

namespace {

// Mirror partner of every free node, or throws if the free set is not
// symmetric under the reflection.
std::vector<int> mirror_nodes(const Mesh& mesh, const Polarizer& pol) {
  if (pol.axis < 0 || pol.axis >= mesh.dim()) {
    throw GeometryError(fmt::format("reflection axis {} invalid for a {}D mesh", pol.axis, mesh.dim()));
  }
  const double origin = pol.axis == 0 ? mesh.lower().x : mesh.lower().y;
  const double h = pol.axis == 0 ? mesh.hx() : mesh.hy();
  // Reflected grid index i' = 2 (position - origin) / h - i must be an integer.
  const double twice = 2.0 * (pol.position - origin) / h;
  const long shift = std::lround(twice);
  if (std::abs(twice - static_cast<double>(shift)) > 1e-9) {
    throw GeometryError("reflection plane does not pass through a grid symmetry axis");
  }
  std::vector<int> partner(mesh.num_nodes());
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    auto [i, j] = mesh.node_grid_index(n);
    if (pol.axis == 0) {
      i = static_cast<int>(shift - i);
    } else {
      j = static_cast<int>(shift - j);
    }
    const int m = mesh.node_at(i, j);
    if (m == Mesh::kGhost) throw GeometryError("mesh is not symmetric under the reflection");
    partner[n] = m;
  }
  return partner;
}

}  // namespace

Field polarize(const Field& u, const Polarizer& pol) {
  const Mesh& mesh = *u.mesh;
  const auto partner = mirror_nodes(mesh, pol);
  Field out = Field::zeros(u.mesh);
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const Point x = mesh.node_coord(n);
    const double coord = pol.axis == 0 ? x.x : x.y;
    const double offset = coord - pol.position;
    const double tol = 1e-12 * (1.0 + std::abs(pol.position));
    const bool on_plane = std::abs(offset) <= tol;
    const bool in_h = on_plane || (pol.side == Polarizer::Side::upper ? offset > 0.0 : offset < 0.0);
    const double a = std::abs(u.values[n]);
    const double b = std::abs(u.values[partner[n]]);
    out.values[n] = in_h ? std::max(a, b) : std::min(a, b);
  }
  return out;
}

Field reflect(const Field& u, const Polarizer& pol) {
  const auto partner = mirror_nodes(*u.mesh, pol);
  Field out = Field::zeros(u.mesh);
  for (std::size_t n = 0; n < partner.size(); ++n) out.values[n] = u.values[partner[n]];
  return out;
}

MeshPtr equal_measure_ball(const Mesh& mesh) {
  if (mesh.dim() == 1) {
    const double half = 0.5 * (mesh.upper().x - mesh.lower().x);
    return Mesh::interval(-half, half, mesh.nx());
  }
  if (std::abs(mesh.hx() - mesh.hy()) > 1e-12 * mesh.hx()) {
    throw GeometryError("ball construction needs square cells");
  }
  return Mesh::disk_with_cell_count({0.0, 0.0}, mesh.num_cells(), mesh.hx());
}

MeshPtr equal_support_ball(const Mesh& mesh) {
  if (mesh.dim() == 1) return equal_measure_ball(mesh);
  if (std::abs(mesh.hx() - mesh.hy()) > 1e-12 * mesh.hx()) {
    throw GeometryError("ball construction needs square cells");
  }
  return Mesh::disk_with_node_count({0.0, 0.0}, mesh.num_nodes(), mesh.hx());
}

Symmetrization schwarz_symmetrize(const Field& u, std::optional<MeshPtr> ball) {
  for (double v : u.values) {
    if (v < 0.0) throw DomainError("Schwarz symmetrization needs a nonnegative field; pass |u|");
  }
  MeshPtr target = ball ? *ball : equal_support_ball(*u.mesh);
  const Mesh& tm = *target;
  if (tm.dim() != u.mesh->dim()) throw GeometryError("ball mesh dimension differs from source");

  std::vector<double> sorted = u.values;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto positive = static_cast<std::size_t>(
      std::count_if(sorted.begin(), sorted.end(), [](double v) { return v > 0.0; }));
  if (positive > static_cast<std::size_t>(tm.num_nodes())) {
    throw GeometryError(fmt::format("ball has {} free nodes, field has {} positive values", tm.num_nodes(),
                                    positive));
  }

  Point center{0.5 * (tm.lower().x + tm.upper().x), 0.5 * (tm.lower().y + tm.upper().y)};
  if (tm.dim() == 1) center.y = 0.0;
  std::vector<int> order(tm.num_nodes());
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> dist(tm.num_nodes());
  for (int n = 0; n < tm.num_nodes(); ++n) {
    const Point x = tm.node_coord(n);
    dist[n] = std::hypot(x.x - center.x, x.y - center.y);
  }
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist[a] < dist[b]; });

  Symmetrization result{Field::zeros(target), static_cast<long>(tm.num_cells()) - u.mesh->num_cells(),
                        static_cast<long>(tm.num_nodes()) - u.mesh->num_nodes(), 0};
  const std::size_t placed = std::min(sorted.size(), order.size());
  for (std::size_t k = 0; k < placed; ++k) result.field.values[order[k]] = sorted[k];
  result.padded_nodes = static_cast<long>(order.size()) - static_cast<long>(placed);
  return result;
}

Field homothety_rescale(const Field& u, double delta) {
  if (!(delta > 0.0) || delta > 1.0) {
    throw DomainError(fmt::format("homothety factor {} outside (0, 1]", delta));
  }
  Field v;
  v.mesh = scaled_mesh(*u.mesh, delta);
  v.values = u.values;
  return v;
}

}  // namespace dphase
