#include "dphase/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dphase/errors.hpp"

namespace dphase {

namespace {

// Felzenszwalb-Huttenlocher lower envelope of parabolas; `f` holds squared
// distances sampled at spacing `h`, overwritten with the transformed values.
void distance_transform_1d(std::vector<double>& f, double h) {
  const int n = static_cast<int>(f.size());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<int> v(n);
  std::vector<double> z(n + 1);
  std::vector<double> out(n);
  int k = 0;
  int first = -1;
  for (int i = 0; i < n; ++i) {
    if (std::isfinite(f[i])) {
      first = i;
      break;
    }
  }
  if (first < 0) return;
  v[0] = first;
  z[0] = -inf;
  z[1] = inf;
  for (int q = first + 1; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    const double xq = q * h;
    while (true) {
      const double xv = v[k] * h;
      const double s = ((f[q] + xq * xq) - (f[v[k]] + xv * xv)) / (2.0 * (xq - xv));
      if (s <= z[k]) {
        if (k == 0) {
          v[0] = q;
          z[1] = inf;
          break;
        }
        --k;
        continue;
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = inf;
      break;
    }
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    const double xq = q * h;
    while (z[k + 1] < xq) ++k;
    const double d = xq - v[k] * h;
    out[q] = d * d + f[v[k]];
  }
  f.swap(out);
}

}  // namespace

MeshPtr Mesh::interval(double a, double b, int cells) {
  if (!(b > a) || cells < 2) {
    throw DomainError(fmt::format("interval mesh needs b > a and at least 2 cells (got ({}, {}), {})",
                                  a, b, cells));
  }
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->dim_ = 1;
  mesh->nx_ = cells;
  mesh->ny_ = 1;
  mesh->lower_ = {a, 0.0};
  mesh->upper_ = {b, 0.0};
  mesh->hx_ = (b - a) / cells;
  mesh->hy_ = 1.0;
  mesh->mask_.assign(cells, true);
  mesh->index();
  return mesh;
}

MeshPtr Mesh::masked_rectangle(Point lower, Point upper, int nx, int ny, std::vector<bool> inside) {
  if (!(upper.x > lower.x) || !(upper.y > lower.y) || nx < 2 || ny < 2) {
    throw DomainError("rectangle mesh needs positive extent and at least 2 cells per side");
  }
  if (inside.size() != static_cast<std::size_t>(nx) * ny) {
    throw ShapeError(fmt::format("mask has {} entries, grid has {}", inside.size(),
                                 static_cast<std::size_t>(nx) * ny));
  }
  auto mesh = std::shared_ptr<Mesh>(new Mesh());
  mesh->dim_ = 2;
  mesh->nx_ = nx;
  mesh->ny_ = ny;
  mesh->lower_ = lower;
  mesh->upper_ = upper;
  mesh->hx_ = (upper.x - lower.x) / nx;
  mesh->hy_ = (upper.y - lower.y) / ny;
  mesh->mask_ = std::move(inside);
  mesh->index();
  if (mesh->num_cells() == 0) throw DomainError("mask selects no cells");
  return mesh;
}

MeshPtr Mesh::rectangle(Point lower, Point upper, int nx, int ny) {
  return masked_rectangle(lower, upper, nx, ny, std::vector<bool>(static_cast<std::size_t>(nx) * ny, true));
}

MeshPtr Mesh::disk(Point center, double radius, double h) {
  if (!(radius > 0.0) || !(h > 0.0)) throw DomainError("disk needs positive radius and spacing");
  const int half = static_cast<int>(std::ceil(radius / h)) + 1;
  const int n = 2 * half;
  const Point lower{center.x - half * h, center.y - half * h};
  const Point upper{center.x + half * h, center.y + half * h};
  std::vector<bool> inside(static_cast<std::size_t>(n) * n, false);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double cx = lower.x + (i + 0.5) * h - center.x;
      const double cy = lower.y + (j + 0.5) * h - center.y;
      inside[static_cast<std::size_t>(j) * n + i] = cx * cx + cy * cy < radius * radius;
    }
  }
  return masked_rectangle(lower, upper, n, n, std::move(inside));
}

MeshPtr Mesh::disk_with_cell_count(Point center, long target_cells, double h) {
  if (target_cells < 1) throw DomainError("disk cell count must be positive");
  if (!(h > 0.0)) throw DomainError("disk needs positive spacing");
  // Cells ordered by distance of their centers, ties broken by angle; the
  // first target_cells of them form the disk (the outer ring may be partial).
  const double r0 = std::sqrt(target_cells * h * h / std::numbers::pi);
  const int half = static_cast<int>(std::ceil(r0 / h)) + 3;
  const int n = 2 * half;
  struct Candidate {
    double d2;
    double angle;
    int index;
  };
  std::vector<Candidate> cells;
  cells.reserve(static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const double cx = (i - half + 0.5) * h;
      const double cy = (j - half + 0.5) * h;
      cells.push_back({cx * cx + cy * cy, std::atan2(cy, cx), j * n + i});
    }
  }
  std::sort(cells.begin(), cells.end(), [](const Candidate& a, const Candidate& b) {
    if (a.d2 != b.d2) return a.d2 < b.d2;
    if (a.angle != b.angle) return a.angle < b.angle;
    return a.index < b.index;
  });
  std::vector<bool> inside(static_cast<std::size_t>(n) * n, false);
  for (long k = 0; k < target_cells; ++k) inside[cells[k].index] = true;
  return masked_rectangle({center.x - half * h, center.y - half * h}, {center.x + half * h, center.y + half * h}, n,
                          n, std::move(inside));
}

MeshPtr Mesh::disk_with_node_count(Point center, long target_nodes, double h) {
  if (target_nodes < 1) throw DomainError("disk node count must be positive");
  // Free nodes never decrease when a cell is added; bisect on the cell count.
  long lo = 1;
  long hi = std::max<long>(4, 2 * target_nodes + 64);
  while (disk_with_cell_count(center, hi, h)->num_nodes() < target_nodes) hi *= 2;
  while (lo < hi) {
    const long mid = lo + (hi - lo) / 2;
    if (disk_with_cell_count(center, mid, h)->num_nodes() >= target_nodes) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return disk_with_cell_count(center, lo, h);
}

void Mesh::index() {
  const int ncell_grid = nx_ * ny_;
  cell_id_.assign(ncell_grid, kGhost);
  cell_grid_.clear();
  for (int j = 0; j < ny_; ++j) {
    for (int i = 0; i < nx_; ++i) {
      if (mask_[static_cast<std::size_t>(j) * nx_ + i]) {
        cell_id_[j * nx_ + i] = static_cast<int>(cell_grid_.size());
        cell_grid_.push_back({i, j});
      }
    }
  }
  node_grid_.clear();
  if (dim_ == 1) {
    node_id_.assign(nx_ + 1, kGhost);
    for (int i = 1; i < nx_; ++i) {
      node_id_[i] = static_cast<int>(node_grid_.size());
      node_grid_.push_back({i, 0});
    }
  } else {
    node_id_.assign(static_cast<std::size_t>(nx_ + 1) * (ny_ + 1), kGhost);
    for (int j = 1; j < ny_; ++j) {
      for (int i = 1; i < nx_; ++i) {
        const bool free = cell_inside(i - 1, j - 1) && cell_inside(i, j - 1) &&
                          cell_inside(i - 1, j) && cell_inside(i, j);
        if (free) {
          node_id_[static_cast<std::size_t>(j) * (nx_ + 1) + i] = static_cast<int>(node_grid_.size());
          node_grid_.push_back({i, j});
        }
      }
    }
  }
  cell_nodes_.resize(cell_grid_.size());
  for (std::size_t c = 0; c < cell_grid_.size(); ++c) {
    const auto [i, j] = cell_grid_[c];
    if (dim_ == 1) {
      cell_nodes_[c] = {node_at(i), node_at(i + 1), kGhost, kGhost};
    } else {
      cell_nodes_[c] = {node_at(i, j), node_at(i + 1, j), node_at(i, j + 1), node_at(i + 1, j + 1)};
    }
  }
}

int Mesh::cell_at(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return kGhost;
  return cell_id_[static_cast<std::size_t>(j) * nx_ + i];
}

int Mesh::node_at(int i, int j) const {
  if (dim_ == 1) {
    if (i < 0 || i > nx_ || j != 0) return kGhost;
    return node_id_[i];
  }
  if (i < 0 || j < 0 || i > nx_ || j > ny_) return kGhost;
  return node_id_[static_cast<std::size_t>(j) * (nx_ + 1) + i];
}

Point Mesh::cell_center(int cell) const {
  const auto [i, j] = cell_grid_[cell];
  if (dim_ == 1) return {lower_.x + (i + 0.5) * hx_, 0.0};
  return {lower_.x + (i + 0.5) * hx_, lower_.y + (j + 0.5) * hy_};
}

Point Mesh::grid_node_coord(int i, int j) const {
  if (dim_ == 1) return {lower_.x + i * hx_, 0.0};
  return {lower_.x + i * hx_, lower_.y + j * hy_};
}

Point Mesh::node_coord(int node) const {
  const auto [i, j] = node_grid_[node];
  return grid_node_coord(i, j);
}

std::string Mesh::describe() const {
  if (dim_ == 1) return fmt::format("interval({},{};N={})", lower_.x, upper_.x, nx_);
  return fmt::format("grid([{},{}]x[{},{}];{}x{};cells={})", lower_.x, upper_.x, lower_.y, upper_.y,
                     nx_, ny_, num_cells());
}

Field Field::zeros(MeshPtr mesh) {
  Field f;
  f.values.assign(mesh->num_nodes(), 0.0);
  f.mesh = std::move(mesh);
  return f;
}

Field Field::from_function(MeshPtr mesh, const std::function<double(Point)>& f) {
  Field out = zeros(mesh);
  for (int n = 0; n < mesh->num_nodes(); ++n) out.values[n] = f(mesh->node_coord(n));
  return out;
}

namespace {

void check_nodal(const Mesh& mesh, std::size_t n) {
  if (n != static_cast<std::size_t>(mesh.num_nodes())) {
    throw ShapeError(fmt::format("field has {} values, mesh has {} free nodes", n, mesh.num_nodes()));
  }
}

inline double at(std::span<const double> nodal, int id) { return id == Mesh::kGhost ? 0.0 : nodal[id]; }

}  // namespace

std::vector<double> cell_values(const Mesh& mesh, std::span<const double> nodal) {
  check_nodal(mesh, nodal.size());
  std::vector<double> out(mesh.num_cells());
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& nd = mesh.cell_nodes(c);
    if (mesh.dim() == 1) {
      out[c] = 0.5 * (at(nodal, nd[0]) + at(nodal, nd[1]));
    } else {
      out[c] = 0.25 * (at(nodal, nd[0]) + at(nodal, nd[1]) + at(nodal, nd[2]) + at(nodal, nd[3]));
    }
  }
  return out;
}

std::vector<double> cell_values(const Field& u) { return cell_values(*u.mesh, u.values); }

GradField gradient(const Mesh& mesh, std::span<const double> nodal) {
  check_nodal(mesh, nodal.size());
  GradField g;
  g.dim = mesh.dim();
  const int nc = mesh.num_cells();
  g.dx.resize(nc);
  g.magnitude.resize(nc);
  if (mesh.dim() == 1) {
    const double inv = 1.0 / mesh.hx();
    for (int c = 0; c < nc; ++c) {
      const auto& nd = mesh.cell_nodes(c);
      g.dx[c] = (at(nodal, nd[1]) - at(nodal, nd[0])) * inv;
      g.magnitude[c] = std::abs(g.dx[c]);
    }
    return g;
  }
  g.dy.resize(nc);
  const double ix = 0.5 / mesh.hx();
  const double iy = 0.5 / mesh.hy();
  for (int c = 0; c < nc; ++c) {
    const auto& nd = mesh.cell_nodes(c);
    const double u00 = at(nodal, nd[0]), u10 = at(nodal, nd[1]);
    const double u01 = at(nodal, nd[2]), u11 = at(nodal, nd[3]);
    g.dx[c] = ((u10 + u11) - (u00 + u01)) * ix;
    g.dy[c] = ((u01 + u11) - (u00 + u10)) * iy;
    g.magnitude[c] = std::hypot(g.dx[c], g.dy[c]);
  }
  return g;
}

GradField gradient(const Field& u) { return gradient(*u.mesh, u.values); }

void add_cell_values_adjoint(const Mesh& mesh, std::span<const double> cov, std::span<double> out) {
  check_nodal(mesh, out.size());
  const double w = mesh.dim() == 1 ? 0.5 : 0.25;
  const int corners = mesh.dim() == 1 ? 2 : 4;
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& nd = mesh.cell_nodes(c);
    for (int k = 0; k < corners; ++k) {
      if (nd[k] != Mesh::kGhost) out[nd[k]] += w * cov[c];
    }
  }
}

void add_gradient_adjoint(const Mesh& mesh, std::span<const double> dx_cov, std::span<const double> dy_cov,
                          std::span<double> out) {
  check_nodal(mesh, out.size());
  auto add = [&](int id, double v) {
    if (id != Mesh::kGhost) out[id] += v;
  };
  if (mesh.dim() == 1) {
    const double inv = 1.0 / mesh.hx();
    for (int c = 0; c < mesh.num_cells(); ++c) {
      const auto& nd = mesh.cell_nodes(c);
      add(nd[0], -dx_cov[c] * inv);
      add(nd[1], dx_cov[c] * inv);
    }
    return;
  }
  const double ix = 0.5 / mesh.hx();
  const double iy = 0.5 / mesh.hy();
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto& nd = mesh.cell_nodes(c);
    const double gx = dx_cov[c] * ix;
    const double gy = dy_cov[c] * iy;
    add(nd[0], -gx - gy);
    add(nd[1], gx - gy);
    add(nd[2], -gx + gy);
    add(nd[3], gx + gy);
  }
}

double inradius(const Mesh& mesh) {
  if (mesh.num_cells() == 0) throw DomainError("inradius of an empty domain");
  if (mesh.dim() == 1) {
    // Inside cells of a 1D mesh always form the whole interval.
    return 0.5 * (mesh.upper().x - mesh.lower().x);
  }
  // Pad the grid with one ring of outside cells so the rectangle boundary counts.
  const int W = mesh.nx() + 2;
  const int Hh = mesh.ny() + 2;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> d2(static_cast<std::size_t>(W) * Hh, 0.0);
  for (int j = 0; j < Hh; ++j) {
    for (int i = 0; i < W; ++i) {
      d2[static_cast<std::size_t>(j) * W + i] = mesh.cell_inside(i - 1, j - 1) ? inf : 0.0;
    }
  }
  std::vector<double> line;
  for (int j = 0; j < Hh; ++j) {
    line.assign(d2.begin() + static_cast<std::ptrdiff_t>(j) * W, d2.begin() + static_cast<std::ptrdiff_t>(j + 1) * W);
    distance_transform_1d(line, mesh.hx());
    std::copy(line.begin(), line.end(), d2.begin() + static_cast<std::ptrdiff_t>(j) * W);
  }
  line.resize(Hh);
  for (int i = 0; i < W; ++i) {
    for (int j = 0; j < Hh; ++j) line[j] = d2[static_cast<std::size_t>(j) * W + i];
    distance_transform_1d(line, mesh.hy());
    for (int j = 0; j < Hh; ++j) d2[static_cast<std::size_t>(j) * W + i] = line[j];
  }
  double best = 0.0;
  for (double v : d2) best = std::max(best, v);
  return std::sqrt(best) - 0.5 * std::min(mesh.hx(), mesh.hy());
}

bool is_nested(std::span<const MeshPtr> family) {
  constexpr double tol = 1e-12;
  for (std::size_t k = 0; k + 1 < family.size(); ++k) {
    const Mesh& inner = *family[k];
    const Mesh& outer = *family[k + 1];
    if (inner.dim() != outer.dim()) return false;
    if (inner.dim() == 1) {
      if (inner.lower().x < outer.lower().x - tol || inner.upper().x > outer.upper().x + tol) return false;
      continue;
    }
    // 2D: same grid geometry and mask inclusion.
    const bool same_grid = inner.nx() == outer.nx() && inner.ny() == outer.ny() &&
                           std::abs(inner.hx() - outer.hx()) < tol && std::abs(inner.hy() - outer.hy()) < tol &&
                           std::abs(inner.lower().x - outer.lower().x) < tol &&
                           std::abs(inner.lower().y - outer.lower().y) < tol;
    if (!same_grid) return false;
    for (std::size_t c = 0; c < inner.mask().size(); ++c) {
      if (inner.mask()[c] && !outer.mask()[c]) return false;
    }
  }
  return true;
}

MeshPtr scaled_mesh(const Mesh& mesh, double delta) {
  if (!(delta > 0.0)) throw DomainError("scale factor must be positive");
  if (mesh.dim() == 1) return Mesh::interval(delta * mesh.lower().x, delta * mesh.upper().x, mesh.nx());
  return Mesh::masked_rectangle({delta * mesh.lower().x, delta * mesh.lower().y},
                                {delta * mesh.upper().x, delta * mesh.upper().y}, mesh.nx(), mesh.ny(),
                                mesh.mask());
}

}  // namespace dphase
