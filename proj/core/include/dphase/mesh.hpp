#pragma once

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dphase {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// Uniform cell grid over an interval or an axis-aligned rectangle. In 2D a
/// boolean mask selects the cells that make up the domain.
///
/// Nodes sit at cell corners. A node is a free degree of freedom only if every
/// cell touching it is inside the domain; all other nodes carry the zero
/// Dirichlet value. Quadrature points are the centers of inside cells, all
/// with the same measure.
class Mesh {
 public:
  static constexpr int kGhost = -1;

  static std::shared_ptr<const Mesh> interval(double a, double b, int cells);

  /// `inside` is row-major over cells, index j * nx + i.
  static std::shared_ptr<const Mesh> masked_rectangle(Point lower, Point upper, int nx, int ny,
                                                      std::vector<bool> inside);

  static std::shared_ptr<const Mesh> rectangle(Point lower, Point upper, int nx, int ny);

  /// Cells of spacing `h` whose centers fall inside the disk. The bounding
  /// box is padded by one cell on each side so every rim node is a ghost.
  static std::shared_ptr<const Mesh> disk(Point center, double radius, double h);

  /// Exactly `target_cells` cells of spacing `h`, the ones whose centers are
  /// closest to `center` (outermost ring filled in angular order).
  static std::shared_ptr<const Mesh> disk_with_cell_count(Point center, long target_cells, double h);

  /// Smallest disk_with_cell_count mesh with at least `target_nodes` free
  /// nodes.
  static std::shared_ptr<const Mesh> disk_with_node_count(Point center, long target_nodes, double h);

  int dim() const { return dim_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }
  Point lower() const { return lower_; }
  Point upper() const { return upper_; }

  int num_nodes() const { return static_cast<int>(node_grid_.size()); }
  int num_cells() const { return static_cast<int>(cell_grid_.size()); }
  double cell_measure() const { return dim_ == 1 ? hx_ : hx_ * hy_; }
  double total_measure() const { return cell_measure() * num_cells(); }

  /// Corner nodes of an inside cell: 1D {left, right, ghost, ghost};
  /// 2D {(i,j), (i+1,j), (i,j+1), (i+1,j+1)}.
  const std::array<int, 4>& cell_nodes(int cell) const { return cell_nodes_[cell]; }

  std::array<int, 2> cell_grid_index(int cell) const { return cell_grid_[cell]; }
  std::array<int, 2> node_grid_index(int node) const { return node_grid_[node]; }
  int cell_at(int i, int j = 0) const;
  int node_at(int i, int j = 0) const;
  bool cell_inside(int i, int j = 0) const { return cell_at(i, j) != kGhost; }

  Point cell_center(int cell) const;
  Point node_coord(int node) const;
  Point grid_node_coord(int i, int j = 0) const;

  const std::vector<bool>& mask() const { return mask_; }

  std::string describe() const;

 private:
  Mesh() = default;
  void index();

  int dim_ = 1;
  int nx_ = 0;
  int ny_ = 1;
  Point lower_{};
  Point upper_{};
  double hx_ = 0.0;
  double hy_ = 1.0;
  std::vector<bool> mask_;
  std::vector<int> cell_id_;  // grid cell -> inside cell id or kGhost
  std::vector<int> node_id_;  // grid node -> free node id or kGhost
  std::vector<std::array<int, 2>> cell_grid_;
  std::vector<std::array<int, 2>> node_grid_;
  std::vector<std::array<int, 4>> cell_nodes_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Real function on the free nodes of a mesh; zero on every ghost node.
struct Field {
  MeshPtr mesh;
  std::vector<double> values;

  static Field zeros(MeshPtr mesh);
  static Field from_function(MeshPtr mesh, const std::function<double(Point)>& f);

  std::size_t size() const { return values.size(); }
};

/// Per-cell gradient. `dy` is empty in 1D.
struct GradField {
  int dim = 1;
  std::vector<double> dx;
  std::vector<double> dy;
  std::vector<double> magnitude;
};

/// Cell-center values of a nodal field (average of the cell corners).
std::vector<double> cell_values(const Field& u);
std::vector<double> cell_values(const Mesh& mesh, std::span<const double> nodal);

/// 1D: difference quotient per cell. 2D: bilinear gradient at the cell center.
GradField gradient(const Field& u);
GradField gradient(const Mesh& mesh, std::span<const double> nodal);

/// Transposes of the two linear maps above, accumulated into `nodal_out`.
void add_cell_values_adjoint(const Mesh& mesh, std::span<const double> cell_covector,
                             std::span<double> nodal_out);
void add_gradient_adjoint(const Mesh& mesh, std::span<const double> dx_covector,
                          std::span<const double> dy_covector, std::span<double> nodal_out);

/// Largest inscribed radius. 1D: half the length. 2D: exact Euclidean
/// distance transform from inside cell centers to the nearest outside cell
/// center, minus half a cell.
double inradius(const Mesh& mesh);

/// Nested family check: every mesh's domain is contained in the next one's.
bool is_nested(std::span<const MeshPtr> family);

/// Same mesh scaled by `delta` about the origin, identical node count.
MeshPtr scaled_mesh(const Mesh& mesh, double delta);

}  // namespace dphase
