#pragma once

#include <string>
#include <vector>

#include "dphase/mesh.hpp"
#include "dphase/orlicz.hpp"

namespace dphase {

/// Textual weight descriptor: `constant:c`, `ramp:c0,c1` (linear in x over
/// the mesh bounding box), `checkerboard:c,k` (value c on alternate blocks of
/// a k x k partition of the bounding box, 0 elsewhere) or `file:path` (cell
/// CSV as written by write_field_csv).
struct WeightSpec {
  enum class Kind { constant, ramp, checkerboard, file };
  Kind kind = Kind::constant;
  double c0 = 1.0;
  double c1 = 1.0;
  int blocks = 1;
  std::string path;

  static WeightSpec parse(const std::string& text);
  std::string to_string() const;

  /// Weight at an arbitrary point of the mesh bounding box (not for `file`).
  double at(const Mesh& mesh, Point x) const;

  WeightPtr on_cells(const Mesh& mesh) const;
  WeightPtr on_nodes(const Mesh& mesh) const;
};

/// Weight sampled at the nodes of `mesh`, reusing the cell values of `cells`
/// where a node sits (average of adjacent inside cells). Used when only cell
/// samples of a weight are known.
WeightPtr node_weight_from_cells(const Mesh& mesh, const WeightField& cells);

}  // namespace dphase
