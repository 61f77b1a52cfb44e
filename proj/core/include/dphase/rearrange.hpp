#pragma once

#include <optional>

#include "dphase/mesh.hpp"

namespace dphase {

/// Axis-aligned polarizer: the closed half-space on one side of the plane
/// {x_axis = position}.
struct Polarizer {
  enum class Side { lower, upper };
  int axis = 0;
  double position = 0.0;
  Side side = Side::upper;
};

/// Two-point rearrangement of |u|: on the polarizer side each node takes the
/// larger of the pair {u(x), u(x_H)}, on the other side the smaller.
/// Throws GeometryError unless the free-node set is symmetric under the
/// reflection.
Field polarize(const Field& u, const Polarizer& polarizer);

/// Reflection of a field through the polarizer's plane (same validation).
Field reflect(const Field& u, const Polarizer& polarizer);

struct Symmetrization {
  Field field;               // on the ball mesh
  long cell_mismatch = 0;    // ball cells minus source cells
  long node_mismatch = 0;    // ball free nodes minus source free nodes
  long padded_nodes = 0;     // ball nodes that received zero
};

/// Decreasing rearrangement onto a centered ball (1D: centered interval):
/// nodal values sorted descending land on ball nodes sorted by distance from
/// the center. The default ball is equal_support_ball. Throws DomainError for
/// negative input and GeometryError if the ball has fewer free nodes than u
/// has positive values.
Symmetrization schwarz_symmetrize(const Field& u, std::optional<MeshPtr> ball = std::nullopt);

/// Ball mesh matching `mesh` in cell count and spacing, centered at 0.
MeshPtr equal_measure_ball(const Mesh& mesh);

/// Smallest ball with at least as many free nodes as `mesh` (the measure of
/// the nodal support under lumped quadrature). Same as equal_measure_ball in 1D.
MeshPtr equal_support_ball(const Mesh& mesh);

/// v(y) = u(y / delta) on the mesh scaled by delta in (0, 1].
Field homothety_rescale(const Field& u, double delta);

}  // namespace dphase
