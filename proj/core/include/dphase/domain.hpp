#pragma once

#include <string>

#include "dphase/mesh.hpp"

namespace dphase {

/// Recipe for a mesh at a chosen resolution.
///   interval:  (a, b) with `resolution` cells
///   rectangle: [lower, upper] with `resolution` cells along x and the
///              closest square-cell count along y
///   disk:      disk of `radius` at `center`, `resolution` cells across the
///              diameter
struct DomainSpec {
  enum class Kind { interval, rectangle, disk };
  Kind kind = Kind::interval;
  double a = 0.0;
  double b = 1.0;
  Point lower{0.0, 0.0};
  Point upper{1.0, 1.0};
  Point center{0.0, 0.0};
  double radius = 0.5;
  int resolution = 512;

  static DomainSpec interval(double a, double b, int cells);
  static DomainSpec square(double side, int cells);
  static DomainSpec disk(Point center, double radius, int cells_across);

  MeshPtr build() const { return build(resolution); }
  MeshPtr build(int resolution) const;
  int dim() const { return kind == Kind::interval ? 1 : 2; }
  std::string kind_name() const;
  static Kind parse_kind(const std::string& text);
};

}  // namespace dphase
