#include "dphase/domain.hpp"

#include <cmath>

#include <fmt/format.h>

#include "dphase/errors.hpp"

namespace dphase {

DomainSpec DomainSpec::interval(double a, double b, int cells) {
  DomainSpec d;
  d.kind = Kind::interval;
  d.a = a;
  d.b = b;
  d.resolution = cells;
  return d;
}

DomainSpec DomainSpec::square(double side, int cells) {
  DomainSpec d;
  d.kind = Kind::rectangle;
  d.lower = {0.0, 0.0};
  d.upper = {side, side};
  d.resolution = cells;
  return d;
}

DomainSpec DomainSpec::disk(Point center, double radius, int cells_across) {
  DomainSpec d;
  d.kind = Kind::disk;
  d.center = center;
  d.radius = radius;
  d.resolution = cells_across;
  return d;
}

MeshPtr DomainSpec::build(int n) const {
  if (n < 2) throw DomainError(fmt::format("mesh resolution {} is too small", n));
  switch (kind) {
    case Kind::interval:
      return Mesh::interval(a, b, n);
    case Kind::rectangle: {
      const double w = upper.x - lower.x;
      const double h = upper.y - lower.y;
      if (!(w > 0.0) || !(h > 0.0)) throw DomainError("rectangle needs upper > lower");
      const int ny = std::max(2, static_cast<int>(std::lround(n * h / w)));
      return Mesh::rectangle(lower, upper, n, ny);
    }
    case Kind::disk:
      return Mesh::disk(center, radius, 2.0 * radius / n);
  }
  throw DomainError("unknown domain kind");
}

std::string DomainSpec::kind_name() const {
  switch (kind) {
    case Kind::interval:
      return "interval";
    case Kind::rectangle:
      return "rectangle";
    case Kind::disk:
      return "disk";
  }
  return "?";
}

DomainSpec::Kind DomainSpec::parse_kind(const std::string& text) {
  if (text == "interval") return Kind::interval;
  if (text == "rectangle" || text == "square") return Kind::rectangle;
  if (text == "disk") return Kind::disk;
  throw ConfigError(fmt::format("unknown mesh kind '{}' (interval, rectangle, square, disk)", text));
}

}  // namespace dphase
