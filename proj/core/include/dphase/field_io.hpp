#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "dphase/mesh.hpp"

namespace dphase {

enum class SampleLocation { node, cell };

/// Parsed field CSV. Rows are keyed by grid index (node grid for nodal
/// files, cell grid for cell files).
struct FieldFile {
  SampleLocation location = SampleLocation::node;
  int dim = 1;
  std::vector<std::array<int, 2>> index;
  std::vector<double> values;
};

/// `# schema=1` header, `# location=...`, `# mesh=...`, then
/// `i,x,value` (1D) or `i,j,x,y,value` (2D). Values print with 17
/// significant digits so files round-trip and repeat byte for byte.
void write_field_csv(std::ostream& out, const Field& u);
void write_field_csv(const std::string& path, const Field& u);
void write_cell_csv(std::ostream& out, const Mesh& mesh, const std::vector<double>& cell_values);
void write_cell_csv(const std::string& path, const Mesh& mesh, const std::vector<double>& cell_values);

FieldFile read_field_csv(std::istream& in);
FieldFile read_field_csv(const std::string& path);

/// Nodal field on `mesh` from a nodal file; every free node must appear once.
Field field_from_file(const FieldFile& file, MeshPtr mesh);

/// Quadrature samples on `mesh`: cell files map directly, nodal files are
/// cell-averaged.
std::vector<double> cell_samples_from_file(const FieldFile& file, MeshPtr mesh);

}  // namespace dphase
