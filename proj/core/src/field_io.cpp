#include "dphase/field_io.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "dphase/errors.hpp"

namespace dphase {

namespace {

void write_header(std::ostream& out, const Mesh& mesh, const char* location) {
  fmt::print(out, "# schema=1\n# location={}\n# mesh={}\n", location, mesh.describe());
  out << (mesh.dim() == 1 ? "i,x,value\n" : "i,j,x,y,value\n");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  return out;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> parts;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) parts.push_back(item);
  return parts;
}

}  // namespace

void write_field_csv(std::ostream& out, const Field& u) {
  const Mesh& mesh = *u.mesh;
  write_header(out, mesh, "node");
  for (int n = 0; n < mesh.num_nodes(); ++n) {
    const auto [i, j] = mesh.node_grid_index(n);
    const Point x = mesh.node_coord(n);
    if (mesh.dim() == 1) {
      fmt::print(out, "{},{:.17g},{:.17g}\n", i, x.x, u.values[n]);
    } else {
      fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g}\n", i, j, x.x, x.y, u.values[n]);
    }
  }
}

void write_field_csv(const std::string& path, const Field& u) {
  auto out = open_out(path);
  write_field_csv(out, u);
}

void write_cell_csv(std::ostream& out, const Mesh& mesh, const std::vector<double>& values) {
  if (values.size() != static_cast<std::size_t>(mesh.num_cells())) throw ShapeError("cell value count mismatch");
  write_header(out, mesh, "cell");
  for (int c = 0; c < mesh.num_cells(); ++c) {
    const auto [i, j] = mesh.cell_grid_index(c);
    const Point x = mesh.cell_center(c);
    if (mesh.dim() == 1) {
      fmt::print(out, "{},{:.17g},{:.17g}\n", i, x.x, values[c]);
    } else {
      fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g}\n", i, j, x.x, x.y, values[c]);
    }
  }
}

void write_cell_csv(const std::string& path, const Mesh& mesh, const std::vector<double>& values) {
  auto out = open_out(path);
  write_cell_csv(out, mesh, values);
}

FieldFile read_field_csv(std::istream& in) {
  FieldFile file;
  std::string line;
  bool have_header = false;
  bool have_schema = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# schema=", 0) == 0) {
        if (line != "# schema=1") throw ConfigError(fmt::format("unsupported field schema '{}'", line));
        have_schema = true;
      } else if (line == "# location=node") {
        file.location = SampleLocation::node;
      } else if (line == "# location=cell") {
        file.location = SampleLocation::cell;
      }
      continue;
    }
    if (!have_header) {
      if (line == "i,x,value") {
        file.dim = 1;
      } else if (line == "i,j,x,y,value") {
        file.dim = 2;
      } else {
        throw ConfigError(fmt::format("unrecognised field CSV header '{}'", line));
      }
      have_header = true;
      continue;
    }
    const auto parts = split(line);
    const std::size_t expected = file.dim == 1 ? 3 : 5;
    if (parts.size() != expected) {
      throw ConfigError(fmt::format("field CSV line {} has {} columns, expected {}", line_no, parts.size(), expected));
    }
    try {
      const int i = std::stoi(parts[0]);
      const int j = file.dim == 1 ? 0 : std::stoi(parts[1]);
      file.index.push_back({i, j});
      file.values.push_back(std::stod(parts.back()));
    } catch (const std::exception&) {
      throw ConfigError(fmt::format("field CSV line {} is not numeric", line_no));
    }
  }
  if (!have_schema) throw ConfigError("field CSV lacks '# schema=1'");
  if (!have_header) throw ConfigError("field CSV lacks a column header");
  return file;
}

FieldFile read_field_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(fmt::format("cannot read field file '{}'", path));
  return read_field_csv(in);
}

Field field_from_file(const FieldFile& file, MeshPtr mesh) {
  if (file.location != SampleLocation::node) throw ShapeError("expected a nodal field file");
  if (file.dim != mesh->dim()) throw ShapeError("field file dimension differs from the mesh");
  Field u = Field::zeros(mesh);
  std::vector<bool> seen(u.size(), false);
  for (std::size_t r = 0; r < file.values.size(); ++r) {
    const int n = mesh->node_at(file.index[r][0], file.index[r][1]);
    if (n == Mesh::kGhost || seen[n]) {
      throw ShapeError(fmt::format("field row {} does not address a distinct free node", r));
    }
    seen[n] = true;
    u.values[n] = file.values[r];
  }
  if (file.values.size() != u.size()) {
    throw ShapeError(fmt::format("field file has {} nodes, mesh has {}", file.values.size(), u.size()));
  }
  return u;
}

std::vector<double> cell_samples_from_file(const FieldFile& file, MeshPtr mesh) {
  if (file.location == SampleLocation::node) return cell_values(field_from_file(file, mesh));
  if (file.dim != mesh->dim()) throw ShapeError("field file dimension differs from the mesh");
  std::vector<double> out(mesh->num_cells(), 0.0);
  std::vector<bool> seen(out.size(), false);
  for (std::size_t r = 0; r < file.values.size(); ++r) {
    const int c = mesh->cell_at(file.index[r][0], file.index[r][1]);
    if (c == Mesh::kGhost || seen[c]) {
      throw ShapeError(fmt::format("field row {} does not address a distinct inside cell", r));
    }
    seen[c] = true;
    out[c] = file.values[r];
  }
  if (file.values.size() != out.size()) {
    throw ShapeError(fmt::format("field file has {} cells, mesh has {}", file.values.size(), out.size()));
  }
  return out;
}

}  // namespace dphase
