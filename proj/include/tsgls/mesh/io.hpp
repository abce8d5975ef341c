#pragma once

#include <string>
#include <vector>

#include "tsgls/mesh/mesh.hpp"

namespace tsgls::mesh {

/// Malformed mesh file; carries the 1-based line number.
class ParseError : public InvalidInput {
 public:
  ParseError(int line, const std::string& what);
  int line() const { return line_; }

 private:
  int line_;
};

/// Plain-text format:
///
///   dimension <d>
///   nodes <n>
///   <x> [<y> [<z>]]            (n lines, d values)
///   elements <m>
///   <i0> ... <id>              (m lines, 0-based ids)
///   facet_groups <k>
///   group <name> <count>
///   <element> <n0> [<n1> [<n2>]]
///
/// '#' starts a comment. Coordinates are written with 17 significant
/// digits so a save/load round trip is exact.
Mesh parse_mesh(const std::string& text);
std::string format_mesh(const Mesh& mesh);

Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

/// Point-data array for VTK output.
struct VtkField {
  std::string name;
  int components = 1;  // 1 (scalar) or 3 (vector)
  std::vector<double> values;
};

/// Legacy ASCII unstructured grid with optional point data.
void write_vtk(const Mesh& mesh, const std::vector<VtkField>& fields,
               const std::string& path, const std::string& title = "tsgls");
std::string format_vtk(const Mesh& mesh, const std::vector<VtkField>& fields,
                       const std::string& title = "tsgls");

}  // namespace tsgls::mesh
