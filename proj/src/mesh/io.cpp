#include "tsgls/mesh/io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

namespace tsgls::mesh {

ParseError::ParseError(int line, const std::string& what)
    : InvalidInput("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

/// Line reader that skips blanks and comments and tracks line numbers.
class Reader {
 public:
  explicit Reader(const std::string& text) : in_(text) {}

  /// Next significant line split into tokens; false at end of input.
  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
      std::istringstream ls(line);
      tokens.clear();
      for (std::string t; ls >> t;) tokens.push_back(t);
      if (!tokens.empty()) return true;
    }
    ++line_no_;
    return false;
  }

  std::vector<std::string> expect(const char* what) {
    std::vector<std::string> t;
    if (!next(t)) fail(std::string("unexpected end of file, expected ") + what);
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(line_no_, msg); }

  int to_int(const std::string& s) const {
    std::size_t pos = 0;
    int v = 0;
    try {
      v = std::stoi(s, &pos);
    } catch (const std::exception&) {
      fail("expected an integer, got '" + s + "'");
    }
    if (pos != s.size()) fail("expected an integer, got '" + s + "'");
    return v;
  }

  double to_double(const std::string& s) const {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      fail("expected a number, got '" + s + "'");
    }
    if (pos != s.size()) fail("expected a number, got '" + s + "'");
    return v;
  }

  /// Header line "<keyword> <count>".
  int section(const char* keyword) {
    auto t = expect(keyword);
    if (t[0] != keyword) fail(std::string("expected section '") + keyword + "', got '" + t[0] + "'");
    if (t.size() != 2) fail(std::string("section '") + keyword + "' takes one value");
    const int n = to_int(t[1]);
    if (n < 0) fail("negative count");
    return n;
  }

 private:
  std::istringstream in_;
  int line_no_ = 0;
};

}  // namespace

Mesh parse_mesh(const std::string& text) {
  Reader r(text);
  Mesh m;
  m.dim = r.section("dimension");
  if (m.dim < 1 || m.dim > 3) r.fail("dimension must be 1, 2 or 3");

  const int n_nodes = r.section("nodes");
  for (int i = 0; i < n_nodes; ++i) {
    auto t = r.expect("node coordinates");
    if (static_cast<int>(t.size()) != m.dim) {
      r.fail("node line needs " + std::to_string(m.dim) + " coordinates");
    }
    Point p{0.0, 0.0, 0.0};
    for (int d = 0; d < m.dim; ++d) p[d] = r.to_double(t[d]);
    m.coords.push_back(p);
  }

  const int nv = m.dim + 1;
  const int n_elems = r.section("elements");
  for (int e = 0; e < n_elems; ++e) {
    auto t = r.expect("element connectivity");
    if (static_cast<int>(t.size()) != nv) {
      r.fail("element line needs " + std::to_string(nv) + " node ids");
    }
    Connectivity c{-1, -1, -1, -1};
    for (int a = 0; a < nv; ++a) {
      c[a] = r.to_int(t[a]);
      if (c[a] < 0 || c[a] >= n_nodes) r.fail("node id out of range");
    }
    m.elements.push_back(c);
  }

  const int n_groups = r.section("facet_groups");
  for (int g = 0; g < n_groups; ++g) {
    auto t = r.expect("group header");
    if (t[0] != "group" || t.size() != 3) r.fail("expected 'group <name> <count>'");
    if (m.facet_groups.count(t[1])) r.fail("duplicate group '" + t[1] + "'");
    const int count = r.to_int(t[2]);
    auto& facets = m.facet_groups[t[1]];
    for (int f = 0; f < count; ++f) {
      auto ft = r.expect("facet");
      if (static_cast<int>(ft.size()) != m.dim + 1) {
        r.fail("facet line needs the parent element and " + std::to_string(m.dim) +
               " node ids");
      }
      Facet facet;
      facet.element = r.to_int(ft[0]);
      if (facet.element < 0 || facet.element >= n_elems) r.fail("parent element out of range");
      for (int a = 0; a < m.dim; ++a) {
        facet.nodes[a] = r.to_int(ft[a + 1]);
        if (facet.nodes[a] < 0 || facet.nodes[a] >= n_nodes) r.fail("node id out of range");
      }
      facets.push_back(facet);
    }
  }
  std::vector<std::string> extra;
  if (r.next(extra)) r.fail("unexpected content after facet groups");
  return m;
}

std::string format_mesh(const Mesh& mesh) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "dimension " << mesh.dim << "\n";
  out << "nodes " << mesh.n_nodes() << "\n";
  for (const auto& p : mesh.coords) {
    for (int d = 0; d < mesh.dim; ++d) out << (d ? " " : "") << p[d];
    out << "\n";
  }
  out << "elements " << mesh.n_elements() << "\n";
  for (const auto& c : mesh.elements) {
    for (int a = 0; a <= mesh.dim; ++a) out << (a ? " " : "") << c[a];
    out << "\n";
  }
  out << "facet_groups " << mesh.facet_groups.size() << "\n";
  for (const auto& [name, facets] : mesh.facet_groups) {
    out << "group " << name << " " << facets.size() << "\n";
    for (const auto& f : facets) {
      out << f.element;
      for (int a = 0; a < mesh.dim; ++a) out << " " << f.nodes[a];
      out << "\n";
    }
  }
  return out.str();
}

Mesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open mesh file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mesh(buf.str());
}

void save_mesh(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write mesh file '" + path + "'");
  out << format_mesh(mesh);
}

std::string format_vtk(const Mesh& mesh, const std::vector<VtkField>& fields,
                       const std::string& title) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.n_nodes() << " double\n";
  for (const auto& p : mesh.coords) out << p[0] << " " << p[1] << " " << p[2] << "\n";
  const int nv = mesh.nodes_per_element();
  out << "CELLS " << mesh.n_elements() << " " << mesh.n_elements() * (nv + 1) << "\n";
  for (const auto& c : mesh.elements) {
    out << nv;
    for (int a = 0; a < nv; ++a) out << " " << c[a];
    out << "\n";
  }
  const int cell_type = mesh.dim == 1 ? 3 : mesh.dim == 2 ? 5 : 10;
  out << "CELL_TYPES " << mesh.n_elements() << "\n";
  for (int e = 0; e < mesh.n_elements(); ++e) out << cell_type << "\n";
  if (!fields.empty()) out << "POINT_DATA " << mesh.n_nodes() << "\n";
  for (const auto& f : fields) {
    if (f.components != 1 && f.components != 3) {
      throw InvalidInput("VTK field '" + f.name + "' must have 1 or 3 components");
    }
    if (f.values.size() != static_cast<std::size_t>(f.components * mesh.n_nodes())) {
      throw InvalidInput("VTK field '" + f.name + "' has wrong length");
    }
    if (f.components == 1) {
      out << "SCALARS " << f.name << " double 1\nLOOKUP_TABLE default\n";
      for (double v : f.values) out << v << "\n";
    } else {
      out << "VECTORS " << f.name << " double\n";
      for (int i = 0; i < mesh.n_nodes(); ++i) {
        out << f.values[3 * i] << " " << f.values[3 * i + 1] << " "
            << f.values[3 * i + 2] << "\n";
      }
    }
  }
  return out.str();
}

void write_vtk(const Mesh& mesh, const std::vector<VtkField>& fields,
               const std::string& path, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write VTK file '" + path + "'");
  out << format_vtk(mesh, fields, title);
}

}  // namespace tsgls::mesh
