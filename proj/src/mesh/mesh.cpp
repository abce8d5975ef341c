#include "tsgls/mesh/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace tsgls::mesh {

namespace {

Point sub(const Point& a, const Point& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
double dot(const Point& a, const Point& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
Point cross(const Point& a, const Point& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}
double norm(const Point& a) { return std::sqrt(dot(a, a)); }

using FaceKey = std::array<int, 3>;

FaceKey face_key(const Facet& f, int n) {
  FaceKey k{-1, -1, -1};
  std::copy_n(f.nodes.begin(), n, k.begin());
  std::sort(k.begin(), k.begin() + n);
  return k;
}

/// Boundary faces in element order, local faces in order of the omitted
/// vertex.
std::vector<Facet> boundary_facets(const Mesh& mesh) {
  const int nv = mesh.nodes_per_element();
  const int nf = mesh.nodes_per_facet();
  std::map<FaceKey, int> count;
  std::vector<Facet> all;
  for (int e = 0; e < mesh.n_elements(); ++e) {
    for (int omit = 0; omit < nv; ++omit) {
      Facet f;
      f.element = e;
      int k = 0;
      for (int a = 0; a < nv; ++a) {
        if (a != omit) f.nodes[k++] = mesh.elements[e][a];
      }
      ++count[face_key(f, nf)];
      all.push_back(f);
    }
  }
  std::vector<Facet> out;
  for (const auto& f : all) {
    if (count[face_key(f, nf)] == 1) out.push_back(f);
  }
  return out;
}

double tet_det(const Point& a, const Point& b, const Point& c, const Point& d) {
  return dot(sub(b, a), cross(sub(c, a), sub(d, a)));
}

}  // namespace

ElementType element_type(int dim) {
  switch (dim) {
    case 1: return ElementType::line2;
    case 2: return ElementType::tri3;
    case 3: return ElementType::tet4;
    default:
      throw InvalidInput("mesh dimension must be 1, 2 or 3, got " +
                         std::to_string(dim));
  }
}

const char* element_name(ElementType type) {
  switch (type) {
    case ElementType::line2: return "line2";
    case ElementType::tri3: return "tri3";
    case ElementType::tet4: return "tet4";
  }
  return "?";
}

const std::vector<Facet>& Mesh::group(const std::string& name) const {
  auto it = facet_groups.find(name);
  if (it == facet_groups.end()) {
    throw InvalidInput("unknown facet group '" + name + "'");
  }
  return it->second;
}

double default_c_i(ElementType type) {
  return type == ElementType::line2 ? 9.0 : 3.0;
}

Mesh generate_interval(double length, int n_elems) {
  if (n_elems < 1) throw InvalidInput("generate_interval: n_elems must be >= 1");
  if (!(length > 0.0)) throw InvalidInput("generate_interval: length must be > 0");
  Mesh m;
  m.dim = 1;
  m.coords.resize(n_elems + 1);
  for (int i = 0; i <= n_elems; ++i) {
    m.coords[i] = {length * static_cast<double>(i) / n_elems, 0.0, 0.0};
  }
  m.coords.back()[0] = length;
  for (int e = 0; e < n_elems; ++e) m.elements.push_back({e, e + 1, -1, -1});
  m.facet_groups["left"] = {Facet{{0, -1, -1}, 0}};
  m.facet_groups["right"] = {Facet{{n_elems, -1, -1}, n_elems - 1}};
  return m;
}

FacetClassifier box_face_classifier() {
  return [](const Point&, const Point& n) {
    static const char* names[3][2] = {
        {"xmin", "xmax"}, {"ymin", "ymax"}, {"zmin", "zmax"}};
    int axis = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(n[i]) > std::abs(n[axis])) axis = i;
    }
    return std::string(names[axis][n[axis] > 0.0 ? 1 : 0]);
  };
}

void assign_boundary_groups(Mesh& mesh, const FacetClassifier& classify) {
  mesh.facet_groups.clear();
  for (const auto& f : boundary_facets(mesh)) {
    const auto geo = facet_normal_area(mesh, f);
    mesh.facet_groups[classify(facet_centroid(mesh, f), geo.normal)].push_back(f);
  }
}

Mesh generate_rectangle(const std::array<double, 2>& origin,
                        const std::array<double, 2>& extents,
                        const std::array<int, 2>& resolution) {
  const int nx = resolution[0];
  const int ny = resolution[1];
  if (nx < 1 || ny < 1) throw InvalidInput("generate_rectangle: resolution must be >= 1");
  Mesh m;
  m.dim = 2;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      m.coords.push_back({origin[0] + extents[0] * i / nx,
                          origin[1] + extents[1] * j / ny, 0.0});
    }
  }
  auto id = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int n00 = id(i, j), n10 = id(i + 1, j);
      const int n01 = id(i, j + 1), n11 = id(i + 1, j + 1);
      if ((i + j) % 2 == 0) {
        m.elements.push_back({n00, n10, n11, -1});
        m.elements.push_back({n00, n11, n01, -1});
      } else {
        m.elements.push_back({n00, n10, n01, -1});
        m.elements.push_back({n10, n11, n01, -1});
      }
    }
  }
  assign_boundary_groups(m, box_face_classifier());
  return m;
}

Mesh generate_voxel_tet(const Point& origin, const Point& cell_size,
                        const std::array<int, 3>& counts,
                        const std::function<bool(int, int, int)>& include,
                        const FacetClassifier& classify) {
  const int nx = counts[0], ny = counts[1], nz = counts[2];
  if (nx < 1 || ny < 1 || nz < 1) {
    throw InvalidInput("generate_voxel_tet: resolution must be >= 1 per axis");
  }
  Mesh m;
  m.dim = 3;
  auto lattice = [&](int i, int j, int k) {
    return (k * (ny + 1) + j) * (nx + 1) + i;
  };
  std::vector<int> node_id(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)), -1);
  auto use_node = [&](int i, int j, int k) {
    int& id = node_id[lattice(i, j, k)];
    if (id < 0) {
      id = m.n_nodes();
      m.coords.push_back({origin[0] + i * cell_size[0],
                          origin[1] + j * cell_size[1],
                          origin[2] + k * cell_size[2]});
    }
    return id;
  };
  // Kuhn subdivision: one tet per axis permutation, walking from corner 0
  // to corner 7 of the cell.
  static const int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                  {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < nz; ++k) {
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        if (!include(i, j, k)) continue;
        for (const auto& p : perms) {
          std::array<int, 3> c{i, j, k};
          Connectivity tet{use_node(c[0], c[1], c[2]), 0, 0, 0};
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            tet[s + 1] = use_node(c[0], c[1], c[2]);
          }
          if (tet_det(m.coords[tet[0]], m.coords[tet[1]], m.coords[tet[2]],
                      m.coords[tet[3]]) < 0.0) {
            std::swap(tet[2], tet[3]);
          }
          m.elements.push_back(tet);
        }
      }
    }
  }
  if (m.elements.empty()) throw InvalidInput("generate_voxel_tet: no cells selected");
  assign_boundary_groups(m, classify);
  return m;
}

Mesh generate_box_tet(const Point& extents, const std::array<int, 3>& resolution,
                      const Point& origin) {
  for (int i = 0; i < 3; ++i) {
    if (resolution[i] < 1) {
      throw InvalidInput("generate_box_tet: resolution must be >= 1 per axis");
    }
  }
  const Point h{extents[0] / resolution[0], extents[1] / resolution[1],
                extents[2] / resolution[2]};
  return generate_voxel_tet(origin, h, resolution,
                            [](int, int, int) { return true; },
                            box_face_classifier());
}

Mesh generate_branching_box(double width, double length, double branch_length, int n_width) {
  if (n_width < 1) throw InvalidInput("generate_branching_box: n_width must be >= 1");
  if (!(width > 0.0) || !(length > 0.0) || !(branch_length > 0.0)) {
    throw InvalidInput("generate_branching_box: lengths must be > 0");
  }
  const double h = width / n_width;
  const int nx = std::max(n_width, static_cast<int>(std::lround(length / h)));
  const int nb = std::max(1, static_cast<int>(std::lround(branch_length / h)));
  const int i0 = (nx - n_width) / 2;  // branch footprint [i0, i0 + n_width)
  const double x_end = nx * h;
  const double y_end = (n_width + nb) * h;
  auto include = [=](int i, int j, int) {
    return j < n_width || (i >= i0 && i < i0 + n_width);
  };
  auto classify = [=](const Point& c, const Point& n) -> std::string {
    const double tol = 1e-9 * h;
    if (n[0] < -0.5 && std::abs(c[0]) < tol) return "inlet";
    if (n[0] > 0.5 && std::abs(c[0] - x_end) < tol) return "outlet_main";
    if (n[1] > 0.5 && std::abs(c[1] - y_end) < tol) return "outlet_branch";
    return "wall";
  };
  return generate_voxel_tet({0.0, 0.0, 0.0}, {h, h, h}, {nx, n_width + nb, n_width}, include,
                            classify);
}

Point facet_centroid(const Mesh& mesh, const Facet& facet) {
  Point c{0.0, 0.0, 0.0};
  const int nf = mesh.nodes_per_facet();
  for (int a = 0; a < nf; ++a) {
    for (int d = 0; d < 3; ++d) c[d] += mesh.coords[facet.nodes[a]][d] / nf;
  }
  return c;
}

FacetGeometry facet_normal_area(const Mesh& mesh, const Facet& facet) {
  const auto& conn = mesh.elements.at(facet.element);
  const int nv = mesh.nodes_per_element();
  const int nf = mesh.nodes_per_facet();
  // A vertex of the parent element not on the facet.
  int opposite = -1;
  for (int a = 0; a < nv; ++a) {
    if (std::find(facet.nodes.begin(), facet.nodes.begin() + nf, conn[a]) ==
        facet.nodes.begin() + nf) {
      opposite = conn[a];
    }
  }
  if (opposite < 0) throw InvalidInput("facet is not a face of its parent element");
  const Point& p0 = mesh.coords[facet.nodes[0]];
  const Point inward = sub(mesh.coords[opposite], p0);

  FacetGeometry out;
  Point n{0.0, 0.0, 0.0};
  if (mesh.dim == 1) {
    n = {inward[0] > 0.0 ? -1.0 : 1.0, 0.0, 0.0};
    out.measure = 1.0;
  } else if (mesh.dim == 2) {
    const Point t = sub(mesh.coords[facet.nodes[1]], p0);
    out.measure = norm(t);
    n = {t[1] / out.measure, -t[0] / out.measure, 0.0};
  } else {
    const Point c = cross(sub(mesh.coords[facet.nodes[1]], p0),
                          sub(mesh.coords[facet.nodes[2]], p0));
    const double len = norm(c);
    out.measure = 0.5 * len;
    n = {c[0] / len, c[1] / len, c[2] / len};
  }
  if (dot(n, inward) > 0.0) n = {-n[0], -n[1], -n[2]};
  out.normal = n;
  return out;
}

double element_measure(const Mesh& mesh, int element) {
  const auto& c = mesh.elements.at(element);
  const auto& x = mesh.coords;
  switch (mesh.dim) {
    case 1: return x[c[1]][0] - x[c[0]][0];
    case 2: return 0.5 * cross(sub(x[c[1]], x[c[0]]), sub(x[c[2]], x[c[0]]))[2];
    default: return tet_det(x[c[0]], x[c[1]], x[c[2]], x[c[3]]) / 6.0;
  }
}

double element_size(const Mesh& mesh, int element) {
  const auto& c = mesh.elements.at(element);
  const auto& x = mesh.coords;
  if (mesh.dim == 1) return std::abs(x[c[1]][0] - x[c[0]][0]);
  if (mesh.dim == 2) {
    const double a = norm(sub(x[c[1]], x[c[0]]));
    const double b = norm(sub(x[c[2]], x[c[1]]));
    const double d = norm(sub(x[c[0]], x[c[2]]));
    return a * b * d / (2.0 * std::abs(element_measure(mesh, element)));
  }
  // Circumcentre c solves 2 (x_i - x_0) . c' = |x_i - x_0|^2 with c' = c - x_0.
  Eigen::Matrix3d m;
  Eigen::Vector3d r;
  for (int i = 0; i < 3; ++i) {
    const Point e = sub(x[c[i + 1]], x[c[0]]);
    for (int d = 0; d < 3; ++d) m(i, d) = 2.0 * e[d];
    r[i] = dot(e, e);
  }
  return 2.0 * m.partialPivLu().solve(r).norm();
}

double max_element_size(const Mesh& mesh) {
  double h = 0.0;
  for (int e = 0; e < mesh.n_elements(); ++e) h = std::max(h, element_size(mesh, e));
  return h;
}

double min_element_size(const Mesh& mesh) {
  double h = std::numeric_limits<double>::infinity();
  for (int e = 0; e < mesh.n_elements(); ++e) h = std::min(h, element_size(mesh, e));
  return h;
}

std::vector<std::string> validate_mesh(const Mesh& mesh) {
  std::vector<std::string> problems;
  if (mesh.dim < 1 || mesh.dim > 3) {
    problems.push_back("dimension must be 1, 2 or 3");
    return problems;
  }
  const int nv = mesh.nodes_per_element();
  const int nf = mesh.nodes_per_facet();
  for (int e = 0; e < mesh.n_elements(); ++e) {
    bool ok = true;
    for (int a = 0; a < nv; ++a) {
      const int id = mesh.elements[e][a];
      if (id < 0 || id >= mesh.n_nodes()) {
        problems.push_back("element " + std::to_string(e) + " references node " +
                           std::to_string(id) + " out of range");
        ok = false;
      }
    }
    if (ok && !(element_measure(mesh, e) > 0.0)) {
      problems.push_back("element " + std::to_string(e) +
                         " has non-positive Jacobian determinant");
    }
  }
  if (!problems.empty()) return problems;

  std::map<FaceKey, int> boundary;
  for (const auto& f : boundary_facets(mesh)) boundary[face_key(f, nf)] = 0;
  for (const auto& [name, facets] : mesh.facet_groups) {
    for (const auto& f : facets) {
      if (f.element < 0 || f.element >= mesh.n_elements()) {
        problems.push_back("group '" + name + "' facet has invalid parent element");
        continue;
      }
      const auto& conn = mesh.elements[f.element];
      for (int a = 0; a < nf; ++a) {
        if (std::find(conn.begin(), conn.begin() + nv, f.nodes[a]) ==
            conn.begin() + nv) {
          problems.push_back("group '" + name + "' facet node " +
                             std::to_string(f.nodes[a]) +
                             " not in parent element " + std::to_string(f.element));
        }
      }
      auto it = boundary.find(face_key(f, nf));
      if (it == boundary.end()) {
        problems.push_back("group '" + name + "' contains an interior facet");
      } else {
        ++it->second;
      }
    }
  }
  int unassigned = 0, duplicated = 0;
  for (const auto& [key, n] : boundary) {
    if (n == 0) ++unassigned;
    if (n > 1) ++duplicated;
  }
  if (unassigned > 0) {
    problems.push_back(std::to_string(unassigned) +
                       " boundary facets belong to no group");
  }
  if (duplicated > 0) {
    problems.push_back(std::to_string(duplicated) +
                       " boundary facets belong to more than one group");
  }
  return problems;
}

std::vector<int> group_nodes(const Mesh& mesh,
                             const std::vector<std::string>& groups) {
  std::set<int> ids;
  for (const auto& g : groups) {
    for (const auto& f : mesh.group(g)) {
      for (int a = 0; a < mesh.nodes_per_facet(); ++a) ids.insert(f.nodes[a]);
    }
  }
  return {ids.begin(), ids.end()};
}

}  // namespace tsgls::mesh
