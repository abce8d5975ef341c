#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "tsgls/types.hpp"

namespace tsgls::mesh {

/// Linear simplex of the mesh dimension: line2, tri3 or tet4.
enum class ElementType { line2, tri3, tet4 };

ElementType element_type(int dim);
const char* element_name(ElementType type);

/// Boundary facet: `dim` node ids (unused slots are -1) and the parent
/// element it bounds.
struct Facet {
  std::array<int, 3> nodes{-1, -1, -1};
  int element = -1;
};

/// Node ids of an element; only the first dim+1 slots are used.
using Connectivity = std::array<int, 4>;

struct Mesh {
  int dim = 1;
  std::vector<Point> coords;
  std::vector<Connectivity> elements;
  std::map<std::string, std::vector<Facet>> facet_groups;

  int n_nodes() const { return static_cast<int>(coords.size()); }
  int n_elements() const { return static_cast<int>(elements.size()); }
  int nodes_per_element() const { return dim + 1; }
  int nodes_per_facet() const { return dim; }
  ElementType type() const { return element_type(dim); }

  /// Group by name; throws InvalidInput naming the group when absent.
  const std::vector<Facet>& group(const std::string& name) const;
  bool has_group(const std::string& name) const {
    return facet_groups.count(name) > 0;
  }
};

/// Default C_I per element type: 9 for line2, 3 for tri3 and tet4.
double default_c_i(ElementType type);

/// Uniform line2 mesh of [0, length]; groups "left" and "right".
Mesh generate_interval(double length, int n_elems);

/// Structured tri3 mesh of [x0, x0+lx] x [y0, y0+ly], two triangles per
/// cell with alternating diagonals; groups "xmin", "xmax", "ymin", "ymax".
Mesh generate_rectangle(const std::array<double, 2>& origin,
                        const std::array<double, 2>& extents,
                        const std::array<int, 2>& resolution);

/// Maps a boundary facet (centroid, outward unit normal) to a group name.
using FacetClassifier =
    std::function<std::string(const Point& centroid, const Point& normal)>;

/// Tet4 mesh of the union of selected cells of a structured grid. Each hex
/// cell is split into 6 tets sharing the main diagonal, which keeps the
/// subdivision conforming between neighbours.
Mesh generate_voxel_tet(const Point& origin, const Point& cell_size,
                        const std::array<int, 3>& counts,
                        const std::function<bool(int, int, int)>& include,
                        const FacetClassifier& classify);

/// Full box [origin, origin+extents]; groups "xmin" .. "zmax".
Mesh generate_box_tet(const Point& extents, const std::array<int, 3>& resolution,
                      const Point& origin = {0.0, 0.0, 0.0});

/// T-shaped duct of square cross-section (side `width`, n_width cells per
/// side). The main duct runs along x over [0, length] with groups "inlet"
/// (x = 0) and "outlet_main" (x = length); a side branch of the given length
/// leaves along +y at mid-length and ends in "outlet_branch". All other
/// faces form "wall". Lengths are rounded to whole cells.
Mesh generate_branching_box(double width, double length, double branch_length, int n_width);

/// Rebuild facet groups from the boundary faces using a classifier.
void assign_boundary_groups(Mesh& mesh, const FacetClassifier& classify);

/// Face-based classifier for axis-aligned boxes: "xmin", "xmax", ...
FacetClassifier box_face_classifier();

struct FacetGeometry {
  Point normal{0.0, 0.0, 0.0};
  double measure = 0.0;
};

/// Unit normal pointing out of the parent element, and facet measure (1 for
/// a point facet in 1D).
FacetGeometry facet_normal_area(const Mesh& mesh, const Facet& facet);

Point facet_centroid(const Mesh& mesh, const Facet& facet);

/// Element measure (length, area or volume), signed by orientation.
double element_measure(const Mesh& mesh, int element);

/// Diameter of the circumscribed sphere.
double element_size(const Mesh& mesh, int element);

double max_element_size(const Mesh& mesh);
double min_element_size(const Mesh& mesh);

/// Invariant violations, empty when the mesh is valid.
std::vector<std::string> validate_mesh(const Mesh& mesh);

/// Sorted unique node ids appearing in the given groups.
std::vector<int> group_nodes(const Mesh& mesh,
                             const std::vector<std::string>& groups);

}  // namespace tsgls::mesh
