#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <map>
#include <random>
#include <sstream>

#include "tsgls/mesh/io.hpp"
#include "tsgls/mesh/mesh.hpp"
#include "tsgls/mesh/quadrature.hpp"
#include "tsgls/mesh/shape.hpp"

using namespace tsgls;
using namespace tsgls::mesh;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

double integrate(const QuadratureRule& r, int a, int b, int c) {
  double s = 0.0;
  for (int q = 0; q < r.size(); ++q) {
    const auto& p = r.points[q];
    s += r.weights[q] * std::pow(p[0], a) * std::pow(p[1], b) * std::pow(p[2], c);
  }
  return s;
}

Mesh single_tet(const Point& x0, const Eigen::Matrix3d& b) {
  Mesh m;
  m.dim = 3;
  m.coords.push_back(x0);
  for (int k = 0; k < 3; ++k) {
    m.coords.push_back({x0[0] + b(0, k), x0[1] + b(1, k), x0[2] + b(2, k)});
  }
  m.elements.push_back({0, 1, 2, 3});
  return m;
}

}  // namespace

TEST_CASE("interval generator") {
  const auto m = generate_interval(1.0, 4);
  REQUIRE(m.n_nodes() == 5);
  CHECK(m.n_elements() == 4);
  for (int i = 0; i < 5; ++i) CHECK(m.coords[i][0] == doctest::Approx(0.25 * i));
  double total = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) total += element_measure(m, e);
  CHECK(std::abs(total - 1.0) < 1e-14);

  const auto m7 = generate_interval(2.3, 7);
  CHECK(m7.n_nodes() == 8);
  double total7 = 0.0;
  for (int e = 0; e < m7.n_elements(); ++e) total7 += element_measure(m7, e);
  CHECK(std::abs(total7 - 2.3) < 1e-14);
  CHECK(validate_mesh(m7).empty());

  const auto left = facet_normal_area(m, m.group("left").front());
  CHECK(left.normal[0] == -1.0);
  CHECK(left.measure == 1.0);
  CHECK(facet_normal_area(m, m.group("right").front()).normal[0] == 1.0);
  CHECK_THROWS_AS(generate_interval(1.0, 0), InvalidInput);
}

TEST_CASE("box tet generator") {
  const auto m = generate_box_tet({1.0, 1.0, 1.0}, {1, 1, 1});
  CHECK(m.n_elements() == 6);
  double vol = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) {
    const auto geo = element_geometry(m, e);
    CHECK(geo.det_j > 0.0);
    vol += geo.det_j / 6.0;
  }
  CHECK(std::abs(vol - 1.0) < 1e-13);
  for (const char* face : {"xmin", "xmax", "ymin", "ymax", "zmin", "zmax"}) {
    double area = 0.0;
    for (const auto& f : m.group(face)) area += facet_normal_area(m, f).measure;
    CHECK(std::abs(area - 1.0) < 1e-13);
  }
  for (const auto& f : m.group("xmax")) {
    const auto n = facet_normal_area(m, f).normal;
    CHECK(std::abs(n[0] - 1.0) < 1e-14);
    CHECK(std::abs(n[1]) < 1e-14);
  }
  CHECK(validate_mesh(m).empty());

  const auto fine = generate_box_tet({2.0, 1.0, 0.5}, {4, 3, 2}, {-1.0, 0.0, 0.0});
  CHECK(validate_mesh(fine).empty());
  double vol_fine = 0.0;
  Point flux{0.0, 0.0, 0.0};
  for (int e = 0; e < fine.n_elements(); ++e) vol_fine += element_measure(fine, e);
  for (const auto& [name, facets] : fine.facet_groups) {
    for (const auto& f : facets) {
      const auto g = facet_normal_area(fine, f);
      for (int d = 0; d < 3; ++d) flux[d] += g.normal[d] * g.measure;
    }
  }
  CHECK(std::abs(vol_fine - 1.0) < 1e-13);
  for (int d = 0; d < 3; ++d) CHECK(std::abs(flux[d]) < 1e-12);
}

TEST_CASE("branching box generator") {
  const auto m = generate_branching_box(1.0, 3.0, 1.5, 2);
  CHECK(validate_mesh(m).empty());
  double vol = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) vol += element_measure(m, e);
  CHECK(vol == doctest::Approx(1.0 * 3.0 + 1.5).epsilon(1e-13));
  std::map<std::string, double> area;
  Eigen::Vector3d flux = Eigen::Vector3d::Zero();
  for (const auto& [name, facets] : m.facet_groups) {
    for (const auto& f : facets) {
      const auto g = facet_normal_area(m, f);
      area[name] += g.measure;
      flux += g.measure * Eigen::Vector3d(g.normal[0], g.normal[1], g.normal[2]);
    }
  }
  CHECK(area.size() == 4);
  CHECK(area["inlet"] == doctest::Approx(1.0));
  CHECK(area["outlet_main"] == doctest::Approx(1.0));
  CHECK(area["outlet_branch"] == doctest::Approx(1.0));
  // Main duct sides minus the branch opening, plus the branch sides.
  CHECK(area["wall"] == doctest::Approx(4.0 * 3.0 - 1.0 + 4.0 * 1.5).epsilon(1e-12));
  CHECK(flux.norm() < 1e-12);
}

TEST_CASE("rectangle generator") {
  const auto m = generate_rectangle({0.0, -1.0}, {3.0, 2.0}, {6, 4});
  CHECK(m.n_elements() == 48);
  CHECK(validate_mesh(m).empty());
  double area = 0.0;
  for (int e = 0; e < m.n_elements(); ++e) area += element_measure(m, e);
  CHECK(std::abs(area - 6.0) < 1e-13);
  double len = 0.0;
  for (const auto& f : m.group("ymax")) {
    const auto g = facet_normal_area(m, f);
    CHECK(std::abs(g.normal[1] - 1.0) < 1e-14);
    len += g.measure;
  }
  CHECK(std::abs(len - 3.0) < 1e-13);
}

TEST_CASE("shape evaluation") {
  const auto line = generate_interval(0.8, 2);
  const auto geo = element_geometry(line, 0);
  CHECK(geo.metric(0, 0) == doctest::Approx(std::pow(2.0 / 0.4, 2)));

  Eigen::Matrix3d id = Eigen::Matrix3d::Identity();
  const auto tet = single_tet({0.0, 0.0, 0.0}, id);
  for (const auto& s : shape_eval(tet, 0, assembly_rule(ElementType::tet4))) {
    double sum = 0.0;
    for (int a = 0; a < 4; ++a) sum += s.values[a];
    CHECK(std::abs(sum - 1.0) < 1e-13);
    CHECK(s.grads.colwise().sum().norm() < 1e-13);
    CHECK(s.grads(1, 0) == doctest::Approx(1.0));
    CHECK(s.grads(0, 0) == doctest::Approx(-1.0));
  }

  std::mt19937 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::Matrix3d b;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) b(i, j) = u(rng);
    }
    b += 2.0 * Eigen::Matrix3d::Identity();
    if (b.determinant() < 0.0) b.col(0) *= -1.0;
    const auto m = single_tet({u(rng), u(rng), u(rng)}, b);
    const Eigen::Matrix3d want = (b * b.transpose()).inverse();
    const auto g = element_geometry(m, 0).metric;
    CHECK((g - want).norm() <= 1e-12 * want.norm());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g);
    CHECK(es.eigenvalues().minCoeff() > 0.0);
  }

  Mesh flat = single_tet({0, 0, 0}, Eigen::Matrix3d::Identity());
  flat.coords[3] = {1.0, 1.0, 0.0};
  CHECK_THROWS_WITH_AS(element_geometry(flat, 0), doctest::Contains("element 0"),
                       InvalidInput);
}

TEST_CASE("partition of unity over every quadrature point of generated meshes") {
  const auto box = generate_box_tet({1.0, 2.0, 1.0}, {2, 3, 2});
  const auto rect = generate_rectangle({0, 0}, {1, 1}, {3, 3});
  for (const Mesh* m : {&box, &rect}) {
    for (int e = 0; e < m->n_elements(); ++e) {
      for (const auto& s : shape_eval(*m, e, assembly_rule(m->type()))) {
        double sum = 0.0;
        for (int a = 0; a <= m->dim; ++a) sum += s.values[a];
        CHECK(std::abs(sum - 1.0) < 1e-13);
        CHECK(s.grads.colwise().sum().cwiseAbs().maxCoeff() < 1e-13);
      }
    }
  }
}

TEST_CASE("quadrature exactness") {
  const auto& tet = assembly_rule(ElementType::tet4);
  for (int a = 0; a <= 2; ++a) {
    for (int b = 0; a + b <= 2; ++b) {
      for (int c = 0; a + b + c <= 2; ++c) {
        const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
        CHECK(std::abs(integrate(tet, a, b, c) - exact) < 1e-15);
      }
    }
  }
  const auto& tet_err = error_rule(ElementType::tet4);
  for (int a = 0; a <= 3; ++a) {
    for (int b = 0; a + b <= 3; ++b) {
      for (int c = 0; a + b + c <= 3; ++c) {
        const double exact = factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 3);
        CHECK(std::abs(integrate(tet_err, a, b, c) - exact) < 1e-15);
      }
    }
  }
  for (const auto* tri : {&assembly_rule(ElementType::tri3), &error_rule(ElementType::tri3)}) {
    for (int a = 0; a <= tri->degree; ++a) {
      for (int b = 0; a + b <= tri->degree; ++b) {
        const double exact = factorial(a) * factorial(b) / factorial(a + b + 2);
        CHECK(std::abs(integrate(*tri, a, b, 0) - exact) < 1e-15);
      }
    }
  }
  for (const auto* line : {&assembly_rule(ElementType::line2), &error_rule(ElementType::line2)}) {
    for (int k = 0; k <= line->degree; ++k) {
      const double exact = k % 2 ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(integrate(*line, k, 0, 0) - exact) < 1e-14);
    }
  }
  for (auto type : {ElementType::line2, ElementType::tri3, ElementType::tet4}) {
    double sum = 0.0;
    for (double w : facet_rule(type).weights) sum += w;
    CHECK(sum == doctest::Approx(1.0));
  }
}

TEST_CASE("element size and metric scaling") {
  const auto tet = single_tet({0, 0, 0}, Eigen::Matrix3d::Identity());
  CHECK(element_size(tet, 0) == doctest::Approx(std::sqrt(3.0)));

  Mesh tri;
  tri.dim = 2;
  tri.coords = {{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2, 0}};
  tri.elements = {{0, 1, 2, -1}};
  CHECK(element_size(tri, 0) == doctest::Approx(2.0 / std::sqrt(3.0)));

  // h^4 G:G is refinement invariant on the structured generators.
  double first = 0.0;
  for (int n : {1, 2, 4, 8}) {
    const auto m = generate_box_tet({1, 1, 1}, {n, n, n});
    double lo = 1e300;
    for (int e = 0; e < m.n_elements(); ++e) {
      const double h = element_size(m, e);
      lo = std::min(lo, std::pow(h, 4) * element_geometry(m, e).metric.squaredNorm());
    }
    if (n == 1) first = lo;
    CHECK(lo > 0.5);
    CHECK(std::abs(lo - first) < 1e-9 * first);
  }
}

TEST_CASE("mesh text round trip") {
  const auto m = generate_box_tet({1.0, 0.7, 1.3}, {2, 1, 2});
  const auto text = format_mesh(m);
  const auto back = parse_mesh(text);
  CHECK(back.dim == m.dim);
  CHECK(back.coords == m.coords);
  CHECK(back.elements == m.elements);
  REQUIRE(back.facet_groups.size() == m.facet_groups.size());
  for (const auto& [name, facets] : m.facet_groups) {
    const auto& other = back.group(name);
    REQUIRE(other.size() == facets.size());
    for (std::size_t i = 0; i < facets.size(); ++i) {
      CHECK(other[i].nodes == facets[i].nodes);
      CHECK(other[i].element == facets[i].element);
    }
  }
  CHECK(format_mesh(back) == text);

  const auto path = std::filesystem::temp_directory_path() / "tsgls_mesh_roundtrip.txt";
  save_mesh(m, path.string());
  CHECK(format_mesh(load_mesh(path.string())) == text);
  std::filesystem::remove(path);
}

TEST_CASE("hand-written two-tet mesh") {
  const std::string text = R"(# two tets sharing face 1 2 3
dimension 3
nodes 5
0 0 0
1 0 0
0 1 0
0 0 1
1 1 1
elements 2
0 1 2 3
4 3 2 1
facet_groups 2
group outer 5
0 0 2 1
0 0 1 3
0 0 3 2
1 4 2 3
1 4 1 2
group cap 1
1 4 3 1
)";
  const auto m = parse_mesh(text);
  CHECK(m.n_nodes() == 5);
  REQUIRE(m.n_elements() == 2);
  CHECK(m.elements[1] == Connectivity{4, 3, 2, 1});
  CHECK(m.group("outer").size() == 5);
  CHECK(m.group("cap").front().nodes == std::array<int, 3>{4, 3, 1});
  CHECK(validate_mesh(m).empty());
}

TEST_CASE("mesh parse errors carry line numbers") {
  const std::string missing_groups = "dimension 1\nnodes 2\n0\n1\nelements 1\n0 1\n";
  try {
    parse_mesh(missing_groups);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 7);
    CHECK(std::string(e.what()).find("facet_groups") != std::string::npos);
  }
  const std::string bad_number = "dimension 1\nnodes 2\n0\nabc\n";
  try {
    parse_mesh(bad_number);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 4);
  }
  CHECK_THROWS_AS(parse_mesh("dimension 4\n"), ParseError);
}

TEST_CASE("validation reports broken meshes") {
  auto m = generate_interval(1.0, 3);
  m.facet_groups.erase("right");
  const auto problems = validate_mesh(m);
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].find("no group") != std::string::npos);

  auto inverted = generate_rectangle({0, 0}, {1, 1}, {1, 1});
  std::swap(inverted.elements[0][1], inverted.elements[0][2]);
  CHECK_FALSE(validate_mesh(inverted).empty());
}

TEST_CASE("VTK legacy output structure") {
  const auto m = generate_rectangle({0, 0}, {1, 1}, {2, 1});
  VtkField p{"pressure", 1, std::vector<double>(m.n_nodes(), 1.5)};
  VtkField u{"velocity", 3, std::vector<double>(3 * m.n_nodes(), 0.25)};
  const auto text = format_vtk(m, {p, u});
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "ASCII");
  std::getline(in, line);
  CHECK(line == "DATASET UNSTRUCTURED_GRID");
  CHECK(text.find("POINTS 6 double") != std::string::npos);
  CHECK(text.find("CELLS 4 16") != std::string::npos);
  CHECK(text.find("CELL_TYPES 4") != std::string::npos);
  CHECK(text.find("POINT_DATA 6") != std::string::npos);
  CHECK(text.find("SCALARS pressure double 1\nLOOKUP_TABLE default") != std::string::npos);
  CHECK(text.find("VECTORS velocity double") != std::string::npos);
  VtkField wrong{"bad", 1, {1.0}};
  CHECK_THROWS_AS(format_vtk(m, {wrong}), InvalidInput);
}
