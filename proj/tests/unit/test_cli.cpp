#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "tsgls/cli/cli.hpp"
#include "tsgls/mesh/io.hpp"

using namespace tsgls;
using namespace tsgls::cli;
namespace fs = std::filesystem;

namespace {

const fs::path source_dir{TSGLS_SOURCE_DIR};

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("tsgls_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

// Small pulsatile channel: parabolic inflow with a mean and a cosine mode.
json pulsatile_channel() {
  return json::parse(R"({
    "physics": {"omega": 6.283185307179586, "n_modes": 2},
    "mesh": {"generator": "rectangle", "extents": [1.0, 0.5], "resolution": [6, 4]},
    "boundary": {
      "xmin": {"kind": "dirichlet", "profile": "parabolic", "modes": [0.5, 0.2]},
      "xmax": {"kind": "neumann", "modes": [0.0]},
      "ymin": {"kind": "wall"},
      "ymax": {"kind": "wall"}
    },
    "solver": {"eps_nr": 1e-6},
    "outputs": {"formats": ["csv", "vtk"], "field_samples": 2, "trace_samples": 8}
  })");
}

std::string error_text(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("config round trip through the normalized form") {
  const auto first = to_json(parse_config(pulsatile_channel()));
  const auto second = to_json(parse_config_text(first.dump()));
  CHECK(first == second);

  for (const auto& entry : fs::directory_iterator(source_dir / "configs")) {
    const auto text = read_file(entry.path());
    const auto j = json::parse(text);
    if (j.contains("base")) continue;  // sweep studies
    CAPTURE(entry.path().string());
    const auto normalized = to_json(load_config(entry.path().string()));
    CHECK(to_json(parse_config(normalized)) == normalized);
  }
}

TEST_CASE("config errors are collected and named") {
  auto j = pulsatile_channel();
  j["physics"]["viscosity"] = 1.0;
  j["solver"]["method"] = "explicit";
  j["boundary"]["xmin"]["samples"] = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0};
  j["boundary"]["xmax"].erase("modes");
  const auto text = error_text(j);
  CHECK(text.find("unknown key 'viscosity'") != std::string::npos);
  CHECK(text.find("method must be") != std::string::npos);
  CHECK(text.find("boundary.xmin: give either 'modes' or 'samples'") != std::string::npos);
  CHECK(text.find("boundary.xmax: needs 'modes' or 'samples'") != std::string::npos);

  SUBCASE("unknown facet group") {
    auto k = pulsatile_channel();
    k["boundary"]["inlet"] = k["boundary"]["xmin"];
    const auto cfg = parse_config(k);
    const auto problems = check_against_mesh(cfg, build_mesh(cfg));
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "unknown facet group 'inlet'");
    RunOptions opts;
    opts.write_outputs = false;
    CHECK_THROWS_WITH_AS(run_case(cfg, opts), doctest::Contains("'inlet'"), ConfigError);
  }
  SUBCASE("flow group without a condition") {
    auto k = pulsatile_channel();
    k["boundary"].erase("ymax");
    const auto cfg = parse_config(k);
    const auto problems = check_against_mesh(cfg, build_mesh(cfg));
    REQUIRE(problems.size() == 1);
    CHECK(problems[0] == "facet group 'ymax' has no boundary condition");
  }
  SUBCASE("too few samples for the mode count") {
    auto k = pulsatile_channel();
    k["boundary"]["xmin"].erase("modes");
    k["boundary"]["xmin"]["samples"] = {1.0, 2.0, 3.0, 4.0, 5.0};
    CHECK(error_text(k).find("2 modes need at least 6 samples") != std::string::npos);
  }
}

TEST_CASE("periodic boundary data") {
  PeriodicData d;
  d.samples = {0.0, 1.0, 0.0, -1.0};
  CHECK(d.value(0.125, 0.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(d.value(0.875, 0.0, 1.0) == doctest::Approx(-0.5).epsilon(1e-15));
  CHECK(d.value(1.25, 0.0, 1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(d.truncation_error(1) == doctest::Approx(1.0));

  PeriodicData m;
  m.modes = {cplx(1.0, 0.0), cplx(0.5, 0.0), cplx(0.0, 0.25)};
  const auto c = m.coefficients(2);
  CHECK(c.n_modes() == 2);
  CHECK(c[1] == cplx(0.5, 0.0));
  // 1 + cos(w t) - 0.5 sin(2 w t) at w t = pi / 4.
  const double w = 2.0;
  const double t = std::numbers::pi / 8.0;
  CHECK(m.value(t, w, 1.0) == doctest::Approx(1.0 + std::cos(w * t) - 0.5 * std::sin(2 * w * t)));
}

TEST_CASE("cosine flow trace matches the series evaluation") {
  std::map<std::string, GroupTrace> groups;
  spectral::SpectralCoeffs q(3);
  q.set(0, 0.75);
  q.set(1, 0.5);  // 0.5 (e^{iwt} + e^{-iwt}) = cos(wt)
  spectral::SpectralCoeffs p(3);
  p.set(2, {0.0, -0.25});
  groups["outlet"] = GroupTrace{q, p};
  const double omega = 2.0 * std::numbers::pi / 0.8;
  const auto csv = format_flow_trace(groups, omega, 0.8, 16);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "t,Q_outlet,P_outlet");
  int rows = 0;
  while (std::getline(in, line)) {
    double t = 0.0, qv = 0.0, pv = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream row(line);
    row >> t >> c1 >> qv >> c2 >> pv;
    CHECK(std::abs(t - 0.8 * rows / 16) < 1e-15);
    CHECK(std::abs(qv - spectral::evaluate_in_time(q, omega, t)) < 1e-12);
    CHECK(std::abs(qv - (0.75 + std::cos(omega * t))) < 1e-12);
    CHECK(std::abs(pv - spectral::evaluate_in_time(p, omega, t)) < 1e-12);
    ++rows;
  }
  CHECK(rows == 16);
}

TEST_CASE("VTK output conforms to the legacy layout") {
  mesh::Mesh m;
  m.dim = 2;
  m.coords = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};
  m.elements = {{0, 1, 2, -1}, {0, 2, 3, -1}};
  mesh::VtkField p{"pressure", 1, {0.5, 1.5, -2.0, 0.25}};
  mesh::VtkField u{"velocity", 3, {1, 0, 0, 0, 1, 0, 0, 0, 1, -1, 0.5, 0}};
  CHECK(mesh::format_vtk(m, {p, u}, "fixture") ==
        read_file(source_dir / "tests" / "fixtures" / "two_triangles.vtk"));

  // Exported flow fields: walk the sections and count the tokens.
  const auto dir = scratch("vtk");
  fs::create_directories(dir);
  auto cfg = parse_config(pulsatile_channel());
  const auto mesh = build_mesh(cfg);
  auto state = ns::NSState::zero(mesh, 2);
  for (int node = 0; node < mesh.n_nodes(); ++node) state.velocity[0][node].set(1, {0.1 * node, 0});
  export_flow_fields(state, mesh, 1.0, 2.0 * std::numbers::pi, 3, dir.string());
  for (int k = 0; k < 3; ++k) {
    std::istringstream in(read_file(dir / ("flow_00" + std::to_string(k) + ".vtk")));
    std::string line;
    std::getline(in, line);
    CHECK(line == "# vtk DataFile Version 3.0");
    std::getline(in, line);
    CHECK(line.size() < 256);
    std::getline(in, line);
    CHECK(line == "ASCII");
    std::getline(in, line);
    CHECK(line == "DATASET UNSTRUCTURED_GRID");
    std::string word, type;
    int n = 0, cells = 0, size = 0;
    in >> word >> n >> type;
    CHECK(word == "POINTS");
    CHECK(n == mesh.n_nodes());
    double x = 0.0;
    for (int i = 0; i < 3 * n; ++i) REQUIRE(static_cast<bool>(in >> x));
    in >> word >> cells >> size;
    CHECK(word == "CELLS");
    CHECK(size == 4 * cells);
    for (int e = 0; e < cells; ++e) {
      int count = 0, id = 0;
      in >> count;
      CHECK(count == 3);
      for (int a = 0; a < count; ++a) {
        in >> id;
        CHECK((id >= 0 && id < n));
      }
    }
    in >> word >> size;
    CHECK(word == "CELL_TYPES");
    for (int e = 0; e < size; ++e) {
      int t = 0;
      in >> t;
      CHECK(t == 5);
    }
    in >> word >> size;
    CHECK(word == "POINT_DATA");
    CHECK(size == n);
    in >> word >> type >> type;
    CHECK(word == "VECTORS");
    for (int i = 0; i < 3 * n; ++i) REQUIRE(static_cast<bool>(in >> x));
    in >> word >> type >> type >> size;
    CHECK(word == "SCALARS");
    in >> word >> type;
    CHECK(word == "LOOKUP_TABLE");
    for (int i = 0; i < n; ++i) REQUIRE(static_cast<bool>(in >> x));
    CHECK_FALSE(static_cast<bool>(in >> word));
  }
  fs::remove_all(dir);
}

TEST_CASE("steady case writes identical field samples") {
  auto j = pulsatile_channel();
  j["physics"]["omega"] = 0.0;
  j["physics"]["n_modes"] = 1;
  j["boundary"]["xmin"]["modes"] = {0.5};
  const auto dir = scratch("steady");
  RunOptions opts;
  opts.output_dir = dir.string();
  const auto sum = run_case(parse_config(j), opts);
  CHECK(sum.converged);
  const auto a = read_file(dir / "flow_000.vtk");
  CHECK(!a.empty());
  CHECK(a == read_file(dir / "flow_001.vtk"));
  fs::remove_all(dir);
}

TEST_CASE("serial runs produce byte-identical CSV") {
  const auto cfg = parse_config(pulsatile_channel());
  const auto a = scratch("serial_a");
  const auto b = scratch("serial_b");
  RunOptions opts;
  opts.serial = true;
  opts.output_dir = a.string();
  const auto first = run_case(cfg, opts);
  opts.output_dir = b.string();
  run_case(cfg, opts);
  REQUIRE(first.converged);
  for (const char* name : {"trace.csv", "convergence.csv", "flow_000.vtk", "flow_001.vtk"}) {
    CAPTURE(name);
    const auto text = read_file(a / name);
    CHECK(!text.empty());
    CHECK(text == read_file(b / name));
  }
  const auto summary = json::parse(read_file(a / "summary.json"));
  CHECK(summary.at("converged").get<bool>());
  CHECK(summary.at("flow").contains("xmax"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("unwritable output directory fails before solving") {
  const auto base = scratch("unwritable");
  fs::create_directories(base);
  const auto blocker = base / "file";
  std::ofstream(blocker) << "x";
  RunOptions opts;
  opts.output_dir = (blocker / "out").string();
  auto j = pulsatile_channel();
  j["solver"]["max_steps"] = 100000;  // a solve would take far longer than the check
  CHECK_THROWS_WITH_AS(run_case(parse_config(j), opts), doctest::Contains("cannot be created"),
                       InvalidInput);
  CHECK_THROWS_AS(ensure_writable_directory(opts.output_dir.value()), InvalidInput);
  fs::remove_all(base);
}

TEST_CASE("sweeps") {
  auto study = json::parse(R"({"parameter": "/mesh/resolution", "metric": "l2"})");
  study["base"] = json::parse(read_file(source_dir / "configs" / "manufactured_diffusion.json"));
  RunOptions opts;
  opts.write_outputs = false;

  SUBCASE("single point rejected") {
    study["values"] = json::array({json::array({4, 4})});
    CHECK_THROWS_WITH_AS(run_sweep(study, opts), doctest::Contains("at least 2 values"),
                         ConfigError);
  }
  SUBCASE("unknown parameter rejected") {
    study["values"] = {1, 2};
    study["parameter"] = "/physics/nonexistent";
    CHECK_THROWS_AS(run_sweep(study, opts), ConfigError);
  }
  SUBCASE("refinement gives second order and failures do not stop the sweep") {
    study["values"] = json::array({json::array({4, 4}), json::array({0, 4}),
                                   json::array({8, 8}), json::array({16, 16})});
    const auto r = run_sweep(study, opts);
    REQUIRE(r.points.size() == 4);
    CHECK(r.points[0].ok);
    CHECK_FALSE(r.points[1].ok);
    CHECK(!r.points[1].failure.empty());
    CHECK(r.points[2].ok);
    CHECK(r.points[3].ok);
    CHECK_FALSE(r.report.has_value());  // a point failed
    const double e0 = r.points[2].summary.errors.at("l2");
    const double e1 = r.points[3].summary.errors.at("l2");
    CHECK(std::log2(e0 / e1) > 1.9);
  }
  SUBCASE("order table") {
    study["values"] = json::array({json::array({8, 8}), json::array({16, 16})});
    const auto dir = scratch("sweep");
    RunOptions with_files;
    with_files.output_dir = dir.string();
    const auto r = run_sweep(study, with_files);
    REQUIRE(r.report.has_value());
    REQUIRE(r.report->observed_order.size() == 1);
    CHECK(r.report->observed_order[0] > 1.9);
    const auto csv = read_file(dir / "sweep.csv");
    CHECK(csv.rfind("value,h,l2,ok\n\"[8,8]\",", 0) == 0);
    CHECK(fs::exists(dir / "point_01" / "summary.json"));
    fs::remove_all(dir);
  }
}

TEST_CASE("bundled steady channel matches Poiseuille flow") {
  auto cfg = load_config((source_dir / "configs" / "steady_channel.json").string());
  RunOptions opts;
  opts.write_outputs = false;
  const auto sum = run_case(cfg, opts);
  CHECK(sum.converged);
  CHECK(sum.errors.at("velocity") < 0.005);
  CHECK(sum.flow.at("xmax").flow[0].real() == doctest::Approx(1.0).epsilon(1e-9));
}
