// Serial against OpenMP kernels on an 8^3 box mesh; the benchmark argument
// is the number of modes N.

#include <map>
#include <memory>
#include <random>

#include <benchmark/benchmark.h>
#include <spdlog/spdlog.h>

#include "tsgls/mesh/mesh.hpp"
#include "tsgls/ns/ns_solver.hpp"
#include "tsgls/scalar/scalar_solver.hpp"

namespace {

using namespace tsgls;
using spectral::SpectralCoeffs;

struct Fixture {
  mesh::Mesh mesh;
  ns::NSCase c;
  ns::NSState state;

  explicit Fixture(int n_modes)
      : mesh(mesh::generate_box_tet({1.0, 1.0, 1.0}, {8, 8, 8})), state(ns::NSState::zero(mesh, n_modes)) {
    c.n_modes = n_modes;
    c.omega = 6.0;
    c.backflow_beta = 1.0;
    SpectralCoeffs q(n_modes);
    q.set(0, 1.0);
    c.dirichlet["xmin"] = ns::uniform_velocity({q, SpectralCoeffs(n_modes), SpectralCoeffs(n_modes)});
    c.neumann["xmax"] = [n_modes](const Point&) { return SpectralCoeffs(n_modes); };
    c.walls = {"ymin", "ymax", "zmin", "zmax"};
    std::mt19937 rng(1);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int node = 0; node < mesh.n_nodes(); ++node) {
      for (int i = 0; i < 3; ++i) {
        SpectralCoeffs v(n_modes);
        v.set(0, u(rng));
        for (int n = 1; n < n_modes; ++n) v.set(n, {0.3 * u(rng), 0.3 * u(rng)});
        state.velocity[i][node] = v;
      }
    }
  }
};

Fixture& fixture(int n_modes) {
  static std::map<int, std::unique_ptr<Fixture>> cache;
  auto& f = cache[n_modes];
  if (!f) f = std::make_unique<Fixture>(n_modes);
  return *f;
}

void matvec(benchmark::State& st, Execution exec) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  const auto t = ns::assemble_ns_tangent(f.c, f.mesh, f.state, 1.0);
  RVector x = RVector::Random(t.size());
  RVector y;
  for (auto _ : st) {
    t.apply(x, y, exec);
    benchmark::DoNotOptimize(y.data());
  }
}

void matvec_reference(benchmark::State& st) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  const auto t = ns::assemble_ns_tangent(f.c, f.mesh, f.state, 1.0);
  RVector x = RVector::Random(t.size());
  RVector y;
  for (auto _ : st) {
    t.apply_reference(x, y);
    benchmark::DoNotOptimize(y.data());
  }
}

void residual(benchmark::State& st, Execution exec) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto r = ns::assemble_ns_residual(f.c, f.mesh, f.state, {exec, nullptr});
    benchmark::DoNotOptimize(r.data());
  }
}

void tangent(benchmark::State& st, Execution exec) {
  auto& f = fixture(static_cast<int>(st.range(0)));
  for (auto _ : st) {
    auto t = ns::assemble_ns_tangent(f.c, f.mesh, f.state, 1.0, 1.5, false, exec);
    benchmark::DoNotOptimize(&t);
  }
}

BENCHMARK_CAPTURE(matvec, serial, Execution::serial)->Arg(1)->Arg(4)->Arg(7);
BENCHMARK_CAPTURE(matvec, parallel, Execution::parallel)->Arg(1)->Arg(4)->Arg(7);
BENCHMARK(matvec_reference)->Arg(4);
BENCHMARK_CAPTURE(residual, serial, Execution::serial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(residual, parallel, Execution::parallel)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tangent, serial, Execution::serial)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(tangent, parallel, Execution::parallel)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::warn);
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
