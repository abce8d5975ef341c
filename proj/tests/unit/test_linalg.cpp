#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "tsgls/linalg/block_tangent.hpp"
#include "tsgls/linalg/gmres.hpp"
#include "tsgls/linalg/graph.hpp"
#include "tsgls/linalg/preconditioner.hpp"
#include "tsgls/linalg/real_map.hpp"
#include "tsgls/mesh/mesh.hpp"
#include "unit/common.hpp"
#include "unit/linalg_fixtures.hpp"

using namespace tsgls;
using namespace tsgls::linalg;
using testing_support::random_cplx;
using testing_support::random_structured;
using testing_support::random_symmetric_vector;
using testing_support::random_tangent;

TEST_CASE("node graph") {
  const auto m = mesh::generate_interval(1.0, 3);
  const auto g = build_node_graph(m);
  CHECK(g.n_nodes() == 4);
  CHECK(g.n_edges() == 10);
  CHECK(g.find(1, 0) >= 0);
  CHECK(g.find(0, 2) == -1);
  const auto map = element_edge_map(m, g);
  CHECK(g.cols[map[1][1]] == 2);  // element 1, local (0, 1) -> nodes (1, 2)
}

TEST_CASE("real mapping of vectors") {
  std::mt19937 rng(1);
  for (int n = 1; n <= 4; ++n) {
    const RealLayout l{3, 2, n};
    const auto x = random_symmetric_vector(rng, l);
    const auto r = to_real(x, l);
    CHECK(r.size() == 3 * 2 * 2 * n);
    CHECK((from_real(r, l) - x).norm() == 0.0);
    CHECK((to_real(from_real(r, l), l) - r).norm() == 0.0);
    for (int node = 0; node < 3; ++node) CHECK(r[l.index(node, 1, 0, 1)] == 0.0);
  }
  const RealLayout l{1, 1, 2};
  CVector bad(3);
  bad << cplx{1, 0}, cplx{2, 0}, cplx{5, 0};
  CHECK_THROWS_AS(to_real(bad, l), InvalidInput);
}

TEST_CASE("N=1 real system splits real and imaginary parts") {
  ComplexBlockSystem sys = make_complex_system(dense_graph(2), 1, 1);
  sys.blocks[0](0, 0) = 2.0;
  sys.blocks[1](0, 0) = -1.0;
  sys.blocks[2](0, 0) = -1.0;
  sys.blocks[3](0, 0) = 2.0;
  const auto r = to_real(sys);
  const RMatrix d = r.dense();
  CHECK(d(0, 0) == 2.0);
  CHECK(d(0, 2) == -1.0);
  CHECK(d(1, 1) == 1.0);  // pinned imaginary slot
  CHECK(d(3, 3) == 1.0);
  CHECK(d.row(1).sum() == 1.0);
}

TEST_CASE("real-mapped solve equals complex dense solve") {
  std::mt19937 rng(2);
  for (int trial = 0; trial < 12; ++trial) {
    const int n_modes = 1 + trial % 4;
    const int n_comp = 1 + trial % 2;
    const int n_nodes = 2 + trial % 3;
    auto sys = make_complex_system(dense_graph(n_nodes), n_comp, n_modes);
    for (auto& b : sys.blocks) b = random_structured(rng, n_modes, n_comp);
    // Diagonal dominance keeps the random system well conditioned.
    for (int a = 0; a < n_nodes; ++a) {
      sys.blocks[sys.graph.find(a, a)].diagonal().array() += 4.0 * n_nodes * sys.block_size();
    }
    sys.rhs = random_symmetric_vector(rng, sys.layout());
    const CVector xc = sys.dense().partialPivLu().solve(sys.rhs);

    const auto real = to_real(sys);
    const RVector br = to_real(sys.rhs, sys.layout());
    const RVector xr = real.dense().partialPivLu().solve(br);
    CHECK((from_real(xr, sys.layout()) - xc).norm() <= 1e-10 * xc.norm());

    RVector y;
    real.apply(xr, y, Execution::serial);
    CHECK((y - br).norm() <= 1e-10 * br.norm());
  }
}

TEST_CASE("conjugate structure violations are rejected") {
  auto sys = make_complex_system(dense_graph(1), 1, 2);
  sys.blocks[0](0, 1) = cplx{1.0, 0.0};
  CHECK_THROWS_AS(to_real(sys), InvalidInput);
}

TEST_CASE("block matvec equals the complex dense product") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 24; ++trial) {
    const int n_modes = 1 + trial % 4;
    const int dim = 1 + trial % 3;
    const int n_nodes = 1 + trial % 4;
    const bool full = trial % 5 == 0;
    auto f = random_tangent(rng, n_nodes, dim, n_modes, full);
    const auto& l = f.tangent.layout();
    const CVector xc = random_symmetric_vector(rng, l);
    const CVector yc = f.dense * xc;
    const RVector want = to_real(yc, l);
    const RVector x = to_real(xc, l);
    RVector y_par, y_ser, y_ref;
    f.tangent.apply(x, y_par, Execution::parallel);
    f.tangent.apply(x, y_ser, Execution::serial);
    f.tangent.apply_reference(x, y_ref);
    CHECK((y_par - want).norm() <= 1e-12 * want.norm());
    CHECK((y_ser - y_par).norm() == 0.0);
    CHECK((y_ref - want).norm() <= 1e-12 * want.norm());
    CHECK((f.tangent.dense() * x - want).norm() <= 1e-12 * want.norm());
  }
}

TEST_CASE("block matvec edge cases") {
  BlockTangent t(dense_graph(2), 3, 2);
  RVector zero = RVector::Zero(t.size()), y;
  t.apply(zero, y);
  CHECK(y.norm() == 0.0);

  for (int a = 0; a < 2; ++a) t.k(t.graph().find(a, a)).setIdentity();
  RVector x = RVector::Random(t.size());
  t.apply(x, y);
  const auto& l = t.layout();
  for (int node = 0; node < 2; ++node) {
    for (int c = 0; c < 4; ++c) {
      for (int n = 0; n < 2; ++n) {
        for (int p = 0; p < 2; ++p) {
          const int i = l.index(node, c, n, p);
          const bool pinned = n == 0 && p == 1;
          const double want = pinned ? x[i] : (c < 3 ? x[i] : 0.0);
          CHECK(y[i] == want);
        }
      }
    }
  }
}

TEST_CASE("tangent storage stays within the structured bound") {
  for (int n = 1; n <= 10; ++n) {
    BlockTangent t(dense_graph(2), 3, n);
    const auto r = t.size_report();
    CHECK(r.stored_per_edge == 8L * n * n + 12L * n);
    CHECK(r.stored_per_edge <= r.bound_per_edge);
    CHECK(r.naive_per_edge == 32L * (2 * n - 1) * (2 * n - 1));
  }
}

TEST_CASE("gmres on small dense systems") {
  GmresConfig cfg;
  cfg.tol = 1e-10;
  RVector b = RVector::LinSpaced(5, 1.0, 5.0);
  auto identity = [](const RVector& x, RVector& y) { y = x; };
  const auto r1 = gmres(identity, b, cfg);
  CHECK(r1.converged);
  CHECK(r1.history.size() >= 2);
  CHECK((r1.x - b).norm() < 1e-12);

  std::mt19937 rng(6);
  std::normal_distribution<double> nd;
  RMatrix q(50, 50);
  for (int i = 0; i < 50; ++i) {
    for (int j = 0; j < 50; ++j) q(i, j) = nd(rng);
  }
  const RMatrix spd = q * q.transpose() + 50.0 * RMatrix::Identity(50, 50);
  RVector rhs(50);
  for (int i = 0; i < 50; ++i) rhs[i] = nd(rng);
  cfg.tol = 1e-8;
  const auto r2 = gmres([&](const RVector& x, RVector& y) { y = spd * x; }, rhs, cfg);
  CHECK(r2.converged);
  const RVector direct = spd.llt().solve(rhs);
  CHECK((r2.x - direct).norm() <= 1e-7 * direct.norm());
  CHECK((spd * r2.x - rhs).norm() <= 1e-8 * rhs.norm());

  RMatrix a3(3, 3);
  a3 << 4, 1, 0, 2, 5, 1, 0, 1, 3;
  RVector b3(3);
  b3 << 1, -2, 0.5;
  cfg.restart = 2;
  cfg.tol = 1e-12;
  const auto r3 = gmres([&](const RVector& x, RVector& y) { y = a3 * x; }, b3, cfg);
  CHECK(r3.converged);
  CHECK((r3.x - a3.partialPivLu().solve(b3)).norm() < 1e-10);
  // True residuals at restarts never increase.
  CHECK(r3.restart_residuals.size() > 2);
  for (std::size_t i = 1; i < r3.restart_residuals.size(); ++i) {
    CHECK(r3.restart_residuals[i] <= r3.restart_residuals[i - 1]);
  }
}

TEST_CASE("gmres reports failure modes") {
  GmresConfig cfg;
  cfg.tol = 1e-14;
  cfg.max_matvecs = 3;
  cfg.restart = 2;
  RMatrix a = RMatrix::Random(20, 20) + 0.1 * RMatrix::Identity(20, 20);
  RVector b = RVector::Ones(20);
  const auto r = gmres([&](const RVector& x, RVector& y) { y = a * x; }, b, cfg);
  CHECK_FALSE(r.converged);
  CHECK(r.matvecs <= 4);

  auto nan_op = [](const RVector& x, RVector& y) {
    y = x;
    y[0] = std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(gmres(nan_op, b, GmresConfig{}), NumericalError);
  CHECK_THROWS_AS(gmres(nan_op, b, GmresConfig{1, 0.1, 10}), InvalidInput);
}

TEST_CASE("block Jacobi preconditioner") {
  // Block-diagonal tangent: preconditioned GMRES converges in one step.
  BlockTangent t(dense_graph(3), 2, 2);
  std::mt19937 rng(8);
  for (int a = 0; a < 3; ++a) {
    const int e = t.graph().find(a, a);
    t.k(e) = real_map_block(random_structured(rng, 2, 1));
    t.k(e).diagonal().array() += 5.0;
    t.l(e) = real_map_block(random_structured(rng, 2, 1));
    t.l(e).diagonal().array() += 5.0;
  }
  const auto pc = block_jacobi_preconditioner(t);
  CHECK(pc.fallback_nodes().empty());
  RVector b = RVector::Random(t.size());
  GmresConfig cfg;
  cfg.tol = 1e-10;
  const auto res = gmres([&](const RVector& x, RVector& y) { t.apply(x, y); }, b, cfg,
                         [&](const RVector& x, RVector& y) { pc.apply(x, y); });
  CHECK(res.converged);
  CHECK(res.history.size() == 3);  // initial, one iteration, final check

  RVector x1 = RVector::Random(t.size()), x2 = RVector::Random(t.size());
  RVector p1, p2, p12;
  pc.apply(x1, p1);
  pc.apply(x2, p2);
  pc.apply(2.0 * x1 - 3.0 * x2, p12);
  CHECK((p12 - (2.0 * p1 - 3.0 * p2)).norm() <= 1e-13 * p12.norm());

  BlockTangent singular(dense_graph(1), 1, 1);
  const auto spc = block_jacobi_preconditioner(singular);
  CHECK(spc.fallback_nodes().size() == 1);
}
