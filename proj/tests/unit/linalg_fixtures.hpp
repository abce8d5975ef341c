#pragma once

#include <random>

#include "tsgls/linalg/block_tangent.hpp"
#include "tsgls/linalg/graph.hpp"
#include "tsgls/linalg/real_map.hpp"
#include "unit/common.hpp"

namespace testing_support {

using tsgls::CMatrix;
using tsgls::CVector;
using tsgls::linalg::BlockTangent;
using tsgls::linalg::RealLayout;
using tsgls::linalg::dense_graph;
using tsgls::linalg::real_map_block;

/// Random block with B(-m,-n) = conj(B(m,n)) per component pair.
inline CMatrix random_structured(std::mt19937& rng, int n_modes, int n_comp) {
  const int m = 2 * n_modes - 1;
  const int s = m * n_comp;
  CMatrix b(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) b(i, j) = random_cplx(rng);
  }
  CMatrix out(s, s);
  for (int ci = 0; ci < n_comp; ++ci) {
    for (int cj = 0; cj < n_comp; ++cj) {
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
          out(ci * m + r, cj * m + c) =
              0.5 * (b(ci * m + r, cj * m + c) +
                     std::conj(b(ci * m + m - 1 - r, cj * m + m - 1 - c)));
        }
      }
    }
  }
  return out;
}

inline CVector random_symmetric_vector(std::mt19937& rng, const RealLayout& l) {
  CVector x(l.complex_size());
  for (int node = 0; node < l.n_nodes; ++node) {
    for (int c = 0; c < l.n_comp; ++c) {
      x[l.complex_index(node, c, 0)] = random_cplx(rng).real();
      for (int n = 1; n < l.n_modes; ++n) {
        const cplx v = random_cplx(rng);
        x[l.complex_index(node, c, n)] = v;
        x[l.complex_index(node, c, -n)] = std::conj(v);
      }
    }
  }
  return x;
}

struct ComplexTangentFixture {
  BlockTangent tangent;
  CMatrix dense;  // complex, node/component/mode ordering
};

/// Random NS tangent on a fully connected graph together with its complex
/// dense expansion built independently of the real mapping.
inline ComplexTangentFixture random_tangent(std::mt19937& rng, int n_nodes, int dim, int n_modes,
                                           bool full) {
  const int m = 2 * n_modes - 1;
  const int nc = dim + 1;
  ComplexTangentFixture f{BlockTangent(dense_graph(n_nodes), dim, n_modes, full),
                          CMatrix::Zero(n_nodes * nc * m, n_nodes * nc * m)};
  const auto& g = f.tangent.graph();
  auto place = [&](int a, int b, int ci, int cj, const CMatrix& blk) {
    f.dense.block((a * nc + ci) * m, (b * nc + cj) * m, m, m) = blk;
  };
  for (int a = 0; a < n_nodes; ++a) {
    for (int e = g.row_ptr[a]; e < g.row_ptr[a + 1]; ++e) {
      const int b = g.cols[e];
      const CMatrix k = random_structured(rng, n_modes, 1);
      const CMatrix l = random_structured(rng, n_modes, 1);
      f.tangent.k(e) = real_map_block(k);
      f.tangent.l(e) = real_map_block(l);
      for (int i = 0; i < dim; ++i) place(a, b, i, i, k);
      place(a, b, dim, dim, l);
      for (int i = 0; i < dim; ++i) {
        CMatrix gi, di;
        if (full) {
          gi = random_structured(rng, n_modes, 1);
          di = random_structured(rng, n_modes, 1);
          f.tangent.g_full(e, i) = real_map_block(gi);
          f.tangent.d_full(e, i) = real_map_block(di);
        } else {
          CVector gv(n_modes), dv(n_modes);
          gv[0] = random_cplx(rng).real();
          dv[0] = random_cplx(rng).real();
          for (int n = 1; n < n_modes; ++n) {
            gv[n] = random_cplx(rng);
            dv[n] = random_cplx(rng);
          }
          f.tangent.g(e, i) = gv;
          f.tangent.d(e, i) = dv;
          gi = CMatrix::Zero(m, m);
          di = CMatrix::Zero(m, m);
          for (int n = -n_modes + 1; n < n_modes; ++n) {
            gi(n + n_modes - 1, n + n_modes - 1) = n >= 0 ? gv[n] : std::conj(gv[-n]);
            di(n + n_modes - 1, n + n_modes - 1) = n >= 0 ? dv[n] : std::conj(dv[-n]);
          }
        }
        place(a, b, i, dim, gi);
        place(a, b, dim, i, di);
      }
    }
  }
  return f;
}


}  // namespace testing_support
