#include "tsgls/linalg/real_map.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/SparseLU>

namespace tsgls::linalg {

RVector to_real(const CVector& x, const RealLayout& l) {
  if (x.size() != l.complex_size()) throw InvalidInput("to_real: vector length mismatch");
  const double scale = std::max(x.cwiseAbs().maxCoeff(), 1e-300);
  RVector out = RVector::Zero(l.size());
  for (int node = 0; node < l.n_nodes; ++node) {
    for (int c = 0; c < l.n_comp; ++c) {
      for (int n = 0; n < l.n_modes; ++n) {
        const cplx pos = x[l.complex_index(node, c, n)];
        const cplx neg = x[l.complex_index(node, c, -n)];
        if (std::abs(pos - std::conj(neg)) > 1e-10 * scale) {
          std::ostringstream msg;
          msg << "to_real: conjugate symmetry violated at node " << node
              << ", component " << c << ", mode " << n;
          throw InvalidInput(msg.str());
        }
        out[l.index(node, c, n, 0)] = pos.real();
        out[l.index(node, c, n, 1)] = n == 0 ? 0.0 : pos.imag();
      }
    }
  }
  return out;
}

CVector from_real(const RVector& x, const RealLayout& l) {
  if (x.size() != l.size()) throw InvalidInput("from_real: vector length mismatch");
  CVector out(l.complex_size());
  for (int node = 0; node < l.n_nodes; ++node) {
    for (int c = 0; c < l.n_comp; ++c) {
      out[l.complex_index(node, c, 0)] = x[l.index(node, c, 0, 0)];
      for (int n = 1; n < l.n_modes; ++n) {
        const cplx v{x[l.index(node, c, n, 0)], x[l.index(node, c, n, 1)]};
        out[l.complex_index(node, c, n)] = v;
        out[l.complex_index(node, c, -n)] = std::conj(v);
      }
    }
  }
  return out;
}

namespace {

/// Real map of one component pair sub-block starting at (r0, c0) of a
/// complex block, written at (rr, rc) of the output.
void map_sub_block(const CMatrix& b, int n_modes, Eigen::Index r0, Eigen::Index c0,
                   RMatrix& out, Eigen::Index rr, Eigen::Index rc) {
  const int z = n_modes - 1;  // storage offset of mode 0
  for (int m = 0; m < n_modes; ++m) {
    for (int n = 0; n < n_modes; ++n) {
      cplx p, q;
      if (n == 0) {
        p = b(r0 + z + m, c0 + z);
        q = 0.0;
      } else {
        const cplx bp = b(r0 + z + m, c0 + z + n);
        const cplx bm = b(r0 + z + m, c0 + z - n);
        p = bp + bm;
        q = cplx{0.0, 1.0} * (bp - bm);
      }
      out(rr + 2 * m, rc + 2 * n) = p.real();
      out(rr + 2 * m, rc + 2 * n + 1) = q.real();
      out(rr + 2 * m + 1, rc + 2 * n) = p.imag();
      out(rr + 2 * m + 1, rc + 2 * n + 1) = q.imag();
    }
  }
}

}  // namespace

RMatrix real_map_block(const CMatrix& b) {
  const auto m = b.rows();
  if (m != b.cols() || m % 2 == 0) throw InvalidInput("real_map_block: bad block shape");
  const int n_modes = static_cast<int>((m + 1) / 2);
  RMatrix out = RMatrix::Zero(2 * n_modes, 2 * n_modes);
  map_sub_block(b, n_modes, 0, 0, out, 0, 0);
  return out;
}

RMatrix real_map_diagonal(const CVector& g) {
  const auto n = g.size();
  RMatrix out = RMatrix::Zero(2 * n, 2 * n);
  out(0, 0) = g[0].real();
  out(1, 0) = g[0].imag();
  for (Eigen::Index k = 1; k < n; ++k) {
    out(2 * k, 2 * k) = g[k].real();
    out(2 * k, 2 * k + 1) = -g[k].imag();
    out(2 * k + 1, 2 * k) = g[k].imag();
    out(2 * k + 1, 2 * k + 1) = g[k].real();
  }
  return out;
}

void check_conjugate_structure(const CMatrix& b, int n_modes, int n_comp) {
  const int m = 2 * n_modes - 1;
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  for (int ci = 0; ci < n_comp; ++ci) {
    for (int cj = 0; cj < n_comp; ++cj) {
      for (int r = 0; r < m; ++r) {
        for (int c = 0; c < m; ++c) {
          const cplx v = b(ci * m + r, cj * m + c);
          const cplx w = b(ci * m + (m - 1 - r), cj * m + (m - 1 - c));
          if (std::abs(v - std::conj(w)) > 1e-10 * scale) {
            throw InvalidInput(
                "to_real: block violates conjugate symmetry B(-m,-n) = conj(B(m,n))");
          }
        }
      }
    }
  }
}

ComplexBlockSystem make_complex_system(NodeGraph graph, int n_comp, int n_modes) {
  ComplexBlockSystem s;
  s.graph = std::move(graph);
  s.n_comp = n_comp;
  s.n_modes = n_modes;
  const int bs = s.block_size();
  s.blocks.assign(s.graph.n_edges(), CMatrix::Zero(bs, bs));
  s.rhs = CVector::Zero(static_cast<Eigen::Index>(s.graph.n_nodes()) * bs);
  return s;
}

CVector ComplexBlockSystem::apply(const CVector& x) const {
  const int bs = block_size();
  CVector y = CVector::Zero(x.size());
  for (int row = 0; row < graph.n_nodes(); ++row) {
    for (int e = graph.row_ptr[row]; e < graph.row_ptr[row + 1]; ++e) {
      y.segment(row * bs, bs) += blocks[e] * x.segment(graph.cols[e] * bs, bs);
    }
  }
  return y;
}

CMatrix ComplexBlockSystem::dense() const {
  const int bs = block_size();
  const int n = graph.n_nodes() * bs;
  CMatrix a = CMatrix::Zero(n, n);
  for (int row = 0; row < graph.n_nodes(); ++row) {
    for (int e = graph.row_ptr[row]; e < graph.row_ptr[row + 1]; ++e) {
      a.block(row * bs, graph.cols[e] * bs, bs, bs) = blocks[e];
    }
  }
  return a;
}

RealBlockSystem::RealBlockSystem(NodeGraph graph, RealLayout layout)
    : graph_(std::move(graph)), layout_(layout) {
  const int nb = layout_.node_block();
  blocks_.assign(graph_.n_edges(), RMatrix::Zero(nb, nb));
  constrained_.assign(layout_.size(), 0);
  for (int node = 0; node < layout_.n_nodes; ++node) {
    for (int c = 0; c < layout_.n_comp; ++c) constrain(layout_.index(node, c, 0, 1));
  }
}

void RealBlockSystem::apply(const RVector& x, RVector& y, Execution exec) const {
  const int nb = layout_.node_block();
  const int n_nodes = layout_.n_nodes;
  RVector xf = x;
  for (int i = 0; i < xf.size(); ++i) {
    if (constrained_[i]) xf[i] = 0.0;
  }
  y.resize(x.size());
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (int row = 0; row < n_nodes; ++row) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(nb);
    for (int e = graph_.row_ptr[row]; e < graph_.row_ptr[row + 1]; ++e) {
      acc.noalias() += blocks_[e] * xf.segment(graph_.cols[e] * nb, nb);
    }
    for (int k = 0; k < nb; ++k) {
      const int i = row * nb + k;
      y[i] = constrained_[i] ? x[i] : acc[k];
    }
  }
}

RMatrix RealBlockSystem::node_block(int node) const {
  const int nb = layout_.node_block();
  RMatrix d = blocks_[graph_.find(node, node)];
  for (int k = 0; k < nb; ++k) {
    if (constrained_[node * nb + k]) {
      d.row(k).setZero();
      d.col(k).setZero();
      d(k, k) = 1.0;
    }
  }
  return d;
}

RMatrix RealBlockSystem::dense() const {
  const int nb = layout_.node_block();
  RMatrix a = RMatrix::Zero(size(), size());
  for (int row = 0; row < layout_.n_nodes; ++row) {
    for (int e = graph_.row_ptr[row]; e < graph_.row_ptr[row + 1]; ++e) {
      a.block(row * nb, graph_.cols[e] * nb, nb, nb) = blocks_[e];
    }
  }
  for (int i = 0; i < size(); ++i) {
    if (constrained_[i]) {
      a.row(i).setZero();
      a.col(i).setZero();
      a(i, i) = 1.0;
    }
  }
  return a;
}

RVector direct_solve(const RealBlockSystem& system, const RVector& rhs) {
  const int nb = system.layout().node_block();
  const auto& g = system.graph();
  std::vector<Eigen::Triplet<double>> triplets;
  for (int row = 0; row < g.n_nodes(); ++row) {
    for (int e = g.row_ptr[row]; e < g.row_ptr[row + 1]; ++e) {
      const auto& b = system.block(e);
      for (int i = 0; i < nb; ++i) {
        const int gi = row * nb + i;
        if (system.constrained(gi)) continue;
        for (int j = 0; j < nb; ++j) {
          const int gj = g.cols[e] * nb + j;
          if (system.constrained(gj) || b(i, j) == 0.0) continue;
          triplets.emplace_back(gi, gj, b(i, j));
        }
      }
    }
  }
  for (int i = 0; i < system.size(); ++i) {
    if (system.constrained(i)) triplets.emplace_back(i, i, 1.0);
  }
  Eigen::SparseMatrix<double> a(system.size(), system.size());
  a.setFromTriplets(triplets.begin(), triplets.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  if (lu.info() != Eigen::Success) throw NumericalError("direct_solve: factorization failed");
  RVector x = lu.solve(rhs);
  if (!x.allFinite()) throw NumericalError("direct_solve: non-finite solution");
  return x;
}

RealBlockSystem to_real(const ComplexBlockSystem& sys) {
  RealBlockSystem out(sys.graph, sys.layout());
  const int m = 2 * sys.n_modes - 1;
  const int n2 = 2 * sys.n_modes;
  for (int e = 0; e < sys.graph.n_edges(); ++e) {
    check_conjugate_structure(sys.blocks[e], sys.n_modes, sys.n_comp);
    for (int ci = 0; ci < sys.n_comp; ++ci) {
      for (int cj = 0; cj < sys.n_comp; ++cj) {
        map_sub_block(sys.blocks[e], sys.n_modes, ci * m, cj * m, out.block(e),
                      ci * n2, cj * n2);
      }
    }
  }
  return out;
}

}  // namespace tsgls::linalg
