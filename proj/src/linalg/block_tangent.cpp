#include "tsgls/linalg/block_tangent.hpp"

#include <Eigen/SparseLU>

namespace tsgls::linalg {

BlockTangent::BlockTangent(NodeGraph graph, int dim, int n_modes, bool full_coupling)
    : graph_(std::move(graph)),
      layout_{0, dim + 1, n_modes},
      dim_(dim),
      n_modes_(n_modes),
      full_(full_coupling),
      sq_(static_cast<std::size_t>(4 * n_modes * n_modes)) {
  if (dim < 1 || dim > 3) throw InvalidInput("BlockTangent: dim must be 1..3");
  if (n_modes < 1) throw InvalidInput("BlockTangent: n_modes must be >= 1");
  layout_.n_nodes = graph_.n_nodes();
  const auto ne = static_cast<std::size_t>(graph_.n_edges());
  k_.assign(ne * sq_, 0.0);
  l_.assign(ne * sq_, 0.0);
  if (full_) {
    gd_full_.assign(ne * 2 * dim_ * sq_, 0.0);
  } else {
    gd_.assign(ne * 2 * dim_ * n_modes_, cplx{});
  }
  constrained_.assign(layout_.size(), 0);
  for (int node = 0; node < layout_.n_nodes; ++node) {
    for (int c = 0; c < layout_.n_comp; ++c) constrain(layout_.index(node, c, 0, 1));
  }
}

void BlockTangent::set_zero() {
  std::fill(k_.begin(), k_.end(), 0.0);
  std::fill(l_.begin(), l_.end(), 0.0);
  std::fill(gd_.begin(), gd_.end(), cplx{});
  std::fill(gd_full_.begin(), gd_full_.end(), 0.0);
}

namespace {

/// y += diag-mapped(g) x for a mode-diagonal block in real layout.
inline void diag_apply(const cplx* g, const double* x, double* y, int n_modes) {
  y[0] += g[0].real() * x[0];
  y[1] += g[0].imag() * x[0];
  for (int k = 1; k < n_modes; ++k) {
    const double a = x[2 * k], b = x[2 * k + 1];
    y[2 * k] += g[k].real() * a - g[k].imag() * b;
    y[2 * k + 1] += g[k].imag() * a + g[k].real() * b;
  }
}

}  // namespace

void BlockTangent::apply(const RVector& x, RVector& y, Execution exec) const {
  const int nb = layout_.node_block();
  const int n2 = 2 * n_modes_;
  const int n_nodes = layout_.n_nodes;
  RVector xf = x;
  for (Eigen::Index i = 0; i < xf.size(); ++i) {
    if (constrained_[i]) xf[i] = 0.0;
  }
  y.resize(x.size());

#pragma omp parallel if (exec == Execution::parallel)
  {
    // Velocity components of a column node side by side so K multiplies
    // all of them in one pass.
    RMatrix xu(n2, dim_);
    RMatrix yu(n2, dim_);
    RVector yp(n2);
#pragma omp for schedule(static)
    for (int row = 0; row < n_nodes; ++row) {
      yu.setZero();
      yp.setZero();
      for (int e = graph_.row_ptr[row]; e < graph_.row_ptr[row + 1]; ++e) {
        const int col = graph_.cols[e];
        const double* xc = xf.data() + static_cast<std::size_t>(col) * nb;
        for (int i = 0; i < dim_; ++i) {
          xu.col(i) = Eigen::Map<const RVector>(xc + i * n2, n2);
        }
        const Eigen::Map<const RVector> xp(xc + dim_ * n2, n2);
        yu.noalias() += k(e) * xu;
        yp.noalias() += l(e) * xp;
        if (full_) {
          for (int i = 0; i < dim_; ++i) {
            yu.col(i).noalias() += g_full(e, i) * xp;
            yp.noalias() += d_full(e, i) * xu.col(i);
          }
        } else {
          for (int i = 0; i < dim_; ++i) {
            diag_apply(&gd_[diag_offset(e, 0, i)], xp.data(), yu.col(i).data(), n_modes_);
            diag_apply(&gd_[diag_offset(e, 1, i)], xu.col(i).data(), yp.data(), n_modes_);
          }
        }
      }
      const std::size_t base = static_cast<std::size_t>(row) * nb;
      for (int i = 0; i < dim_; ++i) {
        for (int k2 = 0; k2 < n2; ++k2) {
          const std::size_t idx = base + i * n2 + k2;
          y[idx] = constrained_[idx] ? x[idx] : yu(k2, i);
        }
      }
      for (int k2 = 0; k2 < n2; ++k2) {
        const std::size_t idx = base + dim_ * n2 + k2;
        y[idx] = constrained_[idx] ? x[idx] : yp[k2];
      }
    }
  }
}

RMatrix BlockTangent::component_block(int edge, int ci, int cj) const {
  const int n2 = 2 * n_modes_;
  const int p = dim_;
  if (ci < p && cj < p) {
    return ci == cj ? RMatrix(k(edge)) : RMatrix::Zero(n2, n2);
  }
  if (ci == p && cj == p) return l(edge);
  if (ci < p) {
    if (full_) return g_full(edge, ci);
    return real_map_diagonal(g(edge, ci));
  }
  if (full_) return d_full(edge, cj);
  return real_map_diagonal(d(edge, cj));
}

void BlockTangent::apply_reference(const RVector& x, RVector& y) const {
  const int nb = layout_.node_block();
  const int n2 = 2 * n_modes_;
  RVector xf = x;
  for (Eigen::Index i = 0; i < xf.size(); ++i) {
    if (constrained_[i]) xf[i] = 0.0;
  }
  y = RVector::Zero(x.size());
  for (int row = 0; row < layout_.n_nodes; ++row) {
    for (int e = graph_.row_ptr[row]; e < graph_.row_ptr[row + 1]; ++e) {
      const int col = graph_.cols[e];
      for (int ci = 0; ci < layout_.n_comp; ++ci) {
        for (int cj = 0; cj < layout_.n_comp; ++cj) {
          y.segment(row * nb + ci * n2, n2) +=
              component_block(e, ci, cj) * xf.segment(col * nb + cj * n2, n2);
        }
      }
    }
  }
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (constrained_[i]) y[i] = x[i];
  }
}

RMatrix BlockTangent::node_block(int node) const {
  const int nb = layout_.node_block();
  const int n2 = 2 * n_modes_;
  const int e = graph_.find(node, node);
  RMatrix blk(nb, nb);
  for (int ci = 0; ci < layout_.n_comp; ++ci) {
    for (int cj = 0; cj < layout_.n_comp; ++cj) {
      blk.block(ci * n2, cj * n2, n2, n2) = component_block(e, ci, cj);
    }
  }
  for (int k2 = 0; k2 < nb; ++k2) {
    if (constrained_[node * nb + k2]) {
      blk.row(k2).setZero();
      blk.col(k2).setZero();
      blk(k2, k2) = 1.0;
    }
  }
  return blk;
}

RMatrix BlockTangent::dense() const {
  const int nb = layout_.node_block();
  const int n2 = 2 * n_modes_;
  RMatrix a = RMatrix::Zero(size(), size());
  for (int row = 0; row < layout_.n_nodes; ++row) {
    for (int e = graph_.row_ptr[row]; e < graph_.row_ptr[row + 1]; ++e) {
      const int col = graph_.cols[e];
      for (int ci = 0; ci < layout_.n_comp; ++ci) {
        for (int cj = 0; cj < layout_.n_comp; ++cj) {
          a.block(row * nb + ci * n2, col * nb + cj * n2, n2, n2) =
              component_block(e, ci, cj);
        }
      }
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

SizeReport BlockTangent::size_report() const {
  SizeReport r;
  r.n_modes = n_modes_;
  r.dim = dim_;
  r.n_edges = graph_.n_edges();
  const long n = n_modes_;
  const long m = 2 * n - 1;
  const long gd = full_ ? 2L * dim_ * 4 * n * n : 2L * dim_ * 2 * n;
  r.stored_per_edge = 2 * 4 * n * n + gd;
  r.naive_per_edge = static_cast<long>(dim_ + 1) * (dim_ + 1) * m * m * 2;
  r.bound_per_edge = 4 * m * m + 24 * n;
  return r;
}

Eigen::SparseMatrix<double> BlockTangent::sparse() const {
  const int nb = layout_.node_block();
  const int n2 = 2 * n_modes_;
  std::vector<Eigen::Triplet<double>> trip;
  for (int row = 0; row < layout_.n_nodes; ++row) {
    for (int e = graph_.row_ptr[row]; e < graph_.row_ptr[row + 1]; ++e) {
      const int col = graph_.cols[e];
      for (int ci = 0; ci < layout_.n_comp; ++ci) {
        for (int cj = 0; cj < layout_.n_comp; ++cj) {
          if (ci < dim_ && cj < dim_ && ci != cj) continue;
          const RMatrix b = component_block(e, ci, cj);
          for (int i = 0; i < n2; ++i) {
            const int gi = row * nb + ci * n2 + i;
            if (constrained_[gi]) continue;
            for (int j = 0; j < n2; ++j) {
              const int gj = col * nb + cj * n2 + j;
              if (constrained_[gj] || b(i, j) == 0.0) continue;
              trip.emplace_back(gi, gj, b(i, j));
            }
          }
        }
      }
    }
  }
  for (int i = 0; i < size(); ++i) {
    if (constrained_[i]) trip.emplace_back(i, i, 1.0);
  }
  Eigen::SparseMatrix<double> a(size(), size());
  a.setFromTriplets(trip.begin(), trip.end());
  return a;
}

RVector direct_solve(const BlockTangent& tangent, const RVector& rhs) {
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(tangent.sparse());
  if (lu.info() != Eigen::Success) throw NumericalError("direct_solve: factorization failed");
  RVector x = lu.solve(rhs);
  if (!x.allFinite()) throw NumericalError("direct_solve: non-finite solution");
  return x;
}

}  // namespace tsgls::linalg
