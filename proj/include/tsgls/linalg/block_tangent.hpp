#pragma once

#include <vector>

#include <Eigen/SparseCore>

#include "tsgls/linalg/graph.hpp"
#include "tsgls/linalg/real_map.hpp"
#include "tsgls/types.hpp"

namespace tsgls::linalg {

/// Stored-size accounting for a tangent, in real scalars.
struct SizeReport {
  int n_modes = 1;
  int dim = 3;
  long n_edges = 0;
  long stored_per_edge = 0;
  /// (d+1)^2 complex (2N-1)^2 blocks per edge.
  long naive_per_edge = 0;
  /// 4 (2N-1)^2 + 24 N.
  long bound_per_edge = 0;
};

/// Navier-Stokes tangent
///
///   [ K        G_i ]
///   [ D_j      L   ]
///
/// on the node graph, unknowns ordered as RealLayout with d+1 components.
/// K and L are stored once per edge in real-mapped form; K serves every
/// velocity component. G_i and D_j are mode-diagonal and stored as N
/// complex values per direction. The structurally zero cross-velocity
/// blocks are never stored.
///
/// With `full_coupling` the gradient and divergence blocks are instead kept
/// as full real-mapped 2N x 2N blocks (used to check the simplified form
/// against finite differences).
class BlockTangent {
 public:
  BlockTangent() = default;
  BlockTangent(NodeGraph graph, int dim, int n_modes, bool full_coupling = false);

  const NodeGraph& graph() const { return graph_; }
  const RealLayout& layout() const { return layout_; }
  int dim() const { return dim_; }
  int n_modes() const { return n_modes_; }
  bool full_coupling() const { return full_; }
  int size() const { return layout_.size(); }

  using BlockMap = Eigen::Map<RMatrix>;
  using ConstBlockMap = Eigen::Map<const RMatrix>;
  using DiagMap = Eigen::Map<CVector>;
  using ConstDiagMap = Eigen::Map<const CVector>;

  BlockMap k(int edge) { return {&k_[edge * sq_], 2 * n_modes_, 2 * n_modes_}; }
  ConstBlockMap k(int edge) const { return {&k_[edge * sq_], 2 * n_modes_, 2 * n_modes_}; }
  BlockMap l(int edge) { return {&l_[edge * sq_], 2 * n_modes_, 2 * n_modes_}; }
  ConstBlockMap l(int edge) const { return {&l_[edge * sq_], 2 * n_modes_, 2 * n_modes_}; }

  /// Mode-diagonal entries for modes 0..N-1 (simplified layout only).
  DiagMap g(int edge, int dir) { return {&gd_[diag_offset(edge, 0, dir)], n_modes_}; }
  ConstDiagMap g(int edge, int dir) const { return {&gd_[diag_offset(edge, 0, dir)], n_modes_}; }
  DiagMap d(int edge, int dir) { return {&gd_[diag_offset(edge, 1, dir)], n_modes_}; }
  ConstDiagMap d(int edge, int dir) const { return {&gd_[diag_offset(edge, 1, dir)], n_modes_}; }

  /// Real-mapped gradient/divergence blocks (full layout only).
  BlockMap g_full(int edge, int dir) { return {&gd_full_[full_offset(edge, 0, dir)], 2 * n_modes_, 2 * n_modes_}; }
  ConstBlockMap g_full(int edge, int dir) const { return {&gd_full_[full_offset(edge, 0, dir)], 2 * n_modes_, 2 * n_modes_}; }
  BlockMap d_full(int edge, int dir) { return {&gd_full_[full_offset(edge, 1, dir)], 2 * n_modes_, 2 * n_modes_}; }
  ConstBlockMap d_full(int edge, int dir) const { return {&gd_full_[full_offset(edge, 1, dir)], 2 * n_modes_, 2 * n_modes_}; }

  void set_zero();

  /// Identity row/column for a real dof; imaginary mode-0 slots are
  /// constrained on construction.
  void constrain(int dof) { constrained_[dof] = 1; }
  bool constrained(int dof) const { return constrained_[dof] != 0; }
  const std::vector<char>& constraint_mask() const { return constrained_; }

  /// y = P H P x + (I - P) x. Rows are distributed over threads in parallel
  /// mode; each row is accumulated in a fixed order so both modes agree.
  void apply(const RVector& x, RVector& y, Execution exec = Execution::parallel) const;

  /// Same product through a plain row loop with the blocks expanded per
  /// component. Reference for tests and benchmarks.
  void apply_reference(const RVector& x, RVector& y) const;

  /// Constrained diagonal node block (all components and modes).
  RMatrix node_block(int node) const;

  /// Dense real matrix with constraints applied.
  RMatrix dense() const;

  /// Sparse real matrix with constraints applied.
  Eigen::SparseMatrix<double> sparse() const;

  SizeReport size_report() const;

 private:
  std::size_t diag_offset(int edge, int which, int dir) const {
    return (static_cast<std::size_t>(edge) * 2 * dim_ + which * dim_ + dir) * n_modes_;
  }
  std::size_t full_offset(int edge, int which, int dir) const {
    return (static_cast<std::size_t>(edge) * 2 * dim_ + which * dim_ + dir) * sq_;
  }
  /// Unconstrained 2N x 2N sub-block coupling component ci to cj.
  RMatrix component_block(int edge, int ci, int cj) const;

  NodeGraph graph_;
  RealLayout layout_;
  int dim_ = 3;
  int n_modes_ = 1;
  bool full_ = false;
  std::size_t sq_ = 4;
  std::vector<double> k_;
  std::vector<double> l_;
  std::vector<cplx> gd_;
  std::vector<double> gd_full_;
  std::vector<char> constrained_;
};

/// Sparse-LU solve (small problems and oracles).
RVector direct_solve(const BlockTangent& tangent, const RVector& rhs);

}  // namespace tsgls::linalg
