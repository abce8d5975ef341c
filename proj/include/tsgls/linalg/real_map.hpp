#pragma once

#include <vector>

#include "tsgls/linalg/graph.hpp"
#include "tsgls/types.hpp"

namespace tsgls::linalg {

/// Real unknown ordering: node, component, mode 0..N-1, (real, imag).
struct RealLayout {
  int n_nodes = 0;
  int n_comp = 1;
  int n_modes = 1;

  int node_block() const { return 2 * n_comp * n_modes; }
  int size() const { return n_nodes * node_block(); }
  int index(int node, int comp, int mode, int part) const {
    return node * node_block() + comp * 2 * n_modes + 2 * mode + part;
  }
  /// Matching complex ordering: node, component, mode -N+1..N-1.
  int complex_size() const { return n_nodes * n_comp * (2 * n_modes - 1); }
  int complex_index(int node, int comp, int mode) const {
    return (node * n_comp + comp) * (2 * n_modes - 1) + mode + n_modes - 1;
  }
};

/// Independent real unknowns of a conjugate-symmetric complex vector.
/// Rejects a symmetry defect above 1e-10 relative to max |x|.
RVector to_real(const CVector& x, const RealLayout& layout);

/// Inverse of to_real: rebuilds all 2N-1 modes per node and component.
CVector from_real(const RVector& x, const RealLayout& layout);

/// Real 2N x 2N form of a (2N-1)^2 complex block acting on
/// conjugate-symmetric vectors. Rows: (Re y_m, Im y_m), m = 0..N-1; columns:
/// (a_n, b_n) with x_n = a_n + i b_n. The b_0 column is zero.
RMatrix real_map_block(const CMatrix& b);

/// Real form of a block diagonal in the mode index, given modes 0..N-1.
RMatrix real_map_diagonal(const CVector& g);

/// Rejects blocks violating B(-m,-n) = conj(B(m,n)) beyond 1e-10 relative.
void check_conjugate_structure(const CMatrix& b, int n_modes, int n_comp);

/// Node-block sparse complex system, each edge a dense
/// (n_comp (2N-1))^2 block in complex ordering.
struct ComplexBlockSystem {
  NodeGraph graph;
  int n_comp = 1;
  int n_modes = 1;
  std::vector<CMatrix> blocks;
  CVector rhs;

  RealLayout layout() const { return {graph.n_nodes(), n_comp, n_modes}; }
  int block_size() const { return n_comp * (2 * n_modes - 1); }
  CVector apply(const CVector& x) const;
  CMatrix dense() const;
};

ComplexBlockSystem make_complex_system(NodeGraph graph, int n_comp, int n_modes);

/// Real-mapped node-block system. Constrained dofs (Dirichlet values and the
/// imaginary part of every mode-0 slot) act as identity rows and columns.
class RealBlockSystem {
 public:
  RealBlockSystem() = default;
  RealBlockSystem(NodeGraph graph, RealLayout layout);

  const NodeGraph& graph() const { return graph_; }
  const RealLayout& layout() const { return layout_; }
  int size() const { return layout_.size(); }

  RMatrix& block(int edge) { return blocks_[edge]; }
  const RMatrix& block(int edge) const { return blocks_[edge]; }

  void constrain(int dof) { constrained_[dof] = 1; }
  bool constrained(int dof) const { return constrained_[dof] != 0; }
  const std::vector<char>& constraint_mask() const { return constrained_; }

  /// y = P A P x + (I - P) x with P the projector onto free dofs.
  void apply(const RVector& x, RVector& y, Execution exec = Execution::parallel) const;

  /// Constrained diagonal block of a node.
  RMatrix node_block(int node) const;

  RMatrix dense() const;

 private:
  NodeGraph graph_;
  RealLayout layout_;
  std::vector<RMatrix> blocks_;
  std::vector<char> constrained_;
};

/// Sparse-LU solve of a real block system (small problems and oracles).
RVector direct_solve(const RealBlockSystem& system, const RVector& rhs);

/// Real-mapped system with imaginary mode-0 slots pinned. The complex blocks
/// must have conjugate structure.
RealBlockSystem to_real(const ComplexBlockSystem& sys);

}  // namespace tsgls::linalg
