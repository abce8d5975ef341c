#pragma once

#include <functional>
#include <vector>

#include "tsgls/linalg/block_tangent.hpp"
#include "tsgls/linalg/real_map.hpp"

namespace tsgls::linalg {

/// Inverse of the per-node diagonal blocks (all components and modes).
/// A singular block is replaced by a scaled identity and a warning logged.
class BlockJacobi {
 public:
  BlockJacobi(int n_nodes, int node_block, const std::function<RMatrix(int)>& block_of,
              Execution exec = Execution::parallel);

  void apply(const RVector& x, RVector& y) const;

  /// Nodes whose block was singular.
  const std::vector<int>& fallback_nodes() const { return fallback_; }

 private:
  int n_nodes_;
  int nb_;
  Execution exec_;
  std::vector<RMatrix> inverses_;
  std::vector<int> fallback_;
};

BlockJacobi block_jacobi_preconditioner(const BlockTangent& tangent,
                                        Execution exec = Execution::parallel);
BlockJacobi block_jacobi_preconditioner(const RealBlockSystem& system,
                                        Execution exec = Execution::parallel);

}  // namespace tsgls::linalg
