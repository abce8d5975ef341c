#include "tsgls/linalg/preconditioner.hpp"

#include <spdlog/spdlog.h>

namespace tsgls::linalg {

BlockJacobi::BlockJacobi(int n_nodes, int node_block,
                         const std::function<RMatrix(int)>& block_of, Execution exec)
    : n_nodes_(n_nodes), nb_(node_block), exec_(exec), inverses_(n_nodes) {
  std::vector<char> singular(n_nodes, 0);
#pragma omp parallel for schedule(static) if (exec == Execution::parallel)
  for (int node = 0; node < n_nodes; ++node) {
    const RMatrix blk = block_of(node);
    Eigen::FullPivLU<RMatrix> lu(blk);
    if (lu.isInvertible()) {
      inverses_[node] = lu.inverse();
    } else {
      const double scale = blk.diagonal().cwiseAbs().maxCoeff();
      inverses_[node] = RMatrix::Identity(nb_, nb_) / (scale > 0.0 ? scale : 1.0);
      singular[node] = 1;
    }
  }
  for (int node = 0; node < n_nodes; ++node) {
    if (singular[node]) fallback_.push_back(node);
  }
  if (!fallback_.empty()) {
    spdlog::warn("block Jacobi: {} singular node block(s), first at node {}; using scaled identity",
                 fallback_.size(), fallback_.front());
  }
}

void BlockJacobi::apply(const RVector& x, RVector& y) const {
  y.resize(x.size());
#pragma omp parallel for schedule(static) if (exec_ == Execution::parallel)
  for (int node = 0; node < n_nodes_; ++node) {
    y.segment(static_cast<Eigen::Index>(node) * nb_, nb_).noalias() =
        inverses_[node] * x.segment(static_cast<Eigen::Index>(node) * nb_, nb_);
  }
}

BlockJacobi block_jacobi_preconditioner(const BlockTangent& tangent, Execution exec) {
  return BlockJacobi(tangent.layout().n_nodes, tangent.layout().node_block(),
                     [&](int node) { return tangent.node_block(node); }, exec);
}

BlockJacobi block_jacobi_preconditioner(const RealBlockSystem& system, Execution exec) {
  return BlockJacobi(system.layout().n_nodes, system.layout().node_block(),
                     [&](int node) { return system.node_block(node); }, exec);
}

}  // namespace tsgls::linalg
