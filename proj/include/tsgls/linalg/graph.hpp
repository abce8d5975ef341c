#pragma once

#include <vector>

#include "tsgls/mesh/mesh.hpp"

namespace tsgls::linalg {

/// Node connectivity in CSR form; each row lists its sorted neighbours
/// including the node itself. Entries are "edges" addressed by position.
struct NodeGraph {
  std::vector<int> row_ptr{0};
  std::vector<int> cols;

  int n_nodes() const { return static_cast<int>(row_ptr.size()) - 1; }
  int n_edges() const { return static_cast<int>(cols.size()); }

  /// Edge index of (row, col); -1 when absent.
  int find(int row, int col) const;
};

NodeGraph build_node_graph(const mesh::Mesh& mesh);

/// Fully connected graph on n nodes (test fixtures).
NodeGraph dense_graph(int n_nodes);

/// Edge indices of every (a, b) local node pair of each element, row-major
/// in local ids: out[e][a * nv + b].
std::vector<std::vector<int>> element_edge_map(const mesh::Mesh& mesh,
                                               const NodeGraph& graph);

}  // namespace tsgls::linalg
