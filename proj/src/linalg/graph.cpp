#include "tsgls/linalg/graph.hpp"

#include <algorithm>

namespace tsgls::linalg {

int NodeGraph::find(int row, int col) const {
  const auto begin = cols.begin() + row_ptr[row];
  const auto end = cols.begin() + row_ptr[row + 1];
  const auto it = std::lower_bound(begin, end, col);
  return (it != end && *it == col) ? static_cast<int>(it - cols.begin()) : -1;
}

NodeGraph build_node_graph(const mesh::Mesh& mesh) {
  const int nv = mesh.nodes_per_element();
  std::vector<std::vector<int>> adj(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) adj[i].push_back(i);
  for (const auto& c : mesh.elements) {
    for (int a = 0; a < nv; ++a) {
      for (int b = 0; b < nv; ++b) adj[c[a]].push_back(c[b]);
    }
  }
  NodeGraph g;
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
    g.cols.insert(g.cols.end(), row.begin(), row.end());
    g.row_ptr.push_back(static_cast<int>(g.cols.size()));
  }
  return g;
}

NodeGraph dense_graph(int n_nodes) {
  NodeGraph g;
  for (int i = 0; i < n_nodes; ++i) {
    for (int j = 0; j < n_nodes; ++j) g.cols.push_back(j);
    g.row_ptr.push_back(static_cast<int>(g.cols.size()));
  }
  return g;
}

std::vector<std::vector<int>> element_edge_map(const mesh::Mesh& mesh,
                                               const NodeGraph& graph) {
  const int nv = mesh.nodes_per_element();
  std::vector<std::vector<int>> out(mesh.n_elements(), std::vector<int>(nv * nv));
  for (int e = 0; e < mesh.n_elements(); ++e) {
    const auto& c = mesh.elements[e];
    for (int a = 0; a < nv; ++a) {
      for (int b = 0; b < nv; ++b) out[e][a * nv + b] = graph.find(c[a], c[b]);
    }
  }
  return out;
}

}  // namespace tsgls::linalg
