#pragma once

#include <vector>

namespace flexsim {

// Dinic's algorithm with real capacities. Residuals below kEps are treated
// as saturated, which bounds the augmentation count on these shallow
// bipartite networks.
class FlowNetwork {
 public:
  static constexpr double kEps = 1e-12;
  static constexpr double kInf = 1e18;

  explicit FlowNetwork(int node_count);

  // Adds a directed edge and its zero-capacity reverse; returns an id usable
  // with flow_on().
  int add_edge(int from, int to, double capacity);

  double max_flow(int source, int sink);

  double flow_on(int edge_id) const;

  // Valid after max_flow: nodes reachable from the source in the residual
  // graph (the source side of a minimum cut).
  std::vector<char> min_cut_source_side(int source) const;

 private:
  struct Edge {
    int to;
    double cap;  // remaining capacity
  };

  bool bfs(int source, int sink);
  double dfs(int v, int sink, double limit);

  std::vector<Edge> edges_;
  std::vector<std::vector<int>> adj_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace flexsim
