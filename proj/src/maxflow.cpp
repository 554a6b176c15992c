#include "flexsim/maxflow.hpp"

#include <algorithm>
#include <deque>

namespace flexsim {

FlowNetwork::FlowNetwork(int node_count)
    : adj_(node_count), level_(node_count), iter_(node_count) {}

int FlowNetwork::add_edge(int from, int to, double capacity) {
  const int id = static_cast<int>(edges_.size());
  edges_.push_back({to, capacity});
  edges_.push_back({from, 0.0});
  adj_[from].push_back(id);
  adj_[to].push_back(id + 1);
  return id;
}

bool FlowNetwork::bfs(int source, int sink) {
  std::fill(level_.begin(), level_.end(), -1);
  std::deque<int> q{source};
  level_[source] = 0;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int id : adj_[v]) {
      const Edge& e = edges_[id];
      if (e.cap > kEps && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        q.push_back(e.to);
      }
    }
  }
  return level_[sink] >= 0;
}

double FlowNetwork::dfs(int v, int sink, double limit) {
  if (v == sink) return limit;
  for (std::size_t& i = iter_[v]; i < adj_[v].size(); ++i) {
    const int id = adj_[v][i];
    Edge& e = edges_[id];
    if (e.cap > kEps && level_[e.to] == level_[v] + 1) {
      const double pushed = dfs(e.to, sink, std::min(limit, e.cap));
      if (pushed > kEps) {
        e.cap -= pushed;
        edges_[id ^ 1].cap += pushed;
        return pushed;
      }
    }
  }
  level_[v] = -1;
  return 0.0;
}

double FlowNetwork::max_flow(int source, int sink) {
  double total = 0.0;
  while (bfs(source, sink)) {
    std::fill(iter_.begin(), iter_.end(), 0);
    for (;;) {
      const double pushed = dfs(source, sink, kInf);
      if (pushed <= kEps) break;
      total += pushed;
    }
  }
  return total;
}

double FlowNetwork::flow_on(int edge_id) const {
  // Flow equals the accumulated capacity of the reverse edge.
  return edges_[edge_id ^ 1].cap;
}

std::vector<char> FlowNetwork::min_cut_source_side(int source) const {
  std::vector<char> reach(adj_.size(), 0);
  std::deque<int> q{source};
  reach[source] = 1;
  while (!q.empty()) {
    const int v = q.front();
    q.pop_front();
    for (int id : adj_[v]) {
      const Edge& e = edges_[id];
      if (e.cap > kEps && !reach[e.to]) {
        reach[e.to] = 1;
        q.push_back(e.to);
      }
    }
  }
  return reach;
}

}  // namespace flexsim
