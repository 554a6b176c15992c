#include "flexsim/bipartite_graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace flexsim {

BipartiteGraph BipartiteGraph::from_edges(int n_queues, int n_servers,
                                          const std::vector<std::pair<int, int>>& edges) {
  if (n_queues < 0 || n_servers < 0) throw std::invalid_argument("negative node count");
  BipartiteGraph g;
  g.n_queues = n_queues;
  g.n_servers = n_servers;
  g.queue_adj.assign(n_queues, {});
  g.server_adj.assign(n_servers, {});
  for (const auto& [q, s] : edges) {
    if (q < 0 || q >= n_queues || s < 0 || s >= n_servers)
      throw std::invalid_argument("edge id out of range");
    g.queue_adj[q].push_back(s);
    g.server_adj[s].push_back(q);
  }
  for (auto& adj : g.queue_adj) {
    std::sort(adj.begin(), adj.end());
    if (std::adjacent_find(adj.begin(), adj.end()) != adj.end())
      throw std::invalid_argument("duplicate edge");
  }
  for (auto& adj : g.server_adj) std::sort(adj.begin(), adj.end());
  return g;
}

bool BipartiteGraph::has_edge(int queue, int server) const {
  const auto& adj = queue_adj[queue];
  return std::binary_search(adj.begin(), adj.end(), server);
}

std::size_t BipartiteGraph::edge_count() const {
  std::size_t m = 0;
  for (const auto& adj : queue_adj) m += adj.size();
  return m;
}

std::vector<std::pair<int, int>> BipartiteGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  out.reserve(edge_count());
  for (int q = 0; q < n_queues; ++q)
    for (int s : queue_adj[q]) out.emplace_back(q, s);
  return out;
}

double BipartiteGraph::avg_queue_degree() const {
  if (n_queues == 0) return 0.0;
  return static_cast<double>(edge_count()) / n_queues;
}

double BipartiteGraph::avg_server_degree() const {
  if (n_servers == 0) return 0.0;
  return static_cast<double>(edge_count()) / n_servers;
}

int BipartiteGraph::max_degree() const {
  std::size_t d = 0;
  for (const auto& adj : queue_adj) d = std::max(d, adj.size());
  for (const auto& adj : server_adj) d = std::max(d, adj.size());
  return static_cast<int>(d);
}

bool BipartiteGraph::operator==(const BipartiteGraph& other) const {
  return n_queues == other.n_queues && n_servers == other.n_servers &&
         queue_adj == other.queue_adj;
}

void ClusterPartition::validate() const {
  if (cluster_size < 1) throw std::invalid_argument("cluster size must be positive");
  const int k = cluster_count();
  if (static_cast<int>(servers_of.size()) != k)
    throw std::invalid_argument("queue/server cluster count mismatch");
  std::vector<char> seen_q(queue_cluster.size(), 0), seen_s(server_cluster.size(), 0);
  for (int c = 0; c < k; ++c) {
    if (static_cast<int>(queues_of[c].size()) != cluster_size ||
        static_cast<int>(servers_of[c].size()) != cluster_size)
      throw std::invalid_argument("cluster has wrong cardinality");
    for (int q : queues_of[c]) {
      if (q < 0 || q >= static_cast<int>(seen_q.size()) || seen_q[q] || queue_cluster[q] != c)
        throw std::invalid_argument("inconsistent queue assignment");
      seen_q[q] = 1;
    }
    for (int s : servers_of[c]) {
      if (s < 0 || s >= static_cast<int>(seen_s.size()) || seen_s[s] || server_cluster[s] != c)
        throw std::invalid_argument("inconsistent server assignment");
      seen_s[s] = 1;
    }
  }
  for (char c : seen_q)
    if (!c) throw std::invalid_argument("unassigned queue");
  for (char c : seen_s)
    if (!c) throw std::invalid_argument("unassigned server");
}

ClusterPartition contiguous_partition(int n, int d) {
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  return partition_from_queue_order(order, d);
}

ClusterPartition partition_from_queue_order(const std::vector<int>& queue_order, int d) {
  const int n = static_cast<int>(queue_order.size());
  if (d < 1 || n % d != 0)
    throw std::invalid_argument("cluster size must divide the number of queues");
  const int k = n / d;
  ClusterPartition p;
  p.cluster_size = d;
  p.queue_cluster.assign(n, -1);
  p.server_cluster.assign(n, -1);
  p.queues_of.assign(k, {});
  p.servers_of.assign(k, {});
  for (int c = 0; c < k; ++c) {
    for (int j = 0; j < d; ++j) {
      const int q = queue_order[c * d + j];
      if (q < 0 || q >= n || p.queue_cluster[q] != -1)
        throw std::invalid_argument("queue order is not a permutation");
      p.queue_cluster[q] = c;
      p.queues_of[c].push_back(q);
      const int s = c * d + j;
      p.server_cluster[s] = c;
      p.servers_of[c].push_back(s);
    }
    std::sort(p.queues_of[c].begin(), p.queues_of[c].end());
  }
  return p;
}

void write_graph(const BipartiteGraph& g, std::ostream& out) {
  out << "bipartite " << g.n_queues << ' ' << g.n_servers << '\n';
  for (int q = 0; q < g.n_queues; ++q)
    for (int s : g.queue_adj[q]) out << (q + 1) << ' ' << (s + 1) << '\n';
}

void write_graph_file(const BipartiteGraph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  write_graph(g, out);
  if (!out) throw std::runtime_error("write failed: " + path);
}

BipartiteGraph read_graph(std::istream& in) {
  std::string tag;
  int nq = 0, ns = 0;
  if (!(in >> tag >> nq >> ns) || tag != "bipartite")
    throw std::runtime_error("bad graph header (expected 'bipartite <n_queues> <n_servers>')");
  std::vector<std::pair<int, int>> edges;
  int a, b;
  while (in >> a >> b) edges.emplace_back(a - 1, b - 1);
  return BipartiteGraph::from_edges(nq, ns, edges);
}

BipartiteGraph read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open graph file: " + path);
  return read_graph(in);
}

}  // namespace flexsim
