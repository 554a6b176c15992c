#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace flexsim {

// Undirected bipartite graph between queues (left nodes) and servers (right
// nodes). Both adjacency directions are kept, sorted, with no duplicates.
struct BipartiteGraph {
  int n_queues = 0;
  int n_servers = 0;
  std::vector<std::vector<int>> queue_adj;   // queue -> sorted server ids
  std::vector<std::vector<int>> server_adj;  // server -> sorted queue ids

  // Builds from an edge list; throws std::invalid_argument on out-of-range
  // ids or duplicate edges.
  static BipartiteGraph from_edges(int n_queues, int n_servers,
                                   const std::vector<std::pair<int, int>>& edges);

  bool has_edge(int queue, int server) const;
  std::size_t edge_count() const;
  // Edges sorted by (queue, server); the canonical order used by the file
  // format and by flow certificates.
  std::vector<std::pair<int, int>> edges() const;

  double avg_queue_degree() const;
  double avg_server_degree() const;
  int max_degree() const;

  bool operator==(const BipartiteGraph& other) const;
};

// Equal-size clustering of queues and servers, cluster_size members each.
struct ClusterPartition {
  int cluster_size = 0;
  std::vector<int> queue_cluster;             // queue -> cluster index
  std::vector<int> server_cluster;            // server -> cluster index
  std::vector<std::vector<int>> queues_of;    // cluster -> sorted queue ids
  std::vector<std::vector<int>> servers_of;   // cluster -> sorted server ids

  int cluster_count() const { return static_cast<int>(queues_of.size()); }
  // Validates the invariants (every node assigned once, all clusters full).
  void validate() const;
};

// Contiguous partition: queues/servers k*d .. (k+1)*d-1 form cluster k.
ClusterPartition contiguous_partition(int n, int d);

// Partition with the given queue order chopped into chunks of d; server side
// stays contiguous.
ClusterPartition partition_from_queue_order(const std::vector<int>& queue_order, int d);

// Text format: header "bipartite <n_queues> <n_servers>", then one "i j" pair
// per edge, 1-indexed, ascending.
void write_graph(const BipartiteGraph& g, std::ostream& out);
void write_graph_file(const BipartiteGraph& g, const std::string& path);
BipartiteGraph read_graph(std::istream& in);
BipartiteGraph read_graph_file(const std::string& path);

}  // namespace flexsim
