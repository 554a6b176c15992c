#include "flexsim/topology.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "flexsim/rng.hpp"

namespace flexsim {

namespace {

constexpr std::uint64_t kStreamPartition = 0x706172746974696full;  // "partitio"
constexpr std::uint64_t kStreamMatching = 0x6d61746368696e67ull;   // "matching"
constexpr std::uint64_t kStreamEdges = 0x65646765730000ull;

void fisher_yates(std::vector<int>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(v[i - 1], v[j]);
  }
}

}  // namespace

BipartiteGraph build_complete(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * n);
  for (int q = 0; q < n; ++q)
    for (int s = 0; s < n; ++s) edges.emplace_back(q, s);
  return BipartiteGraph::from_edges(n, n, edges);
}

BipartiteGraph build_inflexible(int n) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(n);
  for (int i = 0; i < n; ++i) edges.emplace_back(i, i);
  return BipartiteGraph::from_edges(n, n, edges);
}

BipartiteGraph build_modular(int n, int d, const ClusterPartition& partition) {
  if (n < 1 || d < 1 || n % d != 0)
    throw std::invalid_argument("modular architecture requires d dividing n");
  partition.validate();
  if (partition.cluster_size != d ||
      static_cast<int>(partition.queue_cluster.size()) != n)
    throw std::invalid_argument("partition does not match n, d");
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * d);
  for (int c = 0; c < partition.cluster_count(); ++c)
    for (int q : partition.queues_of[c])
      for (int s : partition.servers_of[c]) edges.emplace_back(q, s);
  return BipartiteGraph::from_edges(n, n, edges);
}

std::pair<BipartiteGraph, ClusterPartition> build_random_modular(int n, int d,
                                                                 std::uint64_t seed) {
  if (n < 1 || d < 1 || n % d != 0)
    throw std::invalid_argument("modular architecture requires d dividing n");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng = Rng::stream(seed, kStreamPartition, 0);
  fisher_yates(order, rng);
  ClusterPartition part = partition_from_queue_order(order, d);
  return {build_modular(n, d, part), std::move(part)};
}

BipartiteGraph build_random_regular_bipartite(int n, int d, std::uint64_t seed) {
  if (n < 1 || d < 1 || d > n)
    throw std::invalid_argument("regular bipartite graph requires 1 <= d <= n");
  Rng rng = Rng::stream(seed, kStreamMatching, 0);
  std::vector<std::vector<char>> present(n, std::vector<char>(n, 0));
  std::vector<int> match(n);
  std::iota(match.begin(), match.end(), 0);
  // Union of d random perfect matchings. Each matching starts from a uniform
  // shuffle; positions that would duplicate an existing edge are repaired by
  // random swaps (whole-matching rejection has acceptance ~ e^-m for the m-th
  // matching and cannot reach the degrees the experiments need).
  const long attempt_budget = 1000L * (d + 1) * n;
  long failed = 0;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(static_cast<std::size_t>(n) * d);
  for (int m = 0; m < d; ++m) {
    fisher_yates(match, rng);
    for (;;) {
      int conflicted = -1;
      for (int i = 0; i < n; ++i) {
        if (present[i][match[i]]) {
          conflicted = i;
          break;
        }
      }
      if (conflicted < 0) break;
      const int i = conflicted;
      // Prefer swaps leaving both rows conflict-free; fall back to any swap
      // that fixes row i, letting the conflict wander until it resolves.
      bool swapped = false;
      for (int tries = 0; tries < 2 * n && !swapped; ++tries) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (j != i && !present[i][match[j]] && !present[j][match[i]]) {
          std::swap(match[i], match[j]);
          swapped = true;
        }
      }
      while (!swapped) {
        const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
        if (j != i && !present[i][match[j]]) {
          std::swap(match[i], match[j]);
          swapped = true;
        } else if (++failed >= attempt_budget) {
          throw std::runtime_error("random regular graph: matching repair budget exhausted");
        }
      }
      if (++failed >= attempt_budget)
        throw std::runtime_error("random regular graph: matching repair budget exhausted");
    }
    for (int i = 0; i < n; ++i) {
      present[i][match[i]] = 1;
      edges.emplace_back(i, match[i]);
    }
  }
  return BipartiteGraph::from_edges(n, n, edges);
}

BipartiteGraph build_erdos_renyi_bipartite(int n, double avg_degree, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(avg_degree > 0.0) || avg_degree > n)
    throw std::invalid_argument("average degree must be in (0, n]");
  const double p = avg_degree / n;
  Rng rng = Rng::stream(seed, kStreamEdges, 0);
  std::vector<std::pair<int, int>> edges;
  for (int q = 0; q < n; ++q)
    for (int s = 0; s < n; ++s)
      if (rng.uniform() < p) edges.emplace_back(q, s);
  return BipartiteGraph::from_edges(n, n, edges);
}

BipartiteGraph build_expanded_modular(const BipartiteGraph& cluster_graph, int d_m) {
  if (d_m < 1) throw std::invalid_argument("cluster size must be >= 1");
  const int nq = cluster_graph.n_queues * d_m;
  const int ns = cluster_graph.n_servers * d_m;
  std::vector<std::pair<int, int>> edges;
  edges.reserve(cluster_graph.edge_count() * static_cast<std::size_t>(d_m) * d_m);
  for (int qc = 0; qc < cluster_graph.n_queues; ++qc)
    for (int sc : cluster_graph.queue_adj[qc])
      for (int a = 0; a < d_m; ++a)
        for (int b = 0; b < d_m; ++b)
          edges.emplace_back(qc * d_m + a, sc * d_m + b);
  return BipartiteGraph::from_edges(nq, ns, edges);
}

bool verify_expander(const BipartiteGraph& g, double alpha, double beta,
                     int max_subset_size) {
  if (!(alpha > 0.0) || alpha > 1.0) throw std::invalid_argument("alpha must be in (0, 1]");
  if (!(beta > 0.0)) throw std::invalid_argument("beta must be positive");
  const int nq = g.n_queues;
  if (max_subset_size <= 0 && nq > 24)
    throw std::invalid_argument(
        "graph too large for exact expander verification (n_queues > 24); "
        "pass a subset-size cap to override");
  if (g.n_servers > 64)
    throw std::invalid_argument("expander verification supports at most 64 servers");

  int smax = static_cast<int>(std::floor(alpha * nq + 1e-9));
  smax = std::min(smax, nq);
  if (max_subset_size > 0) smax = std::min(smax, max_subset_size);
  if (smax < 1) return true;

  std::vector<std::uint64_t> qmask(nq, 0);
  for (int q = 0; q < nq; ++q)
    for (int s : g.queue_adj[q]) qmask[q] |= 1ull << s;

  // Depth-first enumeration of all subsets of size <= smax with an
  // incrementally maintained neighborhood mask.
  struct Enumerator {
    const std::vector<std::uint64_t>& qmask;
    double beta;
    int nq, smax;
    bool ok = true;
    void visit(int next, int size, std::uint64_t nbr) {
      for (int q = next; q < nq && ok; ++q) {
        const std::uint64_t m = nbr | qmask[q];
        const int sz = size + 1;
        if (static_cast<double>(std::popcount(m)) < beta * sz - 1e-9) {
          ok = false;
          return;
        }
        if (sz < smax) visit(q + 1, sz, m);
      }
    }
  } e{qmask, beta, nq, smax};
  e.visit(0, 0, 0);
  return e.ok;
}

double expander_degree_bound(double alpha, double beta) {
  if (!(beta >= 1.0)) throw std::invalid_argument("beta must be >= 1");
  if (!(alpha > 0.0) || !(alpha * beta < 1.0))
    throw std::invalid_argument("alpha * beta must be in (0, 1)");
  const double log2e = 1.4426950408889634074;
  const double numer = 1.0 + std::log2(beta) + (beta + 1.0) * log2e;
  const double denom = -std::log2(alpha * beta);
  return numer / denom + beta + 1.0;
}

ExpanderParams theorem1_params(int n, int d, double rho) {
  if (n < 1 || d < 1) throw std::invalid_argument("n and d must be >= 1");
  if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
  ExpanderParams p;
  p.rho_hat = 1.0 / (1.0 + (1.0 - rho) / 8.0);
  const double l = std::log(1.0 / p.rho_hat);
  p.beta_n = 0.5 * (l / (l + 1.0)) * d;
  p.gamma = std::sqrt(p.rho_hat);
  p.alpha = p.gamma / p.beta_n;
  p.beta = p.beta_n;
  p.u_max = 0.5 * (1.0 - rho) * p.beta_n;
  return p;
}

}  // namespace flexsim
