#pragma once

#include <cstdint>
#include <utility>

#include "flexsim/bipartite_graph.hpp"

namespace flexsim {

// Expansion-related parameters for an architecture of average degree d under
// traffic intensity rho. alpha = gamma / beta_n; u_max is the largest
// fluctuation parameter the expansion certificate covers.
struct ExpanderParams {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double beta_n = 0.0;
  double rho_hat = 0.0;
  double u_max = 0.0;
};

BipartiteGraph build_complete(int n);
BipartiteGraph build_inflexible(int n);

// Disjoint union of complete d x d blocks given by the partition.
BipartiteGraph build_modular(int n, int d, const ClusterPartition& partition);

// Queue partition drawn uniformly at random (Fisher-Yates shuffle, then
// chunks of d); server clusters stay contiguous.
std::pair<BipartiteGraph, ClusterPartition> build_random_modular(int n, int d,
                                                                 std::uint64_t seed);

// Union of d uniform random perfect matchings, resampling any matching that
// would duplicate an edge; throws std::runtime_error after 1000*(d+1) failed
// matching attempts.
BipartiteGraph build_random_regular_bipartite(int n, int d, std::uint64_t seed);

// Each of the n^2 potential edges present independently with probability
// avg_degree / n.
BipartiteGraph build_erdos_renyi_bipartite(int n, double avg_degree, std::uint64_t seed);

// Graph product: queue i and server j are adjacent iff their clusters of
// size d_m are adjacent in cluster_graph.
BipartiteGraph build_expanded_modular(const BipartiteGraph& cluster_graph, int d_m);

// Exact check that every nonempty S with |S| <= alpha * n_queues satisfies
// |N(S)| >= beta * |S|. Exhaustive in the subsets of queues; guarded at
// n_queues <= 24 unless max_subset_size caps the enumeration.
bool verify_expander(const BipartiteGraph& g, double alpha, double beta,
                     int max_subset_size = 0);

// Degree above which an (alpha, beta)-expander is guaranteed to exist:
// (1 + log2(beta) + (beta+1) log2 e) / (-log2(alpha beta)) + beta + 1.
double expander_degree_bound(double alpha, double beta);

// rho_hat = 1/(1+(1-rho)/8), beta_n = (1/2) ln(1/rho_hat)/(ln(1/rho_hat)+1) d,
// gamma = sqrt(rho_hat), alpha = gamma/beta_n, u_max = (1-rho)/2 * beta_n.
ExpanderParams theorem1_params(int n, int d, double rho);

}  // namespace flexsim
