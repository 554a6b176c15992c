#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "flexsim/bipartite_graph.hpp"
#include "flexsim/capacity.hpp"

namespace flexsim {

class Policy;  // engine-side interface, defined in simcore.hpp

// Parameters of the virtual-queue batching policy.
//   epsilon = (1 - rho) / 2, slot_length = (rho + epsilon) * b_n / n,
//   batch_jobs = round(rho * b_n).
struct VQParams {
  double rho = 0.0;
  double epsilon = 0.0;
  double rho_hat = 0.0;
  double b_n = 0.0;
  double slot_length = 0.0;
  double beta_n = 0.0;
  int batch_jobs = 0;
};

// b_n defaults to 320/(1-rho)^2 * n ln(n) / beta_n with beta_n from
// theorem1_params; an override (e.g. n ln(n) / d) replaces it. Throws when
// the derived batch size rounds below one job.
VQParams make_vq_params(int n, double rho, std::optional<double> b_n_override, int d);

enum class PolicyKind { Greedy, ModularGreedy, VirtualQueue, ExpandedModular };

struct PolicySpec {
  PolicyKind kind = PolicyKind::Greedy;
  ClusterPartition partition;    // ModularGreedy / ExpandedModular
  VQParams vq;                   // VirtualQueue
  BipartiteGraph cluster_graph;  // ExpandedModular stage-1 topology
  int cluster_size = 0;          // ExpandedModular d_m
  RateVector rates;              // ExpandedModular stage-1 loads
  double rho = 0.0;              // ExpandedModular mixing weight

  const char* name() const;
};

PolicySpec greedy_policy();
PolicySpec modular_greedy_policy(ClusterPartition partition);
PolicySpec virtual_queue_policy(VQParams params);
PolicySpec expanded_modular_policy(BipartiteGraph cluster_graph, ClusterPartition partition,
                                   RateVector rates, double rho);

// Maximum matching of batch job slots (job k sits at batch_queue_ids[k]) into
// distinct idle servers respecting the edges, scanned in index order. Returns
// the per-job server assignment iff every job is matched.
std::optional<std::vector<int>> find_batch_assignment(const BipartiteGraph& g,
                                                      const std::vector<int>& batch_queue_ids,
                                                      const std::vector<int>& idle_servers);

// Probability that a freeing server picks each neighboring queue cluster,
// given the stage-1 flows into its own cluster:
//   p_q = f_q / sum(f) * (1+rho)/2 + 1/deg * (1-rho)/2.
// A cluster with zero total inflow falls back to the uniform distribution.
std::vector<double> cluster_choice_distribution(const std::vector<double>& flows, double rho);

// Stage-1 plan for the expanded modular policy: feasible flow over the
// cluster graph (per-server-cluster capacity (1+rho)/2 * d_m) plus the
// per-server-cluster choice distributions. Throws when no feasible flow
// exists, naming the violating cut.
struct ExpandedModularPlan {
  // choice[s] lists (queue cluster, probability), in ascending cluster order.
  std::vector<std::vector<std::pair<int, double>>> choice;
  std::vector<double> edge_flow;  // cluster_graph.edges() order
};
ExpandedModularPlan plan_expanded_modular(const BipartiteGraph& cluster_graph,
                                          const std::vector<double>& cluster_loads,
                                          double rho, int d_m);

// Engine-side policy object for a spec; validates the spec against the graph.
std::unique_ptr<Policy> instantiate_policy(const PolicySpec& spec, const BipartiteGraph& g);

}  // namespace flexsim
