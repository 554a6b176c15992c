#pragma once

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "flexsim/bipartite_graph.hpp"
#include "flexsim/rng.hpp"

namespace flexsim {

using RateVector = std::vector<double>;

// The rate class Lambda_n(u): max_i rate < u and sum_i rate <= rho * n.
struct RateClass {
  int n = 0;
  double u = 0.0;
  double rho = 0.0;
};

enum class Verdict { Feasible, Infeasible, Boundary };

struct FeasibilityResult {
  Verdict verdict = Verdict::Infeasible;
  // Feasible: per-edge flow aligned with BipartiteGraph::edges() order.
  std::vector<double> flow;
  // Infeasible/Boundary: queue subset whose rate sum meets or exceeds its
  // neighborhood size.
  std::vector<int> violating_set;
  double set_rate_sum = 0.0;
  int neighborhood_size = 0;
  double slack = 0.0;  // echo of the requested margin

  bool feasible() const { return verdict == Verdict::Feasible; }
};

bool rate_condition_check(const RateVector& rates, const RateClass& rc);

// Max-flow feasibility test for Definition-1 style demands. Server capacity
// is 1 - slack. With slack = 0, vectors routable only with some server at
// load exactly 1 (within 1e-9 relative margin) come back Boundary.
FeasibilityResult is_feasible(const BipartiteGraph& g, const RateVector& rates,
                              double slack = 0.0);

// Exhaustive check that every nonempty queue subset S has
// sum_{i in S} rate_i < |N(S)|. Guarded at n_queues <= 20.
bool hall_oracle(const BipartiteGraph& g, const RateVector& rates);

// rate_i = min{2, (1+u)/2} for the first d queues, 0 elsewhere. Requires
// u > 1 and d <= rho*n/2; the result satisfies the rate condition yet
// overloads the first cluster of the contiguous modular architecture.
RateVector adversarial_modular_rates(int n, int d, double u, double rho);

// Adds a dummy-stream rate of (1 - rho') to every queue, rho' = (1+rho)/2.
// Returns the augmented vector and rho'. Guarantees
// (1-rho')n <= sum rate' <= rho'n.
std::pair<RateVector, double> augment_rates(const RateVector& rates, double rho);

// Fraction of (random modular graph, sampled rates) pairs that are strictly
// feasible; deterministic given seed (per-trial substreams).
double estimate_feasibility_probability(int n, int d,
                                        const std::function<RateVector(Rng&)>& rate_sampler,
                                        int trials, std::uint64_t seed);

// Draws rate_i ~ U(0, u) i.i.d., rescaled to total rho*n when the sum
// exceeds it; always lands in Lambda_n(u).
RateVector sample_rate_class(int n, double u, double rho, Rng& rng);

}  // namespace flexsim
