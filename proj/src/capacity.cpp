#include "flexsim/capacity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "flexsim/maxflow.hpp"
#include "flexsim/topology.hpp"

namespace flexsim {

namespace {

constexpr double kFeasTol = 1e-9;
constexpr std::uint64_t kStreamGraph = 0x6772617068000000ull;
constexpr std::uint64_t kStreamRates = 0x7261746573000000ull;

struct SolvedFlow {
  double value = 0.0;
  std::vector<double> edge_flow;           // graph edge order
  std::vector<char> reachable_queue;       // residual reachability from source
};

// Network layout: source 0, queues 1..nq, servers nq+1..nq+ns, sink last.
SolvedFlow solve(const BipartiteGraph& g, const RateVector& rates, double server_cap) {
  const int nq = g.n_queues, ns = g.n_servers;
  FlowNetwork net(nq + ns + 2);
  const int source = 0, sink = nq + ns + 1;
  for (int q = 0; q < nq; ++q) net.add_edge(source, 1 + q, rates[q]);
  std::vector<int> edge_ids;
  edge_ids.reserve(g.edge_count());
  for (int q = 0; q < nq; ++q)
    for (int s : g.queue_adj[q])
      edge_ids.push_back(net.add_edge(1 + q, 1 + nq + s, FlowNetwork::kInf));
  for (int s = 0; s < ns; ++s) net.add_edge(1 + nq + s, sink, server_cap);

  SolvedFlow out;
  out.value = net.max_flow(source, sink);
  out.edge_flow.reserve(edge_ids.size());
  for (int id : edge_ids) out.edge_flow.push_back(net.flow_on(id));
  const auto reach = net.min_cut_source_side(source);
  out.reachable_queue.assign(nq, 0);
  for (int q = 0; q < nq; ++q) out.reachable_queue[q] = reach[1 + q];
  return out;
}

void fill_cut_certificate(const BipartiteGraph& g, const RateVector& rates,
                          const std::vector<char>& reachable_queue,
                          FeasibilityResult& r) {
  std::vector<char> nbr(g.n_servers, 0);
  for (int q = 0; q < g.n_queues; ++q) {
    if (!reachable_queue[q]) continue;
    r.violating_set.push_back(q);
    r.set_rate_sum += rates[q];
    for (int s : g.queue_adj[q]) nbr[s] = 1;
  }
  r.neighborhood_size = static_cast<int>(std::count(nbr.begin(), nbr.end(), 1));
}

}  // namespace

bool rate_condition_check(const RateVector& rates, const RateClass& rc) {
  if (static_cast<int>(rates.size()) != rc.n)
    throw std::invalid_argument("rate vector length does not match rate class");
  double sum = 0.0, mx = 0.0;
  for (double r : rates) {
    sum += r;
    mx = std::max(mx, r);
  }
  return mx < rc.u && sum <= rc.rho * rc.n;
}

FeasibilityResult is_feasible(const BipartiteGraph& g, const RateVector& rates,
                              double slack) {
  if (static_cast<int>(rates.size()) != g.n_queues)
    throw std::invalid_argument("rate vector length does not match graph");
  if (!(slack >= 0.0) || slack >= 1.0)
    throw std::invalid_argument("slack must be in [0, 1)");
  for (double r : rates)
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("rates must be finite and non-negative");

  const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
  FeasibilityResult result;
  result.slack = slack;

  SolvedFlow sf = solve(g, rates, 1.0 - slack);
  if (sf.value < total - kFeasTol) {
    result.verdict = Verdict::Infeasible;
    fill_cut_certificate(g, rates, sf.reachable_queue, result);
    return result;
  }
  if (slack > 0.0) {
    result.verdict = Verdict::Feasible;
    result.flow = std::move(sf.edge_flow);
    return result;
  }
  // Strictness probe: Definition-1 inequalities are strict, so shave a
  // relative 1e-9 off every server and see whether the demand still routes.
  SolvedFlow probe = solve(g, rates, 1.0 - kFeasTol);
  if (probe.value >= total - 0.5 * kFeasTol) {
    result.verdict = Verdict::Feasible;
    result.flow = std::move(sf.edge_flow);
    return result;
  }
  result.verdict = Verdict::Boundary;
  fill_cut_certificate(g, rates, probe.reachable_queue, result);
  return result;
}

bool hall_oracle(const BipartiteGraph& g, const RateVector& rates) {
  const int n = g.n_queues;
  if (static_cast<int>(rates.size()) != n)
    throw std::invalid_argument("rate vector length does not match graph");
  if (n > 20) throw std::invalid_argument("hall_oracle limited to n_queues <= 20");
  if (g.n_servers > 64) throw std::invalid_argument("hall_oracle limited to 64 servers");

  std::vector<std::uint64_t> qmask(n, 0);
  for (int q = 0; q < n; ++q)
    for (int s : g.queue_adj[q]) qmask[q] |= 1ull << s;

  const std::uint32_t full = (n == 32) ? ~0u : ((1u << n) - 1);
  std::vector<double> sum(static_cast<std::size_t>(full) + 1, 0.0);
  std::vector<std::uint64_t> nbr(static_cast<std::size_t>(full) + 1, 0);
  for (std::uint32_t mask = 1; mask <= full; ++mask) {
    const int lsb = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    sum[mask] = sum[rest] + rates[lsb];
    nbr[mask] = nbr[rest] | qmask[lsb];
    if (!(sum[mask] < static_cast<double>(std::popcount(nbr[mask])))) return false;
  }
  return true;
}

RateVector adversarial_modular_rates(int n, int d, double u, double rho) {
  if (n < 1 || d < 1 || d > n) throw std::invalid_argument("need 1 <= d <= n");
  if (!(u > 1.0)) throw std::invalid_argument("fluctuation parameter must exceed 1");
  if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
  if (d > rho * n / 2.0 + 1e-12)
    throw std::invalid_argument("construction requires d <= rho * n / 2");
  RateVector rates(n, 0.0);
  const double v = std::min(2.0, (1.0 + u) / 2.0);
  for (int i = 0; i < d; ++i) rates[i] = v;
  return rates;
}

std::pair<RateVector, double> augment_rates(const RateVector& rates, double rho) {
  if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
  const double total = std::accumulate(rates.begin(), rates.end(), 0.0);
  const double n = static_cast<double>(rates.size());
  if (total > rho * n + 1e-9)
    throw std::invalid_argument("rates exceed traffic intensity rho");
  const double rho_prime = 0.5 * (1.0 + rho);
  RateVector out(rates);
  for (double& r : out) r += 1.0 - rho_prime;
  return {std::move(out), rho_prime};
}

double estimate_feasibility_probability(int n, int d,
                                        const std::function<RateVector(Rng&)>& rate_sampler,
                                        int trials, std::uint64_t seed) {
  if (n < 1 || d < 1 || n % d != 0)
    throw std::invalid_argument("need d dividing n");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  int feasible = 0;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t graph_seed =
        splitmix64(seed ^ splitmix64(kStreamGraph ^ static_cast<std::uint64_t>(t)));
    auto [g, part] = build_random_modular(n, d, graph_seed);
    Rng rate_rng = Rng::stream(seed, kStreamRates, static_cast<std::uint64_t>(t));
    const RateVector rates = rate_sampler(rate_rng);
    if (is_feasible(g, rates, 0.0).verdict == Verdict::Feasible) ++feasible;
  }
  return static_cast<double>(feasible) / trials;
}

RateVector sample_rate_class(int n, double u, double rho, Rng& rng) {
  if (n < 1 || !(u > 0.0)) throw std::invalid_argument("need n >= 1, u > 0");
  RateVector rates(n);
  double sum = 0.0;
  for (double& r : rates) {
    r = u * rng.uniform();
    sum += r;
  }
  const double cap = rho * n;
  if (sum > cap) {
    // Strictly inside the cap so float rounding cannot break the condition.
    const double scale = cap / sum * (1.0 - 1e-12);
    for (double& r : rates) r *= scale;
  }
  return rates;
}

}  // namespace flexsim
