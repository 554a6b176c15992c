#pragma once

// Test-only oracles, independent of the library code paths they check.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "flexsim/bipartite_graph.hpp"
#include "flexsim/maxflow.hpp"

namespace testing_oracles {

// Mean waiting time in queue of an M/M/c system (unit-rate servers, arrival
// rate lambda < c) from the birth-death stationary distribution: p_k follows
// the balance recurrences, truncated when the tail is negligible; the wait is
// E[queue length] / lambda by Little's law.
inline double mmc_wait_birth_death(int c, double lambda) {
  if (c < 1 || !(lambda > 0.0) || !(lambda < c))
    throw std::invalid_argument("mmc oracle needs 0 < lambda < c");
  // Unnormalized p_k via p_{k+1} = p_k * lambda / min(k+1, c).
  std::vector<double> p;
  p.push_back(1.0);
  double tail_ratio = lambda / c;
  int k = 0;
  for (;;) {
    const double rate = lambda / std::min(k + 1, c);
    p.push_back(p.back() * rate);
    ++k;
    if (k > c && p.back() < 1e-18 * p[c]) break;
    if (k > c + 20000000) throw std::runtime_error("mmc oracle: truncation failed");
  }
  // Close the geometric tail beyond the truncation point analytically.
  double norm = 0.0;
  for (double v : p) norm += v;
  norm += p.back() * tail_ratio / (1.0 - tail_ratio);
  double lq = 0.0;
  for (std::size_t i = c + 1; i < p.size(); ++i)
    lq += (static_cast<double>(i) - c) * p[i];
  // Tail contribution: sum_{j>=1} (m + j - c) r^j p_m with m = last index.
  const double m_minus_c = static_cast<double>(p.size() - 1) - c;
  const double r = tail_ratio;
  lq += p.back() * (m_minus_c * r / (1.0 - r) + r / ((1.0 - r) * (1.0 - r)));
  lq /= norm;
  return lq / lambda;
}

// Unit-capacity max-flow oracle for batch assignments: value of the max flow
// from a source over job slots to a sink behind the idle servers.
inline int matching_maxflow_oracle(const flexsim::BipartiteGraph& g,
                                   const std::vector<int>& batch_queue_ids,
                                   const std::vector<int>& idle_servers) {
  const int jobs = static_cast<int>(batch_queue_ids.size());
  const int servers = static_cast<int>(idle_servers.size());
  flexsim::FlowNetwork net(jobs + servers + 2);
  const int source = 0, sink = jobs + servers + 1;
  for (int k = 0; k < jobs; ++k) net.add_edge(source, 1 + k, 1.0);
  for (int sl = 0; sl < servers; ++sl) net.add_edge(1 + jobs + sl, sink, 1.0);
  for (int k = 0; k < jobs; ++k)
    for (int sl = 0; sl < servers; ++sl)
      if (g.has_edge(batch_queue_ids[k], idle_servers[sl]))
        net.add_edge(1 + k, 1 + jobs + sl, 1.0);
  return static_cast<int>(std::llround(net.max_flow(source, sink)));
}

// Least-squares R^2 of y against x.
inline double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = slope * x[i] + intercept;
    ss_res += (y[i] - fit) * (y[i] - fit);
    ss_tot += (y[i] - ybar) * (y[i] - ybar);
  }
  return 1.0 - ss_res / ss_tot;
}

}  // namespace testing_oracles
