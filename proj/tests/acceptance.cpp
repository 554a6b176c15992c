// Acceptance suite: every release criterion, one pass/fail line each.
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "flexsim/analysis.hpp"
#include "flexsim/capacity.hpp"
#include "flexsim/policies.hpp"
#include "flexsim/simcore.hpp"
#include "flexsim/study.hpp"
#include "flexsim/topology.hpp"
#include "oracles.hpp"

using namespace flexsim;

namespace {

struct Criterion {
  int id;
  std::string label;
  std::function<bool(std::string&)> check;
  double time_limit_s;
};

bool within(double value, double target, double rel) {
  return std::abs(value - target) <= rel * std::abs(target);
}

// 1. Sixteen independent M/M/1 queues at rho = 0.5 under greedy.
bool c1(std::string& msg) {
  RunOptions opts;
  opts.horizon = {Horizon::Kind::Jobs, 1100000};
  opts.burn_in = 100000;
  opts.seed = 101;
  const SimResult r = run(build_inflexible(16), RateVector(16, 0.5), greedy_policy(),
                          JobSizeDist::exponential(), opts);
  std::ostringstream out;
  out << "mean wait " << r.weighted_mean_wait << " vs 1.0, jobs " << r.jobs_measured;
  msg = out.str();
  return r.jobs_measured == 1000000 && within(r.weighted_mean_wait, 1.0, 0.05);
}

// 2. One modular cluster of 8 servers at eta = 4 matches the M/M/8 oracle.
bool c2(std::string& msg) {
  const auto part = contiguous_partition(8, 8);
  RunOptions opts;
  opts.horizon = {Horizon::Kind::Jobs, 1100000};
  opts.burn_in = 100000;
  opts.seed = 202;
  const SimResult r = run(build_modular(8, 8, part), RateVector(8, 0.5),
                          modular_greedy_policy(part), JobSizeDist::exponential(), opts);
  const double oracle = testing_oracles::mmc_wait_birth_death(8, 4.0);
  std::ostringstream out;
  out << "mean wait " << r.weighted_mean_wait << " vs oracle " << oracle;
  msg = out.str();
  return within(r.weighted_mean_wait, oracle, 0.10);
}

// 3. Max-flow feasibility agrees with the exhaustive subset oracle.
bool c3(std::string& msg) {
  Rng rng(303);
  int agreements = 0;
  const int trials = 200;
  for (int t = 0; t < trials; ++t) {
    const int n = 2 + static_cast<int>(rng.below(9));
    const double avg = 0.5 + rng.uniform() * (n - 0.5);
    const BipartiteGraph g = build_erdos_renyi_bipartite(n, avg, rng.next_u64());
    RateVector rates(n);
    for (double& x : rates) x = 0.05 + 1.15 * rng.uniform();
    const bool flow_says = is_feasible(g, rates, 0.0).verdict == Verdict::Feasible;
    if (flow_says == hall_oracle(g, rates)) ++agreements;
  }
  std::ostringstream out;
  out << agreements << "/" << trials << " instances agree";
  msg = out.str();
  return agreements == trials;
}

// 4. Batch assignment exists iff the unit-capacity max flow saturates the batch.
bool c4(std::string& msg) {
  Rng rng(404);
  int agree = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const int n = 2 + static_cast<int>(rng.below(11));
    const double avg = 0.5 + rng.uniform() * (n - 0.5);
    const BipartiteGraph g = build_erdos_renyi_bipartite(n, avg, rng.next_u64());
    const int jobs = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    std::vector<int> batch(jobs);
    for (int& q : batch) q = static_cast<int>(rng.below(n));
    std::vector<int> idle;
    for (int s = 0; s < n; ++s)
      if (rng.uniform() < 0.6) idle.push_back(s);
    const bool matched = find_batch_assignment(g, batch, idle).has_value();
    const bool flow = testing_oracles::matching_maxflow_oracle(g, batch, idle) == jobs;
    if (matched == flow) ++agree;
  }
  std::ostringstream out;
  out << agree << "/" << trials << " instances agree";
  msg = out.str();
  return agree == trials;
}

// 5. The adversarial rate vector is admissible yet infeasible on the modular
// architecture, for (n, d) in {(8,2), (16,4), (32,8)} at u = 3, rho = 0.5.
bool c5(std::string& msg) {
  std::ostringstream out;
  bool ok = true;
  for (const auto& [n, d] : std::vector<std::pair<int, int>>{{8, 2}, {16, 4}, {32, 8}}) {
    const RateVector rates = adversarial_modular_rates(n, d, 3.0, 0.5);
    const bool admissible = rate_condition_check(rates, {n, 3.0, 0.5});
    const auto verdict =
        is_feasible(build_modular(n, d, contiguous_partition(n, d)), rates, 0.0).verdict;
    const bool infeasible = verdict == Verdict::Infeasible;
    ok = ok && admissible && infeasible;
    out << "(" << n << "," << d << "): " << (admissible ? "in-class" : "OUT-OF-CLASS")
        << "/" << (infeasible ? "infeasible" : "NOT-INFEASIBLE") << " ";
  }
  msg = out.str();
  return ok;
}

// 6. Scaled delay study: medians strictly decreasing in n, a >= 25% drop from
// n = 64 to n = 512, and the log-normal variant within a factor 2 at n = 512.
bool c6(std::string& msg) {
  const std::vector<int> ns{64, 216, 512};
  const std::vector<StudyResult> studies = reproduce_figure(ns, 0.5, 10, 1);
  const StudyResult& e64 = studies[0];
  const StudyResult& e216 = studies[1];
  const StudyResult& e512 = studies[2];
  const StudyResult& l512 = studies[5];
  std::ostringstream out;
  out << "exp medians " << e64.median << " / " << e216.median << " / " << e512.median
      << ", lognormal(512) " << l512.median;
  msg = out.str();
  const bool decreasing =
      e64.median > e216.median && e216.median > e512.median && e512.median > 0.0;
  const bool drop = e512.median <= 0.75 * e64.median;
  const bool insensitive =
      l512.median <= 2.0 * e512.median && l512.median >= 0.5 * e512.median;
  return decreasing && drop && insensitive;
}

struct VQRun {
  SimResult result;
  VQParams params;
};

VQRun lemma3_run() {
  const int n = 216;
  const int d = 36;  // round(216^(2/3))
  const BipartiteGraph g = build_random_regular_bipartite(n, d, 7070);
  const VQParams p =
      make_vq_params(n, 0.5, n * std::log(static_cast<double>(n)) / d, d);
  RunOptions opts;
  opts.horizon = {Horizon::Kind::Slots, 10000.0};
  opts.burn_in = 1000.0;
  opts.seed = 707;
  VQRun out{run(g, RateVector(n, 0.5), virtual_queue_policy(p),
                JobSizeDist::exponential(), opts),
            p};
  return out;
}

// 7. Batch inter-arrival moments against the closed forms. The batch size the
// policy realizes is the rounded integer, so the bracket is evaluated at the
// effective b = batch_jobs / rho (at rho = 0.5 the bracket collapses to a
// single point and only statistical noise separates the empirical mean from
// it); three standard errors of slack keep the check sharp but stable.
bool c7(std::string& msg) {
  const VQRun vr = lemma3_run();
  const BatchStats& b = vr.result.batch;
  const double r = 0.5 * 216;
  const double b_eff = vr.params.batch_jobs / vr.params.rho;
  const BatchMoments m = batch_interarrival_moments(216, 0.5, b_eff, r);
  const double se = std::sqrt(b.interarrival_var / static_cast<double>(b.batches));
  std::ostringstream out;
  out << b.batches << " batches, mean " << b.interarrival_mean << " in ["
      << m.mean_lower << ", " << m.mean_upper << "] +- 3se(" << se << "), var "
      << b.interarrival_var << " vs " << m.variance;
  msg = out.str();
  const bool enough = b.batches >= 2000;
  const bool mean_ok = b.interarrival_mean >= m.mean_lower - 3 * se &&
                       b.interarrival_mean <= m.mean_upper + 3 * se;
  const bool var_ok = within(b.interarrival_var, m.variance, 0.20);
  return enough && mean_ok && var_ok;
}

// 8. The empirical Kingman bound of the modified system dominates the
// measured batch waiting time.
bool c8(std::string& msg) {
  const VQRun vr = lemma3_run();
  const BatchStats& b = vr.result.batch;
  const double bound = empirical_kingman_bound(vr.result);
  const double se = std::sqrt(b.wait_var / static_cast<double>(b.wait_count));
  std::ostringstream out;
  out << "batch wait " << b.wait_mean << " vs bound " << bound << " (+3se " << 3 * se
      << ")";
  msg = out.str();
  return std::isfinite(bound) && b.wait_mean <= bound + 3 * se;
}

// 9. Exact expander verification on the three canonical instances.
bool c9(std::string& msg) {
  const bool complete_ok = verify_expander(build_complete(8), 0.5, 2.0);
  const bool modular_bad =
      !verify_expander(build_modular(8, 2, contiguous_partition(8, 2)), 0.5, 2.0);
  const bool inflexible_bad = !verify_expander(build_inflexible(8), 0.25, 2.0);
  std::ostringstream out;
  out << "complete " << complete_ok << ", modular " << modular_bad << ", inflexible "
      << inflexible_bad;
  msg = out.str();
  return complete_ok && modular_bad && inflexible_bad;
}

// 10. Cluster waits at half load decay exponentially: log-linear over the
// integer degrees 2..64 with R^2 >= 0.99.
bool c10(std::string& msg) {
  std::vector<double> xs, ys;
  for (int d = 2; d <= 64; ++d) {
    xs.push_back(static_cast<double>(d));
    ys.push_back(std::log(modular_cluster_wait(d, 0.5 * d)));
  }
  const double r2 = testing_oracles::linear_r2(xs, ys);
  std::ostringstream out;
  out << "R^2 = " << r2;
  msg = out.str();
  return r2 >= 0.99;
}

// 11. Stage-2 choice distributions are probability vectors.
bool c11(std::string& msg) {
  Rng rng(1111);
  int ok = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    const int deg = 1 + static_cast<int>(rng.below(8));
    std::vector<double> flows(deg);
    for (double& f : flows) f = rng.uniform() < 0.25 ? 0.0 : 4.0 * rng.uniform();
    const double rho = 0.05 + 0.9 * rng.uniform();
    const auto p = cluster_choice_distribution(flows, rho);
    double sum = 0.0;
    bool nonneg = true;
    for (double v : p) {
      nonneg = nonneg && v >= 0.0;
      sum += v;
    }
    if (nonneg && std::abs(sum - 1.0) <= 1e-12) ++ok;
  }
  std::ostringstream out;
  out << ok << "/" << trials << " distributions valid";
  msg = out.str();
  return ok == trials;
}

// 12. Byte-identical output for identical seeds.
bool c12(std::string& msg) {
  const std::string a = csv_text(reproduce_figure({27, 64}, 0.5, 3, 9));
  const std::string b = csv_text(reproduce_figure({27, 64}, 0.5, 3, 9));
  msg = a == b ? "identical CSV bytes" : "CSV bytes differ";
  return a == b;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "M/M/1 baseline within 5%", c1, 30},
      {2, "Erlang-C match within 10%", c2, 60},
      {3, "feasibility oracle equivalence", c3, 10},
      {4, "batch assignment matching integrality", c4, 10},
      {5, "adversarial modular rates", c5, 1},
      {6, "figure reproduction: medians and insensitivity", c6, 600},
      {7, "batch inter-arrival moments", c7, 120},
      {8, "Kingman bound domination", c8, 120},
      {9, "expander verifier", c9, 1},
      {10, "cluster wait decay shape", c10, 1},
      {11, "choice probability distributions", c11, 1},
      {12, "deterministic reproduction output", c12, 600},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string msg;
    bool ok = false;
    try {
      ok = c.check(msg);
    } catch (const std::exception& e) {
      msg = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.time_limit_s;
    if (!in_time) msg += " [exceeded time budget]";
    const bool pass = ok && in_time;
    if (!pass) ++failures;
    std::printf("[%s] criterion %2d: %s — %s (%.2f s)\n", pass ? "PASS" : "FAIL", c.id,
                c.label.c_str(), msg.c_str(), secs);
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures;
}
