#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexsim/config.hpp"
#include "flexsim/simcore.hpp"

namespace flexsim {

// Aggregated result of one scenario: per-replication SimResults plus
// nearest-rank percentiles of the replication average delays.
struct StudyResult {
  std::string scenario;
  int n = 0;
  int d = 0;
  std::string policy;
  std::string size_dist;
  std::uint64_t base_seed = 0;
  std::vector<SimResult> replications;  // in replicate order
  std::vector<std::uint64_t> seeds;
  double p25 = 0.0;
  double median = 0.0;
  double p75 = 0.0;
};

// Nearest-rank percentile (1-based rank ceil(p/100 * N) of the sorted data).
double nearest_rank_percentile(std::vector<double> values, double percent);

// Runs the scenario's replications with seeds base+1 .. base+R, dispatching
// to a worker pool capped by FLEXSIM_THREADS; the aggregate is independent
// of scheduling.
StudyResult run_study(const Scenario& scenario);

// The scaled reproduction study: for each n, a random d-regular graph with
// d = round(n^(2/3)), uniform rates 0.5, the virtual-queue policy with
// b_n = n ln(n) / d, 10^4 service slots and a 1000-slot burn-in, run for both
// exponential and log-normal(1, 10) job sizes. Returns one StudyResult per
// (n, size distribution), exponential variants first.
std::vector<StudyResult> reproduce_figure(const std::vector<int>& n_list, double rho,
                                          int replications, std::uint64_t seed);

// CSV schema:
//   scenario,n,d,policy,size_dist,replicate,seed,jobs,mean_wait,
//   p25,median,p75,frac_long_service,batch_wait_mean,kingman_bound
// One row per replication plus one aggregate row (replicate = "agg") per
// scenario; floats at 9 significant digits.
std::string csv_text(const std::vector<StudyResult>& studies);
void emit_csv(const std::vector<StudyResult>& studies, const std::string& path);
void emit_csv(const StudyResult& study, const std::string& path);

// Kingman bound of the modified batch queueing system from the run's
// empirical moments; quiet NaN when the diagnostics are absent or unstable.
double empirical_kingman_bound(const SimResult& r);

// Worker cap: FLEXSIM_THREADS if set, hardware concurrency otherwise.
int worker_count();

}  // namespace flexsim
