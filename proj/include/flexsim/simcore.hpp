#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "flexsim/bipartite_graph.hpp"
#include "flexsim/capacity.hpp"
#include "flexsim/job_size.hpp"
#include "flexsim/policies.hpp"
#include "flexsim/rng.hpp"

namespace flexsim {

struct Horizon {
  enum class Kind { Time, Slots, Jobs };
  Kind kind = Kind::Time;
  double value = 0.0;
};

struct QueueResult {
  std::uint64_t arrivals = 0;  // all arrivals, including burn-in
  std::uint64_t measured = 0;  // jobs contributing to the wait statistics
  double mean_wait = 0.0;
};

// Diagnostics of the virtual-queue policy, measured past the burn-in point.
struct BatchStats {
  bool present = false;
  std::uint64_t batches = 0;
  double interarrival_mean = 0.0;
  double interarrival_var = 0.0;
  double wait_mean = 0.0;
  double wait_var = 0.0;
  std::uint64_t wait_count = 0;
  double modified_service_mean = 0.0;
  double modified_service_var = 0.0;
  std::uint64_t short_count = 0;
  std::uint64_t long_count = 0;
  double frac_long = 0.0;
  double slot_length = 0.0;
  int batch_jobs = 0;
  double b_n = 0.0;
};

struct SimResult {
  std::vector<QueueResult> queues;
  std::uint64_t jobs_measured = 0;
  double weighted_mean_wait = 0.0;  // empirical-rate weighted average
  bool no_jobs = false;             // nothing measured; average defined as 0
  bool unstable = false;            // some queue exceeded 10^6 waiting jobs
  std::uint64_t seed = 0;
  double end_time = 0.0;
  double measure_start_time = 0.0;
  double time_avg_in_system = 0.0;  // real jobs, measurement window
  double mean_measured_size = 0.0;
  double empirical_total_rate = 0.0;
  std::uint64_t dummy_jobs = 0;
  BatchStats batch;

  // Flat key-value record, one "key = value" per line; floats at 17
  // significant digits so equal records mean bit-equal results.
  std::string to_record() const;
};

struct WeightedMean {
  double value = 0.0;
  bool all_zero = false;
};

// Rate-weighted average of per-queue mean waits. All-zero rates yield value
// 0 with the flag set.
WeightedMean weighted_mean_wait(const std::vector<std::pair<double, double>>& rate_wait);

// What a policy may observe and do; implemented by the engine.
class SchedulerContext {
 public:
  virtual ~SchedulerContext() = default;
  virtual double now() const = 0;
  virtual const BipartiteGraph& graph() const = 0;
  virtual int queue_length(int queue) const = 0;
  virtual bool server_idle(int server) const = 0;
  virtual std::vector<int> idle_servers() const = 0;
  // Pops the head job of the queue and starts it on the (idle, connected)
  // server. Throws std::logic_error on an illegal pair.
  virtual void start_service(int server, int queue) = 0;
  // Occupies an idle server with an exponential(1) dummy job.
  virtual void start_dummy(int server) = 0;
  virtual void schedule_timer(double time, long tag) = 0;
  virtual Rng& policy_rng() = 0;
  virtual double measure_start() const = 0;
  virtual void note(const std::string& line) = 0;  // goes to the event trace
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual const char* name() const = 0;
  virtual void on_start(SchedulerContext&) {}
  // Called after the arriving job has been appended to its queue.
  virtual void on_arrival(SchedulerContext&, int queue) = 0;
  // Called after a completion; the server is idle again.
  virtual void on_server_free(SchedulerContext&, int server) = 0;
  virtual void on_timer(SchedulerContext&, long) {}
  virtual void collect(BatchStats&) const {}
  virtual double slot_length() const { return 0.0; }
};

struct RunOptions {
  Horizon horizon{Horizon::Kind::Time, 1000.0};
  // Same unit as the horizon; negative selects the default (1000 slots for
  // the virtual-queue policy, 10% of the horizon otherwise).
  double burn_in = -1.0;
  std::uint64_t seed = 1;
  std::function<void(const std::string&)> trace;
  std::function<void(const SchedulerContext&)> audit;  // after every event
};

SimResult run(const BipartiteGraph& g, const RateVector& rates, const PolicySpec& policy,
              const JobSizeDist& size_dist, const RunOptions& opts);

}  // namespace flexsim
