#include "flexsim/simcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <numeric>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "flexsim/welford.hpp"

namespace flexsim {

namespace {

constexpr std::uint64_t kStreamArrivals = 0x617272760000ull;  // "arrv"
constexpr std::uint64_t kStreamPick = 0x7069636b0000ull;      // "pick"
constexpr std::uint64_t kStreamSize = 0x73697a650000ull;      // "size"
constexpr std::uint64_t kStreamDummy = 0x64756d790000ull;     // "dumy"
constexpr std::uint64_t kStreamPolicy = 0x706f6c690000ull;    // "poli"

constexpr std::uint64_t kUnstableQueueLen = 1000000;

// Tie order at equal timestamps: completions, then policy timers, then
// arrivals; within a class by entity id, then insertion order.
enum class EvKind : std::uint8_t { Completion = 0, Timer = 1, Arrival = 2 };

struct Ev {
  double time;
  EvKind kind;
  long entity;
  std::uint64_t seq;
};

struct EvLater {
  bool operator()(const Ev& a, const Ev& b) const {
    if (a.time != b.time) return a.time > b.time;
    if (a.kind != b.kind) return a.kind > b.kind;
    if (a.entity != b.entity) return a.entity > b.entity;
    return a.seq > b.seq;
  }
};

struct PendingJob {
  double arrival_time;
  std::uint64_t index;  // 1-based global arrival index
};

struct ServerState {
  bool busy = false;
  bool dummy = false;
};

void fmt(std::ostringstream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out << buf;
}

class Engine final : public SchedulerContext {
 public:
  Engine(const BipartiteGraph& g, const RateVector& rates, const PolicySpec& spec,
         const JobSizeDist& dist, const RunOptions& opts)
      : g_(g),
        rates_(rates),
        dist_(dist),
        opts_(opts),
        policy_(instantiate_policy(spec, g)),
        arrival_rng_(Rng::stream(opts.seed, kStreamArrivals, 0)),
        pick_rng_(Rng::stream(opts.seed, kStreamPick, 0)),
        policy_rng_(Rng::stream(opts.seed, kStreamPolicy, 0)) {
    if (static_cast<int>(rates.size()) != g.n_queues)
      throw std::invalid_argument("rate vector length does not match graph");
    for (double r : rates_)
      if (!(r >= 0.0) || !std::isfinite(r))
        throw std::invalid_argument("rates must be finite and non-negative");
    total_rate_ = std::accumulate(rates_.begin(), rates_.end(), 0.0);
    prefix_.resize(rates_.size());
    std::partial_sum(rates_.begin(), rates_.end(), prefix_.begin());
    queues_.resize(g.n_queues);
    servers_.resize(g.n_servers);
    size_rng_.reserve(g.n_servers);
    dummy_rng_.reserve(g.n_servers);
    for (int j = 0; j < g.n_servers; ++j) {
      size_rng_.push_back(Rng::stream(opts.seed, kStreamSize, j));
      dummy_rng_.push_back(Rng::stream(opts.seed, kStreamDummy, j));
    }
    configure_window();
  }

  SimResult execute();

  // SchedulerContext
  double now() const override { return clock_; }
  const BipartiteGraph& graph() const override { return g_; }
  int queue_length(int queue) const override {
    return static_cast<int>(queues_[queue].size());
  }
  bool server_idle(int server) const override { return !servers_[server].busy; }
  std::vector<int> idle_servers() const override {
    std::vector<int> out;
    for (int j = 0; j < g_.n_servers; ++j)
      if (!servers_[j].busy) out.push_back(j);
    return out;
  }
  void start_service(int server, int queue) override;
  void start_dummy(int server) override;
  void schedule_timer(double time, long tag) override {
    push_event(time, EvKind::Timer, tag);
  }
  Rng& policy_rng() override { return policy_rng_; }
  double measure_start() const override {
    return measure_time_known_ ? measure_time_ : std::numeric_limits<double>::infinity();
  }
  void note(const std::string& line) override {
    if (opts_.trace) {
      std::ostringstream out;
      fmt(out, clock_);
      out << ' ' << line;
      opts_.trace(out.str());
    }
  }

 private:
  void configure_window();
  void push_event(double t, EvKind k, long entity) {
    events_.push(Ev{t, k, entity, seq_++});
  }
  void schedule_next_arrival() {
    if (total_rate_ > 0.0)
      push_event(clock_ + arrival_rng_.exponential(1.0 / total_rate_), EvKind::Arrival, 0);
  }
  void advance_clock(double t);
  void process_arrival();
  void process_completion(int server);
  bool job_measured(const PendingJob& j) const {
    if (job_window_) return j.index > burn_in_jobs_;
    return j.arrival_time > measure_time_;
  }
  int real_in_system() const {
    int n = in_service_real_;
    for (const auto& q : queues_) n += static_cast<int>(q.size());
    return n;
  }

  const BipartiteGraph& g_;
  RateVector rates_;
  JobSizeDist dist_;
  const RunOptions& opts_;
  std::unique_ptr<Policy> policy_;

  Rng arrival_rng_, pick_rng_, policy_rng_;
  std::vector<Rng> size_rng_, dummy_rng_;

  double total_rate_ = 0.0;
  std::vector<double> prefix_;
  std::vector<std::deque<PendingJob>> queues_;
  std::vector<ServerState> servers_;
  std::priority_queue<Ev, std::vector<Ev>, EvLater> events_;
  std::uint64_t seq_ = 0;
  double clock_ = 0.0;

  // Horizon bookkeeping.
  bool job_window_ = false;       // jobs horizon (vs. time horizon)
  double end_time_ = 0.0;         // time horizon
  std::uint64_t burn_in_jobs_ = 0;
  std::uint64_t target_started_ = 0;  // measured service starts to collect
  bool measure_time_known_ = false;
  double measure_time_ = 0.0;
  bool stop_ = false;

  // Statistics.
  std::uint64_t arrival_count_ = 0;
  std::vector<std::uint64_t> arrivals_per_queue_;
  std::vector<std::uint64_t> measured_per_queue_;
  std::vector<double> wait_sum_per_queue_;
  std::uint64_t started_measured_ = 0;
  double measured_size_sum_ = 0.0;
  std::uint64_t dummy_count_ = 0;
  bool unstable_ = false;
  int in_service_real_ = 0;
  double area_ = 0.0;
  double last_event_time_ = 0.0;
};

void Engine::configure_window() {
  const double slot = policy_->slot_length();
  Horizon h = opts_.horizon;
  if (h.kind == Horizon::Kind::Slots) {
    if (slot <= 0.0)
      throw std::invalid_argument("slot-based horizon requires the virtual-queue policy");
    h.kind = Horizon::Kind::Time;
    h.value *= slot;
  }
  double burn = opts_.burn_in;
  if (burn < 0.0) {  // defaults: 1000 slots under the virtual-queue policy
    if (opts_.horizon.kind == Horizon::Kind::Jobs)
      burn = 0.1 * opts_.horizon.value;
    else if (slot > 0.0)
      burn = opts_.horizon.kind == Horizon::Kind::Slots ? 1000.0 : 1000.0 * slot;
    else
      burn = 0.1 * opts_.horizon.value;
  }
  if (opts_.horizon.kind == Horizon::Kind::Slots) burn *= slot;
  if (!(h.value > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(burn >= 0.0) || burn >= h.value)
    throw std::invalid_argument("burn-in must be in [0, horizon)");

  if (h.kind == Horizon::Kind::Jobs) {
    job_window_ = true;
    burn_in_jobs_ = static_cast<std::uint64_t>(burn);
    target_started_ = static_cast<std::uint64_t>(h.value) - burn_in_jobs_;
    if (burn_in_jobs_ == 0) {
      measure_time_known_ = true;
      measure_time_ = 0.0;
    }
  } else {
    end_time_ = h.value;
    measure_time_ = burn;
    measure_time_known_ = true;
  }
  arrivals_per_queue_.assign(g_.n_queues, 0);
  measured_per_queue_.assign(g_.n_queues, 0);
  wait_sum_per_queue_.assign(g_.n_queues, 0.0);
}

void Engine::advance_clock(double t) {
  if (t < clock_ - 1e-12) throw std::logic_error("event clock went backwards");
  if (measure_time_known_ && t > measure_time_) {
    const double from = std::max(last_event_time_, measure_time_);
    if (t > from) area_ += static_cast<double>(real_in_system()) * (t - from);
  }
  last_event_time_ = t;
  clock_ = std::max(clock_, t);
}

void Engine::start_service(int server, int queue) {
  ServerState& sv = servers_[server];
  if (sv.busy) throw std::logic_error("start_service on a busy server");
  if (!g_.has_edge(queue, server))
    throw std::logic_error("start_service across a missing edge");
  if (queues_[queue].empty()) throw std::logic_error("start_service on an empty queue");
  const PendingJob job = queues_[queue].front();
  queues_[queue].pop_front();
  const double wait = clock_ - job.arrival_time;
  const double size = sample_job_size(dist_, size_rng_[server]);
  if (job_measured(job)) {
    ++measured_per_queue_[queue];
    wait_sum_per_queue_[queue] += wait;
    measured_size_sum_ += size;
    ++started_measured_;
    if (job_window_ && started_measured_ >= target_started_) stop_ = true;
  }
  sv.busy = true;
  sv.dummy = false;
  ++in_service_real_;
  push_event(clock_ + size, EvKind::Completion, server);
  if (opts_.trace) {
    std::ostringstream out;
    out << "start server=" << server << " queue=" << queue << " wait=";
    fmt(out, wait);
    note(out.str());
  }
}

void Engine::start_dummy(int server) {
  ServerState& sv = servers_[server];
  if (sv.busy) throw std::logic_error("start_dummy on a busy server");
  sv.busy = true;
  sv.dummy = true;
  ++dummy_count_;
  push_event(clock_ + dummy_rng_[server].exponential(1.0), EvKind::Completion, server);
  if (opts_.trace) {
    std::ostringstream out;
    out << "dummy server=" << server;
    note(out.str());
  }
}

void Engine::process_arrival() {
  // Superposed Poisson stream thinned by rate: queue i with prob rate_i/total.
  const double u = pick_rng_.uniform() * total_rate_;
  const int queue = static_cast<int>(
      std::upper_bound(prefix_.begin(), prefix_.end(), u) - prefix_.begin());
  const int q = std::min(queue, g_.n_queues - 1);
  ++arrival_count_;
  if (job_window_ && !measure_time_known_ && arrival_count_ > burn_in_jobs_) {
    measure_time_known_ = true;
    measure_time_ = clock_;
    last_event_time_ = clock_;
  }
  queues_[q].push_back(PendingJob{clock_, arrival_count_});
  if (queues_[q].size() > kUnstableQueueLen) unstable_ = true;
  ++arrivals_per_queue_[q];
  if (opts_.trace) {
    std::ostringstream out;
    out << "arrival queue=" << q;
    note(out.str());
  }
  policy_->on_arrival(*this, q);
  schedule_next_arrival();
}

void Engine::process_completion(int server) {
  ServerState& sv = servers_[server];
  const bool was_dummy = sv.dummy;
  sv.busy = false;
  sv.dummy = false;
  if (!was_dummy) --in_service_real_;
  if (opts_.trace) {
    std::ostringstream out;
    out << "completion server=" << server << (was_dummy ? " dummy" : "");
    note(out.str());
  }
  policy_->on_server_free(*this, server);
}

SimResult Engine::execute() {
  policy_->on_start(*this);
  schedule_next_arrival();
  if (job_window_ && target_started_ > 0 && total_rate_ <= 0.0) stop_ = true;

  while (!stop_ && !events_.empty()) {
    const Ev ev = events_.top();
    if (!job_window_ && ev.time > end_time_) break;
    events_.pop();
    advance_clock(ev.time);
    switch (ev.kind) {
      case EvKind::Arrival:
        process_arrival();
        break;
      case EvKind::Completion:
        process_completion(static_cast<int>(ev.entity));
        break;
      case EvKind::Timer:
        policy_->on_timer(*this, ev.entity);
        break;
    }
    if (opts_.audit) opts_.audit(*this);
  }
  if (!job_window_) {
    // Charge the tail of the measurement window to the integrator.
    advance_clock(end_time_);
  }

  SimResult r;
  r.seed = opts_.seed;
  r.end_time = clock_;
  r.measure_start_time = measure_time_known_ ? measure_time_ : clock_;
  r.unstable = unstable_;
  r.dummy_jobs = dummy_count_;
  r.queues.resize(g_.n_queues);
  double wait_total = 0.0;
  std::uint64_t measured_total = 0, arrivals_measured = 0;
  for (int q = 0; q < g_.n_queues; ++q) {
    QueueResult& qr = r.queues[q];
    qr.arrivals = arrivals_per_queue_[q];
    qr.measured = measured_per_queue_[q];
    qr.mean_wait = qr.measured ? wait_sum_per_queue_[q] / qr.measured : 0.0;
    wait_total += wait_sum_per_queue_[q];
    measured_total += qr.measured;
    arrivals_measured += qr.measured;
  }
  r.jobs_measured = measured_total;
  r.no_jobs = measured_total == 0;
  r.weighted_mean_wait = measured_total ? wait_total / measured_total : 0.0;
  r.mean_measured_size = measured_total ? measured_size_sum_ / measured_total : 0.0;
  const double window = clock_ - r.measure_start_time;
  r.time_avg_in_system = window > 0.0 ? area_ / window : 0.0;
  r.empirical_total_rate = window > 0.0 ? arrivals_measured / window : 0.0;
  policy_->collect(r.batch);
  return r;
}

}  // namespace

WeightedMean weighted_mean_wait(const std::vector<std::pair<double, double>>& rate_wait) {
  double num = 0.0, den = 0.0;
  for (const auto& [rate, wait] : rate_wait) {
    if (!(rate >= 0.0)) throw std::invalid_argument("rates must be non-negative");
    num += rate * wait;
    den += rate;
  }
  if (den <= 0.0) return {0.0, true};
  return {num / den, false};
}

std::string SimResult::to_record() const {
  std::ostringstream out;
  auto kv = [&out](const char* key, double v) {
    out << key << " = ";
    fmt(out, v);
    out << '\n';
  };
  out << "seed = " << seed << '\n';
  out << "jobs_measured = " << jobs_measured << '\n';
  kv("weighted_mean_wait", weighted_mean_wait);
  out << "no_jobs = " << (no_jobs ? 1 : 0) << '\n';
  out << "unstable = " << (unstable ? 1 : 0) << '\n';
  kv("end_time", end_time);
  kv("measure_start_time", measure_start_time);
  kv("time_avg_in_system", time_avg_in_system);
  kv("mean_measured_size", mean_measured_size);
  kv("empirical_total_rate", empirical_total_rate);
  out << "dummy_jobs = " << dummy_jobs << '\n';
  for (std::size_t q = 0; q < queues.size(); ++q) {
    out << "queue." << q << " = " << queues[q].arrivals << ' ' << queues[q].measured << ' ';
    fmt(out, queues[q].mean_wait);
    out << '\n';
  }
  if (batch.present) {
    out << "batch.count = " << batch.batches << '\n';
    kv("batch.interarrival_mean", batch.interarrival_mean);
    kv("batch.interarrival_var", batch.interarrival_var);
    kv("batch.wait_mean", batch.wait_mean);
    kv("batch.wait_var", batch.wait_var);
    out << "batch.wait_count = " << batch.wait_count << '\n';
    kv("batch.modified_service_mean", batch.modified_service_mean);
    kv("batch.modified_service_var", batch.modified_service_var);
    out << "batch.short = " << batch.short_count << '\n';
    out << "batch.long = " << batch.long_count << '\n';
    kv("batch.frac_long", batch.frac_long);
    kv("batch.slot_length", batch.slot_length);
    out << "batch.jobs = " << batch.batch_jobs << '\n';
    kv("batch.b_n", batch.b_n);
  }
  return out.str();
}

SimResult run(const BipartiteGraph& g, const RateVector& rates, const PolicySpec& policy,
              const JobSizeDist& size_dist, const RunOptions& opts) {
  Engine engine(g, rates, policy, size_dist, opts);
  return engine.execute();
}

}  // namespace flexsim
