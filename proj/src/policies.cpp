#include "flexsim/policies.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "flexsim/maxflow.hpp"
#include "flexsim/simcore.hpp"
#include "flexsim/topology.hpp"
#include "flexsim/welford.hpp"

namespace flexsim {

VQParams make_vq_params(int n, double rho, std::optional<double> b_n_override, int d) {
  if (n < 1 || d < 1) throw std::invalid_argument("make_vq_params: need n, d >= 1");
  if (!(rho > 0.0) || !(rho < 1.0))
    throw std::invalid_argument("make_vq_params: rho must be in (0, 1)");
  const ExpanderParams ep = theorem1_params(n, d, rho);
  VQParams p;
  p.rho = rho;
  p.rho_hat = ep.rho_hat;
  p.beta_n = ep.beta_n;
  p.epsilon = 0.5 * (1.0 - rho);
  p.b_n = b_n_override ? *b_n_override
                       : 320.0 / ((1.0 - rho) * (1.0 - rho)) * n * std::log(n) / ep.beta_n;
  if (!(p.b_n > 0.0)) throw std::invalid_argument("make_vq_params: batch size must be positive");
  p.slot_length = (rho + p.epsilon) * p.b_n / n;
  p.batch_jobs = static_cast<int>(std::llround(rho * p.b_n));
  if (p.batch_jobs < 1)
    throw std::invalid_argument("make_vq_params: batch rounds to fewer than one job");
  if (!(p.slot_length > 0.0))
    throw std::invalid_argument("make_vq_params: slot length must be positive");
  return p;
}

const char* PolicySpec::name() const {
  switch (kind) {
    case PolicyKind::Greedy: return "greedy";
    case PolicyKind::ModularGreedy: return "modular";
    case PolicyKind::VirtualQueue: return "virtual-queue";
    case PolicyKind::ExpandedModular: return "expanded-modular";
  }
  return "?";
}

PolicySpec greedy_policy() { return PolicySpec{}; }

PolicySpec modular_greedy_policy(ClusterPartition partition) {
  PolicySpec s;
  s.kind = PolicyKind::ModularGreedy;
  s.partition = std::move(partition);
  return s;
}

PolicySpec virtual_queue_policy(VQParams params) {
  PolicySpec s;
  s.kind = PolicyKind::VirtualQueue;
  s.vq = params;
  return s;
}

PolicySpec expanded_modular_policy(BipartiteGraph cluster_graph, ClusterPartition partition,
                                   RateVector rates, double rho) {
  PolicySpec s;
  s.kind = PolicyKind::ExpandedModular;
  s.cluster_graph = std::move(cluster_graph);
  s.partition = std::move(partition);
  s.cluster_size = s.partition.cluster_size;
  s.rates = std::move(rates);
  s.rho = rho;
  return s;
}

std::optional<std::vector<int>> find_batch_assignment(const BipartiteGraph& g,
                                                      const std::vector<int>& batch_queue_ids,
                                                      const std::vector<int>& idle_servers) {
  const int jobs = static_cast<int>(batch_queue_ids.size());
  const int slots = static_cast<int>(idle_servers.size());
  // Adjacency of each job onto the idle-server slots, in server index order.
  std::vector<char> idle_mark;
  std::vector<int> slot_of;  // server id -> slot, -1 otherwise
  int max_server = -1;
  for (int s : idle_servers) max_server = std::max(max_server, s);
  slot_of.assign(max_server + 1, -1);
  for (int k = 0; k < slots; ++k) slot_of[idle_servers[k]] = k;

  std::vector<std::vector<int>> adj(jobs);
  for (int k = 0; k < jobs; ++k) {
    const int q = batch_queue_ids[k];
    for (int s : g.queue_adj[q])
      if (s <= max_server && slot_of[s] >= 0) adj[k].push_back(slot_of[s]);
  }

  // Kuhn's augmenting paths, jobs in index order.
  std::vector<int> slot_owner(slots, -1);
  std::vector<char> visited(slots, 0);
  auto augment = [&](auto&& self, int job) -> bool {
    for (int slot : adj[job]) {
      if (visited[slot]) continue;
      visited[slot] = 1;
      if (slot_owner[slot] < 0 || self(self, slot_owner[slot])) {
        slot_owner[slot] = job;
        return true;
      }
    }
    return false;
  };
  int matched = 0;
  for (int k = 0; k < jobs; ++k) {
    std::fill(visited.begin(), visited.end(), 0);
    if (augment(augment, k)) ++matched;
  }
  if (matched != jobs) return std::nullopt;
  std::vector<int> assignment(jobs, -1);
  for (int slot = 0; slot < slots; ++slot)
    if (slot_owner[slot] >= 0) assignment[slot_owner[slot]] = idle_servers[slot];
  return assignment;
}

std::vector<double> cluster_choice_distribution(const std::vector<double>& flows, double rho) {
  if (flows.empty()) throw std::invalid_argument("cluster has no neighbors");
  if (!(rho > 0.0) || !(rho < 1.0)) throw std::invalid_argument("rho must be in (0, 1)");
  const double deg = static_cast<double>(flows.size());
  double total = 0.0;
  for (double f : flows) {
    if (!(f >= 0.0)) throw std::invalid_argument("flows must be non-negative");
    total += f;
  }
  std::vector<double> p(flows.size());
  if (total <= 0.0) {
    std::fill(p.begin(), p.end(), 1.0 / deg);
    return p;
  }
  const double routed = 0.5 * (1.0 + rho);
  const double uniform = 0.5 * (1.0 - rho) / deg;
  for (std::size_t i = 0; i < flows.size(); ++i)
    p[i] = flows[i] / total * routed + uniform;
  return p;
}

ExpandedModularPlan plan_expanded_modular(const BipartiteGraph& cluster_graph,
                                          const std::vector<double>& cluster_loads,
                                          double rho, int d_m) {
  if (static_cast<int>(cluster_loads.size()) != cluster_graph.n_queues)
    throw std::invalid_argument("cluster load vector does not match cluster graph");
  if (d_m < 1) throw std::invalid_argument("d_m must be >= 1");
  // Per-server-cluster capacity (1+rho)/2 * d_m, i.e. unit servers at slack
  // (1-rho)/2.
  const double cap = 0.5 * (1.0 + rho) * d_m;
  const double total = std::accumulate(cluster_loads.begin(), cluster_loads.end(), 0.0);

  const int nq = cluster_graph.n_queues, ns = cluster_graph.n_servers;
  FlowNetwork net(nq + ns + 2);
  const int source = 0, sink = nq + ns + 1;
  for (int q = 0; q < nq; ++q) net.add_edge(source, 1 + q, cluster_loads[q]);
  std::vector<int> ids;
  for (int q = 0; q < nq; ++q)
    for (int s : cluster_graph.queue_adj[q])
      ids.push_back(net.add_edge(1 + q, 1 + nq + s, FlowNetwork::kInf));
  for (int s = 0; s < ns; ++s) net.add_edge(1 + nq + s, sink, cap);
  const double flow = net.max_flow(source, sink);
  if (flow < total - 1e-9) {
    const auto reach = net.min_cut_source_side(source);
    std::ostringstream msg;
    msg << "expanded modular stage 1 infeasible: queue clusters {";
    double load = 0.0;
    std::vector<char> nbr(ns, 0);
    bool first = true;
    for (int q = 0; q < nq; ++q) {
      if (!reach[1 + q]) continue;
      msg << (first ? "" : ", ") << q;
      first = false;
      load += cluster_loads[q];
      for (int s : cluster_graph.queue_adj[q]) nbr[s] = 1;
    }
    const int k = static_cast<int>(std::count(nbr.begin(), nbr.end(), 1));
    msg << "} carry load " << load << " against capacity " << cap * k;
    throw std::runtime_error(msg.str());
  }

  ExpandedModularPlan plan;
  plan.edge_flow.reserve(ids.size());
  for (int id : ids) plan.edge_flow.push_back(net.flow_on(id));
  plan.choice.resize(ns);
  // Gather flows per server cluster in ascending queue-cluster order.
  std::vector<std::vector<double>> into(ns);
  std::vector<std::vector<int>> from(ns);
  std::size_t e = 0;
  for (int q = 0; q < nq; ++q)
    for (int s : cluster_graph.queue_adj[q]) {
      into[s].push_back(plan.edge_flow[e++]);
      from[s].push_back(q);
    }
  for (int s = 0; s < ns; ++s) {
    if (from[s].empty()) continue;
    const auto p = cluster_choice_distribution(into[s], rho);
    for (std::size_t i = 0; i < p.size(); ++i)
      plan.choice[s].emplace_back(from[s][i], p[i]);
    std::sort(plan.choice[s].begin(), plan.choice[s].end());
  }
  return plan;
}

namespace {

// ---------------------------------------------------------------------------

class GreedyPolicy final : public Policy {
 public:
  const char* name() const override { return "greedy"; }

  void on_arrival(SchedulerContext& ctx, int queue) override {
    for (int s : ctx.graph().queue_adj[queue]) {
      if (ctx.server_idle(s)) {
        ctx.start_service(s, queue);
        return;
      }
    }
  }

  void on_server_free(SchedulerContext& ctx, int server) override {
    // Longest connected queue, ties to the lowest queue index.
    int best = -1, best_len = 0;
    for (int q : ctx.graph().server_adj[server]) {
      const int len = ctx.queue_length(q);
      if (len > best_len) {
        best = q;
        best_len = len;
      }
    }
    if (best >= 0) ctx.start_service(server, best);
  }
};

// ---------------------------------------------------------------------------

class ModularGreedyPolicy final : public Policy {
 public:
  explicit ModularGreedyPolicy(const ClusterPartition& part, const BipartiteGraph& g)
      : part_(part) {
    part_.validate();
    const BipartiteGraph expected = build_modular(
        static_cast<int>(part_.queue_cluster.size()), part_.cluster_size, part_);
    if (!(expected == g))
      throw std::invalid_argument("modular policy: graph does not match the partition");
  }

  const char* name() const override { return "modular"; }

  void on_arrival(SchedulerContext& ctx, int queue) override {
    for (int s : part_.servers_of[part_.queue_cluster[queue]]) {
      if (ctx.server_idle(s)) {
        ctx.start_service(s, queue);
        return;
      }
    }
  }

  void on_server_free(SchedulerContext& ctx, int server) override {
    for (int q : part_.queues_of[part_.server_cluster[server]]) {
      if (ctx.queue_length(q) > 0) {
        ctx.start_service(server, q);
        return;
      }
    }
  }

 private:
  ClusterPartition part_;
};

// ---------------------------------------------------------------------------

// The virtual-queue batching policy. Arrivals close a batch every
// batch_jobs-th job; batches wait in a FIFO virtual queue and are served at
// slot boundaries l*s: either by a full batch assignment onto the idle set
// (short service), or by a greedy fallback that hands batch jobs to servers
// as they free up. Dummy jobs reset every idle server to busy at boundaries
// where a batch departed or the virtual queue is empty.
class VirtualQueuePolicy final : public Policy {
 public:
  VirtualQueuePolicy(const VQParams& p, const BipartiteGraph& g) : p_(p) {
    for (int q = 0; q < g.n_queues; ++q)
      if (g.queue_adj[q].empty())
        throw std::invalid_argument("virtual-queue policy: queue " + std::to_string(q) +
                                    " has no connected server");
  }

  const char* name() const override { return "virtual-queue"; }
  double slot_length() const override { return p_.slot_length; }

  void on_start(SchedulerContext& ctx) override { ctx.schedule_timer(0.0, 0); }

  void on_arrival(SchedulerContext& ctx, int queue) override {
    forming_.push_back(queue);
    if (static_cast<int>(forming_.size()) < p_.batch_jobs) return;
    Batch b;
    b.queue_ids = std::move(forming_);
    forming_.clear();
    b.formed_at = ctx.now();
    b.assigned.assign(b.queue_ids.size(), 0);
    b.unassigned = static_cast<int>(b.queue_ids.size());
    if (last_formed_ >= 0.0 && b.formed_at > ctx.measure_start())
      interarrival_.add(b.formed_at - last_formed_);
    last_formed_ = b.formed_at;
    vq_.push_back(std::move(b));
    if (vq_.size() == 1 && head_ == HeadState::None) {
      head_ = HeadState::Accumulating;
      vq_.front().head_at = ctx.now();
    }
  }

  void on_server_free(SchedulerContext& ctx, int server) override {
    if (head_ != HeadState::Fallback) return;  // stay idle, accumulate
    try_fallback_assign(ctx, server);
  }

  void on_timer(SchedulerContext& ctx, long slot) override {
    const double t = ctx.now();
    bool departed = false;
    if (head_ == HeadState::Fallback && vq_.front().unassigned == 0) {
      depart_head(ctx, t, /*short_service=*/false);
      departed = true;
    } else if (head_ == HeadState::Accumulating && vq_.front().head_at < t) {
      Batch& b = vq_.front();
      const auto idle = ctx.idle_servers();
      const auto assignment = find_batch_assignment(ctx.graph(), b.queue_ids, idle);
      if (assignment) {
        for (std::size_t k = 0; k < assignment->size(); ++k)
          ctx.start_service((*assignment)[k], b.queue_ids[k]);
        depart_head(ctx, t, /*short_service=*/true);
        departed = true;
      } else {
        head_ = HeadState::Fallback;
        // Servers reserved for the failed assignment become available now.
        for (int s : idle) try_fallback_assign(ctx, s);
      }
    }
    if (departed || vq_.empty())
      for (int s : ctx.idle_servers()) ctx.start_dummy(s);
    ctx.schedule_timer(static_cast<double>(slot + 1) * p_.slot_length, slot + 1);
  }

  void collect(BatchStats& out) const override {
    out.present = true;
    out.batches = departures_;
    out.interarrival_mean = interarrival_.mean;
    out.interarrival_var = interarrival_.variance();
    out.wait_mean = wait_.mean;
    out.wait_var = wait_.variance();
    out.wait_count = wait_.n;
    out.modified_service_mean = modified_service_.mean;
    out.modified_service_var = modified_service_.variance();
    out.short_count = short_;
    out.long_count = long_;
    out.frac_long =
        (short_ + long_) ? static_cast<double>(long_) / (short_ + long_) : 0.0;
    out.slot_length = p_.slot_length;
    out.batch_jobs = p_.batch_jobs;
    out.b_n = p_.b_n;
  }

 private:
  struct Batch {
    std::vector<int> queue_ids;  // one entry per job, batch-internal order
    double formed_at = 0.0;
    double head_at = -1.0;  // service start: formation if queue was empty
    std::vector<char> assigned;
    int unassigned = 0;
  };
  enum class HeadState { None, Accumulating, Fallback };

  void try_fallback_assign(SchedulerContext& ctx, int server) {
    Batch& b = vq_.front();
    for (std::size_t k = 0; k < b.queue_ids.size(); ++k) {
      if (b.assigned[k]) continue;
      if (ctx.graph().has_edge(b.queue_ids[k], server)) {
        b.assigned[k] = 1;
        --b.unassigned;
        ctx.start_service(server, b.queue_ids[k]);
        return;
      }
    }
  }

  void depart_head(SchedulerContext& ctx, double t, bool short_service) {
    const Batch& b = vq_.front();
    ++departures_;
    if (b.formed_at > ctx.measure_start()) {
      wait_.add(b.head_at - b.formed_at);
      const double service = t - b.head_at;
      const double slots = std::ceil(service / p_.slot_length - 1e-9);
      modified_service_.add(std::max(1.0, slots) * p_.slot_length);
      if (short_service)
        ++short_;
      else
        ++long_;
    }
    ctx.note(short_service ? "batch_depart short=1" : "batch_depart short=0");
    vq_.pop_front();
    if (!vq_.empty()) {
      head_ = HeadState::Accumulating;
      vq_.front().head_at = t;
    } else {
      head_ = HeadState::None;
    }
  }

  VQParams p_;
  std::deque<Batch> vq_;
  std::vector<int> forming_;
  HeadState head_ = HeadState::None;
  double last_formed_ = -1.0;

  Welford interarrival_, wait_, modified_service_;
  std::uint64_t short_ = 0, long_ = 0, departures_ = 0;
};

// ---------------------------------------------------------------------------

// Two-stage policy for the expanded modular architecture: a freeing server
// samples a neighboring queue cluster from the stage-1 flow distribution and
// serves its lowest-index non-empty queue, or idles an exponential(1) period
// when the chosen cluster is empty.
class ExpandedModularPolicy final : public Policy {
 public:
  ExpandedModularPolicy(const PolicySpec& spec, const BipartiteGraph& g) : part_(spec.partition) {
    part_.validate();
    if (spec.cluster_size != part_.cluster_size)
      throw std::invalid_argument("expanded modular policy: cluster size mismatch");
    const BipartiteGraph expected = build_expanded_modular(spec.cluster_graph, spec.cluster_size);
    if (!(expected == g))
      throw std::invalid_argument(
          "expanded modular policy: graph is not the product of the cluster graph");
    for (int q = 0; q < g.n_queues; ++q)
      if (part_.queue_cluster[q] != q / spec.cluster_size)
        throw std::invalid_argument("expanded modular policy: partition must be contiguous");
    for (int s = 0; s < g.n_servers; ++s)
      if (part_.server_cluster[s] != s / spec.cluster_size)
        throw std::invalid_argument("expanded modular policy: partition must be contiguous");
    if (static_cast<int>(spec.rates.size()) != g.n_queues)
      throw std::invalid_argument("expanded modular policy: rate vector length mismatch");
    std::vector<double> loads(spec.cluster_graph.n_queues, 0.0);
    for (int q = 0; q < g.n_queues; ++q) loads[part_.queue_cluster[q]] += spec.rates[q];
    plan_ = plan_expanded_modular(spec.cluster_graph, loads, spec.rho, spec.cluster_size);
  }

  const char* name() const override { return "expanded-modular"; }

  void on_start(SchedulerContext& ctx) override {
    for (int s = 0; s < ctx.graph().n_servers; ++s) choose(ctx, s);
  }

  void on_arrival(SchedulerContext&, int) override {}  // jobs wait to be fetched

  void on_server_free(SchedulerContext& ctx, int server) override { choose(ctx, server); }

  void on_timer(SchedulerContext& ctx, long server) override {
    const int s = static_cast<int>(server);
    if (ctx.server_idle(s)) choose(ctx, s);
  }

 private:
  void choose(SchedulerContext& ctx, int server) {
    const auto& choice = plan_.choice[part_.server_cluster[server]];
    const double u = ctx.policy_rng().uniform();
    double acc = 0.0;
    int cluster = choice.back().first;
    for (const auto& [q_cl, p] : choice) {
      acc += p;
      if (u < acc) {
        cluster = q_cl;
        break;
      }
    }
    for (int q : part_.queues_of[cluster]) {
      if (ctx.queue_length(q) > 0) {
        ctx.start_service(server, q);
        return;
      }
    }
    ctx.schedule_timer(ctx.now() + ctx.policy_rng().exponential(1.0), server);
  }

  ClusterPartition part_;
  ExpandedModularPlan plan_;
};

}  // namespace

std::unique_ptr<Policy> instantiate_policy(const PolicySpec& spec, const BipartiteGraph& g) {
  switch (spec.kind) {
    case PolicyKind::Greedy:
      return std::make_unique<GreedyPolicy>();
    case PolicyKind::ModularGreedy:
      return std::make_unique<ModularGreedyPolicy>(spec.partition, g);
    case PolicyKind::VirtualQueue:
      return std::make_unique<VirtualQueuePolicy>(spec.vq, g);
    case PolicyKind::ExpandedModular:
      return std::make_unique<ExpandedModularPolicy>(spec, g);
  }
  throw std::invalid_argument("unknown policy");
}

}  // namespace flexsim
