#include "flexsim/study.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <limits>
#include <optional>
#include <sstream>
#include <thread>

#include "flexsim/analysis.hpp"
#include "flexsim/policies.hpp"
#include "flexsim/topology.hpp"

namespace flexsim {

namespace {

struct BuiltSystem {
  BipartiteGraph graph;
  std::optional<ClusterPartition> partition;
  std::optional<BipartiteGraph> cluster_graph;
};

BuiltSystem build_topology(const TopologySpec& t, std::uint64_t replication_seed) {
  const std::uint64_t seed = t.seed ? t.seed : replication_seed;
  BuiltSystem b;
  if (t.family == "complete") {
    b.graph = build_complete(t.n);
  } else if (t.family == "inflexible") {
    b.graph = build_inflexible(t.n);
  } else if (t.family == "modular") {
    b.partition = contiguous_partition(t.n, t.d);
    b.graph = build_modular(t.n, t.d, *b.partition);
  } else if (t.family == "random-modular") {
    auto [g, part] = build_random_modular(t.n, t.d, seed);
    b.graph = std::move(g);
    b.partition = std::move(part);
  } else if (t.family == "regular") {
    b.graph = build_random_regular_bipartite(t.n, t.d, seed);
  } else if (t.family == "erdos-renyi") {
    b.graph = build_erdos_renyi_bipartite(t.n, t.avg_degree, seed);
  } else if (t.family == "expanded-modular") {
    const int clusters = t.n / t.d;
    b.cluster_graph = build_random_regular_bipartite(clusters, t.cluster_degree, seed);
    b.graph = build_expanded_modular(*b.cluster_graph, t.d);
    b.partition = contiguous_partition(t.n, t.d);
  } else if (t.family == "file") {
    b.graph = read_graph_file(t.file);
  } else {
    throw ConfigError("unknown topology family: " + t.family);
  }
  return b;
}

RateVector build_rates(const RateSpec& r, int n, int d) {
  if (r.kind == "uniform") return RateVector(n, r.value);
  if (r.kind == "file") {
    RateVector rates = read_rates_file(r.file);
    if (static_cast<int>(rates.size()) != n)
      throw ConfigError("rates file length does not match the topology");
    return rates;
  }
  if (r.kind == "adversarial") return adversarial_modular_rates(n, d, r.u, r.rho);
  if (r.kind == "sample-rate-class") {
    Rng rng(r.seed);
    return sample_rate_class(n, r.u, r.rho, rng);
  }
  throw ConfigError("unknown rates kind: " + r.kind);
}

JobSizeDist build_size_dist(const SizeSpec& s) {
  if (s.kind == "exponential") return JobSizeDist::exponential();
  return JobSizeDist::log_normal(s.mean, s.variance);
}

PolicySpec build_policy(const Scenario& s, const BuiltSystem& sys, const RateVector& rates) {
  if (s.policy.kind == "greedy") return greedy_policy();
  if (s.policy.kind == "modular") {
    if (!sys.partition) throw ConfigError("modular policy requires a clustered topology");
    return modular_greedy_policy(*sys.partition);
  }
  if (s.policy.kind == "virtual-queue") {
    std::optional<double> override;
    const int n = sys.graph.n_queues;
    const int d = std::max(1, s.topology.d);
    if (s.policy.b_n_mode == "figure")
      override = n * std::log(static_cast<double>(n)) / d;
    else if (s.policy.b_n_mode == "explicit")
      override = s.policy.b_n;
    return virtual_queue_policy(make_vq_params(n, s.policy.rho, override, d));
  }
  if (s.policy.kind == "expanded-modular") {
    if (!sys.cluster_graph || !sys.partition)
      throw ConfigError("expanded-modular policy requires the expanded-modular topology");
    return expanded_modular_policy(*sys.cluster_graph, *sys.partition, rates, s.policy.rho);
  }
  throw ConfigError("unknown policy kind: " + s.policy.kind);
}

}  // namespace

int worker_count() {
  if (const char* env = std::getenv("FLEXSIM_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

double nearest_rank_percentile(std::vector<double> values, double percent) {
  if (values.empty()) throw std::invalid_argument("percentile of an empty sample");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  std::size_t rank = static_cast<std::size_t>(std::ceil(percent / 100.0 * n));
  rank = std::min(std::max<std::size_t>(rank, 1), n);
  return values[rank - 1];
}

double empirical_kingman_bound(const SimResult& r) {
  if (!r.batch.present || r.batch.interarrival_mean <= 0.0)
    return std::numeric_limits<double>::quiet_NaN();
  const double lambda = 1.0 / r.batch.interarrival_mean;
  const double rho_tilde = r.batch.modified_service_mean / r.batch.interarrival_mean;
  if (rho_tilde >= 1.0) return std::numeric_limits<double>::quiet_NaN();
  return kingman_bound(lambda, r.batch.interarrival_var, r.batch.modified_service_var,
                       rho_tilde);
}

StudyResult run_study(const Scenario& scenario) {
  StudyResult out;
  out.scenario = scenario.name;
  out.policy = scenario.policy.kind;
  out.size_dist = scenario.size.kind;
  out.base_seed = scenario.base_seed;
  out.d = scenario.topology.d;

  const int reps = scenario.replications;
  out.replications.resize(reps);
  out.seeds.resize(reps);

  auto one = [&scenario](std::uint64_t seed) {
    BuiltSystem sys = build_topology(scenario.topology, seed);
    const int n = sys.graph.n_queues;
    const RateVector rates = build_rates(scenario.rates, n, scenario.topology.d);
    const PolicySpec policy = build_policy(scenario, sys, rates);
    RunOptions opts;
    opts.horizon = scenario.horizon;
    opts.burn_in = scenario.burn_in;
    opts.seed = seed;
    return run(sys.graph, rates, policy, build_size_dist(scenario.size), opts);
  };

  const int workers = std::min(worker_count(), reps);
  if (workers <= 1) {
    for (int i = 0; i < reps; ++i) {
      const std::uint64_t seed =
          scenario.force_identical_seeds ? scenario.base_seed + 1 : scenario.base_seed + 1 + i;
      out.seeds[i] = seed;
      out.replications[i] = one(seed);
    }
  } else {
    std::vector<std::future<SimResult>> futures(reps);
    // std::async with a bounded window keeps at most `workers` replications
    // in flight; results land in replicate order regardless of scheduling.
    int launched = 0, collected = 0;
    while (collected < reps) {
      while (launched < reps && launched - collected < workers) {
        const std::uint64_t seed = scenario.force_identical_seeds
                                       ? scenario.base_seed + 1
                                       : scenario.base_seed + 1 + launched;
        out.seeds[launched] = seed;
        futures[launched] = std::async(std::launch::async, one, seed);
        ++launched;
      }
      out.replications[collected] = futures[collected].get();
      ++collected;
    }
  }

  // n (and d) echo from the topology; for file-based graphs read the size off
  // the first replication.
  out.n = scenario.topology.n ? scenario.topology.n
                              : static_cast<int>(out.replications.front().queues.size());

  std::vector<double> means;
  means.reserve(reps);
  for (const SimResult& r : out.replications) means.push_back(r.weighted_mean_wait);
  out.p25 = nearest_rank_percentile(means, 25.0);
  out.median = nearest_rank_percentile(means, 50.0);
  out.p75 = nearest_rank_percentile(means, 75.0);
  return out;
}

std::vector<StudyResult> reproduce_figure(const std::vector<int>& n_list, double rho,
                                          int replications, std::uint64_t seed) {
  std::vector<StudyResult> out;
  for (const std::string& dist : {std::string("exponential"), std::string("lognormal")}) {
    for (int n : n_list) {
      const int d = static_cast<int>(std::llround(std::pow(static_cast<double>(n), 2.0 / 3.0)));
      if (d < 2) throw ConfigError("reproduce_figure requires round(n^(2/3)) >= 2");
      Scenario s;
      std::ostringstream name;
      name << "figure-" << (dist == "exponential" ? "exp" : "logn") << "-n" << n;
      s.name = name.str();
      s.topology.family = "regular";
      s.topology.n = n;
      s.topology.d = d;
      s.topology.seed = 0;  // fresh random graph per replication
      s.rates.kind = "uniform";
      s.rates.value = 0.5;
      s.policy.kind = "virtual-queue";
      s.policy.rho = rho;
      s.policy.b_n_mode = "figure";
      s.size.kind = dist;
      s.size.mean = 1.0;
      s.size.variance = 10.0;
      s.horizon = Horizon{Horizon::Kind::Slots, 1e4};
      s.burn_in = 1000.0;
      s.replications = replications;
      s.base_seed = seed;
      out.push_back(run_study(s));
    }
  }
  return out;
}

namespace {

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace

std::string csv_text(const std::vector<StudyResult>& studies) {
  std::ostringstream out;
  out << "scenario,n,d,policy,size_dist,replicate,seed,jobs,mean_wait,p25,median,p75,"
         "frac_long_service,batch_wait_mean,kingman_bound\n";
  for (const StudyResult& st : studies) {
    for (std::size_t i = 0; i < st.replications.size(); ++i) {
      const SimResult& r = st.replications[i];
      out << st.scenario << ',' << st.n << ',' << st.d << ',' << st.policy << ','
          << st.size_dist << ',' << (i + 1) << ',' << st.seeds[i] << ',' << r.jobs_measured
          << ',' << g9(r.weighted_mean_wait) << ",,,,";
      if (r.batch.present) {
        out << g9(r.batch.frac_long) << ',' << g9(r.batch.wait_mean) << ',';
        const double kb = empirical_kingman_bound(r);
        out << (std::isnan(kb) ? "" : g9(kb));
      } else {
        out << ",,";
      }
      out << '\n';
    }
    std::uint64_t jobs = 0;
    for (const SimResult& r : st.replications) jobs += r.jobs_measured;
    out << st.scenario << ',' << st.n << ',' << st.d << ',' << st.policy << ','
        << st.size_dist << ",agg," << st.base_seed << ',' << jobs << ",,"
        << g9(st.p25) << ',' << g9(st.median) << ',' << g9(st.p75) << ",,,\n";
  }
  return out.str();
}

void emit_csv(const std::vector<StudyResult>& studies, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << csv_text(studies);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_csv(const StudyResult& study, const std::string& path) {
  emit_csv(std::vector<StudyResult>{study}, path);
}

}  // namespace flexsim
