#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flexsim/analysis.hpp"
#include "flexsim/capacity.hpp"
#include "flexsim/config.hpp"
#include "flexsim/policies.hpp"
#include "flexsim/study.hpp"
#include "flexsim/topology.hpp"

namespace {

using namespace flexsim;

std::string g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

int cmd_gen_graph(const std::string& family, int n, int d, double avg_degree,
                  std::uint64_t seed, const std::string& cluster_graph_path,
                  const std::string& out_path) {
  BipartiteGraph g;
  if (family == "complete") {
    g = build_complete(n);
  } else if (family == "inflexible") {
    g = build_inflexible(n);
  } else if (family == "modular") {
    g = build_modular(n, d, contiguous_partition(n, d));
  } else if (family == "random-modular") {
    g = build_random_modular(n, d, seed).first;
  } else if (family == "regular") {
    g = build_random_regular_bipartite(n, d, seed);
  } else if (family == "erdos-renyi") {
    g = build_erdos_renyi_bipartite(n, avg_degree, seed);
  } else if (family == "expanded-modular") {
    if (cluster_graph_path.empty())
      throw ConfigError("expanded-modular needs --cluster-graph FILE");
    g = build_expanded_modular(read_graph_file(cluster_graph_path), d);
  } else {
    throw ConfigError("unknown family: " + family);
  }
  write_graph_file(g, out_path);
  std::cout << "wrote " << out_path << " (" << g.n_queues << " queues, " << g.n_servers
            << " servers, " << g.edge_count() << " edges)\n";
  return 0;
}

int cmd_check_capacity(const std::string& graph_path, const std::string& rates_path,
                       double slack) {
  const BipartiteGraph g = read_graph_file(graph_path);
  const RateVector rates = read_rates_file(rates_path);
  if (static_cast<int>(rates.size()) != g.n_queues)
    throw ConfigError("rates file length does not match the graph");
  const FeasibilityResult r = is_feasible(g, rates, slack);
  switch (r.verdict) {
    case Verdict::Feasible: {
      std::cout << "verdict = feasible\n";
      double max_load = 0.0;
      std::vector<double> load(g.n_servers, 0.0);
      const auto edges = g.edges();
      for (std::size_t e = 0; e < edges.size(); ++e) load[edges[e].second] += r.flow[e];
      for (double l : load) max_load = std::max(max_load, l);
      std::cout << "max_server_load = " << g9(max_load) << "\n";
      for (std::size_t e = 0; e < edges.size(); ++e)
        if (r.flow[e] > 1e-12)
          std::cout << "flow " << (edges[e].first + 1) << ' ' << (edges[e].second + 1)
                    << ' ' << g9(r.flow[e]) << "\n";
      break;
    }
    case Verdict::Boundary:
    case Verdict::Infeasible: {
      std::cout << "verdict = "
                << (r.verdict == Verdict::Boundary ? "boundary" : "infeasible") << "\n";
      std::cout << "violating_set =";
      for (int q : r.violating_set) std::cout << ' ' << (q + 1);
      std::cout << "\nset_rate_sum = " << g9(r.set_rate_sum)
                << "\nneighborhood_size = " << r.neighborhood_size << "\n";
      break;
    }
  }
  return 0;
}

int cmd_bounds(const std::string& formula, const std::vector<std::string>& args) {
  std::map<std::string, double> kv;
  for (const std::string& a : args) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw ConfigError("bounds arguments look like key=value");
    kv[a.substr(0, eq)] = std::stod(a.substr(eq + 1));
  }
  auto need = [&kv](const std::string& k) {
    auto it = kv.find(k);
    if (it == kv.end()) throw ConfigError("missing --arg " + k + "=...");
    return it->second;
  };
  BoundReport rep;
  rep.name = formula;
  rep.inputs = kv;
  if (formula == "mm1-wait") {
    rep.value = mm1_wait(need("rho"));
  } else if (formula == "erlang-c") {
    rep.value = erlang_c(static_cast<int>(need("c")), need("r"));
  } else if (formula == "modular-cluster-wait") {
    rep.value = modular_cluster_wait(static_cast<int>(need("d")), need("eta"));
  } else if (formula == "kingman") {
    const double rho = need("rho");
    rep.value = kingman_bound(need("lambda"), need("sigma_a2"), need("sigma_s2"), rho);
    rep.valid = rho < 1.0;
  } else if (formula == "batch-moments") {
    const BatchMoments m = batch_interarrival_moments(
        static_cast<int>(need("n")), need("rho"), need("b_n"), need("sum_lambda"));
    rep.value = m.mean;
    rep.inputs["mean_lower"] = m.mean_lower;
    rep.inputs["mean_upper"] = m.mean_upper;
    rep.inputs["variance"] = m.variance;
    rep.valid = m.in_assumption_range;
    if (!m.in_assumption_range) rep.note = "sum_lambda outside the assumed range";
  } else if (formula == "theorem1-delay") {
    rep.value = theorem1_delay_bound(need("n"), need("d"), need("c"));
  } else {
    throw ConfigError(
        "unknown formula (mm1-wait | erlang-c | modular-cluster-wait | kingman | "
        "batch-moments | theorem1-delay)");
  }
  std::cout << rep.to_text();
  return 0;
}

int cmd_simulate(const std::string& config_path) {
  const Scenario scenario = parse_scenario_file(config_path);
  const StudyResult study = run_study(scenario);
  if (!scenario.csv_path.empty()) {
    emit_csv(study, scenario.csv_path);
    std::cout << "wrote " << scenario.csv_path << "\n";
  }
  std::cout << "scenario = " << study.scenario << "\nreplications = "
            << study.replications.size() << "\nmedian_mean_wait = " << g9(study.median)
            << "\np25 = " << g9(study.p25) << "\np75 = " << g9(study.p75) << "\n";
  for (std::size_t i = 0; i < study.replications.size(); ++i) {
    const SimResult& r = study.replications[i];
    std::cout << "replicate " << (i + 1) << ": jobs = " << r.jobs_measured
              << ", mean_wait = " << g9(r.weighted_mean_wait)
              << (r.unstable ? " (unstable)" : "") << "\n";
  }
  return 0;
}

int cmd_reproduce_figure(const std::string& n_csv, int reps, std::uint64_t seed,
                         const std::string& out_dir) {
  std::vector<int> ns;
  std::stringstream ss(n_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) ns.push_back(std::stoi(tok));
  if (ns.empty()) throw ConfigError("--n expects a comma-separated list, e.g. 64,216,512");
  std::filesystem::create_directories(out_dir);

  const std::vector<StudyResult> studies = reproduce_figure(ns, 0.5, reps, seed);
  const std::size_t half = studies.size() / 2;
  const std::vector<StudyResult> exp_studies(studies.begin(), studies.begin() + half);
  const std::vector<StudyResult> logn_studies(studies.begin() + half, studies.end());
  emit_csv(exp_studies, out_dir + "/figure_exponential.csv");
  emit_csv(logn_studies, out_dir + "/figure_lognormal.csv");

  std::ofstream dat(out_dir + "/figure_summary.dat", std::ios::binary);
  if (!dat) throw std::runtime_error("cannot open summary file");
  dat << "# n d exp_median exp_p25 exp_p75 logn_median\n";
  for (std::size_t i = 0; i < exp_studies.size(); ++i) {
    dat << exp_studies[i].n << ' ' << exp_studies[i].d << ' ' << g9(exp_studies[i].median)
        << ' ' << g9(exp_studies[i].p25) << ' ' << g9(exp_studies[i].p75) << ' '
        << g9(logn_studies[i].median) << '\n';
  }
  std::cout << "wrote " << out_dir << "/figure_exponential.csv, figure_lognormal.csv, "
            << "figure_summary.dat\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexsim: bipartite queueing architectures, policies and experiments"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-graph", "Generate a flexibility architecture");
  std::string family, out_path, cluster_graph_path;
  int n = 0, d = 0;
  double avg_degree = 0.0;
  std::uint64_t seed = 1;
  gen->add_option("--family", family,
                  "complete|inflexible|modular|random-modular|regular|erdos-renyi|"
                  "expanded-modular")
      ->required();
  gen->add_option("--n", n, "number of queues/servers");
  gen->add_option("--d", d, "degree / cluster size");
  gen->add_option("--avg-degree", avg_degree, "erdos-renyi average degree");
  gen->add_option("--seed", seed, "random seed");
  gen->add_option("--cluster-graph", cluster_graph_path, "cluster graph file");
  gen->add_option("--out", out_path, "output file")->required();

  auto* cap = app.add_subcommand("check-capacity", "Feasibility of a rate vector");
  std::string graph_path, rates_path;
  double slack = 0.0;
  cap->add_option("--graph", graph_path, "graph file")->required();
  cap->add_option("--rates", rates_path, "rates file, one rate per line")->required();
  cap->add_option("--slack", slack, "per-server capacity margin");

  auto* sim = app.add_subcommand("simulate", "Run a scenario config");
  std::string config_path;
  sim->add_option("--config", config_path, "scenario file")->required();

  auto* fig = app.add_subcommand("reproduce-figure", "Scaled delay study");
  std::string n_csv = "64,216,512";
  int reps = 50;
  std::uint64_t fig_seed = 1;
  std::string out_dir = "figure-out";
  fig->add_option("--n", n_csv, "comma-separated system sizes");
  fig->add_option("--reps", reps, "replications per size");
  fig->add_option("--seed", fig_seed, "base seed");
  fig->add_option("--out", out_dir, "output directory");

  auto* bounds = app.add_subcommand("bounds", "Evaluate a closed-form bound");
  std::string formula;
  std::vector<std::string> bound_args;
  bounds->add_option("--formula", formula, "formula name")->required();
  bounds->add_option("--arg", bound_args, "key=value inputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed())
      return cmd_gen_graph(family, n, d, avg_degree, seed, cluster_graph_path, out_path);
    if (cap->parsed()) return cmd_check_capacity(graph_path, rates_path, slack);
    if (sim->parsed()) return cmd_simulate(config_path);
    if (fig->parsed()) return cmd_reproduce_figure(n_csv, reps, fig_seed, out_dir);
    if (bounds->parsed()) return cmd_bounds(formula, bound_args);
  } catch (const flexsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
