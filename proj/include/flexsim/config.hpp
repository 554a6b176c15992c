#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>

#include "flexsim/simcore.hpp"

namespace flexsim {

// Scenario/config problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TopologySpec {
  std::string family;        // complete | inflexible | modular | random-modular |
                             // regular | erdos-renyi | expanded-modular | file
  int n = 0;
  int d = 0;                 // degree / cluster size, family-dependent
  double avg_degree = 0.0;   // erdos-renyi
  int cluster_degree = 0;    // expanded-modular: degree of the cluster graph
  std::uint64_t seed = 0;    // 0 = derive from the replication seed
  std::string file;          // family = file
};

struct RateSpec {
  std::string kind;  // uniform | file | adversarial | sample-rate-class
  double value = 0.0;        // uniform rate per queue
  std::string file;
  double u = 0.0;            // adversarial / sampler fluctuation bound
  double rho = 0.0;          // adversarial / sampler intensity
  std::uint64_t seed = 1;    // sampler
};

struct PolicyConfig {
  std::string kind = "greedy";  // greedy | modular | virtual-queue | expanded-modular
  double rho = 0.5;
  std::string b_n_mode = "theorem1";  // theorem1 | figure | explicit
  double b_n = 0.0;                   // explicit mode
};

struct SizeSpec {
  std::string kind = "exponential";  // exponential | lognormal
  double mean = 1.0;
  double variance = 10.0;
};

struct Scenario {
  std::string name = "scenario";
  TopologySpec topology;
  RateSpec rates;
  PolicyConfig policy;
  SizeSpec size;
  Horizon horizon{Horizon::Kind::Time, 1000.0};
  double burn_in = -1.0;
  int replications = 1;
  std::uint64_t base_seed = 1;
  bool force_identical_seeds = false;  // testing aid: every replication reuses base_seed+1
  std::string csv_path;
};

// Flat "key = value" text with one [section] per component; see README for
// the schema. Throws ConfigError on anything malformed.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_string(const std::string& text);
Scenario parse_scenario_file(const std::string& path);

RateVector read_rates_file(const std::string& path);

}  // namespace flexsim
