#include "flexsim/config.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace flexsim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

struct KvTable {
  std::map<std::string, std::string> entries;  // "section.key" -> value
  std::set<std::string> consumed;

  bool has(const std::string& key) const { return entries.count(key) > 0; }

  std::string get(const std::string& key, const std::string& fallback) {
    consumed.insert(key);
    auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) {
    consumed.insert(key);
    auto it = entries.find(key);
    if (it == entries.end()) throw ConfigError("missing config key: " + key);
    return it->second;
  }

  double number(const std::string& key, double fallback) {
    return parse_number(key, get(key, format(fallback)));
  }

  double require_number(const std::string& key) { return parse_number(key, require(key)); }

  long integer(const std::string& key, long fallback) {
    const double v = number(key, static_cast<double>(fallback));
    if (v != std::floor(v)) throw ConfigError("config key must be an integer: " + key);
    return static_cast<long>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    const std::string v = get(key, fallback ? "true" : "false");
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("config key must be a boolean: " + key);
  }

  void reject_unknown() const {
    for (const auto& [k, v] : entries)
      if (!consumed.count(k)) throw ConfigError("unknown config key: " + k);
  }

 private:
  static std::string format(double v) {
    std::ostringstream out;
    out << v;
    return out.str();
  }
  static double parse_number(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(text, &pos);
    } catch (const std::exception&) {
      throw ConfigError("config key is not a number: " + key + " = " + text);
    }
    if (pos != text.size())
      throw ConfigError("config key is not a number: " + key + " = " + text);
    return v;
  }
};

KvTable read_table(std::istream& in) {
  KvTable t;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("malformed section header at line " +
                                                std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("empty section name at line " +
                                             std::to_string(lineno));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("expected 'key = value' at line " + std::to_string(lineno));
    if (section.empty()) throw ConfigError("key outside any [section] at line " +
                                           std::to_string(lineno));
    const std::string full = section + "." + key;
    if (t.entries.count(full)) throw ConfigError("duplicate config key: " + full);
    t.entries[full] = value;
  }
  return t;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
  KvTable t = read_table(in);
  Scenario s;

  s.name = t.get("study.scenario", s.name);
  s.replications = static_cast<int>(t.integer("study.replications", 1));
  if (s.replications < 1) throw ConfigError("study.replications must be >= 1");
  s.base_seed = static_cast<std::uint64_t>(t.integer("study.seed", 1));
  s.force_identical_seeds = t.boolean("study.force_identical_seeds", false);
  s.csv_path = t.get("study.csv", "");

  TopologySpec& topo = s.topology;
  topo.family = t.require("topology.family");
  static const std::set<std::string> families = {
      "complete", "inflexible", "modular", "random-modular",
      "regular",  "erdos-renyi", "expanded-modular", "file"};
  if (!families.count(topo.family))
    throw ConfigError("unknown topology.family: " + topo.family);
  if (topo.family == "file") {
    topo.file = t.require("topology.file");
  } else {
    topo.n = static_cast<int>(t.require_number("topology.n"));
    if (topo.n < 1) throw ConfigError("topology.n must be >= 1");
  }
  topo.d = static_cast<int>(t.integer("topology.d", 0));
  topo.avg_degree = t.number("topology.avg_degree", 0.0);
  topo.cluster_degree = static_cast<int>(t.integer("topology.cluster_degree", 0));
  topo.seed = static_cast<std::uint64_t>(t.integer("topology.seed", 0));
  if (topo.family == "modular" || topo.family == "random-modular" ||
      topo.family == "expanded-modular" || topo.family == "regular") {
    if (topo.d < 1) throw ConfigError("topology.d is required for family " + topo.family);
    if (topo.family != "regular" && topo.n % topo.d != 0)
      throw ConfigError("topology.d must divide topology.n");
    if (topo.family == "regular" && topo.d > topo.n)
      throw ConfigError("topology.d must be <= topology.n");
  }
  if (topo.family == "erdos-renyi" && !(topo.avg_degree > 0.0))
    throw ConfigError("topology.avg_degree is required for erdos-renyi");
  if (topo.family == "expanded-modular") {
    if (topo.cluster_degree < 1)
      throw ConfigError("topology.cluster_degree is required for expanded-modular");
    if (topo.cluster_degree > topo.n / topo.d)
      throw ConfigError("topology.cluster_degree exceeds the cluster count");
  }

  RateSpec& rates = s.rates;
  rates.kind = t.require("rates.kind");
  static const std::set<std::string> rate_kinds = {"uniform", "file", "adversarial",
                                                   "sample-rate-class"};
  if (!rate_kinds.count(rates.kind)) throw ConfigError("unknown rates.kind: " + rates.kind);
  if (rates.kind == "uniform") {
    rates.value = t.require_number("rates.value");
    if (!(rates.value >= 0.0)) throw ConfigError("rates.value must be >= 0");
  } else if (rates.kind == "file") {
    rates.file = t.require("rates.file");
  } else {
    rates.u = t.require_number("rates.u");
    rates.rho = t.require_number("rates.rho");
    if (!(rates.rho > 0.0) || !(rates.rho < 1.0))
      throw ConfigError("rates.rho must be in (0, 1)");
    rates.seed = static_cast<std::uint64_t>(t.integer("rates.seed", 1));
    if (rates.kind == "adversarial" && !(rates.u > 1.0))
      throw ConfigError("adversarial rates require rates.u > 1");
    if (rates.kind == "sample-rate-class" && !(rates.u > 0.0))
      throw ConfigError("rates.u must be > 0");
  }

  PolicyConfig& pol = s.policy;
  pol.kind = t.get("policy.kind", "greedy");
  static const std::set<std::string> policies = {"greedy", "modular", "virtual-queue",
                                                 "expanded-modular"};
  if (!policies.count(pol.kind)) throw ConfigError("unknown policy.kind: " + pol.kind);
  pol.rho = t.number("policy.rho", 0.5);
  if (!(pol.rho > 0.0) || !(pol.rho < 1.0)) throw ConfigError("policy.rho must be in (0, 1)");
  pol.b_n_mode = t.get("policy.b_n_mode", "theorem1");
  if (pol.b_n_mode != "theorem1" && pol.b_n_mode != "figure" && pol.b_n_mode != "explicit")
    throw ConfigError("policy.b_n_mode must be theorem1 | figure | explicit");
  pol.b_n = t.number("policy.b_n", 0.0);
  if (pol.b_n_mode == "explicit" && !(pol.b_n > 0.0))
    throw ConfigError("policy.b_n_mode = explicit requires policy.b_n > 0");
  if (pol.kind == "modular" &&
      !(s.topology.family == "modular" || s.topology.family == "random-modular"))
    throw ConfigError("policy.kind = modular requires a modular topology");
  if (pol.kind == "expanded-modular" && s.topology.family != "expanded-modular")
    throw ConfigError("policy.kind = expanded-modular requires an expanded-modular topology");

  SizeSpec& size = s.size;
  size.kind = t.get("sim.size_dist", "exponential");
  if (size.kind != "exponential" && size.kind != "lognormal")
    throw ConfigError("sim.size_dist must be exponential | lognormal");
  size.mean = t.number("sim.mean", 1.0);
  size.variance = t.number("sim.variance", 10.0);
  if (size.kind == "lognormal" && (!(size.mean > 0.0) || !(size.variance >= 0.0)))
    throw ConfigError("lognormal sizes require mean > 0 and variance >= 0");

  const std::string hk = t.get("sim.horizon_kind", "time");
  if (hk == "time")
    s.horizon.kind = Horizon::Kind::Time;
  else if (hk == "slots")
    s.horizon.kind = Horizon::Kind::Slots;
  else if (hk == "jobs")
    s.horizon.kind = Horizon::Kind::Jobs;
  else
    throw ConfigError("sim.horizon_kind must be time | slots | jobs");
  s.horizon.value = t.require_number("sim.horizon");
  if (!(s.horizon.value > 0.0)) throw ConfigError("sim.horizon must be positive");
  if (s.horizon.kind == Horizon::Kind::Slots && pol.kind != "virtual-queue")
    throw ConfigError("slot horizons require policy.kind = virtual-queue");
  s.burn_in = t.number("sim.burn_in", -1.0);
  if (s.burn_in >= 0.0 && s.burn_in >= s.horizon.value)
    throw ConfigError("sim.burn_in must be below sim.horizon");

  t.reject_unknown();
  return s;
}

Scenario parse_scenario_string(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in);
}

Scenario parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_scenario(in);
}

RateVector read_rates_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rates file: " + path);
  RateVector rates;
  double v;
  while (in >> v) rates.push_back(v);
  if (rates.empty()) throw ConfigError("rates file is empty: " + path);
  return rates;
}

}  // namespace flexsim
