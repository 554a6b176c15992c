#pragma once

#include <map>
#include <string>

namespace flexsim {

// One evaluated bound/formula, with the inputs echoed and validity flags.
struct BoundReport {
  std::string name;
  double value = 0.0;
  std::map<std::string, double> inputs;
  bool valid = true;
  std::string note;

  std::string to_text() const;
};

// M/M/1 mean waiting time in queue, rho / (1 - rho).
double mm1_wait(double rho);

// Erlang-C waiting probability for an M/M/c queue at offered load r = lambda/mu,
// evaluated with log-space accumulation so large c stays finite. Normalized so
// that erlang_c(c, r) / (c - r) is the mean wait of the matching birth-death
// chain (erlang_c(1, rho) = rho).
double erlang_c(int c, double r);

// Mean wait of one modular cluster run as an M/M/d queue at total rate eta:
// erlang_c(d, eta) / (d - eta).
double modular_cluster_wait(int d, double eta);

// GI/G/1 upper bound lambda * (sigma_a^2 + sigma_s^2) / (2 (1 - rho)).
double kingman_bound(double lambda, double sigma_a2, double sigma_s2, double rho);

struct BatchMoments {
  double mean = 0.0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  double variance = 0.0;
  bool in_assumption_range = true;  // (1-rho) n <= sum_lambda <= rho n
};

// Batch inter-arrival moments: mean rho*b_n/r and variance rho*b_n/r^2 at
// total arrival rate r = sum_lambda, with the bracket
// [b_n/n, rho/(1-rho) * b_n/n].
BatchMoments batch_interarrival_moments(int n, double rho, double b_n, double sum_lambda);

// Scaling curve c * ln(n) / d; the constant is caller-supplied.
double theorem1_delay_bound(double n, double d, double c);

}  // namespace flexsim
