#include "flexsim/analysis.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace flexsim {

std::string BoundReport::to_text() const {
  std::ostringstream out;
  out << "name = " << name << '\n';
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", value);
  out << "value = " << buf << '\n';
  for (const auto& [k, v] : inputs) {
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    out << k << " = " << buf << '\n';
  }
  out << "valid = " << (valid ? "true" : "false") << '\n';
  if (!note.empty()) out << "note = " << note << '\n';
  return out.str();
}

double mm1_wait(double rho) {
  if (!(rho >= 0.0) || rho >= 1.0) throw std::invalid_argument("mm1_wait requires 0 <= rho < 1");
  return rho / (1.0 - rho);
}

double erlang_c(int c, double r) {
  if (c < 1) throw std::invalid_argument("erlang_c requires c >= 1");
  if (!(r > 0.0) || !(r < c)) throw std::invalid_argument("erlang_c requires 0 < r < c");
  // Terms r^i / i! for i = 0..c-1 plus the tail term r^c / c! * 1/(1 - r/c),
  // accumulated as log-sum-exp.
  const double lr = std::log(r);
  const double log_tail = c * lr - std::lgamma(c + 1.0) - std::log(1.0 - r / c);
  double max_log = log_tail;
  for (int i = 0; i < c; ++i)
    max_log = std::max(max_log, i * lr - std::lgamma(i + 1.0));
  double denom = std::exp(log_tail - max_log);
  for (int i = 0; i < c; ++i)
    denom += std::exp(i * lr - std::lgamma(i + 1.0) - max_log);
  return std::exp(log_tail - max_log) / denom;
}

double modular_cluster_wait(int d, double eta) {
  if (!(eta > 0.0) || !(eta < d))
    throw std::invalid_argument("modular_cluster_wait requires 0 < eta < d");
  return erlang_c(d, eta) / (d - eta);
}

double kingman_bound(double lambda, double sigma_a2, double sigma_s2, double rho) {
  if (!(rho < 1.0)) throw std::invalid_argument("kingman_bound requires rho < 1");
  if (!(lambda >= 0.0) || !(sigma_a2 >= 0.0) || !(sigma_s2 >= 0.0))
    throw std::invalid_argument("kingman_bound requires non-negative inputs");
  return lambda * (sigma_a2 + sigma_s2) / (2.0 * (1.0 - rho));
}

BatchMoments batch_interarrival_moments(int n, double rho, double b_n, double sum_lambda) {
  if (n < 1 || !(rho > 0.0) || !(rho < 1.0) || !(b_n > 0.0) || !(sum_lambda > 0.0))
    throw std::invalid_argument("batch_interarrival_moments: bad inputs");
  BatchMoments m;
  m.mean = rho * b_n / sum_lambda;
  m.variance = rho * b_n / (sum_lambda * sum_lambda);
  m.mean_lower = b_n / n;
  m.mean_upper = rho / (1.0 - rho) * b_n / n;
  m.in_assumption_range =
      sum_lambda >= (1.0 - rho) * n - 1e-9 && sum_lambda <= rho * n + 1e-9;
  return m;
}

double theorem1_delay_bound(double n, double d, double c) {
  if (!(n >= 2.0) || !(d >= 1.0) || !(c > 0.0))
    throw std::invalid_argument("theorem1_delay_bound: bad inputs");
  return c * std::log(n) / d;
}

}  // namespace flexsim
