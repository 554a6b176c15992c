#pragma once

#include <string>

#include "flexsim/rng.hpp"

namespace flexsim {

// Job size distribution: unit-mean exponential, or log-normal with given
// mean and variance (parameters recovered by exact moment inversion).
struct JobSizeDist {
  enum class Kind { Exponential, LogNormal };

  Kind kind = Kind::Exponential;
  double mean = 1.0;
  double variance = 1.0;
  // Log-normal internals: mu = ln(m^2 / sqrt(v + m^2)), sigma^2 = ln(1 + v/m^2).
  double mu = 0.0;
  double sigma = 0.0;

  static JobSizeDist exponential();
  static JobSizeDist log_normal(double mean, double variance);

  std::string label() const;
};

double sample_job_size(const JobSizeDist& dist, Rng& rng);

}  // namespace flexsim
