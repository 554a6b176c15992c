#include "flexsim/job_size.hpp"

#include <cmath>
#include <stdexcept>

namespace flexsim {

JobSizeDist JobSizeDist::exponential() {
  JobSizeDist d;
  d.kind = Kind::Exponential;
  d.mean = 1.0;
  d.variance = 1.0;
  return d;
}

JobSizeDist JobSizeDist::log_normal(double mean, double variance) {
  if (!(mean > 0.0) || !(variance >= 0.0))
    throw std::invalid_argument("log-normal needs mean > 0, variance >= 0");
  JobSizeDist d;
  d.kind = Kind::LogNormal;
  d.mean = mean;
  d.variance = variance;
  const double s2 = std::log(1.0 + variance / (mean * mean));
  d.sigma = std::sqrt(s2);
  d.mu = std::log(mean * mean / std::sqrt(variance + mean * mean));
  return d;
}

std::string JobSizeDist::label() const {
  return kind == Kind::Exponential ? "exponential" : "lognormal";
}

double sample_job_size(const JobSizeDist& dist, Rng& rng) {
  if (dist.kind == JobSizeDist::Kind::Exponential) return rng.exponential(1.0);
  return std::exp(dist.mu + dist.sigma * rng.normal());
}

}  // namespace flexsim
