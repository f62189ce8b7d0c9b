#include "qtm4f/relaxation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "qtm4f/errors.hpp"

namespace qtm4f {

RelaxationModel::RelaxationModel(std::vector<ArrheniusProcess> processes)
    : processes_(std::move(processes)) {
  if (processes_.empty() || processes_.size() > kMaxProcesses)
    throw DomainError("a relaxation model holds 1 to 4 processes");
  for (const auto& p : processes_) {
    if (!std::isfinite(p.tau0) || !(p.tau0 > 0.0))
      throw DomainError("tau0 must be finite and positive");
    if (!std::isfinite(p.delta) || p.delta < 0.0)
      throw DomainError("barrier must be finite and non-negative");
  }
  std::stable_sort(processes_.begin(), processes_.end(),
                   [](const auto& a, const auto& b) { return a.delta < b.delta; });
}

double log_model_lifetime(const RelaxationModel& model, double T) {
  if (!std::isfinite(T) || !(T > 0.0)) throw DomainError("temperature must be positive");
  // ln tau = -logsumexp_i(-ln tau0_i - delta_i / T)
  double zmax = -std::numeric_limits<double>::infinity();
  for (const auto& p : model.processes()) zmax = std::max(zmax, -std::log(p.tau0) - p.delta / T);
  double sum = 0.0;
  for (const auto& p : model.processes()) sum += std::exp(-std::log(p.tau0) - p.delta / T - zmax);
  return -(zmax + std::log(sum));
}

double model_lifetime(const RelaxationModel& model, double T) {
  return std::exp(log_model_lifetime(model, T));
}

void RelaxationDataset::validate() const {
  for (const auto& pt : points) {
    if (!std::isfinite(pt.temperature) || !(pt.temperature > 0.0))
      throw DomainError("dataset temperatures must be positive");
    if (!std::isfinite(pt.tau) || !(pt.tau > 0.0))
      throw DomainError("dataset lifetimes must be positive");
    if (pt.sigma_log_tau && (!std::isfinite(*pt.sigma_log_tau) || !(*pt.sigma_log_tau > 0.0)))
      throw DomainError("sigma_ln_tau must be positive when given");
  }
}

RelaxationDataset synthesize(const RelaxationModel& model, const std::vector<double>& temperatures,
                             double noise_sigma, std::uint64_t seed) {
  if (temperatures.empty()) throw DomainError("no temperatures to synthesize");
  if (!std::isfinite(noise_sigma) || noise_sigma < 0.0)
    throw DomainError("noise sigma must be non-negative");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, noise_sigma > 0.0 ? noise_sigma : 1.0);

  RelaxationDataset data;
  data.source = "synthetic";
  data.points.reserve(temperatures.size());
  for (double T : temperatures) {
    const double eps = noise_sigma > 0.0 ? noise(rng) : 0.0;
    RelaxationPoint pt;
    pt.temperature = T;
    pt.tau = model_lifetime(model, T) * std::exp(eps);
    data.points.push_back(std::move(pt));
  }
  return data;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || !std::isfinite(hi) || n < 2)
    throw DomainError("log grid requires 0 < lo < hi and n >= 2");
  std::vector<double> out(n);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.front() = lo;
  out.back() = hi;
  return out;
}

double FitResult::tau0_std_error(std::size_t i) const {
  return model.processes().at(i).tau0 * std_errors.at(2 * i);
}

}  // namespace qtm4f
