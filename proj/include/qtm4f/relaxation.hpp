#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace qtm4f {

// Thermally activated channel tau(T) = tau0 exp(delta / T).
struct ArrheniusProcess {
  double tau0 = 1.0;   // s
  double delta = 0.0;  // barrier over k_B, K
};

// Parallel decay channels, rates add: 1/tau = sum_i exp(-delta_i/T) / tau0_i.
// Holds 1..4 processes sorted by ascending barrier.
class RelaxationModel {
 public:
  static constexpr std::size_t kMaxProcesses = 4;

  // Throws DomainError on an empty/oversized list, tau0 <= 0 or delta < 0.
  explicit RelaxationModel(std::vector<ArrheniusProcess> processes);

  const std::vector<ArrheniusProcess>& processes() const { return processes_; }
  std::size_t size() const { return processes_.size(); }

 private:
  std::vector<ArrheniusProcess> processes_;
};

// Seconds. Evaluated in log space, so it stays finite where single channels
// underflow. Throws DomainError for T <= 0.
double model_lifetime(const RelaxationModel& model, double T);
double log_model_lifetime(const RelaxationModel& model, double T);

struct RelaxationPoint {
  double temperature = 0.0;  // K
  double tau = 0.0;          // s
  std::optional<double> sigma_log_tau;
  std::string mode;  // "DC", "AC" or empty; metadata only
};

struct RelaxationDataset {
  std::vector<RelaxationPoint> points;
  std::string source;

  // Throws DomainError on non-positive or non-finite T or tau.
  void validate() const;
};

// Lifetimes on the model with multiplicative log-normal noise of width
// noise_sigma in ln tau. Deterministic for a given seed.
RelaxationDataset synthesize(const RelaxationModel& model, const std::vector<double>& temperatures,
                             double noise_sigma, std::uint64_t seed);

// n points geometrically spaced from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

struct FitResult {
  RelaxationModel model{{ArrheniusProcess{}}};
  // Parameters in fit order (ln_tau0_1, delta_1, ln_tau0_2, delta_2, ...),
  // process index following the sorted model.
  std::vector<std::string> parameter_names;
  std::vector<double> parameters;
  std::vector<double> std_errors;
  std::vector<std::vector<double>> covariance;
  double residual_rms = 0.0;
  bool converged = false;
  int iterations = 0;
  // Objective after the initial guess and after every accepted step.
  std::vector<double> objective_trace;

  // One-sigma error of tau0_i in seconds, propagated from ln tau0_i.
  double tau0_std_error(std::size_t i) const;

  // Parameters the data do not pin down: a barrier whose one-sigma error
  // exceeds the barrier, or a prefactor with more than 100% relative error.
  // Typical of fitting more channels than the data support.
  std::vector<std::string> undetermined_parameters() const;
};

// Weighted least squares on ln tau over {ln tau0_i, delta_i} by damped
// Gauss-Newton. Weights are 1/sigma^2 when every point carries a sigma.
// Without init, the Arrhenius plot is cut into n_processes equal-count
// segments and a line is fitted to each.
// Throws DomainError on bad input and DegenerateFitError when the normal
// matrix is singular at the optimum. Hitting the iteration cap returns
// converged = false.
FitResult fit(const RelaxationDataset& data, std::size_t n_processes,
              const std::optional<RelaxationModel>& init = std::nullopt);

}  // namespace qtm4f
