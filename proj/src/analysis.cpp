#include "qtm4f/analysis.hpp"

#include <cmath>
#include <cstdio>

#include "qtm4f/constants.hpp"
#include "qtm4f/errors.hpp"

namespace qtm4f {

namespace {

void check_range(double lo, double hi, std::size_t n) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("sweep bounds must be finite");
  if (!(lo < hi)) throw DomainError("sweep requires min < max");
  if (n < 2) throw DomainError("sweep requires at least 2 points");
}

// Endpoint-exact uniform grid: lo + (hi - lo) * i / (n - 1).
double grid_value(double lo, double hi, std::size_t i, std::size_t n) {
  if (i + 1 == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

}  // namespace

SweepTable sweep_ua(double ua_min, double ua_max, std::size_t n_points) {
  check_range(ua_min, ua_max, n_points);
  SweepTable table;
  table.axis_name = "U/A";
  table.axis_values.reserve(n_points);
  table.eigenvalue_rows.reserve(n_points);
  for (std::size_t i = 0; i < n_points; ++i) {
    const double ua = grid_value(ua_min, ua_max, i, n_points);
    const ModelParams p{.U = ua, .A = 1.0};
    table.axis_values.push_back(ua);
    table.eigenvalue_rows.push_back(eigensystem(build_hamiltonian(p)).values);
  }
  return table;
}

SweepTable sweep_field(const ModelParams& params, double b_over_bzt_max, std::size_t n_points) {
  params.validate();
  check_range(0.0, b_over_bzt_max, n_points);
  if (params.U == 0.0) throw DomainError("field sweep in units of B_Zt requires U != 0");
  const double bzt = zeeman_threshold(params);

  SweepTable table;
  table.axis_name = "B/B_Zt";
  for (std::size_t i = 0; i < n_points; ++i) {
    const double x = grid_value(0.0, b_over_bzt_max, i, n_points);
    const EigenSystem es = eigensystem(build_hamiltonian(params, FieldVector{.By = x * bzt}));
    table.axis_values.push_back(x);
    table.eigenvalue_rows.push_back(es.values);
    table.ground_moment_rows.push_back(
        moment_expectation(StateVector::from_real(es.vectors[0]), params));
  }
  return table;
}

double zeeman_threshold(const ModelParams& params) {
  if (!std::isfinite(params.U)) throw DomainError("U must be finite");
  if (!(params.mu_y > 0.0) || !std::isfinite(params.mu_y))
    throw DomainError("Zeeman threshold requires mu_y > 0");
  return std::abs(params.U) / (2.0 * params.mu_y * PhysicalConstants::mu_B_over_k_B);
}

double ground_splitting(const ModelParams& params) {
  const EigenSystem es = closed_form_zero_field(params);
  return es.values[1] - es.values[0];
}

double extract_A(double delta, double U, ExtractionMode mode) {
  if (!std::isfinite(delta)) throw DomainError("splitting must be finite");
  if (delta < 0.0) throw DomainError("splitting must be non-negative");
  switch (mode) {
    case ExtractionMode::paper:
      return delta / 4.0;
    case ExtractionMode::exact:
      if (!std::isfinite(U) || U < 0.0)
        throw DomainError("exact extraction requires a finite U >= 0");
      return 0.5 * std::sqrt(delta * (delta + U));
  }
  throw DomainError("unknown extraction mode");
}

double to_frequency(double delta) {
  if (!std::isfinite(delta)) throw DomainError("energy must be finite");
  return delta * PhysicalConstants::k_B_over_h;
}

std::optional<std::string> frequency_annotation(double delta) {
  for (const PublishedMolecule* m : {&kDy2S, &kTb2ScN}) {
    if (std::abs(delta - m->delta_I) > m->delta_I_err) continue;
    const double f = to_frequency(delta);
    const double dev = (f - m->frequency_GHz) / m->frequency_GHz * 100.0;
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "%s: splitting %.4g K converts to %.4g GHz; the reported tunneling frequency "
                  "is %.3g GHz (%+.1f%%). Tabulated barrier and reported frequency are not "
                  "mutually consistent; value not adjusted.",
                  m->name, delta, f, m->frequency_GHz, dev);
    return std::string(buf);
  }
  return std::nullopt;
}

}  // namespace qtm4f
