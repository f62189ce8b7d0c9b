#include "qtm4f/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtm4f/constants.hpp"
#include "qtm4f/errors.hpp"

namespace qtm4f {

namespace {

constexpr std::size_t idx(Basis b) { return static_cast<std::size_t>(b); }

void require_finite(double v, const char* name) {
  if (!std::isfinite(v)) throw DomainError(std::string(name) + " must be finite");
}

void require_normalized(const StateVector& s) {
  const double n = s.norm();
  if (!(std::abs(n - 1.0) <= 1e-9))
    throw DomainError("state is not normalized (norm = " + std::to_string(n) + ")");
}

}  // namespace

void ModelParams::validate() const {
  require_finite(U, "U");
  require_finite(A, "A");
  require_finite(mu_x, "mu_x");
  require_finite(mu_y, "mu_y");
  if (A < 0.0) throw DomainError("A must be non-negative");
  if (mu_x <= 0.0) throw DomainError("mu_x must be positive");
  if (mu_y <= 0.0) throw DomainError("mu_y must be positive");
}

SymmetricMatrix4 SymmetricMatrix4::from_rows(const Rows& rows) {
  for (std::size_t i = 0; i < kDim; ++i)
    for (std::size_t j = i + 1; j < kDim; ++j)
      if (!(rows[i][j] == rows[j][i]))
        throw DomainError("matrix is not symmetric at (" + std::to_string(i) + "," +
                          std::to_string(j) + ")");
  SymmetricMatrix4 m;
  m.m_ = rows;
  return m;
}

double SymmetricMatrix4::trace() const {
  double t = 0.0;
  for (std::size_t i = 0; i < kDim; ++i) t += m_[i][i];
  return t;
}

double SymmetricMatrix4::max_norm() const {
  double m = 0.0;
  for (const auto& row : m_)
    for (double v : row) {
      if (std::isnan(v)) return v;
      m = std::max(m, std::abs(v));
    }
  return m;
}

StateVector StateVector::basis(Basis b) {
  StateVector s;
  s.amplitudes[idx(b)] = 1.0;
  return s;
}

StateVector StateVector::from_real(const RealVector4& v) {
  StateVector s;
  for (std::size_t j = 0; j < kDim; ++j) s.amplitudes[j] = v[j];
  return s;
}

double StateVector::norm() const {
  double n2 = 0.0;
  for (const auto& a : amplitudes) n2 += std::norm(a);
  return std::sqrt(n2);
}

SymmetricMatrix4 build_hamiltonian(const ModelParams& params, const FieldVector& field) {
  params.validate();
  require_finite(field.Bx, "Bx");
  require_finite(field.By, "By");
  require_finite(field.Bz, "Bz");

  constexpr double c = PhysicalConstants::mu_B_over_k_B;
  const double ex = 2.0 * params.mu_x * field.Bx * c;
  const double ey = 2.0 * params.mu_y * field.By * c;

  SymmetricMatrix4 H;
  H.set(idx(Basis::one), idx(Basis::one), -ex);
  H.set(idx(Basis::one_bar), idx(Basis::one_bar), ex);
  H.set(idx(Basis::two), idx(Basis::two), params.U - ey);
  H.set(idx(Basis::two_bar), idx(Basis::two_bar), params.U + ey);
  for (Basis a : {Basis::one, Basis::one_bar})
    for (Basis b : {Basis::two, Basis::two_bar}) H.set(idx(a), idx(b), -params.A);
  return H;
}

MomentVector moment_expectation(const StateVector& state, const ModelParams& params) {
  require_normalized(state);
  MomentVector m;
  m.mx = 2.0 * params.mu_x * (state.population(Basis::one) - state.population(Basis::one_bar));
  m.my = 2.0 * params.mu_y * (state.population(Basis::two) - state.population(Basis::two_bar));
  return m;
}

StateVector evolve(const StateVector& initial, const EigenSystem& spectrum, double t_ns) {
  require_normalized(initial);
  if (t_ns == 0.0) return initial;
  constexpr double omega = 2.0 * std::numbers::pi * PhysicalConstants::k_B_over_h;  // rad/ns per K
  StateVector out;
  for (std::size_t i = 0; i < kDim; ++i) {
    const auto& v = spectrum.vectors[i];
    std::complex<double> overlap = 0.0;
    for (std::size_t j = 0; j < kDim; ++j) overlap += v[j] * initial.amplitudes[j];
    const std::complex<double> c = overlap * std::polar(1.0, -spectrum.values[i] * omega * t_ns);
    for (std::size_t j = 0; j < kDim; ++j) out.amplitudes[j] += c * v[j];
  }
  return out;
}

StateVector evolve(const StateVector& initial, const SymmetricMatrix4& H, double t_ns) {
  return evolve(initial, eigensystem(H), t_ns);
}

}  // namespace qtm4f
