#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace qtm4f {

// Index of a pseudospin configuration in the four-state basis. TRD1 is
// (one, one_bar) with moments along +-x, TRD2 is (two, two_bar) along +-y.
enum class Basis : std::size_t { one = 0, one_bar = 1, two = 2, two_bar = 3 };

inline constexpr std::size_t kDim = 4;

// Physical parameters of one dimer. U and A are energies over k_B (kelvin),
// mu_x and mu_y are pseudospin-pair moment components in Bohr magnetons.
// U > 0 puts the TRD1 doublet lowest; U < 0 the TRD2 doublet.
struct ModelParams {
  double U = 0.0;
  double A = 0.0;
  double mu_x = 1.0;
  double mu_y = 1.0;

  // Throws DomainError unless A >= 0, mu_x > 0, mu_y > 0 and all finite.
  void validate() const;
};

// Applied field in tesla. Bz is accepted but couples to nothing: the basis
// moments lie in the x-y plane.
struct FieldVector {
  double Bx = 0.0;
  double By = 0.0;
  double Bz = 0.0;
};

// Real symmetric 4x4 matrix, entries in kelvin. Writes go to both (i,j)
// and (j,i) so symmetry holds exactly.
class SymmetricMatrix4 {
 public:
  using Rows = std::array<std::array<double, kDim>, kDim>;

  SymmetricMatrix4() = default;

  // Throws DomainError if rows is not exactly symmetric.
  static SymmetricMatrix4 from_rows(const Rows& rows);

  double operator()(std::size_t i, std::size_t j) const { return m_[i][j]; }
  void set(std::size_t i, std::size_t j, double v) {
    m_[i][j] = v;
    m_[j][i] = v;
  }

  const Rows& rows() const { return m_; }
  double trace() const;
  double max_norm() const;  // largest |entry|

 private:
  Rows m_{};
};

using RealVector4 = std::array<double, kDim>;

// Spectral decomposition, eigenvalues ascending. vectors[i] is the unit
// eigenvector for values[i], amplitudes ordered (a_1, a_1bar, a_2, a_2bar).
// The largest-magnitude component of every vector is positive.
struct EigenSystem {
  RealVector4 values{};
  std::array<RealVector4, kDim> vectors{};
};

// Complex amplitudes in the basis {|1>, |1bar>, |2>, |2bar>}.
struct StateVector {
  std::array<std::complex<double>, kDim> amplitudes{};

  static StateVector basis(Basis b);
  static StateVector from_real(const RealVector4& v);

  double norm() const;
  double population(Basis b) const { return std::norm(amplitudes[static_cast<std::size_t>(b)]); }
};

// Moment expectation in Bohr magnetons; mz is always zero in this model.
struct MomentVector {
  double mx = 0.0;
  double my = 0.0;
  double mz = 0.0;
};

// Tunneling Hamiltonian in field. Single-flip couplings are -A, double flips
// across the square are zero, and the diagonal carries U on TRD2 plus the
// Zeeman energies -mu_j.B of the basis moments (+-2 mu_x x, +-2 mu_y y):
//   (-2 mu_x Bx c, +2 mu_x Bx c, U - 2 mu_y By c, U + 2 mu_y By c),
// c = mu_B/k_B. Bz has no effect. Throws DomainError on non-finite input.
SymmetricMatrix4 build_hamiltonian(const ModelParams& params, const FieldVector& field = {});

// Cyclic Jacobi diagonalization. Rotates until the largest off-diagonal
// magnitude is below 1e-14 of the matrix max-norm; throws ConvergenceError
// after 100 sweeps (e.g. NaN input).
EigenSystem eigensystem(const SymmetricMatrix4& H);

// Analytic zero-field spectrum: (U -+ sqrt(16A^2+U^2))/2 from the symmetric
// subspace and 0, U from the antisymmetric combinations of each doublet.
EigenSystem closed_form_zero_field(const ModelParams& params);

// <Psi|M|Psi> with basis moments (2mu_x, -2mu_x) on TRD1 along x and
// (2mu_y, -2mu_y) on TRD2 along y. Throws DomainError if |norm - 1| > 1e-9.
MomentVector moment_expectation(const StateVector& state, const ModelParams& params);

// Coherent evolution exp(-iHt) with t in nanoseconds; an energy of 1 K
// advances the phase at k_B/h = 20.836619 GHz.
StateVector evolve(const StateVector& initial, const SymmetricMatrix4& H, double t_ns);
StateVector evolve(const StateVector& initial, const EigenSystem& spectrum, double t_ns);

}  // namespace qtm4f
