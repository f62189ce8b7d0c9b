#include <cmath>

#include "qtm4f/model.hpp"
#include "spectral.hpp"

namespace qtm4f {

namespace {
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
}

EigenSystem closed_form_zero_field(const ModelParams& params) {
  params.validate();
  const double U = params.U;
  const double A = params.A;

  // Symmetric combinations s1 = (|1>+|1bar>)/sqrt2, s2 = (|2>+|2bar>)/sqrt2
  // span the block [[0, -2A], [-2A, U]]. Its eigenvalues are (U -+ r)/2; the
  // smaller-magnitude root is taken from the product -4A^2 to avoid
  // cancellation when U >> A.
  const double r = std::hypot(U, 4.0 * A);
  double lo = 0.0;
  double hi = 0.0;
  if (U >= 0.0) {
    hi = 0.5 * (U + r);
    lo = hi > 0.0 ? -4.0 * A * A / hi : 0.0;
  } else {
    lo = 0.5 * (U - r);
    hi = lo < 0.0 ? -4.0 * A * A / lo : 0.0;
  }
  // Eigenvector of the upper root is (cos phi, sin phi) in (s1, s2).
  const double phi = 0.5 * std::atan2(-4.0 * A, -U);
  const double c = std::cos(phi) * kInvSqrt2;
  const double s = std::sin(phi) * kInvSqrt2;
  const double h = kInvSqrt2;

  const RealVector4 values{lo, 0.0, U, hi};
  const std::array<RealVector4, kDim> vectors{{
      {-s, -s, c, c},
      {-h, h, 0.0, 0.0},
      {0.0, 0.0, -h, h},
      {c, c, s, s},
  }};
  return sorted_canonical(values, vectors);
}

}  // namespace qtm4f
