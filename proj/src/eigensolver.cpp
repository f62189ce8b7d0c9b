#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "qtm4f/errors.hpp"
#include "qtm4f/model.hpp"
#include "spectral.hpp"

namespace qtm4f {

namespace {

constexpr double kRelativeOffTolerance = 1e-14;
constexpr int kMaxSweeps = 100;

// Rotations run in extended precision: eigenvector error scales as
// roundoff/gap, and nearly degenerate pairs (A << |U|) otherwise pick up
// spurious moments.
using Real = long double;
using Work = std::array<std::array<Real, kDim>, kDim>;

double max_off_diagonal(const Work& a) {
  double off = 0.0;
  for (std::size_t p = 0; p < kDim; ++p)
    for (std::size_t q = p + 1; q < kDim; ++q) {
      const double v = std::abs(static_cast<double>(a[p][q]));
      if (std::isnan(v)) return v;
      off = std::max(off, v);
    }
  return off;
}

// Flip each vector so its largest component is positive. Components within
// a relative 1e-10 of the maximum count as tied; the first one wins.
void canonicalize_signs(EigenSystem& es) {
  for (auto& v : es.vectors) {
    double amax = 0.0;
    for (double x : v) amax = std::max(amax, std::abs(x));
    for (double x : v) {
      if (std::abs(x) >= amax * (1.0 - 1e-10)) {
        if (x < 0.0)
          for (double& y : v) y = -y;
        break;
      }
    }
  }
}

}  // namespace

EigenSystem sorted_canonical(const RealVector4& values, const std::array<RealVector4, kDim>& vectors) {
  std::array<std::size_t, kDim> order{};
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
  EigenSystem es;
  for (std::size_t i = 0; i < kDim; ++i) {
    es.values[i] = values[order[i]];
    es.vectors[i] = vectors[order[i]];
  }
  canonicalize_signs(es);
  return es;
}

EigenSystem eigensystem(const SymmetricMatrix4& H) {
  Work a{};
  for (std::size_t p = 0; p < kDim; ++p)
    for (std::size_t q = 0; q < kDim; ++q) a[p][q] = H(p, q);
  // v[k] holds the k-th column of the accumulated rotation.
  Work v{};
  for (std::size_t k = 0; k < kDim; ++k) v[k][k] = 1.0L;

  // Sweep once more after reaching tol; convergence is quadratic, so this
  // drives the coupling down to extended-precision roundoff.
  const double tol = kRelativeOffTolerance * H.max_norm();
  bool converged = false;
  bool polished = false;
  for (int sweep = 0; sweep <= kMaxSweeps; ++sweep) {
    if (max_off_diagonal(a) <= tol) {
      converged = true;
      if (polished) break;
      polished = true;
    }
    if (sweep == kMaxSweeps) break;
    for (std::size_t p = 0; p < kDim; ++p) {
      for (std::size_t q = p + 1; q < kDim; ++q) {
        const Real apq = a[p][q];
        if (apq == 0.0L) continue;
        const Real theta = (a[q][q] - a[p][p]) / (2.0L * apq);
        const Real t = std::copysign(1.0L, theta) / (std::abs(theta) + std::hypot(theta, 1.0L));
        const Real c = 1.0L / std::sqrt(t * t + 1.0L);
        const Real s = t * c;

        for (std::size_t k = 0; k < kDim; ++k) {
          const Real akp = a[k][p];
          const Real akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < kDim; ++k) {
          const Real apk = a[p][k];
          const Real aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
        a[p][q] = 0.0L;
        a[q][p] = 0.0L;
        for (std::size_t k = 0; k < kDim; ++k) {
          const Real vkp = v[p][k];
          const Real vkq = v[q][k];
          v[p][k] = c * vkp - s * vkq;
          v[q][k] = s * vkp + c * vkq;
        }
      }
    }
  }
  if (!converged) {
    const double residual = max_off_diagonal(a);
    throw ConvergenceError("Jacobi diagonalization did not converge in " +
                               std::to_string(kMaxSweeps) +
                               " sweeps; residual off-diagonal = " + std::to_string(residual),
                           residual);
  }

  RealVector4 values{};
  std::array<RealVector4, kDim> vectors{};
  for (std::size_t k = 0; k < kDim; ++k) {
    values[k] = static_cast<double>(a[k][k]);
    Real norm = 0.0L;
    for (Real x : v[k]) norm += x * x;
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < kDim; ++j) vectors[k][j] = static_cast<double>(v[k][j] / norm);
  }
  return sorted_canonical(values, vectors);
}

}  // namespace qtm4f
