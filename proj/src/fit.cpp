#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "qtm4f/errors.hpp"
#include "qtm4f/relaxation.hpp"

namespace qtm4f {

namespace {


constexpr int kMaxIterations = 500;
constexpr double kRelObjectiveTol = 1e-12;
constexpr double kStepTol = 1e-10;
constexpr double kInitialDamping = 1e-3;
constexpr double kMaxDamping = 1e20;
// Smallest acceptable Cholesky pivot of the correlation-scaled normal matrix,
// i.e. 1 - R^2 of a parameter regressed on all the others.
constexpr double kMinPivot = 1e-10;

using Matrix = std::vector<std::vector<double>>;

// In-place Cholesky, lower triangle. Returns the index of the first
// non-positive pivot, or -1 on success.
int cholesky(Matrix& a) {
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j][j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
    if (!(d > 0.0)) return static_cast<int>(j);
    d = std::sqrt(d);
    a[j][j] = d;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a[i][j];
      for (std::size_t k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
      a[i][j] = s / d;
    }
  }
  return -1;
}

std::vector<double> cholesky_solve(const Matrix& l, std::vector<double> b) {
  const std::size_t n = l.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= l[i][k] * b[k];
    b[i] /= l[i][i];
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= l[k][i] * b[k];
    b[i] /= l[i][i];
  }
  return b;
}

struct Problem {
  std::vector<double> inv_T;
  std::vector<double> y;  // ln tau
  std::vector<double> w;
  std::size_t n_proc = 0;

  // ln tau model and, optionally, its gradient wrt (ln tau0_i, delta_i).
  double eval(const std::vector<double>& theta, std::size_t k, std::vector<double>* grad) const {
    double zmax = -std::numeric_limits<double>::infinity();
    std::vector<double> z(n_proc);
    for (std::size_t i = 0; i < n_proc; ++i) {
      z[i] = -theta[2 * i] - theta[2 * i + 1] * inv_T[k];
      zmax = std::max(zmax, z[i]);
    }
    double sum = 0.0;
    for (double& zi : z) {
      zi = std::exp(zi - zmax);
      sum += zi;
    }
    if (grad) {
      grad->resize(2 * n_proc);
      for (std::size_t i = 0; i < n_proc; ++i) {
        const double share = z[i] / sum;
        (*grad)[2 * i] = share;
        (*grad)[2 * i + 1] = share * inv_T[k];
      }
    }
    return -(zmax + std::log(sum));
  }

  double objective(const std::vector<double>& theta) const {
    double s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double r = y[k] - eval(theta, k, nullptr);
      s += w[k] * r * r;
    }
    return s;
  }

  // Undamped normal matrix J^T W J and gradient J^T W r.
  void normal_equations(const std::vector<double>& theta, Matrix& N, std::vector<double>& b) const {
    const std::size_t p = theta.size();
    N.assign(p, std::vector<double>(p, 0.0));
    b.assign(p, 0.0);
    std::vector<double> g;
    for (std::size_t k = 0; k < y.size(); ++k) {
      const double r = y[k] - eval(theta, k, &g);
      for (std::size_t i = 0; i < p; ++i) {
        b[i] += w[k] * g[i] * r;
        for (std::size_t j = 0; j <= i; ++j) N[i][j] += w[k] * g[i] * g[j];
      }
    }
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = 0; j < i; ++j) N[j][i] = N[i][j];
  }
};

std::vector<double> initial_guess(const Problem& pb) {
  // Contiguous equal-count segments of the Arrhenius plot, ordered by 1/T.
  const std::size_t n = pb.y.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pb.inv_T[a] < pb.inv_T[b]; });

  std::vector<double> theta(2 * pb.n_proc);
  for (std::size_t s = 0; s < pb.n_proc; ++s) {
    const std::size_t lo = s * n / pb.n_proc;
    const std::size_t hi = (s + 1) * n / pb.n_proc;
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t m = lo; m < hi; ++m) {
      const std::size_t k = order[m];
      const double x = pb.inv_T[k];
      sw += pb.w[k];
      sx += pb.w[k] * x;
      sy += pb.w[k] * pb.y[k];
      sxx += pb.w[k] * x * x;
      sxy += pb.w[k] * x * pb.y[k];
    }
    const double det = sw * sxx - sx * sx;
    double slope = det > 0.0 ? (sw * sxy - sx * sy) / det : 0.0;
    if (!(slope > 0.0)) slope = 0.0;
    theta[2 * s] = (sy - slope * sx) / sw;
    theta[2 * s + 1] = slope;
  }
  return theta;
}

}  // namespace

FitResult fit(const RelaxationDataset& data, std::size_t n_processes,
              const std::optional<RelaxationModel>& init) {
  if (n_processes < 1 || n_processes > RelaxationModel::kMaxProcesses)
    throw DomainError("number of processes must be between 1 and 4");
  data.validate();
  const std::size_t n_par = 2 * n_processes;
  if (data.points.size() < 2 * n_par)
    throw DomainError("fitting " + std::to_string(n_par) + " parameters needs at least " +
                      std::to_string(2 * n_par) + " points");
  if (init && init->size() != n_processes)
    throw DomainError("initial model has the wrong number of processes");

  Problem pb;
  pb.n_proc = n_processes;
  const bool weighted = std::all_of(data.points.begin(), data.points.end(),
                                    [](const auto& pt) { return pt.sigma_log_tau.has_value(); });
  for (const auto& pt : data.points) {
    pb.inv_T.push_back(1.0 / pt.temperature);
    pb.y.push_back(std::log(pt.tau));
    pb.w.push_back(weighted ? 1.0 / (*pt.sigma_log_tau * *pt.sigma_log_tau) : 1.0);
  }

  std::vector<double> theta;
  if (init) {
    for (const auto& p : init->processes()) {
      theta.push_back(std::log(p.tau0));
      theta.push_back(p.delta);
    }
  } else {
    theta = initial_guess(pb);
  }

  FitResult result;
  double obj = pb.objective(theta);
  result.objective_trace.push_back(obj);
  double damping = kInitialDamping;
  Matrix N;
  std::vector<double> b;
  pb.normal_equations(theta, N, b);

  int it = 0;
  for (; it < kMaxIterations; ++it) {
    double max_diag = 0.0;
    for (std::size_t i = 0; i < n_par; ++i) max_diag = std::max(max_diag, N[i][i]);
    Matrix M = N;
    for (std::size_t i = 0; i < n_par; ++i)
      M[i][i] += damping * std::max(N[i][i], 1e-12 * max_diag + 1e-300);
    if (cholesky(M) >= 0) {
      damping *= 10.0;
      if (damping > kMaxDamping) break;
      continue;
    }
    const std::vector<double> step = cholesky_solve(M, b);

    std::vector<double> trial = theta;
    for (std::size_t i = 0; i < n_par; ++i) trial[i] += step[i];
    for (std::size_t i = 0; i < n_processes; ++i) trial[2 * i + 1] = std::max(trial[2 * i + 1], 0.0);
    double step_norm = 0.0;
    for (std::size_t i = 0; i < n_par; ++i) step_norm += (trial[i] - theta[i]) * (trial[i] - theta[i]);
    step_norm = std::sqrt(step_norm);

    const double trial_obj = pb.objective(trial);
    if (trial_obj < obj) {
      const double rel = (obj - trial_obj) / obj;
      theta = std::move(trial);
      obj = trial_obj;
      result.objective_trace.push_back(obj);
      damping = std::max(damping / 10.0, 1e-15);
      pb.normal_equations(theta, N, b);
      if (rel < kRelObjectiveTol || step_norm < kStepTol || obj == 0.0) {
        result.converged = true;
        ++it;
        break;
      }
    } else {
      if (step_norm < kStepTol) {
        result.converged = true;
        ++it;
        break;
      }
      damping *= 10.0;
      if (damping > kMaxDamping) {
        ++it;
        break;
      }
    }
  }
  result.iterations = it;

  // Reorder processes by ascending barrier.
  std::vector<std::size_t> perm(n_processes);
  std::iota(perm.begin(), perm.end(), 0);
  std::stable_sort(perm.begin(), perm.end(),
                   [&](std::size_t a, std::size_t c) { return theta[2 * a + 1] < theta[2 * c + 1]; });
  std::vector<std::size_t> pidx;  // new parameter index -> old
  for (std::size_t i : perm) {
    pidx.push_back(2 * i);
    pidx.push_back(2 * i + 1);
  }
  std::vector<double> sorted(n_par);
  Matrix Ns(n_par, std::vector<double>(n_par));
  for (std::size_t i = 0; i < n_par; ++i) {
    sorted[i] = theta[pidx[i]];
    for (std::size_t j = 0; j < n_par; ++j) Ns[i][j] = N[pidx[i]][pidx[j]];
  }
  for (std::size_t i = 0; i < n_processes; ++i) {
    result.parameter_names.push_back("ln_tau0_" + std::to_string(i + 1));
    result.parameter_names.push_back("delta_" + std::to_string(i + 1));
  }

  std::vector<ArrheniusProcess> procs;
  for (std::size_t i = 0; i < n_processes; ++i)
    procs.push_back({.tau0 = std::exp(sorted[2 * i]), .delta = sorted[2 * i + 1]});
  result.model = RelaxationModel(std::move(procs));
  result.parameters = sorted;

  double ss = 0.0;
  for (std::size_t k = 0; k < pb.y.size(); ++k) {
    const double r = pb.y[k] - pb.eval(sorted, k, nullptr);
    ss += r * r;
  }
  result.residual_rms = std::sqrt(ss / static_cast<double>(pb.y.size()));

  // Covariance from the correlation-scaled normal matrix; a vanishing pivot
  // means the parameter is a combination of the others.
  std::vector<double> scale(n_par);
  for (std::size_t i = 0; i < n_par; ++i) {
    if (!(Ns[i][i] > 0.0)) {
      const std::size_t partner = i ^ 1u;
      throw DegenerateFitError("parameter " + result.parameter_names[i] +
                                   " does not affect the model at any data temperature (paired with " +
                                   result.parameter_names[partner] + ")",
                               result.parameter_names[i], result.parameter_names[partner]);
    }
    scale[i] = 1.0 / std::sqrt(Ns[i][i]);
  }
  Matrix C(n_par, std::vector<double>(n_par));
  for (std::size_t i = 0; i < n_par; ++i)
    for (std::size_t j = 0; j < n_par; ++j) C[i][j] = Ns[i][j] * scale[i] * scale[j];
  Matrix L = C;
  int bad = cholesky(L);
  if (bad < 0) {
    for (std::size_t j = 0; j < n_par; ++j)
      if (L[j][j] * L[j][j] < kMinPivot) {
        bad = static_cast<int>(j);
        break;
      }
  }
  if (bad >= 0) {
    const auto j = static_cast<std::size_t>(bad);
    std::size_t partner = j == 0 ? 1 : 0;
    for (std::size_t i = 0; i < n_par; ++i)
      if (i != j && std::abs(C[i][j]) > std::abs(C[partner][j])) partner = i;
    const auto& a = result.parameter_names[std::min(j, partner)];
    const auto& c = result.parameter_names[std::max(j, partner)];
    throw DegenerateFitError("singular normal matrix: parameters " + a + " and " + c +
                                 " cannot be separated by the data (correlation " +
                                 std::to_string(C[j][partner]) + ")",
                             a, c);
  }

  const double dof = static_cast<double>(pb.y.size() - n_par);
  const double s2 = obj / dof;
  result.covariance.assign(n_par, std::vector<double>(n_par, 0.0));
  for (std::size_t col = 0; col < n_par; ++col) {
    std::vector<double> e(n_par, 0.0);
    e[col] = 1.0;
    const std::vector<double> x = cholesky_solve(L, e);
    for (std::size_t row = 0; row < n_par; ++row)
      result.covariance[row][col] = s2 * x[row] * scale[row] * scale[col];
  }
  for (std::size_t i = 0; i < n_par; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double avg = 0.5 * (result.covariance[i][j] + result.covariance[j][i]);
      result.covariance[i][j] = result.covariance[j][i] = avg;
    }
  for (std::size_t i = 0; i < n_par; ++i)
    result.std_errors.push_back(std::sqrt(std::max(result.covariance[i][i], 0.0)));
  return result;
}

std::vector<std::string> FitResult::undetermined_parameters() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < model.size(); ++i) {
    if (std_errors[2 * i] > 1.0) out.push_back(parameter_names[2 * i]);
    if (std_errors[2 * i + 1] > model.processes()[i].delta) out.push_back(parameter_names[2 * i + 1]);
  }
  return out;
}

}  // namespace qtm4f
