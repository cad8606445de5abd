#include "attrdesc/fid.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "attrdesc/simd/kernels.hpp"

namespace attrdesc {
namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

constexpr double kSymmetryTolerance = 1e-9;
constexpr double kEigenTolerance = 1e-6;
constexpr double kNegativeClamp = 1e-8;

struct Eigensystem {
  Eigen::VectorXd values;
  RowMajor vectors;
};

Eigensystem psd_eigensystem(const Matrix& s, bool want_vectors) {
  if (s.rows() != s.cols()) throw StatsError("sqrt_psd: matrix is not square");
  const double scale = s.max_abs();
  if (asymmetry(s) > kSymmetryTolerance * scale)
    throw StatsError("sqrt_psd: matrix is not symmetric");
  Matrix sym = s;
  symmetrize(sym);
  Eigen::Map<const RowMajor> view(sym.data(), static_cast<Eigen::Index>(sym.rows()),
                                  static_cast<Eigen::Index>(sym.cols()));
  Eigen::SelfAdjointEigenSolver<RowMajor> solver(
      view, want_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw StatsError("sqrt_psd: eigendecomposition failed");
  Eigensystem es;
  es.values = solver.eigenvalues();
  if (es.values.size() > 0) {
    const double norm = es.values.cwiseAbs().maxCoeff();
    const double tol = kEigenTolerance * norm;
    if (es.values.minCoeff() < -tol)
      throw NotPositiveSemidefinite("sqrt_psd: eigenvalue " + std::to_string(es.values.minCoeff()) +
                                    " below -tolerance");
  }
  if (want_vectors) es.vectors = solver.eigenvectors();
  return es;
}

Matrix add_ridge(const Matrix& s) {
  double mean_diag = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) mean_diag += s(i, i);
  mean_diag /= static_cast<double>(std::max<std::size_t>(s.rows(), 1));
  const double eps = 1e-6 * std::abs(mean_diag);
  Matrix r = s;
  for (std::size_t i = 0; i < r.rows(); ++i) r(i, i) += eps;
  return r;
}

double cross_trace(const Matrix& cov_a, const Matrix& cov_b) {
  const Matrix root_a = sqrt_psd(cov_a);
  Matrix product = multiply(multiply(root_a, cov_b), root_a);
  symmetrize(product);
  return trace_sqrt_psd(product);
}

}  // namespace

FeatureStats accumulate_stats(const FeatureMatrix& features) {
  const std::size_t n = features.rows();
  const std::size_t d = features.cols();
  if (n < 2) throw StatsError("count < 2");
  if (d == 0) throw StatsError("feature dimension is zero");
  for (double v : features.values())
    if (!std::isfinite(v)) throw StatsError("non-finite feature entry");

  const auto& k = simd::active();
  FeatureStats stats;
  stats.count = n;
  stats.mean.resize(d);
  k.column_sums(features.data(), n, d, stats.mean.data());
  for (double& m : stats.mean) m /= static_cast<double>(n);

  stats.cov = Matrix(d, d);
  k.centered_gram(features.data(), n, d, stats.mean.data(), stats.cov.data());
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) stats.cov(i, j) /= denom;
  symmetrize(stats.cov);
  return stats;
}

void validate_stats(const FeatureStats& stats) {
  const std::size_t d = stats.dim();
  if (d == 0) throw StatsError("stats dimension is zero");
  if (stats.count < 2) throw StatsError("count < 2");
  if (stats.cov.rows() != d || stats.cov.cols() != d)
    throw StatsError("covariance shape does not match mean dimension");
  for (double v : stats.mean)
    if (!std::isfinite(v)) throw StatsError("non-finite mean entry");
  for (double v : stats.cov.values())
    if (!std::isfinite(v)) throw StatsError("non-finite covariance entry");
  if (asymmetry(stats.cov) > kSymmetryTolerance * stats.cov.max_abs())
    throw StatsError("covariance is not symmetric");
}

Matrix sqrt_psd(const Matrix& s) {
  const Eigensystem es = psd_eigensystem(s, true);
  const std::size_t d = s.rows();
  // V diag(sqrt lambda) V^T = Y Y^T with Y = V diag(lambda^{1/4}).
  Matrix y(d, d);
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t c = 0; c < d; ++c)
      y(r, c) = es.vectors(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) *
                std::sqrt(std::sqrt(std::max(es.values[static_cast<Eigen::Index>(c)], 0.0)));
  return multiply_transposed(y, y);
}

double trace_sqrt_psd(const Matrix& s) {
  const Eigensystem es = psd_eigensystem(s, false);
  double t = 0.0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i) t += std::sqrt(std::max(es.values[i], 0.0));
  return t;
}

double frechet_distance(const FeatureStats& a, const FeatureStats& b) {
  if (a.dim() != b.dim())
    throw StatsError("dimension mismatch " + std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  double mean_term = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double diff = a.mean[i] - b.mean[i];
    mean_term += diff * diff;
  }
  double cross;
  try {
    cross = cross_trace(a.cov, b.cov);
  } catch (const NotPositiveSemidefinite&) {
    cross = cross_trace(add_ridge(a.cov), add_ridge(b.cov));
  }
  const double fid = mean_term + a.cov.trace() + b.cov.trace() - 2.0 * cross;
  if (fid < 0.0) {
    // Cancellation error grows with the magnitude of the traces being subtracted.
    if (fid >= -kNegativeClamp * (1.0 + a.cov.trace() + b.cov.trace())) return 0.0;
    throw StatsError("negative Frechet distance " + std::to_string(fid));
  }
  return fid;
}

}  // namespace attrdesc
