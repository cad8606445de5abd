#pragma once

// Gaussian feature statistics and the Frechet distance between them.

#include <cstddef>
#include <vector>

#include "attrdesc/error.hpp"
#include "attrdesc/matrix.hpp"

namespace attrdesc {

/// n x D feature rows, one per rendered sample.
using FeatureMatrix = Matrix;

struct FeatureStats {
  std::size_t count = 0;
  std::vector<double> mean;
  Matrix cov;

  std::size_t dim() const { return mean.size(); }
  friend bool operator==(const FeatureStats&, const FeatureStats&) = default;
};

/// Thrown by sqrt_psd when an eigenvalue is below -tolerance.
class NotPositiveSemidefinite : public StatsError {
 public:
  using StatsError::StatsError;
};

/// Column mean and (n - 1)-normalized covariance. Requires n >= 2, finite entries.
FeatureStats accumulate_stats(const FeatureMatrix& features);

/// Checks the FeatureStats invariants, throwing StatsError.
void validate_stats(const FeatureStats& stats);

/// Symmetric PSD square root from the symmetric eigendecomposition; negative
/// eigenvalues within -1e-6 * ||S|| are treated as zero.
Matrix sqrt_psd(const Matrix& s);

/// Sum of sqrt(max(lambda, 0)) over the eigenvalues of a symmetric near-PSD matrix,
/// i.e. trace(sqrt_psd(s)) without forming the matrix.
double trace_sqrt_psd(const Matrix& s);

/// ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^{1/2}), with the cross term
/// evaluated through the symmetric product sqrt(S_a) S_b sqrt(S_a).
double frechet_distance(const FeatureStats& a, const FeatureStats& b);

}  // namespace attrdesc
