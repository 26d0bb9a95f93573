#pragma once

// Least-squares fits that are linear smoothers: ordinary least squares,
// min-norm least squares, least squares in the right-singular basis, and
// principal-component regression. Every fit keeps a target-independent
// weight operator W so that the smoother weights at x0 are
//   s(x0) = features(x0)^T W,
// where features() is the fit's model-space representation of x0.
//
// All rank decisions use an SVD with cutoff
//   tau = tolerance_factor * max(n, p) * sigma_max * machine_epsilon.

#include "smootherlab/common.hpp"

#include <optional>
#include <span>
#include <vector>

namespace smootherlab {

enum class LinearMode { ols, min_norm, svd_basis, pcr };

const char* to_string(LinearMode mode) noexcept;

struct LinearOptions {
  double tolerance_factor = 1.0;
  // PCR only: scale columns to unit variance after centering.
  bool standardize = true;
};

struct PcrState {
  Vector column_means;          // over kept columns
  Vector column_stds;           // ones when not standardizing
  std::vector<int> kept_columns;
  int dropped_columns = 0;      // zero-variance columns removed
  Matrix components;            // kept x p_pc, top right singular vectors
  Vector singular_values;       // all singular values of the centered design
  double intercept = 0.0;
};

using SmootherWeights = Vector;

class LinearFit {
 public:
  LinearMode mode = LinearMode::ols;
  Vector coefficients;          // model-space coefficients
  Matrix train_design;          // Phi_train, n x p
  std::optional<PcrState> pcr_state;
  double svd_tolerance = 0.0;
  int rank = 0;
  bool pseudoinverse = false;   // min-norm fell back on a rank-deficient Phi
  Vector fitted_values;
  // q x n, q = model dimension. Independent of the targets.
  Matrix weight_operator;
  // Basis for svd_basis mode (p x r right singular vectors).
  Matrix basis;

  Eigen::Index n_train() const noexcept { return train_design.rows(); }
  Eigen::Index n_features() const noexcept { return train_design.cols(); }

  /// Model-space representation of raw feature rows (m x q).
  Matrix model_features(const Matrix& phi) const;

  double predict(std::span<const double> phi) const;
  Vector predict(const Matrix& phi) const;
};

LinearFit fit_ols(const Matrix& phi, const Vector& y, const LinearOptions& options = {});
LinearFit fit_minnorm(const Matrix& phi, const Vector& y, const LinearOptions& options = {});
LinearFit fit_svd_basis(const Matrix& phi, const Vector& y, const LinearOptions& options = {});
LinearFit fit_pcr(const Matrix& phi, const Vector& y, int p_pc, const LinearOptions& options = {});

/// OLS when p < n, min-norm otherwise.
LinearFit fit_least_squares(const Matrix& phi, const Vector& y, const LinearOptions& options = {});

SmootherWeights weights_linear(const LinearFit& fit, std::span<const double> x0_features);

/// Weights for many points at once: m x n, row k = weights_linear(fit, phi.row(k)).
Matrix weights_linear_batch(const LinearFit& fit, const Matrix& phi);

/// n x n training smoother matrix.
Matrix hat_matrix(const LinearFit& fit);

}  // namespace smootherlab
