#include "smootherlab/linear_smoothers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace smootherlab {

namespace {

struct ThinSvd {
  Eigen::MatrixXd u;  // n x r
  Vector s;           // r, descending
  Eigen::MatrixXd v;  // p x r
};

ThinSvd thin_svd(const Matrix& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(a), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

double cutoff(Eigen::Index n, Eigen::Index p, double sigma_max, double factor) {
  return factor * static_cast<double>(std::max(n, p)) * sigma_max *
         std::numeric_limits<double>::epsilon();
}

int numerical_rank(const Vector& s, double tol) {
  int r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  return r;
}

// V_r diag(1/s_r) U_r^T : the pseudoinverse restricted to the leading r triplets.
Matrix truncated_pinv(const ThinSvd& svd, int r) {
  const Eigen::MatrixXd vs = svd.v.leftCols(r) * svd.s.head(r).cwiseInverse().asDiagonal();
  return vs * svd.u.leftCols(r).transpose();
}

void check_targets(const Matrix& phi, const Vector& y) {
  if (phi.rows() < 1 || phi.cols() < 1) throw ArgumentError("design matrix must be non-empty");
  if (y.size() != phi.rows()) {
    throw ArgumentError("target length " + std::to_string(y.size()) + " != rows " +
                        std::to_string(phi.rows()));
  }
  if (!phi.allFinite() || !y.allFinite()) throw ArgumentError("non-finite design or targets");
}

// Full-column-rank least squares on `design` (n x q, q <= n).
void solve_full_rank(const Matrix& design, const Vector& y, double factor, LinearFit& fit) {
  const auto svd = thin_svd(design);
  const double tol = cutoff(design.rows(), design.cols(), svd.s.size() ? svd.s(0) : 0.0, factor);
  const double smallest = svd.s.size() ? svd.s(svd.s.size() - 1) : 0.0;
  if (svd.s.size() == 0 || smallest <= tol) throw SingularityError(smallest, tol);
  fit.svd_tolerance = tol;
  fit.rank = static_cast<int>(svd.s.size());
  fit.weight_operator = truncated_pinv(svd, fit.rank);
  fit.coefficients = fit.weight_operator * y;
}

}  // namespace

const char* to_string(LinearMode mode) noexcept {
  switch (mode) {
    case LinearMode::ols:
      return "ols";
    case LinearMode::min_norm:
      return "min_norm";
    case LinearMode::svd_basis:
      return "svd_basis";
    case LinearMode::pcr:
      return "pcr";
  }
  return "unknown";
}

Matrix LinearFit::model_features(const Matrix& phi) const {
  if (phi.cols() != n_features()) {
    throw ArgumentError("feature row has " + std::to_string(phi.cols()) + " columns, fit expects " +
                        std::to_string(n_features()));
  }
  switch (mode) {
    case LinearMode::ols:
    case LinearMode::min_norm:
      return phi;
    case LinearMode::svd_basis:
      return phi * basis;
    case LinearMode::pcr: {
      const auto& st = *pcr_state;
      const auto kept = static_cast<Eigen::Index>(st.kept_columns.size());
      Matrix z(phi.rows(), kept);
      for (Eigen::Index j = 0; j < kept; ++j) {
        z.col(j) = (phi.col(st.kept_columns[static_cast<std::size_t>(j)]).array() - st.column_means(j)) /
                   st.column_stds(j);
      }
      Matrix a(phi.rows(), st.components.cols() + 1);
      a.col(0).setOnes();
      a.rightCols(st.components.cols()) = z * st.components;
      return a;
    }
  }
  throw ArgumentError("unknown linear mode");
}

double LinearFit::predict(std::span<const double> phi) const {
  const Matrix row = Eigen::Map<const Matrix>(phi.data(), 1, static_cast<Eigen::Index>(phi.size()));
  return predict(row)(0);
}

Vector LinearFit::predict(const Matrix& phi) const { return model_features(phi) * coefficients; }

LinearFit fit_ols(const Matrix& phi, const Vector& y, const LinearOptions& options) {
  check_targets(phi, y);
  if (phi.cols() >= phi.rows()) {
    throw ArgumentError("OLS needs fewer features than samples (p=" + std::to_string(phi.cols()) +
                        ", n=" + std::to_string(phi.rows()) + ")");
  }
  LinearFit fit;
  fit.mode = LinearMode::ols;
  fit.train_design = phi;
  solve_full_rank(phi, y, options.tolerance_factor, fit);
  fit.fitted_values = phi * fit.coefficients;
  return fit;
}

LinearFit fit_minnorm(const Matrix& phi, const Vector& y, const LinearOptions& options) {
  check_targets(phi, y);
  if (phi.cols() < phi.rows()) {
    throw ArgumentError("min-norm fit needs at least as many features as samples");
  }
  const auto svd = thin_svd(phi);
  LinearFit fit;
  fit.mode = LinearMode::min_norm;
  fit.train_design = phi;
  fit.svd_tolerance = cutoff(phi.rows(), phi.cols(), svd.s(0), options.tolerance_factor);
  fit.rank = numerical_rank(svd.s, fit.svd_tolerance);
  fit.pseudoinverse = fit.rank < phi.rows();
  fit.weight_operator = truncated_pinv(svd, fit.rank);
  fit.coefficients = fit.weight_operator * y;
  fit.fitted_values = phi * fit.coefficients;
  return fit;
}

LinearFit fit_svd_basis(const Matrix& phi, const Vector& y, const LinearOptions& options) {
  check_targets(phi, y);
  if (phi.cols() < phi.rows()) {
    throw ArgumentError("SVD-basis fit needs at least as many features as samples");
  }
  const auto svd = thin_svd(phi);
  LinearFit fit;
  fit.mode = LinearMode::svd_basis;
  fit.train_design = phi;
  fit.svd_tolerance = cutoff(phi.rows(), phi.cols(), svd.s(0), options.tolerance_factor);
  fit.rank = numerical_rank(svd.s, fit.svd_tolerance);
  fit.pseudoinverse = fit.rank < phi.rows();
  fit.basis = svd.v.leftCols(fit.rank);

  // B = U_r Sigma_r is the training design in the new basis; it is solved by
  // QR, not by reusing the singular values.
  const Eigen::MatrixXd b = svd.u.leftCols(fit.rank) * svd.s.head(fit.rank).asDiagonal();
  if (fit.pseudoinverse) {
    const Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(b);
    fit.weight_operator = cod.pseudoInverse();
  } else {
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
    fit.weight_operator = qr.solve(Eigen::MatrixXd::Identity(b.rows(), b.rows()));
  }
  fit.coefficients = fit.weight_operator * y;
  fit.fitted_values = fit.model_features(phi) * fit.coefficients;
  return fit;
}

LinearFit fit_pcr(const Matrix& phi, const Vector& y, int p_pc, const LinearOptions& options) {
  check_targets(phi, y);
  const auto n = phi.rows();
  const auto p = phi.cols();
  const auto limit = std::min<Eigen::Index>(n - 1, p);
  if (p_pc < 1 || p_pc > limit) {
    throw ArgumentError("p_pc " + std::to_string(p_pc) + " outside [1, " + std::to_string(limit) + "]");
  }

  PcrState st;
  std::vector<double> means;
  std::vector<double> stds;
  for (Eigen::Index j = 0; j < p; ++j) {
    const double mean = phi.col(j).mean();
    double sd = 1.0;
    if (options.standardize) {
      sd = std::sqrt((phi.col(j).array() - mean).square().mean());
      const double scale = std::max(1.0, phi.col(j).cwiseAbs().maxCoeff());
      if (!(sd > 1e-12 * scale)) {
        ++st.dropped_columns;
        continue;
      }
    }
    st.kept_columns.push_back(static_cast<int>(j));
    means.push_back(mean);
    stds.push_back(sd);
  }
  const auto kept = static_cast<Eigen::Index>(st.kept_columns.size());
  if (p_pc > kept) {
    throw ArgumentError("p_pc " + std::to_string(p_pc) + " exceeds the " + std::to_string(kept) +
                        " columns with non-zero variance");
  }
  st.column_means = Eigen::Map<const Vector>(means.data(), kept);
  st.column_stds = Eigen::Map<const Vector>(stds.data(), kept);

  Matrix z(n, kept);
  for (Eigen::Index j = 0; j < kept; ++j) {
    z.col(j) = (phi.col(st.kept_columns[static_cast<std::size_t>(j)]).array() - st.column_means(j)) /
               st.column_stds(j);
  }
  const auto svd = thin_svd(z);
  st.singular_values = svd.s;
  st.components = svd.v.leftCols(p_pc);

  Matrix a(n, p_pc + 1);
  a.col(0).setOnes();
  a.rightCols(p_pc) = z * st.components;

  LinearFit fit;
  fit.mode = LinearMode::pcr;
  fit.train_design = phi;
  solve_full_rank(a, y, options.tolerance_factor, fit);
  st.intercept = fit.coefficients(0);
  fit.pcr_state = std::move(st);
  fit.fitted_values = a * fit.coefficients;
  return fit;
}

LinearFit fit_least_squares(const Matrix& phi, const Vector& y, const LinearOptions& options) {
  return phi.cols() < phi.rows() ? fit_ols(phi, y, options) : fit_minnorm(phi, y, options);
}

SmootherWeights weights_linear(const LinearFit& fit, std::span<const double> x0_features) {
  const Matrix row =
      Eigen::Map<const Matrix>(x0_features.data(), 1, static_cast<Eigen::Index>(x0_features.size()));
  return weights_linear_batch(fit, row).row(0).transpose();
}

Matrix weights_linear_batch(const LinearFit& fit, const Matrix& phi) {
  return fit.model_features(phi) * fit.weight_operator;
}

Matrix hat_matrix(const LinearFit& fit) { return weights_linear_batch(fit, fit.train_design); }

}  // namespace smootherlab
