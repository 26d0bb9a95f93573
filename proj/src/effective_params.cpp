#include "smootherlab/effective_params.hpp"

#include "smootherlab/kernels.hpp"

#include <algorithm>
#include <limits>

namespace smootherlab {

namespace {

// Weight rows are produced in blocks so that m x n never has to exist at once.
constexpr Eigen::Index kBlockRows = 256;

}  // namespace

EffParamsReport eff_params_from_weights(const Matrix& weights, const std::string& name) {
  if (weights.rows() < 1) throw ArgumentError("input set '" + name + "' is empty");
  EffParamsReport rep;
  rep.input_set_name = name;
  rep.set_size = weights.rows();
  rep.n_train = weights.cols();
  rep.per_point_norms.resize(weights.rows());
  const auto n = static_cast<std::size_t>(weights.cols());
  for (Eigen::Index j = 0; j < weights.rows(); ++j) {
    rep.per_point_norms(j) = kernels::squared_norm(std::span<const double>(weights.row(j).data(), n));
  }
  rep.p_generalized = static_cast<double>(rep.n_train) / static_cast<double>(rep.set_size) *
                      rep.per_point_norms.sum();
  rep.effective_knn = static_cast<double>(rep.n_train) / rep.p_generalized;
  return rep;
}

EffParamsReport generalized_eff_params(const FittedSmoother& model, const Matrix& inputs,
                                       const std::string& name) {
  if (inputs.rows() < 1) throw ArgumentError("input set '" + name + "' is empty");
  EffParamsReport rep;
  rep.input_set_name = name;
  rep.set_size = inputs.rows();
  rep.n_train = model.n_train();
  rep.per_point_norms.resize(inputs.rows());
  for (Eigen::Index start = 0; start < inputs.rows(); start += kBlockRows) {
    const Eigen::Index rows = std::min(kBlockRows, inputs.rows() - start);
    const Matrix w = model.weights_batch(inputs.middleRows(start, rows));
    const auto n = static_cast<std::size_t>(w.cols());
    for (Eigen::Index j = 0; j < rows; ++j) {
      rep.per_point_norms(start + j) = kernels::squared_norm(std::span<const double>(w.row(j).data(), n));
    }
  }
  rep.p_generalized = static_cast<double>(rep.n_train) / static_cast<double>(rep.set_size) *
                      rep.per_point_norms.sum();
  rep.effective_knn = static_cast<double>(rep.n_train) / rep.p_generalized;
  return rep;
}

ClassicalEffParams train_eff_params_classical(const Matrix& hat) {
  if (hat.rows() != hat.cols()) {
    throw ArgumentError("smoother matrix must be square, got " + std::to_string(hat.rows()) + " x " +
                        std::to_string(hat.cols()));
  }
  ClassicalEffParams out;
  out.p_cov = hat.trace();
  out.p_var = hat.squaredNorm();  // tr(S S^T) = ||S||_F^2
  out.p_err = 2.0 * out.p_cov - out.p_var;
  return out;
}

double hessian_proxy_eff_params(const Matrix& phi, double alpha, double tolerance_factor) {
  if (alpha < 0.0) throw ArgumentError("alpha must be >= 0");
  if (phi.rows() < 1 || phi.cols() < 1) throw ArgumentError("design matrix must be non-empty");
  const Eigen::MatrixXd dense = phi;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(dense);
  const Vector& s = svd.singularValues();
  const double tol = tolerance_factor * static_cast<double>(std::max(phi.rows(), phi.cols())) * s(0) *
                     std::numeric_limits<double>::epsilon();
  double p = 0.0;
  for (Eigen::Index j = 0; j < s.size() && s(j) > tol; ++j) {
    const double theta = s(j) * s(j);
    p += theta / (theta + alpha);
  }
  return p;
}

}  // namespace smootherlab
