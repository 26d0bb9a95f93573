#pragma once

#include "smootherlab/common.hpp"
#include "smootherlab/smoother.hpp"

#include <string>

namespace smootherlab {

/// p0 = (n / |I0|) * sum_j ||s(x0_j)||^2 over a named input set I0.
struct EffParamsReport {
  std::string input_set_name;
  Eigen::Index set_size = 0;
  Eigen::Index n_train = 0;
  double p_generalized = 0.0;
  Vector per_point_norms;  // ||s(x0_j)||^2
  double effective_knn = 0.0;  // n / p0
};

EffParamsReport generalized_eff_params(const FittedSmoother& model, const Matrix& inputs,
                                       const std::string& name);

/// Same quantity from an already computed m x n weight matrix.
EffParamsReport eff_params_from_weights(const Matrix& weights, const std::string& name);

struct ClassicalEffParams {
  double p_cov = 0.0;  // tr S
  double p_err = 0.0;  // tr(2S - S S^T)
  double p_var = 0.0;  // tr(S S^T)
};

ClassicalEffParams train_eff_params_classical(const Matrix& hat);

/// sum_j theta_j / (theta_j + alpha), theta_j the eigenvalues of Phi^T Phi
/// above the SVD cutoff (see linear_smoothers.hpp). At alpha = 0 this is the
/// numerical rank.
double hessian_proxy_eff_params(const Matrix& phi, double alpha, double tolerance_factor = 1.0);

}  // namespace smootherlab
