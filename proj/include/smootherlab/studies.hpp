#pragma once

// Experiment protocols built on the sweep engine and on single fits.

#include "smootherlab/dataset.hpp"
#include "smootherlab/experiments.hpp"
#include "smootherlab/rff.hpp"
#include "smootherlab/smoother.hpp"

#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace smootherlab {

// ---- curve shape helpers ----

std::size_t argmax(const std::vector<double>& values);

/// Interior points strictly above both neighbours.
std::vector<std::size_t> local_maxima(const std::vector<double>& values);

struct BandViolation {
  std::size_t step = 0;  // increase from step-1 to step
  double increase = 0.0;
  double allowance = 0.0;
};

/// Steps of the seed-averaged curve that rise by more than
/// max(rel_tol * previous value, one standard error of the paired per-seed
/// differences). `replicates[s][i]` is seed s at point i.
std::vector<BandViolation> noise_band_violations(const std::vector<std::vector<double>>& replicates,
                                                 double rel_tol = 0.02);

/// Rank correlation with average ranks for ties; NaN for fewer than two pairs.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

std::vector<double> column(const SweepResult& result, double PointRecord::*field);

// ---- peak moving / multiple descent ----

/// One composite sweep per switch value.
std::vector<SweepResult> peak_move(Family family, const std::vector<int>& axis1_values,
                                   const std::vector<int>& axis2_values, const std::vector<int>& switch_values,
                                   const SharedParams& shared, const ExperimentData& data);

/// Runs an alternating schedule; peaks are read off with local_maxima.
SweepResult multiple_descent(const SweepSchedule& schedule, const ExperimentData& data);

// ---- conditioning of the PC regression basis ----

struct CondRow {
  int p_phi = 0;
  int k = 0;
  double sigma_k = 0.0;
  double kappa = 0.0;  // sigma_1 / sigma_k; infinite when k exceeds the rank
};

/// Singular values of the (optionally standardized) design, zero-variance
/// columns dropped when standardizing.
Vector design_singular_values(const Matrix& phi, bool standardize);

std::vector<CondRow> cond_study(const RffMap& map, const Matrix& inputs, const std::vector<int>& p_phi_values,
                                const std::vector<int>& k_values, double tolerance_factor = 1.0);

// ---- fixed design ----

struct FixedDesignRow {
  std::string model;
  double train_mse = 0.0;
  double fixed_design_loss = 0.0;
  bool matches_reference = false;      // within 1e-8
  double max_weight_deviation = 0.0;   // max |S - I| over the training smoother matrix
};

struct FixedDesignReport {
  double reference_loss = 0.0;  // mean (y_train - y_resampled)^2
  std::vector<FixedDesignRow> rows;
};

/// Every model must interpolate (train MSE < eps); otherwise PreconditionError.
FixedDesignReport fixed_design_check(const std::vector<const FittedSmoother*>& models, const Matrix& train_inputs,
                                     const Vector& y_train, const Vector& y_resampled, double eps = 1e-4);

// ---- bias / variance on synthetic data ----

struct BiasVarianceConfig {
  std::string model = "ols";  // ols | mean | knn
  int p = 2;                  // ols: intercept plus the first p-1 inputs
  int k = 1;                  // knn
  int n_test = 10;
  int n_resamples = 2000;
};

struct BiasVarianceRow {
  int point = 0;
  double f_true = 0.0;
  double analytic_bias = 0.0;
  double analytic_var = 0.0;
  double analytic_mse = 0.0;
  double mc_bias = 0.0;
  double mc_bias_se = 0.0;
  double mc_var = 0.0;
  double mc_var_se = 0.0;
  double mc_mse = 0.0;
  double mc_mse_se = 0.0;
  bool within = false;  // all three within 3 standard errors
};

struct BiasVarianceReport {
  double noise_var = 0.0;
  std::vector<BiasVarianceRow> rows;
  bool all_within() const;
};

/// Rejects adaptive models, whose weights depend on the targets.
BiasVarianceReport bias_variance(const SyntheticSpec& spec, const BiasVarianceConfig& config);

// ---- model selection by p_test ----

struct SelectionRow {
  int leaf_budget = 0;
  double learning_rate = 0.0;
  int rounds = 0;
  bool interpolating = false;
  double train_mse = 0.0;
  double test_mse = 0.0;
  double p_train = 0.0;
  double p_test = 0.0;
};

struct SelectionReport {
  std::vector<SelectionRow> rows;
  int n_interpolating = 0;
  double spearman_p_test_error = std::numeric_limits<double>::quiet_NaN();
  std::optional<std::size_t> selected;  // lowest p_test among interpolating rows
};

/// Boosts every (leaf budget, learning rate) pair until the training MSE is
/// below eps or max_rounds is reached. A leaf budget of 0 means n.
SelectionReport model_selection_study(const Matrix& train_inputs, const Vector& y_train, const Matrix& test_inputs,
                                      const Vector& y_test, const std::vector<int>& leaf_grid,
                                      const std::vector<double>& lr_grid, double eps, int max_rounds, Seed seed);

// ---- back to U ----

struct BackToURow {
  std::string branch;  // composite | dotted
  int axis1 = 0;
  int axis2 = 0;
  int mechanism = 0;
  double p_train = 0.0;
  double p_test = 0.0;
  double train_mse = 0.0;
  double test_mse = 0.0;
};

struct BackToUResult {
  Family family = Family::rff_linear;
  Seed seed = 0;
  std::vector<BackToURow> rows;
  std::size_t switch_row = 0;  // composite row at the mechanism switch
};

/// The composite sweep, then for every axis-2 point after the switch the
/// points with axis 1 lowered to each of `dotted_axis1_values`.
BackToUResult back_to_u(Family family, const std::vector<int>& axis1_values, const std::vector<int>& axis2_values,
                        int switch_value, const std::vector<int>& dotted_axis1_values, const SharedParams& shared,
                        const ExperimentData& data);

}  // namespace smootherlab
