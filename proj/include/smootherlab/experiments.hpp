#pragma once

// Sweep engine. Each schedule point is fitted on every target column (one
// indicator column per class for labelled data, so squared losses are summed
// over classes) and scored on the test set. Effective parameters come from
// the weights of the `class_index` task.
//
// Points of one sweep share their randomness: RFF points slice one frequency
// draw, ensemble member m always has seed `seed + m`, and boosted models are
// fitted once to the largest round count and read at prefixes. A point's
// record therefore does not depend on which other points are in the sweep.

#include "smootherlab/dataset.hpp"
#include "smootherlab/schedule.hpp"
#include "smootherlab/smoother.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace smootherlab {

struct ExperimentData {
  Dataset train;
  Dataset test;
  Matrix y_train;  // n x C
  Matrix y_test;   // m x C
  bool classification = false;

  int num_targets() const noexcept { return static_cast<int>(y_train.cols()); }
};

/// Labelled data becomes one-hot targets; otherwise `targets` is the single column.
ExperimentData make_experiment_data(Dataset train, Dataset test);

struct PointRecord {
  std::size_t point_index = 0;
  std::string axis1_name;
  int axis1_value = 0;
  std::string axis2_name;
  int axis2_value = 0;
  int mechanism = 0;
  double raw_params = 0.0;
  double train_mse = 0.0;  // squared error summed over targets, averaged over rows
  double test_mse = 0.0;
  double test_zero_one = 0.0;  // argmax error; 0 for regression data
  double p_train = 0.0;
  double p_test = 0.0;
  Seed seed = 0;
  double wall_seconds = 0.0;  // not written to CSV
};

struct SweepResult {
  Family family = Family::rff_linear;
  Seed seed = 0;
  std::vector<PointRecord> records;
};

SweepResult run_sweep(const SweepSchedule& schedule, const ExperimentData& data);

/// One run per seed, the schedule's own seed replaced.
std::vector<SweepResult> run_sweep_seeds(const SweepSchedule& schedule, const std::vector<Seed>& seeds,
                                         const ExperimentData& data);

/// Records in grid_schedule order: axis 1 fastest.
SweepResult run_grid(Family family, const std::vector<int>& axis1_values, const std::vector<int>& axis2_values,
                     const SharedParams& shared, const ExperimentData& data);

/// The single model behind one schedule point, fitted to `targets`.
std::unique_ptr<FittedSmoother> fit_point_smoother(Family family, const SweepPoint& point,
                                                   const SharedParams& shared, const Matrix& train_inputs,
                                                   const Vector& targets);

/// Sum over targets of squared errors, averaged over rows.
double summed_squared_error(const Matrix& predictions, const Matrix& targets);

/// Fraction of rows whose argmax (lowest index on ties) differs from the label.
double argmax_error(const Matrix& predictions, const std::vector<int>& labels);

}  // namespace smootherlab
