#pragma once

// Sweep schedules over a model family's two parameter axes.
//
//   family        axis 1    axis 2    raw parameters
//   rff_linear    P_PC      P_ex      P_PC + P_ex   (PCR on P_phi = P_PC + P_ex features)
//   rff_minnorm   P_phi     -         P_phi         (OLS below n, min-norm from n on)
//   tree          P_leaf    P_ens     P_leaf * P_ens
//   boosting      P_boost   P_ens     P_boost * P_ens

#include "smootherlab/boosting_smoothers.hpp"
#include "smootherlab/common.hpp"
#include "smootherlab/rff.hpp"

#include <array>
#include <string>
#include <vector>

namespace smootherlab {

enum class Family { rff_linear, rff_minnorm, tree, boosting };

const char* to_string(Family family) noexcept;
Family parse_family(const std::string& name);
const std::array<std::string, 2>& axis_names(Family family);
/// 0 or 1 for a valid axis name of the family; ArgumentError otherwise.
int axis_index(Family family, const std::string& axis);

struct SharedParams {
  Seed seed = 0;
  double learning_rate = kDefaultLearningRate;
  int leaf_budget = kDefaultBoostLeafBudget;
  double rff_scale = kDefaultRffScale;
  int class_index = 0;            // task whose weights give p_train / p_test
  double tolerance_factor = 1.0;
  bool standardize = true;
  int feature_subset = 0;         // 0: floor(sqrt(d))
};

struct SweepPoint {
  int axis1 = 0;
  int axis2 = 0;
  int mechanism = 0;  // axis that changed to reach this point
};

struct SweepSchedule {
  Family family = Family::rff_linear;
  std::vector<SweepPoint> points;
  SharedParams shared;
};

struct ScheduleStep {
  int axis = 0;
  std::vector<int> values;
};

/// Axis values before the first step: P_PC 1 / P_ex 0, P_phi 1, P_leaf 1 /
/// P_ens 1, P_boost 1 / P_ens 1.
std::array<int, 2> default_start(Family family);

/// Every value of every step becomes a point; the other axis keeps its last value.
SweepSchedule build_schedule(Family family, std::array<int, 2> start, const std::vector<ScheduleStep>& steps,
                             const SharedParams& shared);

/// Axis-1 values up to and including `switch_value`, then the axis-2 values
/// at axis 1 = switch_value.
SweepSchedule composite_schedule(Family family, const std::vector<int>& axis1_values,
                                 const std::vector<int>& axis2_values, int switch_value,
                                 const SharedParams& shared);

/// Cross product, axis 1 varying fastest.
SweepSchedule grid_schedule(Family family, const std::vector<int>& axis1_values,
                            const std::vector<int>& axis2_values, const SharedParams& shared);

double raw_params(Family family, int axis1, int axis2);

/// Throws ValidationError naming the first infeasible point.
void validate_schedule(const SweepSchedule& schedule, Eigen::Index n_train);

}  // namespace smootherlab
