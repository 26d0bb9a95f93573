#include "smootherlab/schedule.hpp"

namespace smootherlab {

const char* to_string(Family family) noexcept {
  switch (family) {
    case Family::rff_linear:
      return "rff_linear";
    case Family::rff_minnorm:
      return "rff_minnorm";
    case Family::tree:
      return "tree";
    case Family::boosting:
      return "boosting";
  }
  return "unknown";
}

Family parse_family(const std::string& name) {
  for (Family f : {Family::rff_linear, Family::rff_minnorm, Family::tree, Family::boosting}) {
    if (name == to_string(f)) return f;
  }
  throw ArgumentError("unknown model family '" + name + "'");
}

const std::array<std::string, 2>& axis_names(Family family) {
  static const std::array<std::string, 2> rff{"P_PC", "P_ex"};
  static const std::array<std::string, 2> minnorm{"P_phi", "none"};
  static const std::array<std::string, 2> tree{"P_leaf", "P_ens"};
  static const std::array<std::string, 2> boost{"P_boost", "P_ens"};
  switch (family) {
    case Family::rff_linear:
      return rff;
    case Family::rff_minnorm:
      return minnorm;
    case Family::tree:
      return tree;
    case Family::boosting:
      return boost;
  }
  return rff;
}

int axis_index(Family family, const std::string& axis) {
  const auto& names = axis_names(family);
  if (axis == names[0]) return 0;
  if (axis == names[1] && family != Family::rff_minnorm) return 1;
  throw ArgumentError("axis '" + axis + "' is not valid for family " + to_string(family));
}

std::array<int, 2> default_start(Family family) {
  switch (family) {
    case Family::rff_linear:
      return {1, 0};
    case Family::rff_minnorm:
      return {1, 0};
    case Family::tree:
    case Family::boosting:
      return {1, 1};
  }
  return {1, 1};
}

SweepSchedule build_schedule(Family family, std::array<int, 2> start, const std::vector<ScheduleStep>& steps,
                             const SharedParams& shared) {
  SweepSchedule s;
  s.family = family;
  s.shared = shared;
  std::array<int, 2> current = start;
  for (const auto& step : steps) {
    if (step.axis != 0 && step.axis != 1) throw ArgumentError("axis must be 0 or 1");
    if (step.axis == 1 && family == Family::rff_minnorm) {
      throw ArgumentError("family rff_minnorm has a single axis");
    }
    for (int v : step.values) {
      current[static_cast<std::size_t>(step.axis)] = v;
      s.points.push_back({current[0], current[1], step.axis});
    }
  }
  return s;
}

SweepSchedule composite_schedule(Family family, const std::vector<int>& axis1_values,
                                 const std::vector<int>& axis2_values, int switch_value,
                                 const SharedParams& shared) {
  std::vector<int> first;
  for (int v : axis1_values) {
    if (v <= switch_value) first.push_back(v);
  }
  if (first.empty() || first.back() != switch_value) first.push_back(switch_value);
  std::vector<ScheduleStep> steps{{0, first}};
  if (family != Family::rff_minnorm && !axis2_values.empty()) steps.push_back({1, axis2_values});
  return build_schedule(family, default_start(family), steps, shared);
}

SweepSchedule grid_schedule(Family family, const std::vector<int>& axis1_values,
                            const std::vector<int>& axis2_values, const SharedParams& shared) {
  SweepSchedule s;
  s.family = family;
  s.shared = shared;
  for (int b : axis2_values) {
    for (int a : axis1_values) s.points.push_back({a, b, 0});
  }
  return s;
}

double raw_params(Family family, int axis1, int axis2) {
  switch (family) {
    case Family::rff_linear:
      return static_cast<double>(axis1) + static_cast<double>(axis2);
    case Family::rff_minnorm:
      return static_cast<double>(axis1);
    case Family::tree:
    case Family::boosting:
      return static_cast<double>(axis1) * static_cast<double>(axis2);
  }
  return 0.0;
}

void validate_schedule(const SweepSchedule& schedule, Eigen::Index n_train) {
  const auto& sh = schedule.shared;
  if (schedule.points.empty()) throw ArgumentError("schedule has no points");
  if (!(sh.rff_scale > 0.0)) throw ArgumentError("rff_scale must be > 0");
  if (!(sh.learning_rate > 0.0 && sh.learning_rate <= 1.0)) {
    throw ArgumentError("learning_rate must lie in (0, 1]");
  }
  if (sh.leaf_budget < 1) throw ArgumentError("leaf_budget must be >= 1");
  if (sh.class_index < 0) throw ArgumentError("class_index must be >= 0");
  if (sh.feature_subset < 0) throw ArgumentError("feature_subset must be >= 0");

  const auto& names = axis_names(schedule.family);
  for (std::size_t i = 0; i < schedule.points.size(); ++i) {
    const auto& p = schedule.points[i];
    const auto need = [&](bool ok, const std::string& what) {
      if (!ok) throw ValidationError(i, what);
    };
    const std::string a1 = names[0] + "=" + std::to_string(p.axis1);
    const std::string a2 = names[1] + "=" + std::to_string(p.axis2);
    switch (schedule.family) {
      case Family::rff_linear:
        need(p.axis1 >= 1, a1 + " must be >= 1");
        need(p.axis1 <= n_train - 1, a1 + " exceeds n-1 = " + std::to_string(n_train - 1));
        need(p.axis2 >= 0, a2 + " must be >= 0");
        break;
      case Family::rff_minnorm:
        need(p.axis1 >= 1, a1 + " must be >= 1");
        break;
      case Family::tree:
      case Family::boosting:
        need(p.axis1 >= 1, a1 + " must be >= 1");
        need(p.axis2 >= 1, a2 + " must be >= 1");
        break;
    }
  }
}

}  // namespace smootherlab
