#pragma once

// JSON experiment configuration. Every key is optional; unknown keys are
// rejected. See configs/ for examples and README.md for the full list.

#include "smootherlab/dataset.hpp"
#include "smootherlab/schedule.hpp"
#include "smootherlab/studies.hpp"

#include <json.hpp>

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace smootherlab {

struct DatasetConfig {
  std::string source = "idx";  // idx | csv | synthetic
  std::string images = "data/mnist5k-images-idx3-ubyte.gz";
  std::string labels = "data/mnist5k-labels-idx1-ubyte.gz";
  std::string test_images;  // empty: test rows are drawn from the same pool
  std::string test_labels;
  std::string csv;
  std::string test_csv;
  int n_train = 1000;
  int n_test = 2000;
  bool balanced = true;
  Seed seed = 0;
  // synthetic
  std::string function = "sine";
  double noise_std = 0.1;
  int d = 1;
};

struct AxisStepConfig {
  std::string axis;
  std::vector<int> values;
};

struct ScheduleConfig {
  std::optional<std::array<int, 2>> start;
  std::vector<AxisStepConfig> steps;
  std::vector<std::array<int, 2>> points;  // explicit points instead of steps
};

struct GridConfig {
  std::vector<int> axis1;
  std::vector<int> axis2;
};

struct PeaksConfig {
  std::vector<int> axis1;
  std::vector<int> axis2;
  std::vector<int> switch_values;
};

struct CondConfig {
  std::vector<int> p_phi{250, 500, 1000, 2000, 4000};
  std::vector<int> k{1, 10, 100, 500, 999};
};

struct FixedDesignConfig {
  std::vector<int> p_phi{1000, 2000, 8000};
  double noise_std = 0.5;
  double eps = 1e-4;
};

struct SelectConfig {
  std::vector<int> leaf_grid{10, 50, 100, 200, 500, 0};  // 0 = n
  std::vector<double> lr_grid{0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.85};
  double eps = 1e-4;
  int max_rounds = 500;
};

struct BackToUConfig {
  std::vector<int> axis1;
  std::vector<int> axis2;
  int switch_value = 0;
  std::vector<int> dotted_axis1;
};

struct Config {
  nlohmann::json effective;             // file contents with overrides applied
  std::filesystem::path base_dir;       // for relative data paths
  DatasetConfig dataset;
  std::string family = "rff_linear";
  ScheduleConfig schedule;
  GridConfig grid;
  SharedParams shared;
  std::vector<Seed> seeds{0};
  int threads = 0;
  std::string out_dir = "out";
  bool svg = false;
  std::array<int, 2> point{1, 1};        // fit
  std::vector<std::array<int, 2>> effparams_points;
  PeaksConfig peaks;
  CondConfig cond;
  FixedDesignConfig fixed_design;
  BiasVarianceConfig bias_variance;
  SelectConfig select;
  BackToUConfig back_to_u;

  Family family_id() const { return parse_family(family); }
  /// Schedule from `schedule`, seeds excluded.
  SweepSchedule sweep_schedule() const;
};

/// Applies one `dotted.key=value` override. The value is parsed as JSON and
/// taken as a string when that fails.
void apply_override(nlohmann::json& root, const std::string& assignment);

Config parse_config(const nlohmann::json& root, const std::filesystem::path& base_dir = {});

Config load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides);

/// Train and test sets described by the dataset section.
std::pair<Dataset, Dataset> load_datasets(const Config& config);

}  // namespace smootherlab
