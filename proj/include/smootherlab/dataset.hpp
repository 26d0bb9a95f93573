#pragma once

#include "smootherlab/common.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace smootherlab {

/// Feature matrix (n x d, rows are observations) plus regression targets.
///
/// Classification data carries `class_labels` in {0, ..., num_classes-1};
/// its `targets` hold the label values and are normally replaced by the
/// indicator targets of a one-vs-all task before fitting. Synthetic data also
/// carries the noiseless `true_values` f*(x_i).
struct Dataset {
  Matrix features;
  Vector targets;
  std::optional<std::vector<int>> class_labels;
  int num_classes = 0;
  std::optional<Vector> true_values;
  std::string name;

  Eigen::Index size() const noexcept { return features.rows(); }
  Eigen::Index dim() const noexcept { return features.cols(); }
  bool has_labels() const noexcept { return class_labels.has_value(); }

  /// Throws ArgumentError when an invariant does not hold.
  void validate() const;
};

struct SyntheticSpec {
  std::string true_function = "sine";
  double noise_std = 0.0;
  int n = 100;
  int d = 1;
  Seed seed = 0;
};

struct OneVsAllTask {
  const Dataset* base = nullptr;
  int class_index = 0;
  Vector binary_targets;
};

// ---- ingestion ----

/// Reads an IDX image/label pair. Either file may be gzip-compressed.
/// Pixels are divided by 255 and images flattened row-major.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// Header row, numeric columns, last column is the label. Features are
/// min-max scaled per column; integer labels become class labels.
Dataset load_csv(const std::filesystem::path& path);

/// Writers for the uncompressed IDX encoding.
void write_idx_images(const std::filesystem::path& path, int rows, int cols,
                      const std::vector<unsigned char>& pixels);
void write_idx_labels(const std::filesystem::path& path, const std::vector<unsigned char>& labels);

/// Per-column min-max scaling to [0, 1]; constant columns map to 0.
void normalize_minmax(Dataset& ds);

// ---- sampling ----

/// Deterministic subset of `n_sub` rows. With `balanced`, class counts differ by at most one.
Dataset subsample(const Dataset& ds, int n_sub, Seed seed, bool balanced);

/// Two disjoint subsets drawn from one pool, for data sets without a separate test split.
std::pair<Dataset, Dataset> split_disjoint(const Dataset& ds, int n_train, int n_test, Seed seed,
                                           bool balanced);

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows);

/// One indicator-target task per class; targets are {0, 1}.
std::vector<OneVsAllTask> one_vs_all(const Dataset& ds);

/// Indicator matrix n x C (column c is task c's targets).
Matrix one_hot_targets(const Dataset& ds);

// ---- synthetic data ----

/// Names accepted by SyntheticSpec::true_function.
const std::vector<std::string>& synthetic_generators();

/// f*(x) for the named generator.
double evaluate_true_function(const std::string& name, std::span<const double> x);

Dataset synth_generate(const SyntheticSpec& spec);

/// Same inputs and f*, fresh noise draw keyed on `seed`.
Vector resample_targets(const Dataset& ds, double noise_std, Seed seed);

}  // namespace smootherlab
