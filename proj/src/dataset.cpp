#include "smootherlab/dataset.hpp"

#include "smootherlab/random.hpp"

#include <zlib.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace smootherlab {

namespace {

constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;
constexpr std::uint32_t kIdxImagesMagic = 0x00000803;

// gzread passes uncompressed files through unchanged.
std::vector<unsigned char> read_maybe_gzipped(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ArgumentError("file not found: " + path.string());
  }
  gzFile file = gzopen(path.string().c_str(), "rb");
  if (file == nullptr) throw ArgumentError("cannot open " + path.string());
  std::vector<unsigned char> bytes;
  unsigned char chunk[1 << 16];
  for (;;) {
    const int got = gzread(file, chunk, sizeof chunk);
    if (got < 0) {
      gzclose(file);
      throw FormatError("corrupt compressed stream in " + path.string());
    }
    if (got == 0) break;
    bytes.insert(bytes.end(), chunk, chunk + got);
  }
  gzclose(file);
  return bytes;
}

std::uint32_t read_be32(const std::vector<unsigned char>& bytes, std::size_t offset,
                        const std::filesystem::path& path) {
  if (offset + 4 > bytes.size()) throw FormatError("truncated IDX header in " + path.string());
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void set_labels(Dataset& ds, std::vector<int> labels) {
  int max_label = 0;
  for (int l : labels) {
    if (l < 0) throw FormatError("negative class label");
    max_label = std::max(max_label, l);
  }
  // Always at least binary.
  ds.num_classes = std::max(2, max_label + 1);
  ds.targets.resize(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ds.targets(static_cast<Eigen::Index>(i)) = labels[i];
  }
  ds.class_labels = std::move(labels);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

// Quotas per class summing to n_sub, differing by at most one.
std::vector<int> class_quotas(int n_sub, int num_classes) {
  std::vector<int> quota(static_cast<std::size_t>(num_classes), n_sub / num_classes);
  for (int c = 0; c < n_sub % num_classes; ++c) ++quota[static_cast<std::size_t>(c)];
  return quota;
}

std::vector<int> shuffled_indices(Eigen::Index n, Seed seed) {
  std::vector<int> perm(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i);
  auto rng = make_engine(seed, 0x5ab5);
  std::shuffle(perm.begin(), perm.end(), rng);
  return perm;
}

// Walks `perm`, taking rows whose class still has quota left. Taken rows are
// marked in `used`.
std::vector<int> take_balanced(const Dataset& ds, const std::vector<int>& perm, int count,
                               std::vector<char>& used) {
  const auto& labels = *ds.class_labels;
  auto quota = class_quotas(count, ds.num_classes);
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int idx : perm) {
    if (used[static_cast<std::size_t>(idx)]) continue;
    const int c = labels[static_cast<std::size_t>(idx)];
    if (quota[static_cast<std::size_t>(c)] > 0) {
      --quota[static_cast<std::size_t>(c)];
      used[static_cast<std::size_t>(idx)] = 1;
      rows.push_back(idx);
    }
  }
  if (static_cast<int>(rows.size()) != count) {
    throw ArgumentError("not enough examples per class for a balanced subset of " +
                        std::to_string(count));
  }
  return rows;
}

std::vector<int> take_plain(const std::vector<int>& perm, int count, std::vector<char>& used) {
  std::vector<int> rows;
  rows.reserve(static_cast<std::size_t>(count));
  for (int idx : perm) {
    if (static_cast<int>(rows.size()) == count) break;
    if (used[static_cast<std::size_t>(idx)]) continue;
    used[static_cast<std::size_t>(idx)] = 1;
    rows.push_back(idx);
  }
  return rows;
}

}  // namespace

void Dataset::validate() const {
  if (features.rows() < 1 || features.cols() < 1) {
    throw ArgumentError("dataset '" + name + "' must have n >= 1 and d >= 1");
  }
  if (targets.size() != features.rows()) {
    throw ConsistencyError("dataset '" + name + "': target count differs from row count");
  }
  if (!features.allFinite() || !targets.allFinite()) {
    throw ArgumentError("dataset '" + name + "' contains non-finite values");
  }
  if (class_labels) {
    if (static_cast<Eigen::Index>(class_labels->size()) != features.rows()) {
      throw ConsistencyError("dataset '" + name + "': label count differs from row count");
    }
    if (num_classes < 2) throw ArgumentError("dataset '" + name + "' needs at least two classes");
    for (int l : *class_labels) {
      if (l < 0 || l >= num_classes) throw ArgumentError("class label out of range");
    }
  }
}

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
  const auto images = read_maybe_gzipped(images_path);
  if (read_be32(images, 0, images_path) != kIdxImagesMagic) {
    throw FormatError("bad IDX image magic number in " + images_path.string());
  }
  const std::uint64_t count = read_be32(images, 4, images_path);
  const std::uint64_t rows = read_be32(images, 8, images_path);
  const std::uint64_t cols = read_be32(images, 12, images_path);
  const std::uint64_t d = rows * cols;
  if (count == 0 || d == 0) throw FormatError("empty IDX image file " + images_path.string());
  if (images.size() != 16 + count * d) {
    throw FormatError("IDX image payload size mismatch in " + images_path.string());
  }

  const auto labels = read_maybe_gzipped(labels_path);
  if (read_be32(labels, 0, labels_path) != kIdxLabelsMagic) {
    throw FormatError("bad IDX label magic number in " + labels_path.string());
  }
  const std::uint64_t label_count = read_be32(labels, 4, labels_path);
  if (labels.size() != 8 + label_count) {
    throw FormatError("IDX label payload size mismatch in " + labels_path.string());
  }
  if (label_count != count) {
    throw ConsistencyError("image count " + std::to_string(count) + " != label count " +
                           std::to_string(label_count));
  }

  Dataset ds;
  ds.name = images_path.filename().string();
  ds.features.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  const unsigned char* px = images.data() + 16;
  for (std::uint64_t i = 0; i < count; ++i) {
    for (std::uint64_t j = 0; j < d; ++j) {
      ds.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          px[i * d + j] / 255.0;
    }
  }
  set_labels(ds, std::vector<int>(labels.begin() + 8, labels.end()));
  ds.validate();
  return ds;
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("file not found: " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty CSV file " + path.string());
  const auto header = split_csv_line(line);
  if (header.size() < 2) throw FormatError("CSV needs at least one feature and a label column");
  const std::size_t width = header.size();

  std::vector<double> values;
  std::vector<double> label_values;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != width) {
      throw FormatError("CSV row " + std::to_string(row) + " has " + std::to_string(cells.size()) +
                        " columns, expected " + std::to_string(width));
    }
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      try {
        std::size_t used = 0;
        v = std::stod(cells[c], &used);
        if (used != cells[c].size() && cells[c].find_first_not_of(" \t", used) != std::string::npos) {
          throw std::invalid_argument("trailing characters");
        }
      } catch (const std::exception&) {
        throw FormatError("non-numeric CSV value '" + cells[c] + "' in row " + std::to_string(row));
      }
      if (!std::isfinite(v)) throw FormatError("non-finite CSV value in row " + std::to_string(row));
      (c + 1 == width ? label_values : values).push_back(v);
    }
  }
  if (row == 0) throw FormatError("CSV file has no data rows: " + path.string());

  Dataset ds;
  ds.name = path.filename().string();
  const auto n = static_cast<Eigen::Index>(row);
  const auto d = static_cast<Eigen::Index>(width - 1);
  ds.features = Eigen::Map<const Matrix>(values.data(), n, d);

  const bool integral = std::all_of(label_values.begin(), label_values.end(), [](double v) {
    return v >= 0.0 && v == std::floor(v) && v < 1e6;
  });
  if (integral) {
    std::vector<int> labels(label_values.size());
    std::transform(label_values.begin(), label_values.end(), labels.begin(),
                   [](double v) { return static_cast<int>(v); });
    set_labels(ds, std::move(labels));
  } else {
    ds.targets = Eigen::Map<const Vector>(label_values.data(), n);
  }
  normalize_minmax(ds);
  ds.validate();
  return ds;
}

void write_idx_images(const std::filesystem::path& path, int rows, int cols,
                      const std::vector<unsigned char>& pixels) {
  const auto per_image = static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
  if (per_image == 0 || pixels.size() % per_image != 0) {
    throw ArgumentError("pixel buffer is not a whole number of images");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  put_be32(out, kIdxImagesMagic);
  put_be32(out, static_cast<std::uint32_t>(pixels.size() / per_image));
  put_be32(out, static_cast<std::uint32_t>(rows));
  put_be32(out, static_cast<std::uint32_t>(cols));
  out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
}

void write_idx_labels(const std::filesystem::path& path, const std::vector<unsigned char>& labels) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write " + path.string());
  put_be32(out, kIdxLabelsMagic);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.write(reinterpret_cast<const char*>(labels.data()), static_cast<std::streamsize>(labels.size()));
}

void normalize_minmax(Dataset& ds) {
  for (Eigen::Index j = 0; j < ds.features.cols(); ++j) {
    auto col = ds.features.col(j);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi > lo) {
      col = (col.array() - lo) / (hi - lo);
    } else {
      col.setZero();
    }
  }
}

Dataset take_rows(const Dataset& ds, const std::vector<int>& rows) {
  Dataset out;
  out.name = ds.name;
  out.num_classes = ds.num_classes;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.features.resize(m, ds.features.cols());
  out.targets.resize(m);
  if (ds.true_values) out.true_values = Vector(m);
  if (ds.class_labels) out.class_labels = std::vector<int>(rows.size());
  for (Eigen::Index k = 0; k < m; ++k) {
    const int r = rows[static_cast<std::size_t>(k)];
    out.features.row(k) = ds.features.row(r);
    out.targets(k) = ds.targets(r);
    if (ds.true_values) (*out.true_values)(k) = (*ds.true_values)(r);
    if (ds.class_labels) (*out.class_labels)[static_cast<std::size_t>(k)] = (*ds.class_labels)[static_cast<std::size_t>(r)];
  }
  return out;
}

Dataset subsample(const Dataset& ds, int n_sub, Seed seed, bool balanced) {
  if (n_sub < 1 || n_sub > ds.size()) {
    throw ArgumentError("subsample size " + std::to_string(n_sub) + " outside [1, " +
                        std::to_string(ds.size()) + "]");
  }
  if (balanced && !ds.has_labels()) throw ArgumentError("balanced subsampling needs class labels");
  const auto perm = shuffled_indices(ds.size(), seed);
  std::vector<char> used(perm.size(), 0);
  const auto rows = balanced ? take_balanced(ds, perm, n_sub, used) : take_plain(perm, n_sub, used);
  return take_rows(ds, rows);
}

std::pair<Dataset, Dataset> split_disjoint(const Dataset& ds, int n_train, int n_test, Seed seed,
                                           bool balanced) {
  if (n_train < 1 || n_test < 1 || static_cast<Eigen::Index>(n_train) + n_test > ds.size()) {
    throw ArgumentError("cannot draw disjoint subsets of " + std::to_string(n_train) + " and " +
                        std::to_string(n_test) + " from " + std::to_string(ds.size()) + " rows");
  }
  if (balanced && !ds.has_labels()) throw ArgumentError("balanced subsampling needs class labels");
  const auto perm = shuffled_indices(ds.size(), seed);
  std::vector<char> used(perm.size(), 0);
  const auto train_rows =
      balanced ? take_balanced(ds, perm, n_train, used) : take_plain(perm, n_train, used);
  const auto test_rows =
      balanced ? take_balanced(ds, perm, n_test, used) : take_plain(perm, n_test, used);
  return {take_rows(ds, train_rows), take_rows(ds, test_rows)};
}

std::vector<OneVsAllTask> one_vs_all(const Dataset& ds) {
  if (!ds.has_labels()) throw ArgumentError("one-vs-all needs class labels");
  std::vector<OneVsAllTask> tasks;
  tasks.reserve(static_cast<std::size_t>(ds.num_classes));
  const auto& labels = *ds.class_labels;
  for (int c = 0; c < ds.num_classes; ++c) {
    OneVsAllTask task{&ds, c, Vector::Zero(ds.size())};
    for (Eigen::Index i = 0; i < ds.size(); ++i) {
      if (labels[static_cast<std::size_t>(i)] == c) task.binary_targets(i) = 1.0;
    }
    tasks.push_back(std::move(task));
  }
  return tasks;
}

Matrix one_hot_targets(const Dataset& ds) {
  if (!ds.has_labels()) throw ArgumentError("one-hot targets need class labels");
  Matrix y = Matrix::Zero(ds.size(), ds.num_classes);
  for (Eigen::Index i = 0; i < ds.size(); ++i) y(i, (*ds.class_labels)[static_cast<std::size_t>(i)]) = 1.0;
  return y;
}

const std::vector<std::string>& synthetic_generators() {
  static const std::vector<std::string> names{"linear", "sine", "friedman1", "constant"};
  return names;
}

double evaluate_true_function(const std::string& name, std::span<const double> x) {
  const auto at = [&](std::size_t j) { return j < x.size() ? x[j] : 0.0; };
  if (name == "linear") return 1.0 + 2.0 * at(0) - at(1);
  if (name == "sine") return std::sin(2.0 * std::numbers::pi * at(0));
  if (name == "friedman1") {
    return 10.0 * std::sin(std::numbers::pi * at(0) * at(1)) + 20.0 * (at(2) - 0.5) * (at(2) - 0.5) +
           10.0 * at(3) + 5.0 * at(4);
  }
  if (name == "constant") return 1.0;
  throw ArgumentError("unknown synthetic generator '" + name + "'");
}

Dataset synth_generate(const SyntheticSpec& spec) {
  if (spec.noise_std < 0.0) throw ArgumentError("noise_std must be >= 0");
  if (spec.n < 1 || spec.d < 1) throw ArgumentError("synthetic n and d must be >= 1");
  if (std::find(synthetic_generators().begin(), synthetic_generators().end(), spec.true_function) ==
      synthetic_generators().end()) {
    throw ArgumentError("unknown synthetic generator '" + spec.true_function + "'");
  }
  Dataset ds;
  ds.name = "synthetic-" + spec.true_function;
  ds.features.resize(spec.n, spec.d);
  auto input_rng = make_engine(spec.seed, 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    for (Eigen::Index j = 0; j < spec.d; ++j) ds.features(i, j) = unit(input_rng);
  }
  Vector truth(spec.n);
  for (Eigen::Index i = 0; i < spec.n; ++i) {
    truth(i) = evaluate_true_function(
        spec.true_function,
        std::span<const double>(ds.features.row(i).data(), static_cast<std::size_t>(spec.d)));
  }
  ds.true_values = truth;
  ds.targets = truth;
  if (spec.noise_std > 0.0) ds.targets = resample_targets(ds, spec.noise_std, spec.seed);
  return ds;
}

Vector resample_targets(const Dataset& ds, double noise_std, Seed seed) {
  if (!ds.true_values) throw ArgumentError("target resampling needs the true function values");
  if (noise_std < 0.0) throw ArgumentError("noise_std must be >= 0");
  auto rng = make_engine(seed, 2);
  std::normal_distribution<double> noise(0.0, noise_std > 0.0 ? noise_std : 1.0);
  Vector y = *ds.true_values;
  if (noise_std > 0.0) {
    for (Eigen::Index i = 0; i < y.size(); ++i) y(i) += noise(rng);
  }
  return y;
}

}  // namespace smootherlab
