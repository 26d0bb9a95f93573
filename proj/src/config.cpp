#include "smootherlab/config.hpp"

#include "smootherlab/random.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace smootherlab {

using nlohmann::json;

namespace {

// Reads the keys of one JSON object and rejects any it was not asked about.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ArgumentError("config '" + display() + "' must be an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  void read(const std::string& key, T& out) {
    if (!has(key)) return;
    try {
      out = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ArgumentError("config key '" + full(key) + "' has the wrong type: " + e.what());
    }
  }

  const json& sub(const std::string& key) {
    seen_.insert(key);
    return obj_.at(key);
  }

  std::string full(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& item : obj_.items()) {
      if (!seen_.count(item.key())) throw ArgumentError("unknown config key '" + full(item.key()) + "'");
    }
  }

 private:
  std::string display() const { return path_.empty() ? "<root>" : path_; }

  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

std::array<int, 2> read_pair(const json& j, const std::string& where) {
  try {
    const auto v = j.get<std::vector<int>>();
    if (v.size() != 2) throw ArgumentError("config key '" + where + "' must hold two integers");
    return {v[0], v[1]};
  } catch (const json::exception& e) {
    throw ArgumentError("config key '" + where + "' must hold two integers: " + e.what());
  }
}

std::vector<std::array<int, 2>> read_pairs(const json& j, const std::string& where) {
  if (!j.is_array()) throw ArgumentError("config key '" + where + "' must be a list of [axis1, axis2] pairs");
  std::vector<std::array<int, 2>> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_pair(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

void read_dataset(const json& j, DatasetConfig& d) {
  ObjectReader r(j, "dataset");
  r.read("source", d.source);
  r.read("images", d.images);
  r.read("labels", d.labels);
  r.read("test_images", d.test_images);
  r.read("test_labels", d.test_labels);
  r.read("csv", d.csv);
  r.read("test_csv", d.test_csv);
  r.read("n_train", d.n_train);
  r.read("n_test", d.n_test);
  r.read("balanced", d.balanced);
  r.read("seed", d.seed);
  r.read("function", d.function);
  r.read("noise_std", d.noise_std);
  r.read("d", d.d);
  r.finish();
  if (d.source != "idx" && d.source != "csv" && d.source != "synthetic") {
    throw ArgumentError("dataset.source must be idx, csv or synthetic");
  }
  if (d.n_train < 1 || d.n_test < 1) throw ArgumentError("dataset.n_train and dataset.n_test must be >= 1");
}

void read_shared(const json& j, SharedParams& s) {
  ObjectReader r(j, "shared");
  r.read("learning_rate", s.learning_rate);
  r.read("leaf_budget", s.leaf_budget);
  r.read("rff_scale", s.rff_scale);
  r.read("class_index", s.class_index);
  r.read("tolerance_factor", s.tolerance_factor);
  r.read("standardize", s.standardize);
  r.read("feature_subset", s.feature_subset);
  r.finish();
}

void read_schedule(const json& j, ScheduleConfig& s) {
  ObjectReader r(j, "schedule");
  if (r.has("start")) s.start = read_pair(r.sub("start"), "schedule.start");
  if (r.has("points")) s.points = read_pairs(r.sub("points"), "schedule.points");
  if (r.has("steps")) {
    const json& steps = r.sub("steps");
    if (!steps.is_array()) throw ArgumentError("config key 'schedule.steps' must be a list");
    for (std::size_t i = 0; i < steps.size(); ++i) {
      ObjectReader sr(steps[i], "schedule.steps[" + std::to_string(i) + "]");
      AxisStepConfig step;
      sr.read("axis", step.axis);
      sr.read("values", step.values);
      sr.finish();
      s.steps.push_back(std::move(step));
    }
  }
  r.finish();
  if (!s.points.empty() && !s.steps.empty()) {
    throw ArgumentError("schedule takes either 'points' or 'steps', not both");
  }
}

std::filesystem::path resolve_path(const std::string& p, const std::filesystem::path& base) {
  namespace fs = std::filesystem;
  const fs::path path(p);
  if (path.is_absolute() || fs::exists(path) || base.empty()) return path;
  for (const fs::path& dir : {base, base.parent_path()}) {
    if (fs::exists(dir / path)) return dir / path;
  }
  return path;
}

}  // namespace

SweepSchedule Config::sweep_schedule() const {
  const Family fam = family_id();
  if (!schedule.points.empty()) {
    SweepSchedule s;
    s.family = fam;
    s.shared = shared;
    std::array<int, 2> prev = schedule.points.front();
    for (std::size_t i = 0; i < schedule.points.size(); ++i) {
      const auto& p = schedule.points[i];
      const int mech = i > 0 && p[1] != prev[1] ? 1 : 0;
      s.points.push_back({p[0], p[1], mech});
      prev = p;
    }
    return s;
  }
  if (schedule.steps.empty()) throw ArgumentError("config has no schedule (schedule.steps or schedule.points)");
  std::vector<ScheduleStep> steps;
  for (const auto& st : schedule.steps) steps.push_back({axis_index(fam, st.axis), st.values});
  return build_schedule(fam, schedule.start.value_or(default_start(fam)), steps, shared);
}

void apply_override(json& root, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ArgumentError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* node = &root;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) {
    if (part.empty()) throw ArgumentError("override key '" + key + "' has an empty component");
    path.push_back(part);
  }
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    if (!node->is_object()) throw ArgumentError("override key '" + key + "' descends into a non-object");
    node = &(*node)[path[i]];
    if (node->is_null()) *node = json::object();
  }
  if (!node->is_object()) throw ArgumentError("override key '" + key + "' descends into a non-object");
  (*node)[path.back()] = std::move(value);
}

Config parse_config(const json& root, const std::filesystem::path& base_dir) {
  Config c;
  c.effective = root.is_null() ? json::object() : root;
  c.base_dir = base_dir;
  ObjectReader r(c.effective, "");
  if (r.has("dataset")) read_dataset(r.sub("dataset"), c.dataset);
  r.read("family", c.family);
  parse_family(c.family);
  if (r.has("schedule")) read_schedule(r.sub("schedule"), c.schedule);
  if (r.has("grid")) {
    ObjectReader g(r.sub("grid"), "grid");
    g.read("axis1", c.grid.axis1);
    g.read("axis2", c.grid.axis2);
    g.finish();
  }
  if (r.has("shared")) read_shared(r.sub("shared"), c.shared);
  r.read("seeds", c.seeds);
  if (c.seeds.empty()) throw ArgumentError("config key 'seeds' must not be empty");
  c.shared.seed = c.seeds.front();
  r.read("threads", c.threads);
  if (r.has("output")) {
    ObjectReader o(r.sub("output"), "output");
    o.read("dir", c.out_dir);
    o.read("svg", c.svg);
    o.finish();
  }
  if (r.has("fit")) {
    ObjectReader f(r.sub("fit"), "fit");
    if (f.has("point")) c.point = read_pair(f.sub("point"), "fit.point");
    f.finish();
  }
  if (r.has("effparams")) {
    ObjectReader e(r.sub("effparams"), "effparams");
    if (e.has("points")) c.effparams_points = read_pairs(e.sub("points"), "effparams.points");
    e.finish();
  }
  if (r.has("peaks")) {
    ObjectReader p(r.sub("peaks"), "peaks");
    p.read("axis1", c.peaks.axis1);
    p.read("axis2", c.peaks.axis2);
    p.read("switch_values", c.peaks.switch_values);
    p.finish();
  }
  if (r.has("cond")) {
    ObjectReader p(r.sub("cond"), "cond");
    p.read("p_phi", c.cond.p_phi);
    p.read("k", c.cond.k);
    p.finish();
  }
  if (r.has("fixed_design")) {
    ObjectReader p(r.sub("fixed_design"), "fixed_design");
    p.read("p_phi", c.fixed_design.p_phi);
    p.read("noise_std", c.fixed_design.noise_std);
    p.read("eps", c.fixed_design.eps);
    p.finish();
  }
  if (r.has("bias_variance")) {
    ObjectReader p(r.sub("bias_variance"), "bias_variance");
    p.read("model", c.bias_variance.model);
    p.read("p", c.bias_variance.p);
    p.read("k", c.bias_variance.k);
    p.read("n_test", c.bias_variance.n_test);
    p.read("n_resamples", c.bias_variance.n_resamples);
    p.finish();
  }
  if (r.has("select")) {
    ObjectReader p(r.sub("select"), "select");
    p.read("leaf_grid", c.select.leaf_grid);
    p.read("lr_grid", c.select.lr_grid);
    p.read("eps", c.select.eps);
    p.read("max_rounds", c.select.max_rounds);
    p.finish();
  }
  if (r.has("back_to_u")) {
    ObjectReader p(r.sub("back_to_u"), "back_to_u");
    p.read("axis1", c.back_to_u.axis1);
    p.read("axis2", c.back_to_u.axis2);
    p.read("switch", c.back_to_u.switch_value);
    p.read("dotted_axis1", c.back_to_u.dotted_axis1);
    p.finish();
  }
  r.finish();
  return c;
}

Config load_config(const std::optional<std::filesystem::path>& path, const std::vector<std::string>& overrides) {
  json root = json::object();
  std::filesystem::path base;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw ArgumentError("config file not found: " + path->string());
    try {
      root = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
      throw ArgumentError("cannot parse " + path->string() + ": " + e.what());
    }
    base = std::filesystem::absolute(*path).parent_path();
  }
  for (const auto& o : overrides) apply_override(root, o);
  return parse_config(root, base);
}

std::pair<Dataset, Dataset> load_datasets(const Config& config) {
  const DatasetConfig& d = config.dataset;
  const auto path = [&](const std::string& p) { return resolve_path(p, config.base_dir); };
  if (d.source == "synthetic") {
    SyntheticSpec spec{d.function, d.noise_std, d.n_train, d.d, d.seed};
    Dataset train = synth_generate(spec);
    spec.n = d.n_test;
    spec.seed = derive_seed(d.seed, 0x7e57);
    Dataset test = synth_generate(spec);
    return {std::move(train), std::move(test)};
  }

  const bool idx = d.source == "idx";
  Dataset pool = idx ? load_idx(path(d.images), path(d.labels)) : load_csv(path(d.csv));
  const bool separate_test = idx ? !d.test_images.empty() : !d.test_csv.empty();
  const bool balanced = d.balanced && pool.has_labels();
  if (!separate_test) return split_disjoint(pool, d.n_train, d.n_test, d.seed, balanced);
  Dataset test_pool = idx ? load_idx(path(d.test_images), path(d.test_labels)) : load_csv(path(d.test_csv));
  return {subsample(pool, d.n_train, d.seed, balanced),
          subsample(test_pool, d.n_test, derive_seed(d.seed, 1), balanced && test_pool.has_labels())};
}

}  // namespace smootherlab
