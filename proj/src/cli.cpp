#include "smootherlab/cli.hpp"

#include "smootherlab/config.hpp"
#include "smootherlab/effective_params.hpp"
#include "smootherlab/experiments.hpp"
#include "smootherlab/parallel.hpp"
#include "smootherlab/random.hpp"
#include "smootherlab/report_io.hpp"
#include "smootherlab/rff.hpp"
#include "smootherlab/studies.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <random>

namespace smootherlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Invocation {
  std::string command;
  std::optional<std::string> config_path;
  std::vector<std::string> overrides;
  std::optional<std::string> out_dir;
  std::optional<Seed> seed;
  std::optional<int> threads;
  bool full_scale = false;
  bool svg = false;
};

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ExperimentData load_data(const Config& cfg) {
  auto [train, test] = load_datasets(cfg);
  return make_experiment_data(std::move(train), std::move(test));
}

Vector task_column(const Matrix& y, int class_index) {
  if (class_index < 0 || class_index >= y.cols()) {
    throw ArgumentError(fmt::format("shared.class_index {} is out of range for {} target(s)", class_index, y.cols()));
  }
  return y.col(class_index);
}

SharedParams shared_for(const Config& cfg, Seed seed) {
  SharedParams s = cfg.shared;
  s.seed = seed;
  return s;
}

void maybe_svg(const Config& cfg, const fs::path& path, const SvgChart& chart, std::vector<fs::path>& written) {
  if (!cfg.svg) return;
  write_file_atomic(path, render_svg(chart));
  written.push_back(path);
}

SvgChart sweep_chart(const std::string& title, const std::vector<SweepResult>& results) {
  SvgChart chart;
  chart.title = title;
  chart.x_label = "raw parameters";
  chart.y_label = "test error";
  for (const auto& r : results) {
    SvgSeries s;
    s.label = fmt::format("seed {}", r.seed);
    s.x = column(r, &PointRecord::raw_params);
    s.y = column(r, &PointRecord::test_mse);
    chart.series.push_back(std::move(s));
  }
  return chart;
}

std::string join_paths(const std::vector<fs::path>& paths) {
  std::string s;
  for (const auto& p : paths) s += (s.empty() ? "" : ", ") + p.string();
  return s;
}

std::size_t point_count(const std::vector<SweepResult>& results) {
  std::size_t n = 0;
  for (const auto& r : results) n += r.records.size();
  return n;
}

using Command = std::string (*)(const Config&, const fs::path&, std::vector<fs::path>&);

std::string cmd_ingest(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const auto [train, test] = load_datasets(cfg);
  CsvTable t;
  t.header = {"split", "rows", "dim", "num_classes", "class", "count"};
  for (const auto* ds : {&train, &test}) {
    const std::string split = ds == &train ? "train" : "test";
    if (!ds->has_labels()) {
      t.rows.push_back({split, std::to_string(ds->size()), std::to_string(ds->dim()), "0", "", ""});
      continue;
    }
    std::vector<int> counts(static_cast<std::size_t>(ds->num_classes), 0);
    for (int l : *ds->class_labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < counts.size(); ++c) {
      t.rows.push_back({split, std::to_string(ds->size()), std::to_string(ds->dim()), std::to_string(ds->num_classes),
                        std::to_string(c), std::to_string(counts[c])});
    }
  }
  const fs::path path = out / "dataset_summary.csv";
  write_csv(path, t);
  written.push_back(path);
  return fmt::format("{} train rows, {} test rows, dim {}", train.size(), test.size(), train.dim());
}

std::string cmd_fit(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const ExperimentData data = load_data(cfg);
  SweepSchedule s;
  s.family = cfg.family_id();
  s.shared = cfg.shared;
  s.points = {{cfg.point[0], cfg.point[1], 0}};
  const auto results = run_sweep_seeds(s, cfg.seeds, data);
  const fs::path path = out / "fit.csv";
  write_csv(path, sweep_table(results));
  written.push_back(path);
  const PointRecord& r = results.front().records.front();
  return fmt::format("{} ({}, {}): train {:.6g}, test {:.6g}, p_train {:.4g}, p_test {:.4g}", cfg.family,
                     r.axis1_value, r.axis2_value, r.train_mse, r.test_mse, r.p_train, r.p_test);
}

std::string cmd_sweep(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const ExperimentData data = load_data(cfg);
  const auto results = run_sweep_seeds(cfg.sweep_schedule(), cfg.seeds, data);
  const fs::path path = out / "sweep.csv";
  write_csv(path, sweep_table(results));
  written.push_back(path);
  maybe_svg(cfg, out / "sweep.svg", sweep_chart(cfg.family + " sweep", results), written);
  const auto& first = results.front();
  const auto test = column(first, &PointRecord::test_mse);
  const std::size_t peak = argmax(test);
  return fmt::format("{} points over {} seed(s); seed {} test error peaks at raw params {}", point_count(results),
                     results.size(), first.seed, first.records[peak].raw_params);
}

std::string cmd_grid(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  if (cfg.grid.axis1.empty() || cfg.grid.axis2.empty()) throw ArgumentError("grid.axis1 and grid.axis2 are required");
  const ExperimentData data = load_data(cfg);
  std::vector<SweepResult> results;
  for (Seed seed : cfg.seeds) {
    results.push_back(run_grid(cfg.family_id(), cfg.grid.axis1, cfg.grid.axis2, shared_for(cfg, seed), data));
  }
  const fs::path path = out / "grid.csv";
  write_csv(path, sweep_table(results));
  written.push_back(path);
  return fmt::format("{} grid points over {} seed(s)", point_count(results), results.size());
}

std::string cmd_peaks(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const PeaksConfig& p = cfg.peaks;
  if (p.axis1.empty() || p.axis2.empty() || p.switch_values.empty()) {
    throw ArgumentError("peaks.axis1, peaks.axis2 and peaks.switch_values are required");
  }
  const ExperimentData data = load_data(cfg);
  std::map<int, std::vector<SweepResult>> by_switch;
  for (Seed seed : cfg.seeds) {
    const auto runs = peak_move(cfg.family_id(), p.axis1, p.axis2, p.switch_values, shared_for(cfg, seed), data);
    for (std::size_t i = 0; i < runs.size(); ++i) by_switch[p.switch_values[i]].push_back(runs[i]);
  }
  std::string summary;
  SvgChart chart;
  chart.title = cfg.family + " peak moving";
  chart.x_label = "raw parameters";
  chart.y_label = "test error";
  for (const auto& [v, runs] : by_switch) {
    const fs::path path = out / fmt::format("peaks_switch_{}.csv", v);
    write_csv(path, sweep_table(runs));
    written.push_back(path);
    const auto& first = runs.front();
    const std::size_t peak = argmax(column(first, &PointRecord::test_mse));
    summary += fmt::format("{}switch {} -> peak at raw params {}", summary.empty() ? "" : "; ", v,
                           first.records[peak].raw_params);
    chart.series.push_back({fmt::format("switch {}", v), column(first, &PointRecord::raw_params),
                            column(first, &PointRecord::test_mse)});
  }
  maybe_svg(cfg, out / "peaks.svg", chart, written);
  return summary;
}

std::string cmd_effparams(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const ExperimentData data = load_data(cfg);
  const Family fam = cfg.family_id();
  const auto points = cfg.effparams_points.empty() ? std::vector<std::array<int, 2>>{cfg.point} : cfg.effparams_points;
  const Vector y = task_column(data.y_train, cfg.shared.class_index);
  std::vector<std::pair<std::string, EffParamsReport>> reports;
  for (Seed seed : cfg.seeds) {
    const SharedParams shared = shared_for(cfg, seed);
    for (const auto& pt : points) {
      SweepSchedule check{fam, {{pt[0], pt[1], 0}}, shared};
      validate_schedule(check, data.train.size());
      const auto model = fit_point_smoother(fam, {pt[0], pt[1], 0}, shared, data.train.features, y);
      const std::string id = fmt::format("{}:{}:{}:{}", cfg.family, pt[0], pt[1], seed);
      reports.emplace_back(id, generalized_eff_params(*model, data.train.features, "train"));
      reports.emplace_back(id, generalized_eff_params(*model, data.test.features, "test"));
    }
  }
  const fs::path path = out / "effparams.csv";
  write_csv(path, effparams_table(reports));
  written.push_back(path);
  const auto& r = reports.front().second;
  return fmt::format("{} configuration(s); first: p_train {:.4g}, effective k {:.4g}", reports.size() / 2,
                     r.p_generalized, r.effective_knn);
}

std::string cmd_cond(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const auto [train, test] = load_datasets(cfg);
  if (cfg.cond.p_phi.empty()) throw ArgumentError("cond.p_phi must not be empty");
  const int p_max = *std::max_element(cfg.cond.p_phi.begin(), cfg.cond.p_phi.end());
  if (p_max < 1) throw ArgumentError("cond.p_phi values must be >= 1");
  const RffMap map = sample_frequencies(cfg.shared.seed, p_max, static_cast<int>(train.dim()), cfg.shared.rff_scale);
  const auto rows = cond_study(map, train.features, cfg.cond.p_phi, cfg.cond.k, cfg.shared.tolerance_factor);
  const fs::path path = out / "cond.csv";
  write_csv(path, cond_table(rows));
  written.push_back(path);
  std::size_t finite = 0;
  for (const auto& r : rows) finite += std::isfinite(r.kappa) ? 1 : 0;
  return fmt::format("{} rows, {} with finite condition number", rows.size(), finite);
}

std::string cmd_fixed_design(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const auto [train, test] = load_datasets(cfg);
  const ExperimentData data = make_experiment_data(train, test);
  const Vector y = task_column(data.y_train, cfg.shared.class_index);
  const Seed noise_seed = derive_seed(cfg.shared.seed, 0xf1d);
  Vector y_resampled;
  if (train.true_values && !train.has_labels()) {
    y_resampled = resample_targets(train, cfg.fixed_design.noise_std, noise_seed);
  } else {
    std::mt19937_64 eng = make_engine(noise_seed, 0);
    std::normal_distribution<double> noise(0.0, cfg.fixed_design.noise_std);
    y_resampled = y;
    for (Eigen::Index i = 0; i < y_resampled.size(); ++i) y_resampled(i) += noise(eng);
  }
  std::vector<std::unique_ptr<FittedSmoother>> models;
  std::vector<const FittedSmoother*> ptrs;
  for (int p : cfg.fixed_design.p_phi) {
    SweepSchedule check{Family::rff_minnorm, {{p, 0, 0}}, cfg.shared};
    validate_schedule(check, train.size());
    models.push_back(fit_point_smoother(Family::rff_minnorm, {p, 0, 0}, cfg.shared, train.features, y));
    ptrs.push_back(models.back().get());
  }
  const FixedDesignReport rep = fixed_design_check(ptrs, train.features, y, y_resampled, cfg.fixed_design.eps);
  const fs::path path = out / "fixed_design.csv";
  write_csv(path, fixed_design_table(rep));
  written.push_back(path);
  std::size_t matches = 0;
  for (const auto& r : rep.rows) matches += r.matches_reference ? 1 : 0;
  return fmt::format("{}/{} interpolating models match the reference loss {:.6g}", matches, rep.rows.size(),
                     rep.reference_loss);
}

std::string cmd_bias_variance(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const DatasetConfig& d = cfg.dataset;
  if (d.source != "synthetic") throw ArgumentError("bias-variance needs dataset.source = synthetic");
  const SyntheticSpec spec{d.function, d.noise_std, d.n_train, d.d, d.seed};
  const BiasVarianceReport rep = bias_variance(spec, cfg.bias_variance);
  const fs::path path = out / "bias_variance.csv";
  write_csv(path, bias_variance_table(rep));
  written.push_back(path);
  std::size_t ok = 0;
  for (const auto& r : rep.rows) ok += r.within ? 1 : 0;
  return fmt::format("{} model: {}/{} test points within 3 standard errors", cfg.bias_variance.model, ok,
                     rep.rows.size());
}

std::string cmd_select(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const ExperimentData data = load_data(cfg);
  const int c = cfg.shared.class_index;
  const SelectionReport rep =
      model_selection_study(data.train.features, task_column(data.y_train, c), data.test.features,
                            task_column(data.y_test, c), cfg.select.leaf_grid, cfg.select.lr_grid, cfg.select.eps,
                            cfg.select.max_rounds, cfg.shared.seed);
  const fs::path path = out / "select.csv";
  write_csv(path, selection_table(rep));
  written.push_back(path);
  std::string chosen = "none";
  if (rep.selected) {
    const auto& r = rep.rows[*rep.selected];
    chosen = fmt::format("leaves {} lr {} (test {:.6g})", r.leaf_budget, r.learning_rate, r.test_mse);
  }
  return fmt::format("{} interpolating of {}; spearman(p_test, error) {:.3f}; selected {}", rep.n_interpolating,
                     rep.rows.size(), rep.spearman_p_test_error, chosen);
}

std::string cmd_back_to_u(const Config& cfg, const fs::path& out, std::vector<fs::path>& written) {
  const BackToUConfig& b = cfg.back_to_u;
  if (b.axis1.empty() || b.axis2.empty() || b.switch_value < 1) {
    throw ArgumentError("back_to_u.axis1, back_to_u.axis2 and back_to_u.switch are required");
  }
  const ExperimentData data = load_data(cfg);
  CsvTable all;
  std::size_t rows = 0;
  SvgChart chart;
  chart.title = cfg.family + " back to U";
  chart.x_label = "p_test";
  chart.y_label = "test error";
  for (Seed seed : cfg.seeds) {
    const BackToUResult res =
        back_to_u(cfg.family_id(), b.axis1, b.axis2, b.switch_value, b.dotted_axis1, shared_for(cfg, seed), data);
    CsvTable t = back_to_u_table(res);
    if (all.header.empty()) all.header = t.header;
    all.rows.insert(all.rows.end(), t.rows.begin(), t.rows.end());
    rows += res.rows.size();
    if (seed == cfg.seeds.front()) {
      SvgSeries comp{"composite", {}, {}}, dot{"dotted", {}, {}};
      for (const auto& r : res.rows) {
        auto& s = r.branch == "composite" ? comp : dot;
        s.x.push_back(r.p_test);
        s.y.push_back(r.test_mse);
      }
      chart.series = {comp, dot};
    }
  }
  const fs::path path = out / "back_to_u.csv";
  write_csv(path, all);
  written.push_back(path);
  maybe_svg(cfg, out / "back_to_u.svg", chart, written);
  return fmt::format("{} rows over {} seed(s)", rows, cfg.seeds.size());
}

const std::map<std::string, std::pair<Command, std::string>>& commands() {
  static const std::map<std::string, std::pair<Command, std::string>> table = {
      {"ingest", {cmd_ingest, "Load the dataset and summarise the train/test split"}},
      {"fit", {cmd_fit, "Fit one model (fit.point) and report its errors and effective parameters"}},
      {"sweep", {cmd_sweep, "Run a complexity sweep from the schedule section"}},
      {"grid", {cmd_grid, "Evaluate the full axis1 x axis2 grid"}},
      {"peaks", {cmd_peaks, "Composite sweeps at several mechanism switch points"}},
      {"effparams", {cmd_effparams, "Generalized effective parameters on train and test inputs"}},
      {"cond-study", {cmd_cond, "Singular values and condition numbers of RFF designs"}},
      {"fixed-design", {cmd_fixed_design, "Fixed-design loss of interpolating min-norm RFF models"}},
      {"bias-variance", {cmd_bias_variance, "Analytic versus Monte Carlo bias and variance on synthetic data"}},
      {"select", {cmd_select, "Boosting model selection among interpolating models by p_test"}},
      {"back-to-u", {cmd_back_to_u, "Composite sweep with dotted branches, for plotting against p_test"}},
  };
  return table;
}

int execute(const Invocation& inv, std::ostream& out) {
  std::vector<std::string> overrides = inv.overrides;
  if (inv.seed) overrides.push_back(fmt::format("seeds=[{}]", *inv.seed));
  if (inv.threads) overrides.push_back(fmt::format("threads={}", *inv.threads));
  if (inv.full_scale) overrides.push_back("dataset.n_train=10000");
  if (inv.out_dir) overrides.push_back("output.dir=" + json(*inv.out_dir).dump());
  if (inv.svg) overrides.push_back("output.svg=true");

  std::optional<fs::path> config_path;
  if (inv.config_path) config_path = fs::path(*inv.config_path);
  const Config cfg = load_config(config_path, overrides);
  set_thread_limit(cfg.threads);

  const fs::path out_dir(cfg.out_dir);
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / "config.effective.json", cfg.effective.dump(2) + "\n");

  const Timer timer;
  std::vector<fs::path> written;
  const std::string summary = commands().at(inv.command).first(cfg, out_dir, written);
  out << fmt::format("{}: {} [{:.2f}s] -> {}\n", inv.command, summary, timer.seconds(), join_paths(written));
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Effective-parameter experiments for linear, tree and boosting smoothers", "smootherlab"};
  app.require_subcommand(1, 1);
  Invocation inv;
  for (const auto& [name, entry] : commands()) {
    CLI::App* sub = app.add_subcommand(name, entry.second);
    sub->add_option("--config,-c", inv.config_path, "JSON config file");
    sub->add_option("--set", inv.overrides, "Override a config key: dotted.key=value (repeatable)")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_option("--out,-o", inv.out_dir, "Output directory");
    sub->add_option("--seed", inv.seed, "Use this single seed");
    sub->add_option("--threads", inv.threads, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);
    sub->add_flag("--full-scale", inv.full_scale, "Use n_train = 10000");
    sub->add_flag("--svg", inv.svg, "Also write SVG plots");
    sub->callback([&inv, n = name] { inv.command = n; });
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  }

  try {
    return execute(inv, out);
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace smootherlab
