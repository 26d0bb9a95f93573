#include "smootherlab/studies.hpp"

#include "smootherlab/boosting_smoothers.hpp"
#include "smootherlab/effective_params.hpp"
#include "smootherlab/parallel.hpp"
#include "smootherlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace smootherlab {

std::size_t argmax(const std::vector<double>& values) {
  if (values.empty()) throw ArgumentError("argmax of an empty sequence");
  return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

std::vector<std::size_t> local_maxima(const std::vector<double>& values) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] > values[i - 1] && values[i] > values[i + 1]) out.push_back(i);
  }
  return out;
}

std::vector<BandViolation> noise_band_violations(const std::vector<std::vector<double>>& replicates,
                                                 double rel_tol) {
  if (replicates.empty()) return {};
  const std::size_t len = replicates.front().size();
  for (const auto& r : replicates) {
    if (r.size() != len) throw ArgumentError("replicate curves differ in length");
  }
  const auto s = static_cast<double>(replicates.size());
  std::vector<BandViolation> out;
  for (std::size_t i = 1; i < len; ++i) {
    double prev = 0.0;
    double mean_diff = 0.0;
    for (const auto& r : replicates) {
      prev += r[i - 1];
      mean_diff += r[i] - r[i - 1];
    }
    prev /= s;
    mean_diff /= s;
    double se = 0.0;
    if (replicates.size() > 1) {
      double ss = 0.0;
      for (const auto& r : replicates) ss += std::pow(r[i] - r[i - 1] - mean_diff, 2);
      se = std::sqrt(ss / (s - 1.0)) / std::sqrt(s);
    }
    const double allowance = std::max(rel_tol * std::abs(prev), se);
    if (mean_diff > allowance) out.push_back({i, mean_diff, allowance});
  }
  return out;
}

namespace {

std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("spearman: length mismatch");
  if (x.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / static_cast<double>(rx.size());
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / static_cast<double>(ry.size());
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sxy / std::sqrt(sxx * syy);
}

std::vector<double> column(const SweepResult& result, double PointRecord::*field) {
  std::vector<double> out;
  out.reserve(result.records.size());
  for (const auto& r : result.records) out.push_back(r.*field);
  return out;
}

std::vector<SweepResult> peak_move(Family family, const std::vector<int>& axis1_values,
                                   const std::vector<int>& axis2_values, const std::vector<int>& switch_values,
                                   const SharedParams& shared, const ExperimentData& data) {
  if (switch_values.empty()) throw ArgumentError("peak_move needs at least one switch value");
  std::vector<SweepResult> out;
  for (int v : switch_values) {
    out.push_back(run_sweep(composite_schedule(family, axis1_values, axis2_values, v, shared), data));
  }
  return out;
}

SweepResult multiple_descent(const SweepSchedule& schedule, const ExperimentData& data) {
  return run_sweep(schedule, data);
}

Vector design_singular_values(const Matrix& phi, bool standardize) {
  if (phi.rows() < 1 || phi.cols() < 1) throw ArgumentError("design matrix must be non-empty");
  Eigen::MatrixXd z;
  if (standardize) {
    std::vector<Eigen::Index> kept;
    for (Eigen::Index j = 0; j < phi.cols(); ++j) {
      const double mean = phi.col(j).mean();
      const double sd = std::sqrt((phi.col(j).array() - mean).square().mean());
      const double scale = std::max(1.0, phi.col(j).cwiseAbs().maxCoeff());
      if (sd > 1e-12 * scale) kept.push_back(j);
    }
    z.resize(phi.rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
      const auto col = phi.col(kept[c]);
      const double mean = col.mean();
      const double sd = std::sqrt((col.array() - mean).square().mean());
      z.col(static_cast<Eigen::Index>(c)) = (col.array() - mean) / sd;
    }
  } else {
    z = phi;
  }
  if (z.cols() == 0) return Vector();
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(z);
  return svd.singularValues();
}

std::vector<CondRow> cond_study(const RffMap& map, const Matrix& inputs, const std::vector<int>& p_phi_values,
                                const std::vector<int>& k_values, double tolerance_factor) {
  for (int k : k_values) {
    if (k < 1) throw ArgumentError("k must be >= 1");
  }
  std::vector<std::vector<CondRow>> blocks(p_phi_values.size());
  parallel_for(p_phi_values.size(), [&](std::size_t b) {
    const int p_phi = p_phi_values[b];
    const Vector s = design_singular_values(transform(map, inputs, p_phi), true);
    const double tol = s.size() == 0 ? 0.0
                                     : tolerance_factor * static_cast<double>(std::max<Eigen::Index>(inputs.rows(), p_phi)) *
                                           s(0) * std::numeric_limits<double>::epsilon();
    Eigen::Index rank = 0;
    while (rank < s.size() && s(rank) > tol) ++rank;
    for (int k : k_values) {
      CondRow row{p_phi, k, 0.0, std::numeric_limits<double>::infinity()};
      if (k <= s.size()) row.sigma_k = s(k - 1);
      if (k <= rank) row.kappa = s(0) / s(k - 1);
      blocks[b].push_back(row);
    }
  });
  std::vector<CondRow> out;
  for (auto& b : blocks) out.insert(out.end(), b.begin(), b.end());
  return out;
}

FixedDesignReport fixed_design_check(const std::vector<const FittedSmoother*>& models, const Matrix& train_inputs,
                                     const Vector& y_train, const Vector& y_resampled, double eps) {
  if (y_train.size() != train_inputs.rows() || y_resampled.size() != y_train.size()) {
    throw ArgumentError("fixed-design targets must match the training inputs");
  }
  const double n = static_cast<double>(y_train.size());
  FixedDesignReport rep;
  rep.reference_loss = (y_train - y_resampled).squaredNorm() / n;
  for (const FittedSmoother* m : models) {
    const Vector fitted = m->predict(train_inputs);
    const double train_mse = (fitted - y_train).squaredNorm() / n;
    if (!(train_mse < eps)) {
      throw PreconditionError("model " + m->name() + " does not interpolate (train MSE " + std::to_string(train_mse) +
                              ")");
    }
    FixedDesignRow row;
    row.model = m->name();
    row.train_mse = train_mse;
    row.fixed_design_loss = (fitted - y_resampled).squaredNorm() / n;
    row.matches_reference =
        std::abs(row.fixed_design_loss - rep.reference_loss) <= 1e-8 * std::max(1.0, rep.reference_loss);
    const Matrix hat = m->weights_batch(train_inputs);
    row.max_weight_deviation = (hat - Matrix::Identity(hat.rows(), hat.cols())).cwiseAbs().maxCoeff();
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

bool BiasVarianceReport::all_within() const {
  return std::all_of(rows.begin(), rows.end(), [](const BiasVarianceRow& r) { return r.within; });
}

namespace {

Matrix ols_design(const Matrix& x, int p) {
  Matrix d(x.rows(), p);
  d.col(0).setOnes();
  if (p > 1) d.rightCols(p - 1) = x.leftCols(p - 1);
  return d;
}

// Fitted linear smoother for the bias/variance study, refit on each draw.
struct StudyModel {
  std::string kind;
  int p;
  int k;

  Matrix weights(const Matrix& x_train, const Matrix& x0, const Vector& y) const {
    if (kind == "ols") {
      const LinearFit fit = fit_ols(ols_design(x_train, p), y);
      return weights_linear_batch(fit, ols_design(x0, p));
    }
    if (kind == "knn") return KnnSmoother(x_train, y, k).weights_batch(x0);
    return MeanSmoother(y).weights_batch(x0);
  }

  Vector predict(const Matrix& x_train, const Matrix& x0, const Vector& y) const {
    if (kind == "ols") return fit_ols(ols_design(x_train, p), y).predict(ols_design(x0, p));
    if (kind == "knn") return KnnSmoother(x_train, y, k).predict(x0);
    return MeanSmoother(y).predict(x0);
  }
};

}  // namespace

BiasVarianceReport bias_variance(const SyntheticSpec& spec, const BiasVarianceConfig& config) {
  if (config.model != "ols" && config.model != "mean" && config.model != "knn") {
    throw PreconditionError("model '" + config.model +
                            "' is not a linear smoother; the analytic bias/variance path needs fixed weights");
  }
  if (config.n_resamples < 2) throw ArgumentError("n_resamples must be >= 2");
  if (config.n_test < 1) throw ArgumentError("n_test must be >= 1");
  if (config.model == "ols" && (config.p < 1 || config.p > spec.d + 1)) {
    throw ArgumentError("ols p must lie in [1, d+1]");
  }

  const Dataset train = synth_generate(spec);
  SyntheticSpec test_spec = spec;
  test_spec.n = config.n_test;
  test_spec.seed = derive_seed(spec.seed, 0x7e57);
  const Dataset test = synth_generate(test_spec);
  const Vector& f_train = *train.true_values;
  const Vector& f_test = *test.true_values;
  const double sigma = spec.noise_std;
  const StudyModel model{config.model, config.p, config.k};

  BiasVarianceReport rep;
  rep.noise_var = sigma * sigma;
  const Matrix w = model.weights(train.features, test.features, train.targets);

  const auto r_count = static_cast<Eigen::Index>(config.n_resamples);
  Matrix preds(r_count, test.size());
  Matrix sq_err(r_count, test.size());
  for (Eigen::Index r = 0; r < r_count; ++r) {
    const Vector y = resample_targets(train, sigma, derive_seed(spec.seed, 1000 + static_cast<std::uint64_t>(r)));
    preds.row(r) = model.predict(train.features, test.features, y).transpose();
    auto rng = make_engine(spec.seed, 0x10000000ULL + static_cast<std::uint64_t>(r));
    std::normal_distribution<double> noise(0.0, 1.0);
    for (Eigen::Index j = 0; j < test.size(); ++j) {
      const double y0 = f_test(j) + sigma * noise(rng);
      sq_err(r, j) = std::pow(y0 - preds(r, j), 2);
    }
  }

  const double rc = static_cast<double>(r_count);
  for (Eigen::Index j = 0; j < test.size(); ++j) {
    BiasVarianceRow row;
    row.point = static_cast<int>(j);
    row.f_true = f_test(j);
    row.analytic_bias = f_test(j) - w.row(j).dot(f_train);
    row.analytic_var = rep.noise_var * w.row(j).squaredNorm();
    row.analytic_mse = rep.noise_var + row.analytic_bias * row.analytic_bias + row.analytic_var;

    const double mean = preds.col(j).mean();
    const double var = (preds.col(j).array() - mean).square().sum() / (rc - 1.0);
    row.mc_bias = f_test(j) - mean;
    row.mc_bias_se = std::sqrt(var / rc);
    row.mc_var = var;
    row.mc_var_se = var * std::sqrt(2.0 / (rc - 1.0));
    row.mc_mse = sq_err.col(j).mean();
    const double mse_var = (sq_err.col(j).array() - row.mc_mse).square().sum() / (rc - 1.0);
    row.mc_mse_se = std::sqrt(mse_var / rc);

    const auto close = [](double a, double b, double se) { return std::abs(a - b) <= 3.0 * se + 1e-12; };
    row.within = close(row.mc_bias, row.analytic_bias, row.mc_bias_se) &&
                 close(row.mc_var, row.analytic_var, row.mc_var_se) &&
                 close(row.mc_mse, row.analytic_mse, row.mc_mse_se);
    rep.rows.push_back(row);
  }
  return rep;
}

SelectionReport model_selection_study(const Matrix& train_inputs, const Vector& y_train, const Matrix& test_inputs,
                                      const Vector& y_test, const std::vector<int>& leaf_grid,
                                      const std::vector<double>& lr_grid, double eps, int max_rounds, Seed seed) {
  if (leaf_grid.empty() || lr_grid.empty()) throw ArgumentError("selection grids must be non-empty");
  if (!(eps > 0.0)) throw ArgumentError("eps must be > 0");
  if (max_rounds < 1) throw ArgumentError("max_rounds must be >= 1");

  std::vector<std::pair<int, double>> configs;
  for (int leaves : leaf_grid) {
    if (leaves < 0) throw ArgumentError("leaf budget must be >= 0");
    for (double lr : lr_grid) configs.emplace_back(leaves == 0 ? static_cast<int>(train_inputs.rows()) : leaves, lr);
  }

  SelectionReport rep;
  rep.rows.resize(configs.size());
  parallel_for(configs.size(), [&](std::size_t c) {
    BoostOptions opts;
    opts.n_rounds = max_rounds;
    opts.learning_rate = configs[c].second;
    opts.leaf_budget = configs[c].first;
    opts.seed = seed;
    opts.stop_tol = eps;
    const BoostedModel model = fit_boost(train_inputs, y_train, opts);
    SelectionRow& row = rep.rows[c];
    row.leaf_budget = configs[c].first;
    row.learning_rate = configs[c].second;
    row.rounds = model.num_rounds();
    row.train_mse = model.train_mse.back();
    row.interpolating = row.train_mse < eps;
    row.test_mse = (model.predict(test_inputs) - y_test).squaredNorm() / static_cast<double>(y_test.size());
    replay_boost_weights(model, test_inputs, -1, [&](int r, const Matrix& state, const Matrix& w) {
      if (r != model.num_rounds()) return;
      row.p_train = eff_params_from_weights(state, "train").p_generalized;
      row.p_test = eff_params_from_weights(w, "test").p_generalized;
    });
  });

  std::vector<double> p;
  std::vector<double> err;
  for (std::size_t i = 0; i < rep.rows.size(); ++i) {
    const auto& r = rep.rows[i];
    if (!r.interpolating) continue;
    ++rep.n_interpolating;
    p.push_back(r.p_test);
    err.push_back(r.test_mse);
    if (!rep.selected || r.p_test < rep.rows[*rep.selected].p_test) rep.selected = i;
  }
  rep.spearman_p_test_error = spearman(p, err);
  return rep;
}

BackToUResult back_to_u(Family family, const std::vector<int>& axis1_values, const std::vector<int>& axis2_values,
                        int switch_value, const std::vector<int>& dotted_axis1_values, const SharedParams& shared,
                        const ExperimentData& data) {
  SweepSchedule schedule = composite_schedule(family, axis1_values, axis2_values, switch_value, shared);
  const std::size_t n_composite = schedule.points.size();
  std::size_t switch_row = 0;
  for (std::size_t i = 0; i < n_composite; ++i) {
    if (schedule.points[i].mechanism == 0) switch_row = i;
  }
  for (std::size_t i = 0; i < n_composite; ++i) {
    const SweepPoint pt = schedule.points[i];
    if (pt.mechanism != 1) continue;
    for (int a1 : dotted_axis1_values) {
      if (a1 < switch_value) schedule.points.push_back({a1, pt.axis2, 0});
    }
  }
  const SweepResult res = run_sweep(schedule, data);

  BackToUResult out;
  out.family = family;
  out.seed = shared.seed;
  out.switch_row = switch_row;
  for (std::size_t i = 0; i < res.records.size(); ++i) {
    const auto& r = res.records[i];
    out.rows.push_back({i < n_composite ? "composite" : "dotted", r.axis1_value, r.axis2_value, r.mechanism, r.p_train,
                        r.p_test, r.train_mse, r.test_mse});
  }
  return out;
}

}  // namespace smootherlab
