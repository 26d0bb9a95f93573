#include "smootherlab/report_io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <system_error>

#include <unistd.h>

namespace smootherlab {

std::string format_number(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  return fmt::format("{}", value);
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += fmt::format(".tmp{}", static_cast<long>(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ArgumentError("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw ArgumentError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw ArgumentError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
  }
}

std::string to_csv(const CsvTable& table) {
  std::string out;
  const auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(table.header);
  for (const auto& r : table.rows) line(r);
  return out;
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) { write_file_atomic(path, to_csv(table)); }

CsvTable sweep_table(const std::vector<SweepResult>& results) {
  CsvTable t;
  t.header = {"point_index", "axis1_name", "axis1_value", "axis2_name", "axis2_value", "raw_params",
              "train_mse",   "test_mse",   "test_zero_one", "p_train",  "p_test",      "seed"};
  for (const auto& res : results) {
    for (const auto& r : res.records) {
      t.rows.push_back({std::to_string(r.point_index), r.axis1_name, std::to_string(r.axis1_value), r.axis2_name,
                        std::to_string(r.axis2_value), format_number(r.raw_params), format_number(r.train_mse),
                        format_number(r.test_mse), format_number(r.test_zero_one), format_number(r.p_train),
                        format_number(r.p_test), std::to_string(r.seed)});
    }
  }
  return t;
}

CsvTable effparams_table(const std::vector<std::pair<std::string, EffParamsReport>>& reports) {
  CsvTable t;
  t.header = {"config_id", "set_name", "set_size", "n_train", "p_generalized", "effective_knn"};
  for (const auto& [id, r] : reports) {
    t.rows.push_back({id, r.input_set_name, std::to_string(r.set_size), std::to_string(r.n_train),
                      format_number(r.p_generalized), format_number(r.effective_knn)});
  }
  return t;
}

CsvTable cond_table(const std::vector<CondRow>& rows) {
  CsvTable t;
  t.header = {"p_phi", "k", "sigma_k", "kappa"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.p_phi), std::to_string(r.k), format_number(r.sigma_k), format_number(r.kappa)});
  }
  return t;
}

CsvTable fixed_design_table(const FixedDesignReport& report) {
  CsvTable t;
  t.header = {"model", "train_mse", "fixed_design_loss", "reference_loss", "matches_reference",
              "max_weight_deviation"};
  for (const auto& r : report.rows) {
    t.rows.push_back({r.model, format_number(r.train_mse), format_number(r.fixed_design_loss),
                      format_number(report.reference_loss), r.matches_reference ? "1" : "0",
                      format_number(r.max_weight_deviation)});
  }
  return t;
}

CsvTable bias_variance_table(const BiasVarianceReport& report) {
  CsvTable t;
  t.header = {"point",  "f_true",     "analytic_bias", "analytic_var", "analytic_mse", "mc_bias",
              "mc_bias_se", "mc_var", "mc_var_se",     "mc_mse",       "mc_mse_se",    "within_3se"};
  for (const auto& r : report.rows) {
    t.rows.push_back({std::to_string(r.point), format_number(r.f_true), format_number(r.analytic_bias),
                      format_number(r.analytic_var), format_number(r.analytic_mse), format_number(r.mc_bias),
                      format_number(r.mc_bias_se), format_number(r.mc_var), format_number(r.mc_var_se),
                      format_number(r.mc_mse), format_number(r.mc_mse_se), r.within ? "1" : "0"});
  }
  return t;
}

CsvTable selection_table(const SelectionReport& report) {
  CsvTable t;
  t.header = {"leaf_budget", "learning_rate", "rounds", "interpolating", "train_mse",
              "test_mse",    "p_train",       "p_test", "selected"};
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    const auto& r = report.rows[i];
    t.rows.push_back({std::to_string(r.leaf_budget), format_number(r.learning_rate), std::to_string(r.rounds),
                      r.interpolating ? "1" : "0", format_number(r.train_mse), format_number(r.test_mse),
                      format_number(r.p_train), format_number(r.p_test),
                      report.selected && *report.selected == i ? "1" : "0"});
  }
  return t;
}

CsvTable back_to_u_table(const BackToUResult& result) {
  const auto& names = axis_names(result.family);
  CsvTable t;
  t.header = {"branch", names[0], names[1], "mechanism", "p_train", "p_test", "train_mse", "test_mse", "seed"};
  for (const auto& r : result.rows) {
    t.rows.push_back({r.branch, std::to_string(r.axis1), std::to_string(r.axis2), std::to_string(r.mechanism),
                      format_number(r.p_train), format_number(r.p_test), format_number(r.train_mse),
                      format_number(r.test_mse), std::to_string(result.seed)});
  }
  return t;
}

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '&':
        out += "&amp;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_svg(const SvgChart& chart) {
  constexpr double width = 640, height = 420, left = 70, right = 150, top = 40, bottom = 55;
  const double pw = width - left - right;
  const double ph = height - top - bottom;

  const auto tx = [&](double x) { return chart.log_x ? std::log10(x) : x; };
  double x_lo = HUGE_VAL, x_hi = -HUGE_VAL, y_lo = HUGE_VAL, y_hi = -HUGE_VAL;
  for (const auto& s : chart.series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i]) || (chart.log_x && !(s.x[i] > 0))) continue;
      x_lo = std::min(x_lo, tx(s.x[i]));
      x_hi = std::max(x_hi, tx(s.x[i]));
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (!(x_lo <= x_hi)) x_lo = 0, x_hi = 1;
  if (!(y_lo <= y_hi)) y_lo = 0, y_hi = 1;
  if (x_hi == x_lo) x_hi = x_lo + 1;
  if (y_hi == y_lo) y_hi = y_lo + 1;
  const auto px = [&](double x) { return left + (tx(x) - x_lo) / (x_hi - x_lo) * pw; };
  const auto py = [&](double y) { return top + (1.0 - (y - y_lo) / (y_hi - y_lo)) * ph; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
      "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  svg += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", left + pw / 2,
                     escape_xml(chart.title));
  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n", left, top,
                     pw, ph);
  for (int t = 0; t <= 4; ++t) {
    const double fx = x_lo + (x_hi - x_lo) * t / 4.0;
    const double fy = y_lo + (y_hi - y_lo) * t / 4.0;
    const double label_x = chart.log_x ? std::pow(10.0, fx) : fx;
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.4g}</text>\n",
                       left + pw * t / 4.0, top + ph + 16, label_x);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.4g}</text>\n", left - 6,
                       top + ph * (1 - t / 4.0) + 4, fy);
  }
  svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", left + pw / 2,
                     height - 12, escape_xml(chart.x_label));
  svg += fmt::format("<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
                     top + ph / 2, top + ph / 2, escape_xml(chart.y_label));

  for (std::size_t k = 0; k < chart.series.size(); ++k) {
    const auto& s = chart.series[k];
    const char* colour = kPalette[k % std::size(kPalette)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!std::isfinite(s.y[i]) || (chart.log_x && !(s.x[i] > 0))) continue;
      pts += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.8\" points=\"{}\"/>\n", colour, pts);
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" fill=\"{}\">{}</text>\n", left + pw + 10, top + 14 + 16.0 * k,
                       colour, escape_xml(s.label));
  }
  svg += "</svg>\n";
  return svg;
}

}  // namespace smootherlab
