#pragma once

#include "smootherlab/effective_params.hpp"
#include "smootherlab/experiments.hpp"
#include "smootherlab/studies.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace smootherlab {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Shortest round-trip decimal for finite values; inf, -inf, nan otherwise.
std::string format_number(double value);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

std::string to_csv(const CsvTable& table);
void write_csv(const std::filesystem::path& path, const CsvTable& table);

/// point_index,axis1_name,axis1_value,axis2_name,axis2_value,raw_params,
/// train_mse,test_mse,test_zero_one,p_train,p_test,seed
CsvTable sweep_table(const std::vector<SweepResult>& results);

CsvTable effparams_table(const std::vector<std::pair<std::string, EffParamsReport>>& reports);
CsvTable cond_table(const std::vector<CondRow>& rows);
CsvTable fixed_design_table(const FixedDesignReport& report);
CsvTable bias_variance_table(const BiasVarianceReport& report);
CsvTable selection_table(const SelectionReport& report);
CsvTable back_to_u_table(const BackToUResult& result);

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  std::vector<SvgSeries> series;
};

/// Static polyline chart.
std::string render_svg(const SvgChart& chart);

}  // namespace smootherlab
