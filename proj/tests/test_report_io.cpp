#include "smootherlab/report_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <unistd.h>

namespace smootherlab {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ReportIo, FormatNumberRoundTrips) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(2.0), "2");
  EXPECT_EQ(format_number(std::numeric_limits<double>::quiet_NaN()), "nan");
  EXPECT_EQ(format_number(-std::numeric_limits<double>::infinity()), "-inf");
  const double v = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(v)), v);
}

TEST(ReportIo, AtomicWriteReplacesAndLeavesNoTemporary) {
  const fs::path dir = fs::temp_directory_path() / ("smootherlab_io_" + std::to_string(::getpid()));
  const fs::path file = dir / "nested" / "a.txt";
  write_file_atomic(file, "first");
  write_file_atomic(file, "second");
  EXPECT_EQ(slurp(file), "second");
  int entries = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(file.parent_path())) ++entries;
  EXPECT_EQ(entries, 1);
  fs::remove_all(dir);
}

TEST(ReportIo, CsvLayout) {
  CsvTable t;
  t.header = {"a", "b"};
  t.rows = {{"1", "x"}, {"2", "y"}};
  EXPECT_EQ(to_csv(t), "a,b\n1,x\n2,y\n");
}

TEST(ReportIo, SweepTableHeader) {
  SweepResult r;
  PointRecord rec;
  rec.axis1_name = "P_leaf";
  rec.axis1_value = 10;
  rec.axis2_name = "P_ens";
  rec.axis2_value = 2;
  rec.raw_params = 20;
  rec.seed = 4;
  r.records.push_back(rec);
  const CsvTable t = sweep_table({r});
  EXPECT_EQ(t.header.front(), "point_index");
  EXPECT_EQ(t.header.back(), "seed");
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][1], "P_leaf");
  EXPECT_EQ(t.rows[0][5], "20");
  EXPECT_EQ(t.rows[0].back(), "4");
}

TEST(ReportIo, SvgIsWellFormedAndEscaped) {
  SvgChart c;
  c.title = "a < b";
  c.x_label = "x";
  c.y_label = "y";
  c.log_x = true;
  c.series.push_back({"s&t", {1, 10, 100}, {3, 2, std::numeric_limits<double>::quiet_NaN()}});
  const std::string svg = render_svg(c);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("a &lt; b"), std::string::npos);
  EXPECT_NE(svg.find("s&amp;t"), std::string::npos);
  EXPECT_EQ(svg.find("nan"), std::string::npos);
}

}  // namespace
}  // namespace smootherlab
