#include "smootherlab/cli.hpp"
#include "smootherlab/config.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

namespace smootherlab {
namespace {

namespace fs = std::filesystem;

const std::string kData = SMOOTHERLAB_DATA_DIR;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("smootherlab_cli_" + std::to_string(::getpid()) + "_" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run_cli(args, out_, err_);
  }

  fs::path write_config(const std::string& text) {
    const fs::path p = dir_ / "config.json";
    std::ofstream(p) << text;
    return p;
  }

  std::vector<std::string> data_overrides() const {
    return {"--set", "dataset.images=" + kData + "/mnist5k-images-idx3-ubyte.gz", "--set",
            "dataset.labels=" + kData + "/mnist5k-labels-idx1-ubyte.gz"};
  }

  fs::path dir_;
  std::ostringstream out_;
  std::ostringstream err_;
};

TEST(Config, UnknownKeyIsRejected) {
  try {
    parse_config(nlohmann::json::parse(R"({"dataset": {"n_trian": 5}})"));
    FAIL();
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("dataset.n_trian"), std::string::npos);
  }
}

TEST(Config, WrongTypeIsRejected) {
  EXPECT_THROW(parse_config(nlohmann::json::parse(R"({"seeds": "zero"})")), ArgumentError);
}

TEST(Config, OverridesWinOverFile) {
  nlohmann::json root = nlohmann::json::parse(R"({"dataset": {"n_train": 10}, "family": "tree"})");
  apply_override(root, "dataset.n_train=20");
  apply_override(root, "family=boosting");
  apply_override(root, "shared.learning_rate=0.5");
  const Config c = parse_config(root);
  EXPECT_EQ(c.dataset.n_train, 20);
  EXPECT_EQ(c.family_id(), Family::boosting);
  EXPECT_EQ(c.shared.learning_rate, 0.5);
  EXPECT_EQ(c.effective["dataset"]["n_train"], 20);
  EXPECT_THROW(apply_override(root, "no_equals_sign"), ArgumentError);
}

TEST(Config, StepsBuildSchedule) {
  const Config c = parse_config(nlohmann::json::parse(
      R"({"family": "tree", "schedule": {"start": [2, 1], "steps": [{"axis": "P_leaf", "values": [2, 4]},
          {"axis": "P_ens", "values": [3]}]}})"));
  const SweepSchedule s = c.sweep_schedule();
  ASSERT_EQ(s.points.size(), 3u);
  EXPECT_EQ(s.points[2].axis1, 4);
  EXPECT_EQ(s.points[2].axis2, 3);
}

TEST_F(CliTest, HelpExitsZero) {
  EXPECT_EQ(run({"--help"}), 0);
  EXPECT_NE(out_.str().find("sweep"), std::string::npos);
  EXPECT_EQ(run({"sweep", "--help"}), 0);
}

TEST_F(CliTest, UnknownCommandExitsOne) { EXPECT_EQ(run({"frobnicate"}), 1); }

TEST_F(CliTest, InfeasiblePointExitsOneAndNamesIt) {
  const fs::path cfg = write_config(R"({"family": "rff_linear", "dataset": {"n_train": 50, "n_test": 20},
      "schedule": {"points": [[10, 0], [50, 0]]}})");
  auto args = std::vector<std::string>{"sweep", "-c", cfg.string(), "-o", (dir_ / "out").string()};
  for (const auto& a : data_overrides()) args.push_back(a);
  EXPECT_EQ(run(args), 1);
  EXPECT_NE(err_.str().find("schedule point 1"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MissingDatasetExitsOneWithPath) {
  const fs::path cfg = write_config(R"({"family": "tree", "dataset": {"images": "/nowhere/imgs.gz",
      "labels": "/nowhere/lbls.gz"}, "schedule": {"points": [[2, 1]]}})");
  EXPECT_EQ(run({"sweep", "-c", cfg.string(), "-o", (dir_ / "out").string()}), 1);
  EXPECT_NE(err_.str().find("/nowhere/imgs.gz"), std::string::npos) << err_.str();
}

TEST_F(CliTest, MissingConfigExitsOne) {
  EXPECT_EQ(run({"sweep", "-c", (dir_ / "absent.json").string()}), 1);
  EXPECT_NE(err_.str().find("absent.json"), std::string::npos);
}

TEST_F(CliTest, SweepWritesCsvAndEffectiveConfig) {
  const fs::path cfg = write_config(R"({"family": "tree", "dataset": {"n_train": 60, "n_test": 30},
      "schedule": {"points": [[2, 1], [8, 2]]}})");
  const fs::path out = dir_ / "out";
  auto args = std::vector<std::string>{"sweep", "-c", cfg.string(), "-o", out.string(), "--seed", "3", "--threads", "1"};
  for (const auto& a : data_overrides()) args.push_back(a);
  ASSERT_EQ(run(args), 0) << err_.str();
  ASSERT_TRUE(fs::exists(out / "sweep.csv"));
  std::ifstream csv(out / "sweep.csv");
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) ++lines;
  EXPECT_EQ(lines, 3);

  std::ifstream echoed(out / "config.effective.json");
  const nlohmann::json eff = nlohmann::json::parse(echoed);
  EXPECT_EQ(eff["seeds"], nlohmann::json::array({3}));
  EXPECT_EQ(eff["threads"], 1);
  EXPECT_EQ(eff["family"], "tree");
}

TEST_F(CliTest, BiasVarianceOnSyntheticData) {
  const fs::path cfg = write_config(R"({"dataset": {"source": "synthetic", "function": "sine", "noise_std": 0.5,
      "n_train": 20, "d": 1}, "bias_variance": {"model": "ols", "p": 2, "n_test": 3, "n_resamples": 200}})");
  ASSERT_EQ(run({"bias-variance", "-c", cfg.string(), "-o", (dir_ / "bv").string()}), 0) << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "bv" / "bias_variance.csv"));
}

}  // namespace
}  // namespace smootherlab
