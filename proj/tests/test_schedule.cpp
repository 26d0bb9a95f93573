#include "smootherlab/schedule.hpp"

#include <gtest/gtest.h>

namespace smootherlab {
namespace {

std::vector<std::array<int, 2>> coords(const SweepSchedule& s) {
  std::vector<std::array<int, 2>> out;
  for (const auto& p : s.points) out.push_back({p.axis1, p.axis2});
  return out;
}

TEST(Schedule, FamilyNamesRoundTrip) {
  for (Family f : {Family::rff_linear, Family::rff_minnorm, Family::tree, Family::boosting}) {
    EXPECT_EQ(parse_family(to_string(f)), f);
  }
  EXPECT_THROW(parse_family("forest"), ArgumentError);
  EXPECT_EQ(axis_index(Family::tree, "P_ens"), 1);
  EXPECT_THROW(axis_index(Family::tree, "P_PC"), ArgumentError);
}

TEST(Schedule, StartIsABaseNotAPoint) {
  const SweepSchedule s =
      build_schedule(Family::tree, {2, 1}, {{0, {2, 10, 50}}, {1, {2, 5}}}, SharedParams{});
  using P = std::array<int, 2>;
  EXPECT_EQ(coords(s), (std::vector<P>{{2, 1}, {10, 1}, {50, 1}, {50, 2}, {50, 5}}));
  EXPECT_EQ(s.points[3].mechanism, 1);
  EXPECT_EQ(s.points[0].mechanism, 0);
}

TEST(Schedule, AlternatingSteps) {
  const SweepSchedule s = build_schedule(Family::rff_linear, default_start(Family::rff_linear),
                                         {{0, {10}}, {1, {5}}, {0, {20}}}, SharedParams{});
  using P = std::array<int, 2>;
  EXPECT_EQ(coords(s), (std::vector<P>{{10, 0}, {10, 5}, {20, 5}}));
}

TEST(Schedule, Composite) {
  const SweepSchedule s = composite_schedule(Family::boosting, {1, 5, 20, 50}, {2, 5}, 20, SharedParams{});
  using P = std::array<int, 2>;
  EXPECT_EQ(coords(s), (std::vector<P>{{1, 1}, {5, 1}, {20, 1}, {20, 2}, {20, 5}}));
}

TEST(Schedule, GridAxisOneFastest) {
  const SweepSchedule s = grid_schedule(Family::tree, {1, 2}, {3, 4}, SharedParams{});
  using P = std::array<int, 2>;
  EXPECT_EQ(coords(s), (std::vector<P>{{1, 3}, {2, 3}, {1, 4}, {2, 4}}));
}

TEST(Schedule, RawParams) {
  EXPECT_EQ(raw_params(Family::rff_linear, 30, 70), 100.0);
  EXPECT_EQ(raw_params(Family::tree, 30, 3), 90.0);
  EXPECT_EQ(raw_params(Family::boosting, 10, 5), 50.0);
}

TEST(Schedule, ValidationNamesTheBadPoint) {
  const SweepSchedule ok = grid_schedule(Family::rff_linear, {50, 99}, {0}, SharedParams{});
  EXPECT_NO_THROW(validate_schedule(ok, 100));
  const SweepSchedule bad = grid_schedule(Family::rff_linear, {50, 100}, {0}, SharedParams{});
  try {
    validate_schedule(bad, 100);
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_EQ(e.point_index(), 1u);
    EXPECT_NE(std::string(e.what()).find("P_PC=100"), std::string::npos);
  }
}

TEST(Schedule, ValidationRejectsNonPositiveAxes) {
  EXPECT_THROW(validate_schedule(grid_schedule(Family::tree, {0}, {1}, SharedParams{}), 10), ValidationError);
  EXPECT_THROW(validate_schedule(grid_schedule(Family::boosting, {1}, {0}, SharedParams{}), 10), ValidationError);
}

}  // namespace
}  // namespace smootherlab
