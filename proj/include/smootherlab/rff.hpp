#pragma once

#include "smootherlab/common.hpp"

#include <span>

namespace smootherlab {

inline constexpr double kDefaultRffScale = 1.0 / 5.0;

/// Random Fourier feature frequencies, one row per feature.
///
/// Row p is drawn from its own engine keyed on (seed, p), so a map sampled
/// with a larger `p_max` shares every row of a smaller one.
struct RffMap {
  Matrix frequencies;  // p_max x d
  Seed seed = 0;
  double scale = kDefaultRffScale;

  int p_max() const noexcept { return static_cast<int>(frequencies.rows()); }
  int dim() const noexcept { return static_cast<int>(frequencies.cols()); }
};

RffMap sample_frequencies(Seed seed, int p_max, int d, double scale = kDefaultRffScale);

/// cos(v_p . x_i) for the first `p_phi` frequencies; m x p_phi.
Matrix transform(const RffMap& map, const Matrix& inputs, int p_phi);

/// Single-point variant of transform().
Vector transform_point(const RffMap& map, std::span<const double> x, int p_phi);

}  // namespace smootherlab
