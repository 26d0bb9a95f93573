#include "smootherlab/rff.hpp"

#include "smootherlab/kernels.hpp"
#include "smootherlab/random.hpp"

#include <cmath>
#include <span>

namespace smootherlab {

RffMap sample_frequencies(Seed seed, int p_max, int d, double scale) {
  if (p_max < 1) throw ArgumentError("p_max must be >= 1");
  if (d < 1) throw ArgumentError("input dimension must be >= 1");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ArgumentError("frequency scale must be > 0");

  RffMap map;
  map.seed = seed;
  map.scale = scale;
  map.frequencies.resize(p_max, d);
  for (int p = 0; p < p_max; ++p) {
    auto rng = make_engine(seed, static_cast<std::uint64_t>(p));
    std::normal_distribution<double> gauss(0.0, scale);
    for (int j = 0; j < d; ++j) map.frequencies(p, j) = gauss(rng);
  }
  return map;
}

Matrix transform(const RffMap& map, const Matrix& inputs, int p_phi) {
  if (p_phi < 1 || p_phi > map.p_max()) {
    throw ArgumentError("p_phi " + std::to_string(p_phi) + " outside [1, " +
                        std::to_string(map.p_max()) + "]");
  }
  if (inputs.cols() != map.dim()) {
    throw ArgumentError("input dimension " + std::to_string(inputs.cols()) +
                        " does not match frequency dimension " + std::to_string(map.dim()));
  }
  // Entry-wise dot products (not a blocked GEMM) so that column p is bit-identical
  // whatever p_phi is requested.
  const auto d = static_cast<std::size_t>(map.dim());
  Matrix out(inputs.rows(), p_phi);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    const std::span<const double> x(inputs.row(i).data(), d);
    for (int p = 0; p < p_phi; ++p) {
      out(i, p) = std::cos(kernels::dot(x, std::span<const double>(map.frequencies.row(p).data(), d)));
    }
  }
  return out;
}

Vector transform_point(const RffMap& map, std::span<const double> x, int p_phi) {
  if (static_cast<int>(x.size()) != map.dim()) throw ArgumentError("input dimension mismatch");
  Matrix row = Eigen::Map<const Matrix>(x.data(), 1, map.dim());
  return transform(map, row, p_phi).row(0).transpose();
}

}  // namespace smootherlab
