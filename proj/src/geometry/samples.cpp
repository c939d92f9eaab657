#include "curvlab/samples.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace curvlab {

namespace {

struct Mode {
  std::vector<int> k;
  double amplitude;
  double phase;
};

// Each component gets its own short sum of modes, normalized so the
// absolute amplitudes sum to one (hence |value| <= 1 pointwise).
std::vector<Mode> draw_modes(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kdist(-1, 1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Mode> modes(3);
  double total = 0.0;
  for (auto& m : modes) {
    m.k.resize(static_cast<std::size_t>(n));
    bool zero = true;
    while (zero) {
      for (int& ka : m.k) ka = kdist(rng);
      for (int ka : m.k) zero = zero && ka == 0;
    }
    m.amplitude = 0.2 + U(rng);
    m.phase = 2 * std::numbers::pi * U(rng);
    total += m.amplitude;
  }
  for (auto& m : modes) m.amplitude /= total;
  return modes;
}

double eval(const std::vector<Mode>& modes, const Grid& grid, std::span<const double> x) {
  double v = 0.0;
  for (const auto& m : modes) {
    double arg = m.phase;
    for (int a = 0; a < grid.dimension(); ++a)
      arg += 2 * std::numbers::pi * m.k[static_cast<std::size_t>(a)] * x[static_cast<std::size_t>(a)] / grid.length(a);
    v += m.amplitude * std::sin(arg);
  }
  return v;
}

}  // namespace

TensorField2 random_smooth_tensor(const Grid& grid, std::uint64_t seed, double amplitude) {
  const int n = grid.dimension();
  std::mt19937_64 rng(seed);
  std::vector<std::vector<Mode>> comps;
  for (int c = 0; c < TensorField2::packed_count(n); ++c) comps.push_back(draw_modes(n, rng));
  TensorField2 T(grid);
  std::vector<double> x(static_cast<std::size_t>(n));
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    grid.coordinates(p, x);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        T.at(p, i, j) = amplitude * eval(comps[static_cast<std::size_t>(TensorField2::packed_index(n, i, j))], grid, x);
  }
  return T;
}

MetricField random_smooth_metric(const Grid& grid, std::uint64_t seed, double amplitude) {
  TensorField2 T = random_smooth_tensor(grid, seed, amplitude);
  for (int i = 0; i < grid.dimension(); ++i)
    for (double& v : T.component(i, i)) v += 1.0;
  return MetricField(std::move(T));
}

ScalarField random_smooth_scalar(const Grid& grid, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  const auto modes = draw_modes(grid.dimension(), rng);
  return ScalarField::from_function(grid, [&](std::span<const double> x) { return amplitude * eval(modes, grid, x); });
}

}  // namespace curvlab
