#include "curvlab/differentiation.hpp"

#include <cmath>
#include <numbers>

#include "curvlab/errors.hpp"

namespace curvlab {

std::string to_string(Stencil s) {
  switch (s) {
    case Stencil::Order2: return "order2";
    case Stencil::Order4: return "order4";
    case Stencil::Order6: return "order6";
    case Stencil::Order8: return "order8";
    case Stencil::Spectral: return "spectral";
  }
  return "unknown";
}

Stencil stencil_from_string(const std::string& name) {
  if (name == "order2" || name == "2") return Stencil::Order2;
  if (name == "order4" || name == "4") return Stencil::Order4;
  if (name == "order6" || name == "6") return Stencil::Order6;
  if (name == "order8" || name == "8") return Stencil::Order8;
  if (name == "spectral") return Stencil::Spectral;
  throw ConfigurationError("unknown stencil '" + name + "'");
}

std::vector<double> fornberg_weights(int derivative, double x0, std::span<const double> nodes) {
  const int np = static_cast<int>(nodes.size());
  const int m = derivative;
  if (np < m + 1) throw ConfigurationError("too few nodes for requested derivative");
  // c[j][k]: weight of node j for the k-th derivative.
  std::vector<std::vector<double>> c(static_cast<std::size_t>(np),
                                     std::vector<double>(static_cast<std::size_t>(m + 1), 0.0));
  double c1 = 1.0;
  double c4 = nodes[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < np; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(np));
  for (int j = 0; j < np; ++j) w[static_cast<std::size_t>(j)] = c[j][m];
  return w;
}

PeriodicStencil PeriodicStencil::make(Stencil stencil, int points, double length) {
  PeriodicStencil s;
  const int N = points;
  if (stencil == Stencil::Spectral) {
    const double h = 2.0 * std::numbers::pi / N;
    const double scale = 2.0 * std::numbers::pi / length;
    const int reach = N / 2;
    for (int k = 1; k <= reach; ++k) {
      const double sign = (k % 2 == 0) ? 1.0 : -1.0;
      const double half = 0.5 * k * h;
      double a1 = 0.0;
      double a2 = 0.0;
      if (N % 2 == 0) {
        a1 = -0.5 * sign / std::tan(half);
        a2 = -0.5 * sign / (std::sin(half) * std::sin(half));
        // Offsets +N/2 and -N/2 name the same node.
        if (k == reach) {
          a1 = 0.0;
          a2 *= 0.5;
        }
      } else {
        a1 = -0.5 * sign / std::sin(half);
        a2 = -0.5 * sign * std::cos(half) / (std::sin(half) * std::sin(half));
      }
      s.d1.push_back(a1 * scale);
      s.d2.push_back(a2 * scale * scale);
    }
    return s;
  }

  const int order = static_cast<int>(stencil);
  const int reach = order / 2;
  if (2 * reach + 1 > N)
    throw ConfigurationError("stencil of order " + std::to_string(order) +
                             " is wider than an axis of " + std::to_string(N) + " points");
  std::vector<double> nodes;
  for (int k = -reach; k <= reach; ++k) nodes.push_back(static_cast<double>(k));
  const auto w1 = fornberg_weights(1, 0.0, nodes);
  const auto w2 = fornberg_weights(2, 0.0, nodes);
  const double h = length / N;
  for (int k = 1; k <= reach; ++k) {
    s.d1.push_back(w1[static_cast<std::size_t>(reach + k)] / h);
    s.d2.push_back(w2[static_cast<std::size_t>(reach + k)] / (h * h));
  }
  return s;
}

void PeriodicStencil::first(std::span<const double> in, std::span<double> out) const {
  const int N = static_cast<int>(in.size());
  for (int i = 0; i < N; ++i) {
    double acc = 0.0;
    for (int k = 1; k <= reach(); ++k)
      acc += d1[static_cast<std::size_t>(k - 1)] *
             (in[static_cast<std::size_t>((i + k) % N)] - in[static_cast<std::size_t>((i - k + N) % N)]);
    out[static_cast<std::size_t>(i)] = acc;
  }
}

void PeriodicStencil::second(std::span<const double> in, std::span<double> out) const {
  const int N = static_cast<int>(in.size());
  for (int i = 0; i < N; ++i) {
    const double mid = in[static_cast<std::size_t>(i)];
    double acc = 0.0;
    for (int k = 1; k <= reach(); ++k)
      acc += d2[static_cast<std::size_t>(k - 1)] *
             ((in[static_cast<std::size_t>((i + k) % N)] - mid) +
              (in[static_cast<std::size_t>((i - k + N) % N)] - mid));
    out[static_cast<std::size_t>(i)] = acc;
  }
}

Differentiator::Differentiator(const Grid& grid, Stencil stencil) : grid_(grid), stencil_(stencil) {
  for (int a = 0; a < grid_.dimension(); ++a)
    axes_.push_back(PeriodicStencil::make(stencil, grid_.points(), grid_.length(a)));
}

void Differentiator::apply(std::span<const double> in, int axis, bool second_order,
                           std::span<double> out) const {
  const std::size_t N = static_cast<std::size_t>(grid_.points());
  const std::size_t s = grid_.stride(axis);
  const std::size_t outer = grid_.node_count() / (N * s);
  const auto& st = axes_[static_cast<std::size_t>(axis)];
  const auto& coef = second_order ? st.d2 : st.d1;
  const std::size_t reach = coef.size();
  for (std::size_t o = 0; o < outer; ++o) {
    const double* base = in.data() + o * N * s;
    double* dst_base = out.data() + o * N * s;
    for (std::size_t i = 0; i < N; ++i) {
      double* dst = dst_base + i * s;
      const double* mid = base + i * s;
      for (std::size_t q = 0; q < s; ++q) dst[q] = 0.0;
      for (std::size_t k = 1; k <= reach; ++k) {
        const double c = coef[k - 1];
        if (c == 0.0) continue;
        const double* up = base + ((i + k) % N) * s;
        const double* um = base + ((i + N - (k % N)) % N) * s;
        if (second_order) {
          for (std::size_t q = 0; q < s; ++q) dst[q] += c * ((up[q] - mid[q]) + (um[q] - mid[q]));
        } else {
          for (std::size_t q = 0; q < s; ++q) dst[q] += c * (up[q] - um[q]);
        }
      }
    }
  }
}

void Differentiator::first(std::span<const double> in, int axis, std::span<double> out) const {
  if (axis < 0 || axis >= grid_.dimension()) throw ConfigurationError("axis out of range");
  apply(in, axis, false, out);
}

void Differentiator::second(std::span<const double> in, int a, int b, std::span<double> out) const {
  if (a < 0 || a >= grid_.dimension() || b < 0 || b >= grid_.dimension())
    throw ConfigurationError("axis out of range");
  if (a == b) {
    apply(in, a, true, out);
    return;
  }
  std::vector<double> tmp(in.size());
  apply(in, a, false, tmp);
  apply(tmp, b, false, out);
}

std::vector<double> Differentiator::first(std::span<const double> in, int axis) const {
  std::vector<double> out(in.size());
  first(in, axis, out);
  return out;
}

std::vector<double> Differentiator::second(std::span<const double> in, int a, int b) const {
  std::vector<double> out(in.size());
  second(in, a, b, out);
  return out;
}

namespace {

int pair_index(int n, int a, int b) { return TensorField2::packed_index(n, a, b); }

}  // namespace

const ScalarField& ScalarDerivatives::d2(int a, int b) const {
  const int n = static_cast<int>(first.size());
  return second.at(static_cast<std::size_t>(pair_index(n, a, b)));
}

const TensorField2& TensorDerivatives::d2(int a, int b) const {
  const int n = static_cast<int>(first.size());
  return second.at(static_cast<std::size_t>(pair_index(n, a, b)));
}

ScalarDerivatives partial_derivatives(const ScalarField& field, int order, Stencil stencil) {
  if (order != 1 && order != 2) throw ConfigurationError("derivative order must be 1 or 2");
  field.require_finite("input field");
  const Grid& grid = field.grid();
  const int n = grid.dimension();
  Differentiator D(grid, stencil);
  ScalarDerivatives out;
  for (int a = 0; a < n; ++a) {
    ScalarField d(grid);
    D.first(field.values(), a, d.values());
    out.first.push_back(std::move(d));
  }
  if (order == 2) {
    for (int a = 0; a < n; ++a)
      for (int b = a; b < n; ++b) {
        ScalarField d(grid);
        if (a == b)
          D.second(field.values(), a, a, d.values());
        else
          D.first(out.first[static_cast<std::size_t>(a)].values(), b, d.values());
        out.second.push_back(std::move(d));
      }
  }
  return out;
}

TensorDerivatives partial_derivatives(const TensorField2& field, int order, Stencil stencil) {
  if (order != 1 && order != 2) throw ConfigurationError("derivative order must be 1 or 2");
  field.require_finite("input tensor");
  const Grid& grid = field.grid();
  const int n = grid.dimension();
  Differentiator D(grid, stencil);
  TensorDerivatives out;
  for (int a = 0; a < n; ++a) out.first.emplace_back(grid);
  if (order == 2)
    for (int p = 0; p < TensorField2::packed_count(n); ++p) out.second.emplace_back(grid);

  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto comp = field.component(i, j);
      for (int a = 0; a < n; ++a)
        D.first(comp, a, out.first[static_cast<std::size_t>(a)].component(i, j));
      if (order == 2) {
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) {
            auto dst = out.second[static_cast<std::size_t>(pair_index(n, a, b))].component(i, j);
            if (a == b)
              D.second(comp, a, a, dst);
            else
              D.first(out.first[static_cast<std::size_t>(a)].component(i, j), b, dst);
          }
      }
    }
  return out;
}

}  // namespace curvlab
