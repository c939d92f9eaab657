#include "curvlab/curvature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <optional>

#include "curvlab/errors.hpp"
#include "curvlab/metric_ops.hpp"

namespace curvlab {

Connection::Connection(Grid grid) : grid_(std::move(grid)) {
  const int n = grid_.dimension();
  data_.assign(static_cast<std::size_t>(n * TensorField2::packed_count(n)) * grid_.node_count(), 0.0);
}

std::span<const double> Connection::component(int k, int i, int j) const {
  return std::span<const double>(data_).subspan(offset(k, i, j), grid_.node_count());
}

double Connection::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

namespace {

// Row-major helpers for per-node scratch blocks.
struct Idx {
  int n;
  std::size_t operator()(int i, int j) const { return static_cast<std::size_t>(i * n + j); }
  std::size_t operator()(int i, int j, int k) const { return static_cast<std::size_t>((i * n + j) * n + k); }
  std::size_t operator()(int i, int j, int k, int l) const {
    return static_cast<std::size_t>(((i * n + j) * n + k) * n + l);
  }
};

struct NodeScratch {
  explicit NodeScratch(int n)
      : ix{n},
        g(static_cast<std::size_t>(n * n)),
        gi(g.size()),
        dg(static_cast<std::size_t>(n * n * n)),
        gl(dg.size()),
        gu(dg.size()),
        riem(static_cast<std::size_t>(n * n * n * n)),
        ric(g.size()),
        ricup(g.size()) {}

  Idx ix;
  std::vector<double> g, gi, dg, gl, gu, riem, ric, ricup;
};

// Fills gl (first index lowered), gu (Gamma^k_ij) and optionally the Riemann block.
void node_geometry(const TensorField2& gfield, const TensorField2& inv, const TensorDerivatives& td,
                   std::size_t p, NodeScratch& s, bool with_riemann) {
  const int n = gfield.dimension();
  const Idx& ix = s.ix;
  gfield.gather(p, s.g);
  inv.gather(p, s.gi);
  for (int a = 0; a < n; ++a)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s.dg[ix(a, i, j)] = td.first[static_cast<std::size_t>(a)].at(p, i, j);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        s.gl[ix(k, i, j)] = 0.5 * (s.dg[ix(i, j, k)] + s.dg[ix(j, i, k)] - s.dg[ix(k, i, j)]);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int l = 0; l < n; ++l) v += s.gi[ix(k, l)] * s.gl[ix(l, i, j)];
        s.gu[ix(k, i, j)] = v;
      }
  if (!with_riemann) return;
  auto d2 = [&](int a, int b, int i, int j) { return td.d2(a, b).at(p, i, j); };
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double v = 0.5 * (d2(b, c, a, d) + d2(a, d, b, c) - d2(a, c, b, d) - d2(b, d, a, c));
          for (int e = 0; e < n; ++e)
            v += s.gl[ix(e, b, c)] * s.gu[ix(e, a, d)] - s.gl[ix(e, b, d)] * s.gu[ix(e, a, c)];
          s.riem[ix(a, b, c, d)] = v;
        }
}

void node_ricci(NodeScratch& s, int n) {
  const Idx& ix = s.ix;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double v = 0.0;
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) v += s.gi[ix(k, l)] * s.riem[ix(i, k, j, l)];
      s.ric[ix(i, j)] = v;
    }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) s.ric[ix(i, j)] = s.ric[ix(j, i)] = 0.5 * (s.ric[ix(i, j)] + s.ric[ix(j, i)]);
}

}  // namespace

Connection christoffel(const MetricField& g, Stencil stencil) {
  const int n = g.dimension();
  const auto inv = metric_inverse(g);
  const auto td = partial_derivatives(g.components(), 1, stencil);
  Connection out(g.grid());
  NodeScratch s(n);
  for (std::size_t p = 0; p < g.grid().node_count(); ++p) {
    node_geometry(g.components(), inv, td, p, s, false);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) out.at(p, k, i, j) = 0.5 * (s.gu[s.ix(k, i, j)] + s.gu[s.ix(k, j, i)]);
  }
  return out;
}

namespace {

struct CorePass {
  CurvatureCore core;
  std::optional<TensorField4> riemann;
};

CorePass run_core(const MetricField& g, Stencil stencil, bool keep_riemann) {
  const Grid& grid = g.grid();
  const int n = g.dimension();
  auto inv = metric_inverse(g);
  const auto td = partial_derivatives(g.components(), 2, stencil);
  CorePass out{CurvatureCore{stencil, inv, Connection(grid), TensorField2(grid), ScalarField(grid),
                             volume_density(g), TensorField2(grid), ScalarField(grid)},
               std::nullopt};
  if (keep_riemann) out.riemann.emplace(grid);
  CurvatureCore& c = out.core;
  NodeScratch s(n);
  const Idx& ix = s.ix;
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    node_geometry(g.components(), inv, td, p, s, true);
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) c.gamma.at(p, k, i, j) = 0.5 * (s.gu[ix(k, i, j)] + s.gu[ix(k, j, i)]);
    node_ricci(s, n);
    double R = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) R += s.gi[ix(i, j)] * s.ric[ix(i, j)];
    c.scalar[p] = R;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) v += s.gi[ix(i, a)] * s.ric[ix(a, b)] * s.gi[ix(b, j)];
        s.ricup[ix(i, j)] = v;
      }
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) norm2 += s.ric[ix(i, j)] * s.ricup[ix(i, j)];
    c.ricci_norm2[p] = norm2;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        c.ricci.at(p, i, j) = s.ric[ix(i, j)];
        double v = 0.0;
        double w = 0.0;
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            v += s.riem[ix(i, k, j, l)] * s.ricup[ix(k, l)];
            w += s.riem[ix(j, k, i, l)] * s.ricup[ix(k, l)];
          }
        c.riem_ric.at(p, i, j) = 0.5 * (v + w);
      }
    if (keep_riemann)
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b)
          for (int cc = 0; cc < n; ++cc)
            for (int d = 0; d < n; ++d) out.riemann->at(p, a, b, cc, d) = s.riem[ix(a, b, cc, d)];
  }
  c.scalar.require_finite("scalar curvature");
  return out;
}

}  // namespace

CurvatureCore curvature_core(const MetricField& g, Stencil stencil) {
  return std::move(run_core(g, stencil, false).core);
}

void weyl_block(std::span<const double> riem, std::span<const double> g, std::span<const double> ric,
                double scalar, int n, std::span<double> weyl) {
  const Idx ix{n};
  if (n == 2) {
    std::fill(weyl.begin(), weyl.end(), 0.0);
    return;
  }
  const double a = 1.0 / (n - 2);
  const double b = scalar / ((n - 1.0) * (n - 2.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int t = 0; t < n; ++t) {
          const double schouten =
              a * (ric[ix(i, k)] * g[ix(j, t)] - ric[ix(i, t)] * g[ix(j, k)] + ric[ix(j, t)] * g[ix(i, k)] -
                   ric[ix(j, k)] * g[ix(i, t)]) -
              b * (g[ix(i, k)] * g[ix(j, t)] - g[ix(i, t)] * g[ix(j, k)]);
          weyl[ix(i, j, k, t)] = riem[ix(i, j, k, t)] - schouten;
        }
}

void riemann_from_weyl(std::span<const double> weyl, std::span<const double> g, std::span<const double> ric,
                       double scalar, int n, std::span<double> riem) {
  const Idx ix{n};
  if (n == 2) {
    // Riemann of a surface is (R/2)(g_ik g_jt - g_it g_jk).
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int t = 0; t < n; ++t)
            riem[ix(i, j, k, t)] = 0.5 * scalar * (g[ix(i, k)] * g[ix(j, t)] - g[ix(i, t)] * g[ix(j, k)]);
    return;
  }
  const double a = 1.0 / (n - 2);
  const double b = scalar / ((n - 1.0) * (n - 2.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int t = 0; t < n; ++t)
          riem[ix(i, j, k, t)] =
              weyl[ix(i, j, k, t)] +
              a * (ric[ix(i, k)] * g[ix(j, t)] - ric[ix(i, t)] * g[ix(j, k)] + ric[ix(j, t)] * g[ix(i, k)] -
                   ric[ix(j, k)] * g[ix(i, t)]) -
              b * (g[ix(i, k)] * g[ix(j, t)] - g[ix(i, t)] * g[ix(j, k)]);
}

CurvatureBundle curvature_bundle(const MetricField& g, Stencil stencil) {
  auto pass = run_core(g, stencil, true);
  const Grid& grid = g.grid();
  const int n = g.dimension();
  CurvatureBundle b{std::move(pass.core.gamma), std::move(*pass.riemann), pass.core.ricci, pass.core.scalar,
                    TensorField4(grid), TensorField2(grid)};
  const std::size_t n4 = static_cast<std::size_t>(n * n * n * n);
  std::vector<double> rm(n4), w(n4), gb(static_cast<std::size_t>(n * n)), rc(gb.size());
  for (std::size_t p = 0; p < grid.node_count(); ++p) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) rm[b.riemann.flat(i, j, k, l)] = b.riemann.at(p, i, j, k, l);
    g.components().gather(p, gb);
    b.ricci.gather(p, rc);
    weyl_block(rm, gb, rc, b.scalar[p], n, w);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) b.weyl.at(p, i, j, k, l) = w[b.weyl.flat(i, j, k, l)];
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        b.traceless_ricci.at(p, i, j) = b.ricci.at(p, i, j) - b.scalar[p] / n * g.at(p, i, j);
  }
  return b;
}

HessianResult hessian_laplacian(const ScalarField& u, const CurvatureCore& core) {
  const Grid& grid = u.grid();
  const int n = grid.dimension();
  auto d = partial_derivatives(u, 2, core.stencil);
  HessianResult out{d.first, TensorField2(grid), ScalarField(grid)};
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      const auto& dij = d.d2(i, j);
      for (std::size_t p = 0; p < grid.node_count(); ++p) {
        double v = dij[p];
        for (int k = 0; k < n; ++k) v -= core.gamma.at(p, k, i, j) * out.gradient[static_cast<std::size_t>(k)][p];
        out.hessian.at(p, i, j) = v;
      }
    }
  out.laplacian = metric_trace(out.hessian, core.inverse);
  return out;
}

HessianResult hessian_laplacian(const ScalarField& u, const MetricField& g, Stencil stencil) {
  u.require_finite("scalar field");
  const auto core = curvature_core(g, stencil);
  return hessian_laplacian(u, core);
}

TensorField2 rough_laplacian(const TensorField2& T, const CurvatureCore& core) {
  const Grid& grid = T.grid();
  const int n = grid.dimension();
  const std::size_t nodes = grid.node_count();
  const auto dT = partial_derivatives(T, 1, core.stencil);
  const auto& G = core.gamma;

  // S[k] = nabla_k T, symmetric in (i, j).
  std::vector<TensorField2> S;
  for (int k = 0; k < n; ++k) {
    TensorField2 Sk(grid);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (std::size_t p = 0; p < nodes; ++p) {
          double v = dT.first[static_cast<std::size_t>(k)].at(p, i, j);
          for (int m = 0; m < n; ++m) v -= G.at(p, m, k, i) * T.at(p, m, j) + G.at(p, m, k, j) * T.at(p, i, m);
          Sk.at(p, i, j) = v;
        }
    S.push_back(std::move(Sk));
  }

  TensorField2 out(grid);
  Differentiator D(grid, core.stencil);
  std::vector<double> dS(nodes);
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) {
      auto dst = out.component(i, j);
      for (int l = 0; l < n; ++l)
        for (int k = 0; k < n; ++k) {
          D.first(S[static_cast<std::size_t>(k)].component(i, j), l, dS);
          for (std::size_t p = 0; p < nodes; ++p) {
            double v = dS[p];
            for (int m = 0; m < n; ++m)
              v -= G.at(p, m, l, k) * S[static_cast<std::size_t>(m)].at(p, i, j) +
                   G.at(p, m, l, i) * S[static_cast<std::size_t>(k)].at(p, m, j) +
                   G.at(p, m, l, j) * S[static_cast<std::size_t>(k)].at(p, i, m);
            dst[p] += core.inverse.at(p, l, k) * v;
          }
        }
    }
  return out;
}

ScalarField drift_laplacian(const ScalarField& u, const ScalarField& f, const CurvatureCore& core) {
  const int n = u.grid().dimension();
  const auto hu = hessian_laplacian(u, core);
  const auto df = partial_derivatives(f, 1, core.stencil);
  ScalarField out(u.grid());
  for (std::size_t p = 0; p < u.size(); ++p) {
    double inner = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        inner += core.inverse.at(p, i, j) * df.first[static_cast<std::size_t>(i)][p] *
                 hu.gradient[static_cast<std::size_t>(j)][p];
    out[p] = hu.laplacian[p] - inner;
  }
  return out;
}

BakryEmeryData bakry_emery(const ScalarField& R, const CurvatureCore& core, const MetricField& g) {
  const Grid& grid = R.grid();
  const int n = grid.dimension();
  R.require_finite("scalar curvature");
  for (std::size_t p = 0; p < R.size(); ++p)
    if (!(R[p] < 0.0))
      throw PreconditionError("potential -log(-R) needs R < 0, violated at node " + std::to_string(p));
  ScalarField f(grid);
  for (std::size_t p = 0; p < R.size(); ++p) f[p] = -std::log(-R[p]);
  const auto hf = hessian_laplacian(f, core);
  BakryEmeryData out{f, TensorField2(grid), ScalarField(grid), hf.laplacian,
                     gradient_norm_squared(hf.gradient, core.inverse), TensorField2(grid)};
  const double k = 3.0 / (4.0 * (n - 1));
  for (std::size_t p = 0; p < R.size(); ++p) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double rf = core.ricci.at(p, i, j) + hf.hessian.at(p, i, j) -
                          hf.gradient[static_cast<std::size_t>(i)][p] * hf.gradient[static_cast<std::size_t>(j)][p];
        out.ricci_f.at(p, i, j) = rf;
        out.critical_residual.at(p, i, j) = rf + k * std::exp(-f[p]) * g.at(p, i, j);
      }
    out.drift_laplacian_f[p] = hf.laplacian[p] - out.grad_f_norm2[p];
  }
  return out;
}

}  // namespace curvlab
