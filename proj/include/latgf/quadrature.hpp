#pragma once

#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "latgf/core.hpp"
#include "latgf/symbols.hpp"

namespace latgf {

/// Uniform tensor grid on (-pi, pi]^d with `n_per_axis` nodes per axis.
/// Quadratures use the half-cell shifted ("offset") nodes (j + 1/2) 2 pi / n,
/// so k = 0 is never sampled.
/// `max_axis_n` caps the per-axis refinement driven by large |x|.
struct QuadratureGrid {
  int dim;
  int n_per_axis;
  int max_axis_n = 4096;

  QuadratureGrid(int d, int n, int max_n = 4096) : dim(d), n_per_axis(n), max_axis_n(max_n) {
    check_dim(d);
    require(n >= 8 && n % 2 == 0, "quadrature grid: n_per_axis must be even and >= 8");
    require(max_n >= n, "quadrature grid: max_axis_n must be >= n_per_axis");
  }
  QuadratureGrid halved() const { return QuadratureGrid(dim, std::max(8, n_per_axis / 2), max_axis_n); }
  QuadratureGrid doubled() const {
    return QuadratureGrid(dim, 2 * n_per_axis, std::max(max_axis_n, 2 * n_per_axis));
  }
};

using AxisCounts = std::array<int, kMaxDim>;

inline int round_up_to(int v, int m) { return (v + m - 1) / m * m; }

/// Per-axis node counts: the base grid, raised on each axis j to keep at
/// least 8 nodes per oscillation of e^{-i k_j y_j} across the integration
/// extent (r_outer for ball integrals, pi for the whole torus).
inline AxisCounts axis_counts(const QuadratureGrid& grid, std::span<const RealVector> ys,
                              double extent, int nodes_per_oscillation = 8) {
  AxisCounts n{};
  for (int j = 0; j < grid.dim; ++j) {
    double ymax = 0;
    for (const auto& y : ys) ymax = std::max(ymax, std::abs(y[j]));
    int need = static_cast<int>(std::ceil(nodes_per_oscillation * ymax * extent / kPi));
    n[j] = std::max(grid.n_per_axis, round_up_to(need, 8));
    if (n[j] > grid.max_axis_n)
      throw InvalidArgument("aliasing: |x_" + std::to_string(j) + "| = " + std::to_string(ymax) +
                            " needs " + std::to_string(n[j]) + " nodes on that axis, above the limit " +
                            std::to_string(grid.max_axis_n) + "; raise the grid limit or use smaller x");
  }
  return n;
}

inline AxisCounts halved(const AxisCounts& n, int dim) {
  AxisCounts h{};
  for (int j = 0; j < dim; ++j) h[j] = std::max(8, round_up_to(n[j] / 2, 2));
  return h;
}

inline AxisCounts uniform_counts(int dim, int n) {
  AxisCounts c{};
  for (int j = 0; j < dim; ++j) c[j] = n;
  return c;
}

/// Largest marginal table the offset-grid engine will allocate.
inline constexpr std::size_t kMaxMarginalCells = std::size_t(40'000'000);

/// Offset-grid (midpoint) rule for
///     (2 pi)^{-d} int phi(k) e^{-i k.y} dk
/// over T^d, or over the ball |k| <= ball_radius when ball_radius > 0, for
/// every y in `ys` at once.
///
/// Even symbols are folded onto the positive orthant with cosine phases.
/// The integrand is first summed over the axes on which every y vanishes, so
/// the per-y cost is the size of the marginal table over the remaining axes.
/// The rule returns the periodization sum_m (-1)^{m_1+..+m_d} F(y + n.m) of the
/// exact transform F; its error is the aliasing of F's tail.
inline std::vector<cplx> offset_grid_transform(const Symbol& phi, std::span<const RealVector> ys,
                                               const AxisCounts& n, double ball_radius = 0.0) {
  const int d = phi.dim;
  for (const auto& y : ys) require(y.dim() == d, "offset_grid_transform: point dimension mismatch");
  const bool even = phi.even;

  // Per-axis nodes.
  std::array<std::vector<double>, kMaxDim> kv, cv;
  double weight = 1.0;
  for (int j = 0; j < d; ++j) {
    require(n[j] >= 2 && n[j] % 2 == 0, "offset_grid_transform: node counts must be even");
    const double h = kTwoPi / n[j];
    for (int i = 0; i < n[j]; ++i) {
      double k = even ? (i + 0.5) * h : (i - n[j] / 2 + 0.5) * h;
      if (even && i >= n[j] / 2) break;
      if (ball_radius > 0 && std::abs(k) > ball_radius) {
        if (even) break;
        continue;
      }
      kv[j].push_back(k);
      cv[j].push_back(std::cos(k));
    }
    weight *= (even ? 2.0 : 1.0) / n[j];
  }

  std::array<bool, kMaxDim> active{};
  std::array<std::size_t, kMaxDim> stride{};
  std::size_t cells = 1;
  for (int j = d - 1; j >= 0; --j) {
    for (const auto& y : ys) active[j] = active[j] || y[j] != 0.0;
    stride[j] = active[j] ? cells : 0;
    if (active[j]) cells *= kv[j].size();
  }
  if (cells > kMaxMarginalCells)
    throw InvalidArgument("offset_grid_transform: marginal table of " + std::to_string(cells) +
                          " cells exceeds the memory limit; reduce the grid or the point set");
  std::vector<cplx> marginal(cells, 0.0);

  const double r2max = ball_radius > 0 ? ball_radius * ball_radius : 1e300;
  TorusPoint tp(d);
  // Depth-first over axes; the innermost axis runs as a flat loop.
  auto visit = [&](auto&& self, int j, double r2, std::size_t offset) -> void {
    const auto& ks = kv[j];
    const auto& cs = cv[j];
    if (j == d - 1) {
      for (std::size_t i = 0; i < ks.size(); ++i) {
        const double rr = r2 + ks[i] * ks[i];
        if (rr > r2max) {
          if (even) break;
          continue;
        }
        tp.set_reduced(j, ks[i], cs[i]);
        marginal[offset + i * stride[j]] += phi.eval(tp);
      }
      return;
    }
    for (std::size_t i = 0; i < ks.size(); ++i) {
      const double rr = r2 + ks[i] * ks[i];
      if (rr > r2max) {
        if (even) break;
        continue;
      }
      tp.set_reduced(j, ks[i], cs[i]);
      self(self, j + 1, rr, offset + i * stride[j]);
    }
  };
  if (d > 0) visit(visit, 0, 0.0, 0);

  std::vector<int> act;
  for (int j = 0; j < d; ++j)
    if (active[j]) act.push_back(j);

  std::vector<cplx> out;
  out.reserve(ys.size());
  for (const auto& y : ys) {
    if (act.empty()) {
      out.push_back(weight * marginal[0]);
      continue;
    }
    std::array<std::vector<cplx>, kMaxDim> phase;
    for (int j : act) {
      phase[j].resize(kv[j].size());
      for (std::size_t i = 0; i < kv[j].size(); ++i) {
        const double a = kv[j][i] * y[j];
        phase[j][i] = even ? cplx(std::cos(a), 0.0) : std::polar(1.0, -a);
      }
    }
    // Odometer over the active axes with running partial products.
    const int na = static_cast<int>(act.size());
    std::vector<std::size_t> idx(na, 0);
    std::vector<cplx> partial(na + 1, 1.0);
    for (int a = 0; a < na; ++a) partial[a + 1] = partial[a] * phase[act[a]][0];
    cplx sum = 0;
    const int last = act.back();
    const std::size_t nlast = kv[last].size();
    const auto& plast = phase[last];
    std::size_t base = 0;
    while (true) {
      const cplx pre = partial[na - 1];
      cplx inner = 0;
      for (std::size_t i = 0; i < nlast; ++i) inner += marginal[base + i] * plast[i];
      sum += pre * inner;
      base += nlast;
      int a = na - 2;
      while (a >= 0 && ++idx[a] == kv[act[a]].size()) idx[a--] = 0;
      if (a < 0) break;
      for (int b = a; b < na - 1; ++b) partial[b + 1] = partial[b] * phase[act[b]][idx[b]];
    }
    out.push_back(weight * sum);
  }
  return out;
}

/// Nodes and weights of a composite Gauss-Legendre rule on [a, b].
struct Rule1D {
  std::vector<double> x;
  std::vector<double> w;
};

inline Rule1D gauss_legendre(double a, double b, int panels) {
  using GL = boost::math::quadrature::gauss<double, 10>;
  const auto& absc = GL::abscissa();
  const auto& wts = GL::weights();
  Rule1D r;
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width, half = 0.5 * width;
    for (std::size_t i = 0; i < absc.size(); ++i) {
      // boost stores the nonnegative half of the symmetric 10-point rule
      r.x.push_back(mid - half * absc[i]);
      r.w.push_back(half * wts[i]);
      if (absc[i] != 0.0) {
        r.x.push_back(mid + half * absc[i]);
        r.w.push_back(half * wts[i]);
      }
    }
  }
  return r;
}

/// Product quadrature on the unit sphere S^{d-1} (d >= 2). `order` controls the
/// polar resolution: about `order` nodes per polar angle and 2*order azimuths.
/// Weights sum to the sphere area.
inline std::vector<std::pair<RealVector, double>> sphere_rule(int d, int order) {
  require(d >= 2 && d <= kMaxDim, "sphere_rule: dimension must be in [2, 6]");
  const int panels = std::max(1, (order + 9) / 10);
  const int naz = std::max(4, 2 * order);
  std::vector<std::pair<RealVector, double>> out;
  // Polar angles theta_1..theta_{d-2} carry the Jacobian sin^{d-1-i}(theta_i).
  Rule1D polar = gauss_legendre(0.0, kPi, panels);
  Rule1D cospolar = gauss_legendre(-1.0, 1.0, panels);
  std::vector<std::size_t> idx(std::max(0, d - 2), 0);
  while (true) {
    RealVector base(d);
    double w = 1.0, sprod = 1.0;
    for (int i = 0; i < d - 2; ++i) {
      double c, s, wi;
      if (d == 3) {
        c = cospolar.x[idx[i]];
        s = std::sqrt(std::max(0.0, 1 - c * c));
        wi = cospolar.w[idx[i]];
      } else {
        const double th = polar.x[idx[i]];
        c = std::cos(th);
        s = std::sin(th);
        wi = polar.w[idx[i]] * std::pow(s, d - 2 - i);
      }
      base[i] = sprod * c;
      sprod *= s;
      w *= wi;
    }
    for (int a = 0; a < naz; ++a) {
      const double phi = kTwoPi * a / naz;
      RealVector u = base;
      u[d - 2] = sprod * std::cos(phi);
      u[d - 1] = sprod * std::sin(phi);
      out.emplace_back(u, w * kTwoPi / naz);
    }
    int i = d - 3;
    const std::size_t npol = (d == 3 ? cospolar.x.size() : polar.x.size());
    while (i >= 0 && ++idx[i] == npol) idx[i--] = 0;
    if (i < 0) break;
  }
  return out;
}

}  // namespace latgf
