#pragma once

#include <cmath>
#include <vector>

#include "latgf/core.hpp"
#include "latgf/symbols.hpp"

namespace latgf {

using MultiIndex = Coords<int>;

inline int order(const MultiIndex& alpha) {
  int s = 0;
  for (int a : alpha) s += a;
  return s;
}

/// All multi-indices of dimension d with |alpha| <= n, ordered by |alpha|.
inline std::vector<MultiIndex> multi_indices(int d, int n) {
  std::vector<MultiIndex> out;
  for (int total = 0; total <= n; ++total) {
    MultiIndex a(d);
    std::function<void(int, int)> rec = [&](int j, int left) {
      if (j == d - 1) {
        a[j] = left;
        out.push_back(a);
        return;
      }
      for (int v = left; v >= 0; --v) {
        a[j] = v;
        rec(j + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

/// Smooth step: 1 for t <= 0, 0 for t >= 1, psi(t) = phi(1-t) / (phi(1-t) + phi(t))
/// with phi(t) = exp(-1/t). Symmetric: psi(1/2) = 1/2, psi(1-t) = 1 - psi(t).
inline double smooth_step(double t) {
  if (t <= 0) return 1.0;
  if (t >= 1) return 0.0;
  const double a = std::exp(-1.0 / (1.0 - t));
  const double b = std::exp(-1.0 / t);
  return a / (a + b);
}

/// Radial C^infinity cutoff chi^ on T^d: 1 on the ball V = {|k| <= r_inner},
/// 0 outside U = {|k| < r_outer}.
class BumpFunction {
 public:
  BumpFunction(int dim, double r_inner, double r_outer)
      : dim_(dim), r_inner_(r_inner), r_outer_(r_outer) {
    require(dim >= 1 && dim <= kMaxDim, "bump: bad dimension");
    require(r_inner > 0 && r_inner < r_outer,
            "bump: radii must satisfy 0 < r_inner < r_outer");
    require(r_outer <= kPi, "bump: r_outer must not exceed pi (support would wrap the torus)");
  }

  int dim() const { return dim_; }
  double r_inner() const { return r_inner_; }
  double r_outer() const { return r_outer_; }

  double radial(double r) const { return smooth_step((r - r_inner_) / (r_outer_ - r_inner_)); }
  double operator()(const TorusPoint& k) const { return radial(k.norm()); }
  double operator()(const RealVector& k) const { return radial(k.norm()); }

  bool in_inner(const TorusPoint& k) const { return k.norm2() <= r_inner_ * r_inner_; }
  bool outside(const TorusPoint& k) const { return k.norm2() >= r_outer_ * r_outer_; }

  /// Default finite-difference step for derivatives of this bump and of
  /// symbols analysed against it.
  double fd_step() const { return 1e-3 * (r_outer_ - r_inner_); }

  Symbol symbol() const {
    BumpFunction self = *this;
    return {dim_, [self](const TorusPoint& k) { return cplx(self(k)); }, false, 1.0, true,
            "chi^"};
  }

 private:
  int dim_;
  double r_inner_;
  double r_outer_;
};

inline BumpFunction make_bump(int d, double r_inner = kPi / 4, double r_outer = kPi / 2) {
  return BumpFunction(d, r_inner, r_outer);
}

struct FdResult {
  cplx value;
  // |D(h/2) - D(h)|: size of the Richardson correction.
  double refinement_change;
};

namespace detail {

inline double binomial(int n, int k) {
  double r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

template <typename F>
cplx central_difference(const F& f, const RealVector& k, const MultiIndex& alpha, double h) {
  const int d = k.dim();
  std::array<int, kMaxDim> i{};
  cplx sum = 0;
  while (true) {
    RealVector p = k;
    double coef = 1;
    for (int j = 0; j < d; ++j) {
      p[j] += (0.5 * alpha[j] - i[j]) * h;
      coef *= ((i[j] & 1) ? -1.0 : 1.0) * binomial(alpha[j], i[j]);
    }
    sum += coef * f(p);
    int j = 0;
    while (j < d && ++i[j] > alpha[j]) i[j++] = 0;
    if (j == d) break;
  }
  return sum / std::pow(h, order(alpha));
}

}  // namespace detail

/// nabla^alpha f at k by tensor-product central differences with one level of
/// Richardson extrapolation, (4 D(h/2) - D(h)) / 3. `f` takes a RealVector.
template <typename F>
FdResult fd_derivative(const F& f, const RealVector& k, const MultiIndex& alpha, double h) {
  require(alpha.dim() == k.dim(), "fd_derivative: multi-index dimension mismatch");
  if (order(alpha) == 0) return {f(k), 0.0};
  cplx coarse = detail::central_difference(f, k, alpha, h);
  cplx fine = detail::central_difference(f, k, alpha, 0.5 * h);
  return {(4.0 * fine - coarse) / 3.0, std::abs(fine - coarse)};
}

/// Half-width of the finite-difference stencil (sup norm) used by fd_derivative.
inline double stencil_half_width(const MultiIndex& alpha, double h) {
  int m = 0;
  for (int a : alpha) m = std::max(m, a);
  return 0.5 * m * h;
}

/// nabla^alpha chi^ at k. Exactly 0 when the stencil lies inside V or outside
/// the support (1 for alpha = 0 inside V).
inline double bump_derivative(const BumpFunction& chi, const TorusPoint& k,
                              const MultiIndex& alpha) {
  require(alpha.dim() == chi.dim() && k.dim() == chi.dim(), "bump_derivative: dimension mismatch");
  const int n = order(alpha);
  const double h = chi.fd_step();
  const double w = stencil_half_width(alpha, h) * std::sqrt(double(chi.dim()));
  const double r = k.norm();
  if (r + w <= chi.r_inner()) return n == 0 ? 1.0 : 0.0;
  if (r - w >= chi.r_outer()) return 0.0;
  for (int j = 0; j < k.dim(); ++j) {
    const double reach = 0.5 * alpha[j] * h;
    if (k[j] + reach > kPi || k[j] - reach <= -kPi)
      throw InvalidArgument("bump_derivative: stencil crosses the torus cut; reposition k");
  }
  auto f = [&](const RealVector& p) { return cplx(chi(p)); };
  return fd_derivative(f, k.coords(), alpha, h).value.real();
}

}  // namespace latgf
