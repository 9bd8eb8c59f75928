#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "latgf/core.hpp"
#include "latgf/lattice.hpp"
#include "latgf/symbols.hpp"

namespace latgf {

/// D^{*n}(x) for n = 0..n_max at every x in `xs` (one row per point).
///
/// D^{*n} inherits the sign-flip symmetry of D, so only the orthant
/// [0, B]^d is stored, padded by the walk range and mirrored before each step.
/// B leaves `sigma_margin` standard deviations of the n_max-step walk beyond x;
/// mass leaking past B is below exp(-sigma_margin^2 / 2).
inline std::vector<std::vector<double>> green_series_terms(const StepDistribution& D,
                                                           const std::vector<LatticePoint>& xs, int n_max,
                                                           double sigma_margin = 7.5) {
  const int d = D.dim();
  require(n_max >= 0, "green_series_terms: n_max must be nonnegative");
  const int r = D.range();
  const double var_axis = moment(D, 2) / d;
  int xmax = 0;
  for (const auto& x : xs) {
    require(x.dim() == d, "green_series_terms: dimension mismatch");
    xmax = std::max(xmax, x.sup_norm());
  }
  const int B = xmax + r +
                static_cast<int>(std::ceil(sigma_margin * std::sqrt(std::max(var_axis, 1e-12) * n_max)));
  const int W = B + 1 + 2 * r;  // padded axis: coordinates -r .. B + r
  std::size_t cells = 1;
  for (int j = 0; j < d; ++j) cells *= W;
  require(cells <= (std::size_t(1) << 27), "green_series_terms: box too large; reduce n_max");

  auto flat = [&](const std::array<int, kMaxDim>& y) {
    std::size_t f = 0;
    for (int j = 0; j < d; ++j) f = f * W + static_cast<std::size_t>(y[j] + r);
    return f;
  };

  // Stencil offsets and the mirror map for cells with a negative coordinate.
  std::vector<std::pair<std::ptrdiff_t, double>> stencil;
  for (const auto& [p, w] : D.support()) {
    std::ptrdiff_t off = 0;
    for (int j = 0; j < d; ++j) off = off * W + p[j];
    stencil.emplace_back(off, w);
  }
  std::vector<std::pair<std::size_t, std::size_t>> mirror;
  std::vector<std::size_t> interior;
  {
    std::array<int, kMaxDim> y{};
    for (int j = 0; j < d; ++j) y[j] = -r;
    while (true) {
      bool neg = false, inside = true;
      std::array<int, kMaxDim> a{};
      for (int j = 0; j < d; ++j) {
        neg = neg || y[j] < 0;
        inside = inside && y[j] >= 0 && y[j] <= B;
        a[j] = std::abs(y[j]);
      }
      if (inside) interior.push_back(flat(y));
      bool a_ok = true;
      for (int j = 0; j < d; ++j) a_ok = a_ok && a[j] <= B;
      if (neg && a_ok) mirror.emplace_back(flat(y), flat(a));
      int j = d - 1;
      while (j >= 0 && ++y[j] > B + r) y[j--] = -r;
      if (j < 0) break;
    }
  }

  std::vector<double> cur(cells, 0.0), next(cells, 0.0);
  std::array<int, kMaxDim> origin{};
  cur[flat(origin)] = 1.0;
  std::vector<std::size_t> xf;
  for (const auto& x : xs) {
    std::array<int, kMaxDim> xa{};
    for (int j = 0; j < d; ++j) xa[j] = std::abs(x[j]);
    xf.push_back(flat(xa));
  }

  std::vector<std::vector<double>> terms(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    terms[i].reserve(n_max + 1);
    terms[i].push_back(cur[xf[i]]);
  }
  for (int n = 1; n <= n_max; ++n) {
    for (const auto& [dst, src] : mirror) cur[dst] = cur[src];
    for (std::size_t c : interior) {
      double v = 0;
      for (const auto& [off, w] : stencil) v += w * cur[c - off];
      next[c] = std::abs(v) < 1e-300 ? 0.0 : v;
    }
    std::swap(cur, next);
    for (std::size_t i = 0; i < xs.size(); ++i) terms[i].push_back(cur[xf[i]]);
  }
  return terms;
}

inline std::vector<double> green_series_terms(const StepDistribution& D, const LatticePoint& x, int n_max) {
  return green_series_terms(D, std::vector<LatticePoint>{x}, n_max).front();
}

struct SeriesResult {
  double value;          // partial sum + fitted tail
  double tail_estimate;  // error scale of the fitted tail
  double partial_sum;
  double tail;
  int n_max;
  bool converged;  // tail_estimate <= tail_tol
};

namespace detail {

// Least squares for y = sum_k c_k phi_k(n).
inline std::vector<double> least_squares(const std::vector<std::vector<double>>& rows, const std::vector<double>& y) {
  const std::size_t m = rows.front().size();
  std::vector<std::vector<double>> A(m, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = 0; b < m; ++b) A[a][b] += rows[i][a] * rows[i][b];
      A[a][m] += rows[i][a] * y[i];
    }
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    if (std::abs(A[c][c]) < 1e-300) throw NumericalError("least squares: singular system");
    for (std::size_t r = 0; r < m; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (std::size_t k = c; k <= m; ++k) A[r][k] -= f * A[c][k];
    }
  }
  std::vector<double> out(m);
  for (std::size_t c = 0; c < m; ++c) out[c] = A[c][m] / A[c][c];
  return out;
}

// Sum over n > n_last, n = n_last + stride, ..., of exp(p(1/n)) n^{-d/2}.
inline double fitted_tail(const std::vector<double>& coef, int n_last, int stride, double d) {
  auto term = [&](double n) {
    double e = coef[0];
    double inv = 1.0 / n, pw = inv;
    for (std::size_t k = 1; k < coef.size(); ++k, pw *= inv) e += coef[k] * pw;
    return std::exp(e) * std::pow(n, -0.5 * d);
  };
  constexpr double kDirect = 4e6;
  double s = 0;
  double n = n_last + stride;
  for (; n <= kDirect; n += stride) s += term(n);
  // Remainder: integral of c n^{-d/2} / stride from the last summed node + stride/2.
  const double c = std::exp(coef[0]);
  const double start = n - 0.5 * stride;
  s += c * std::pow(start, 1.0 - 0.5 * d) / ((0.5 * d - 1.0) * stride);
  return s;
}

}  // namespace detail

/// C(x) = sum_n D^{*n}(x), truncated at n_max, plus a tail fitted on the last
/// 20% of the nonzero terms. The local limit theorem gives
///   D^{*n}(x) = n^{-d/2} exp(alpha - beta/n + gamma/n^2 + ...),
/// so log|t_n| + (d/2) log n is fitted by a polynomial in 1/n. The fitted
/// tail uses three coefficients; its difference from the two-coefficient fit
/// is the reported tail_estimate. Walks supported on one parity class
/// (bipartite) are fitted and summed on the parity that carries the terms.
inline SeriesResult series_with_tail(const std::vector<double>& t, int d, double tail_tol) {
  const int n_max = static_cast<int>(t.size()) - 1;
  double partial = 0;
  for (double v : t) partial += v;

  const int start = n_max - n_max / 5;
  std::vector<int> ns;
  for (int n = start; n <= n_max; ++n)
    if (t[n] != 0.0) ns.push_back(n);
  require(ns.size() >= 5, "green_series_oracle: too few nonzero terms in the fitting window");
  int stride = 1;
  {
    bool one_parity = true;
    for (int n : ns) one_parity = one_parity && ((n - ns.front()) % 2 == 0);
    if (one_parity) stride = 2;
  }
  const double sign = t[ns.back()] > 0 ? 1.0 : -1.0;
  for (int n : ns)
    if (t[n] * sign <= 0)
      throw NumericalError("green_series_oracle: tail terms change sign; increase n_max");
  if (std::abs(t[ns.back()]) * std::pow(ns.back(), 0.5 * d) > 10 * std::abs(t[ns.front()]) * std::pow(ns.front(), 0.5 * d))
    throw NumericalError("green_series_oracle: tail terms do not decay like n^{-d/2}; increase n_max");

  auto fit = [&](int params) {
    std::vector<std::vector<double>> rows;
    std::vector<double> y;
    for (int n : ns) {
      std::vector<double> row(params);
      double pw = 1;
      for (int k = 0; k < params; ++k, pw /= n) row[k] = pw;
      rows.push_back(row);
      y.push_back(std::log(std::abs(t[n])) + 0.5 * d * std::log(double(n)));
    }
    return detail::least_squares(rows, y);
  };
  const int n_last = ns.back();
  const double tail3 = sign * detail::fitted_tail(fit(3), n_last, stride, d);
  const double tail2 = sign * detail::fitted_tail(fit(2), n_last, stride, d);
  const double err = std::abs(tail3 - tail2);
  return {partial + tail3, err, partial, tail3, n_max, err <= tail_tol};
}

inline std::vector<SeriesResult> green_series_oracle(const StepDistribution& D, const std::vector<LatticePoint>& xs,
                                                     int n_max, double tail_tol = 1e-6) {
  require(D.dim() >= 3, "green_series_oracle: dimension must be >= 3 (recurrent walk)");
  require(n_max >= 50, "green_series_oracle: n_max must be >= 50");
  if (!zero_scan(D, 16).empty())
    throw InvalidArgument("green_series_oracle: 1 - D^ vanishes away from the origin; the series diverges");
  auto terms = green_series_terms(D, xs, n_max);
  std::vector<SeriesResult> out;
  for (const auto& t : terms) out.push_back(series_with_tail(t, D.dim(), tail_tol));
  return out;
}

inline SeriesResult green_series_oracle(const StepDistribution& D, const LatticePoint& x, int n_max,
                                        double tail_tol = 1e-6) {
  return green_series_oracle(D, std::vector<LatticePoint>{x}, n_max, tail_tol).front();
}

struct MonteCarloResult {
  double mean;
  double stderr_;
  long step_cap;
};

/// Default step cap 100 d R max(|x|^2, 1), R the walk range.
inline long default_step_cap(const StepDistribution& D, const LatticePoint& x) {
  return 100L * D.dim() * D.range() * std::max<long>(1, static_cast<long>(x.norm2()));
}

/// Mean number of visits to x in the first `step_cap` steps of a walk from 0,
/// over `walks` trajectories from one mt19937_64 stream. A walk stops early
/// once x is out of reach in the remaining steps. The estimate targets
/// sum_{n <= step_cap} D^{*n}(x); the omitted visits are the series tail past
/// the cap.
inline MonteCarloResult green_mc_oracle(const StepDistribution& D, const LatticePoint& x, long walks,
                                        std::uint64_t seed, long step_cap = 0) {
  const int d = D.dim();
  require(d >= 3, "green_mc_oracle: dimension must be >= 3 (recurrent walk)");
  require(x.dim() == d, "green_mc_oracle: dimension mismatch");
  require(D.nonnegative(), "green_mc_oracle: negative weights have no probabilistic meaning");
  require(walks >= 2, "green_mc_oracle: need at least two walks");
  if (step_cap <= 0) step_cap = default_step_cap(D, x);
  const int r = D.range();

  std::vector<double> w;
  std::vector<LatticePoint> steps;
  for (const auto& [p, wt] : D.support()) {
    steps.push_back(p);
    w.push_back(wt);
  }
  std::mt19937_64 rng(seed);
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());

  double sum = 0, sum2 = 0;
  for (long k = 0; k < walks; ++k) {
    LatticePoint pos(d);
    long visits = pos == x ? 1 : 0;
    for (long n = 1; n <= step_cap; ++n) {
      const auto& s = steps[pick(rng)];
      long dist = 0;
      for (int j = 0; j < d; ++j) {
        pos[j] += s[j];
        dist = std::max<long>(dist, std::abs(pos[j] - x[j]));
      }
      if (dist == 0) ++visits;
      if (dist > r * (step_cap - n)) break;
    }
    sum += visits;
    sum2 += double(visits) * visits;
  }
  const double mean = sum / walks;
  const double var = std::max(0.0, (sum2 - walks * mean * mean) / (walks - 1));
  return {mean, std::sqrt(var / walks), step_cap};
}

}  // namespace latgf
