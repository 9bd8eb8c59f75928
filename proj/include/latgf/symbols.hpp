#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "latgf/constants.hpp"
#include "latgf/core.hpp"
#include "latgf/lattice.hpp"

namespace latgf {

/// A function on the torus T^d, evaluated at the representative in (-pi, pi]^d.
///
/// `singular_at_zero` marks symbols that must never be evaluated at k = 0
/// (f^ of a Green function); `limit_at_zero` carries the continuous extension
/// for symbols such as h^ = |k|^2 f^. `even` promises f(..,-k_j,..) = f(k) for
/// every axis separately, which lets quadratures fold onto the positive orthant.
struct Symbol {
  int dim = 0;
  std::function<cplx(const TorusPoint&)> eval;
  bool singular_at_zero = false;
  std::optional<cplx> limit_at_zero;
  bool even = false;
  std::string name;

  cplx operator()(const TorusPoint& k) const { return eval(k); }
};

inline Symbol constant_symbol(int dim, cplx value) {
  return {dim, [value](const TorusPoint&) { return value; }, false, value, true, "constant"};
}

/// D^(k) in folded form: sum_t w_t prod_j cos(k_j a_tj), with cos(m k) from
/// the Chebyshev recurrence on the cached cos(k_j).
class CosineSeries {
 public:
  explicit CosineSeries(const StepDistribution& D)
      : dim_(D.dim()), range_(D.range()), terms_(D.cosine_terms()) {}

  double operator()(const TorusPoint& k) const {
    constexpr int kMaxRange = 16;
    if (range_ > kMaxRange) return slow(k);
    double table[kMaxDim][kMaxRange + 1];
    for (int j = 0; j < dim_; ++j) {
      const double c = k.cos(j);
      table[j][0] = 1.0;
      if (range_ >= 1) table[j][1] = c;
      for (int m = 2; m <= range_; ++m) table[j][m] = 2.0 * c * table[j][m - 1] - table[j][m - 2];
    }
    double s = 0;
    for (const auto& t : terms_) {
      double prod = t.weight;
      for (int j = 0; j < dim_; ++j) prod *= table[j][t.abs[j]];
      s += prod;
    }
    return s;
  }

 private:
  double slow(const TorusPoint& k) const {
    double s = 0;
    for (const auto& t : terms_) {
      double prod = t.weight;
      for (int j = 0; j < dim_; ++j) prod *= std::cos(k[j] * t.abs[j]);
      s += prod;
    }
    return s;
  }

  int dim_;
  int range_;
  std::vector<StepDistribution::CosineTerm> terms_;
};

/// sum_x D(x) e^{i k.x}, summed over the support directly.
inline double d_hat(const StepDistribution& D, const TorusPoint& k) {
  require(k.dim() == D.dim(), "d_hat: dimension mismatch");
  cplx s = 0;
  for (const auto& [p, w] : D.support()) {
    double phase = 0;
    for (int j = 0; j < D.dim(); ++j) phase += k[j] * p[j];
    s += w * std::polar(1.0, phase);
  }
  if (std::abs(s.imag()) >= 1e-12)
    throw NumericalError("d_hat: imaginary part " + std::to_string(s.imag()) +
                         " does not vanish; step distribution is not symmetric");
  return s.real();
}

inline Symbol d_hat_symbol(const StepDistribution& D) {
  auto series = std::make_shared<CosineSeries>(D);
  return {D.dim(), [series](const TorusPoint& k) { return cplx((*series)(k)); }, false,
          std::nullopt, true, "D^"};
}

namespace detail {

inline double one_minus_d_hat_abs(const CosineSeries& series, const RealVector& k) {
  return std::abs(1.0 - series(TorusPoint::from(k)));
}

// Local refinement around a near-miss node: nested sub-grids of the cell.
inline std::optional<RealVector> refine_zero(const CosineSeries& series, RealVector center,
                                             double half_width, double tol) {
  const int d = center.dim();
  constexpr int kSub = 4;
  for (int level = 0; level < 4; ++level) {
    double best = one_minus_d_hat_abs(series, center);
    RealVector best_k = center;
    const double step = half_width / kSub;
    std::vector<int> idx(d, -kSub);
    while (true) {
      RealVector k = center;
      for (int j = 0; j < d; ++j) k[j] += idx[j] * step;
      double v = one_minus_d_hat_abs(series, k);
      if (v < best) {
        best = v;
        best_k = k;
      }
      int j = 0;
      while (j < d && ++idx[j] > kSub) idx[j++] = -kSub;
      if (j == d) break;
    }
    if (best < tol) return best_k;
    center = best_k;
    half_width = step;
  }
  return std::nullopt;
}

}  // namespace detail

/// Grid points k != 0 of the uniform grid 2 pi j / grid_n where |1 - D^(k)| < 1e-10.
/// Nodes with |1 - D^| < 1e-4 that are at least two cells away from the
/// origin are refined locally, so zeros falling between nodes are found too.
inline std::vector<TorusPoint> zero_scan(const StepDistribution& D, int grid_n) {
  require(grid_n >= 8, "zero_scan: grid_n must be >= 8");
  constexpr double kTol = 1e-10;
  constexpr double kNearMiss = 1e-4;
  const int d = D.dim();
  const double h = kTwoPi / grid_n;
  CosineSeries series(D);
  std::vector<TorusPoint> zeros;
  std::vector<int> idx(d, -grid_n / 2 + 1);
  while (true) {
    TorusPoint k(d);
    int sup = 0;
    for (int j = 0; j < d; ++j) {
      k.set(j, idx[j] * h);
      sup = std::max(sup, std::abs(idx[j]));
    }
    if (sup > 0) {
      double v = std::abs(1.0 - series(k));
      if (v < kTol) {
        zeros.push_back(k);
      } else if (v < kNearMiss && sup >= 2) {
        if (auto z = detail::refine_zero(series, k.coords(), h, kTol)) {
          zeros.push_back(TorusPoint::from(*z));
        }
      }
    }
    int j = 0;
    while (j < d && ++idx[j] > grid_n / 2) idx[j++] = -grid_n / 2 + 1;
    if (j == d) break;
  }
  return zeros;
}

/// 1 / (1 - D^(k)): the symbol of the Green function sum_n D^{*n}.
/// Rejects models whose 1 - D^ vanishes away from the origin.
inline Symbol green_symbol(const StepDistribution& D, int scan_grid_n = 16) {
  auto zeros = zero_scan(D, scan_grid_n);
  if (!zeros.empty()) {
    std::ostringstream msg;
    msg << "green_symbol: 1 - D^ vanishes away from the origin, e.g. at k = "
        << zeros.front().coords() << " (" << zeros.size() << " grid points)";
    throw InvalidArgument(msg.str());
  }
  auto series = std::make_shared<CosineSeries>(D);
  return {D.dim(), [series](const TorusPoint& k) { return cplx(1.0 / (1.0 - (*series)(k))); },
          true, std::nullopt, true, "C^"};
}

/// h^(k) = |k|^2 f^(k) for k != 0 and h0 at k = 0, with |k| taken on the
/// canonical representative.
inline Symbol h_symbol(const Symbol& f, cplx h0) {
  auto fp = std::make_shared<Symbol>(f);
  return {f.dim,
          [fp, h0](const TorusPoint& k) {
            if (k.is_zero()) return h0;
            return k.norm2() * fp->eval(k);
          },
          false, h0, f.even, "h^"};
}

/// 2d / sigma^2, the value at the origin of |k|^2 / (1 - D^(k)).
inline double h_at_zero(const StepDistribution& D) {
  double sigma2 = moment(D, 2);
  require(sigma2 > 0, "h_at_zero: sigma^2 must be positive");
  return 2.0 * D.dim() / sigma2;
}

struct HZeroEstimate {
  cplx value;
  bool is_estimate = true;
};

/// Radial extrapolation of |k|^2 f^(k) to k = 0, averaged over the coordinate
/// axes; for symbols whose limit is not known in closed form.
inline HZeroEstimate estimate_h_at_zero(const Symbol& f, double radius = 1e-2) {
  auto along_axes = [&](double r) {
    cplx s = 0;
    for (int j = 0; j < f.dim; ++j) {
      TorusPoint k(f.dim);
      k.set(j, r);
      s += r * r * f(k);
    }
    return s / double(f.dim);
  };
  // |k|^2 f^ - h(0) is O(|k|^2) along each axis for lattice symbols.
  cplx coarse = along_axes(radius), fine = along_axes(radius / 2);
  return {(4.0 * fine - coarse) / 3.0, true};
}

}  // namespace latgf
