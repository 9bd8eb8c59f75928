#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <fftw3.h>
#include <boost/math/special_functions/gamma.hpp>

#include "latgf/bump.hpp"
#include "latgf/constants.hpp"
#include "latgf/core.hpp"
#include "latgf/lattice.hpp"
#include "latgf/quadrature.hpp"
#include "latgf/symbols.hpp"

namespace latgf {

/// A quadrature value with its empirical error estimate.
struct Estimate {
  cplx value;
  double error;
};

struct DecompositionResult {
  LatticePoint x;
  cplx i1;
  cplx i2;
  cplx f_total;
  std::string method_tag;
  double error_estimate;
};

inline cplx limit_at_zero_of(const Symbol& h) {
  require(h.limit_at_zero.has_value(), "symbol " + h.name + " has no value at k = 0; supply h(0)");
  return *h.limit_at_zero;
}

/// g^ = f^ (1 - chi^), set to 0 on V so f^ is never evaluated at the pole.
inline Symbol g_symbol(const Symbol& f, const BumpFunction& chi) {
  auto fp = std::make_shared<Symbol>(f);
  const double ri2 = chi.r_inner() * chi.r_inner();
  return {f.dim,
          [fp, chi, ri2](const TorusPoint& k) -> cplx {
            if (k.norm2() <= ri2) return 0.0;
            const double c = chi(k);
            return c == 1.0 ? cplx(0.0) : (1.0 - c) * fp->eval(k);
          },
          false, cplx(0.0), f.even, "g^"};
}

/// s^ = h^ chi^, supported in the ball |k| < r_outer.
inline Symbol s_symbol(const Symbol& h, const BumpFunction& chi) {
  auto hp = std::make_shared<Symbol>(h);
  const double ro2 = chi.r_outer() * chi.r_outer();
  return {h.dim,
          [hp, chi, ro2](const TorusPoint& k) -> cplx {
            if (k.norm2() >= ro2) return 0.0;
            return chi(k) * hp->eval(k);
          },
          false, hp->limit_at_zero, h.even, "s^"};
}

/// chi^ (h^ - h^(0)) / |k|^2: bounded, with a direction-dependent limit at 0.
inline Symbol subtracted_symbol(const Symbol& h, const BumpFunction& chi) {
  auto hp = std::make_shared<Symbol>(h);
  const cplx h0 = limit_at_zero_of(h);
  const double ro2 = chi.r_outer() * chi.r_outer();
  return {h.dim,
          [hp, chi, h0, ro2](const TorusPoint& k) -> cplx {
            const double r2 = k.norm2();
            if (r2 >= ro2 || r2 == 0.0) return 0.0;
            return chi(k) * (hp->eval(k) - h0) / r2;
          },
          false, std::nullopt, h.even, "chi^(h^-h0)/|k|^2"};
}

/// a_d r^{2-d}, the inverse Fourier transform of |k|^{-2} on R^d.
inline double riesz_kernel(int d, double r) {
  require(r > 0, "riesz_kernel: r must be positive");
  return constants(d).a * std::pow(r, 2.0 - d);
}

namespace detail {

inline std::vector<RealVector> to_real(std::span<const LatticePoint> xs) {
  std::vector<RealVector> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(latgf::to_real(x));
  return out;
}

// Values on `counts` and on the halved grid.
struct TwoLevel {
  std::vector<cplx> fine;
  std::vector<cplx> coarse;
};

inline TwoLevel two_level(const Symbol& phi, std::span<const RealVector> ys, const AxisCounts& counts,
                          double ball) {
  return {offset_grid_transform(phi, ys, counts, ball),
          offset_grid_transform(phi, ys, halved(counts, phi.dim), ball)};
}

// Error of the fine level when the grid error scales like n^{-order}, with a
// safety factor of 2.
inline double power_law_error(cplx fine, cplx coarse, double order) {
  return 2.0 * std::abs(fine - coarse) / (std::pow(2.0, order) - 1.0);
}

inline std::size_t checked_volume(int n, int d, std::size_t limit, const char* what) {
  double v = std::pow(double(n), d);
  if (v > double(limit))
    throw InvalidArgument(std::string(what) + ": " + std::to_string(n) + "^" + std::to_string(d) +
                          " grid exceeds the memory limit");
  return static_cast<std::size_t>(v);
}

// Apply an n-dimensional REDFT10 (DCT-II) in place on a row-major N^d array.
inline void dct2_inplace(std::vector<double>& a, int d, int N) {
  std::vector<int> dims(d, N);
  std::vector<fftw_r2r_kind> kinds(d, FFTW_REDFT10);
  fftw_plan p = fftw_plan_r2r(d, dims.data(), a.data(), a.data(), kinds.data(), FFTW_ESTIMATE);
  if (!p) throw NumericalError("fftw: could not create DCT plan");
  fftw_execute(p);
  fftw_destroy_plan(p);
}

}  // namespace detail

/// Largest number of grid cells the FFT-based routines allocate.
inline constexpr std::size_t kMaxFftCells = std::size_t(1) << 25;

/// Lattice values f(y), y in [0, N)^d, of an even symbol sampled on the offset
/// grid with n = 2N nodes per axis, via a DCT-II over the positive orthant.
/// Returns the sign-alternating periodization sum_m (-1)^{|m|} f(y + 2N m).
inline std::vector<double> lattice_samples_even(const Symbol& phi, int N, double ball_radius = 0.0) {
  require(phi.even, "lattice_samples_even: symbol must be even in every coordinate");
  const int d = phi.dim;
  const std::size_t cells = detail::checked_volume(N, d, 2 * kMaxFftCells, "lattice_samples_even");
  std::vector<double> re(cells, 0.0), im;
  const double h = kPi / N;
  std::vector<double> kv(N), cv(N);
  for (int i = 0; i < N; ++i) {
    kv[i] = (i + 0.5) * h;
    cv[i] = std::cos(kv[i]);
  }
  const double r2max = ball_radius > 0 ? ball_radius * ball_radius : 1e300;
  TorusPoint tp(d);
  std::vector<int> idx(d, 0);
  bool any_imag = false;
  // Row-major walk; prune rows that leave the ball.
  auto visit = [&](auto&& self, int j, double r2, std::size_t flat) -> void {
    for (int i = 0; i < N; ++i) {
      const double rr = r2 + kv[i] * kv[i];
      if (rr > r2max) break;
      tp.set_reduced(j, kv[i], cv[i]);
      const std::size_t f = flat * N + i;
      if (j == d - 1) {
        const cplx v = phi.eval(tp);
        re[f] = v.real();
        if (v.imag() != 0.0) {
          if (!any_imag) im.assign(cells, 0.0);
          any_imag = true;
          im[f] = v.imag();
        }
      } else {
        self(self, j + 1, rr, f);
      }
    }
  };
  visit(visit, 0, 0.0, 0);
  if (any_imag) throw NumericalError("lattice_samples_even: complex-valued symbols are not supported");
  detail::dct2_inplace(re, d, N);
  const double scale = std::pow(2.0 * N, -d);
  for (auto& v : re) v *= scale;
  return re;
}

/// Discrete inverse transform of f^ on the offset grid with n_per_axis nodes,
/// on the box [-n/2, n/2)^d. The result equals the sign-alternating
/// periodization sum_m (-1)^{|m|} f(x + n m) of the true f, so it is trusted
/// only for |x|_inf well below n/2.
inline LatticeFunction inverse_ft_grid(const Symbol& f, const QuadratureGrid& grid) {
  const int d = f.dim;
  require(grid.dim == d, "inverse_ft_grid: grid dimension mismatch");
  const int n = grid.n_per_axis;
  detail::checked_volume(n, d, kMaxFftCells, "inverse_ft_grid");
  LatticePoint lo(d), ext(d);
  for (int j = 0; j < d; ++j) {
    lo[j] = -n / 2;
    ext[j] = n;
  }
  LatticeFunction out(lo, ext);
  auto& vals = out.values();

  if (f.even) {
    const int N = n / 2;
    auto s = lattice_samples_even(f, N);
    for (std::size_t flat = 0; flat < vals.size(); ++flat) {
      std::size_t rem = flat, src = 0, mul = 1;
      bool edge = false;
      for (int j = d - 1; j >= 0; --j) {
        const int x = static_cast<int>(rem % n) - N;
        rem /= n;
        if (x == -N) edge = true;
        src += static_cast<std::size_t>(std::abs(x)) * mul;
        mul *= N;
      }
      // cos((i + 1/2) pi) = 0 on the face x_j = -n/2
      vals[flat] = edge ? 0.0 : s[src];
    }
    return out;
  }

  const std::size_t cells = vals.size();
  fftw_complex* buf = fftw_alloc_complex(cells);
  if (!buf) throw NumericalError("fftw: allocation failed");
  std::vector<int> dims(d, n);
  fftw_plan plan = fftw_plan_dft(d, dims.data(), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
  const double h = kTwoPi / n;
  TorusPoint tp(d);
  for (std::size_t flat = 0; flat < cells; ++flat) {
    std::size_t rem = flat;
    for (int j = d - 1; j >= 0; --j) {
      tp.set(j, (static_cast<int>(rem % n) - n / 2 + 0.5) * h);
      rem /= n;
    }
    const cplx v = f.eval(tp);
    buf[flat][0] = v.real();
    buf[flat][1] = v.imag();
  }
  fftw_execute(plan);
  const double scale = std::pow(double(n), -d);
  for (std::size_t flat = 0; flat < cells; ++flat) {
    const LatticePoint x = out.point(flat);
    std::size_t src = 0;
    double phase = 0;
    for (int j = 0; j < d; ++j) {
      src = src * n + static_cast<std::size_t>(((x[j] % n) + n) % n);
      phase += kPi * x[j] * (1.0 - 1.0 / n);
    }
    vals[flat] = scale * cplx(buf[src][0], buf[src][1]) * std::polar(1.0, phase);
  }
  fftw_destroy_plan(plan);
  fftw_free(buf);
  return out;
}

/// Offset-grid inverse transform at chosen points, with per-axis refinement for
/// large |x_j| and an error estimate from the halved grid. For singular
/// symbols the periodization error decays like n^{2-d}.
inline std::vector<Estimate> inverse_ft_grid_at(const Symbol& f, std::span<const LatticePoint> xs,
                                                const QuadratureGrid& grid) {
  require(grid.dim == f.dim, "inverse_ft_grid_at: grid dimension mismatch");
  auto ys = detail::to_real(xs);
  auto counts = axis_counts(grid, ys, kPi);
  auto r = detail::two_level(f, ys, counts, 0.0);
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double err = f.singular_at_zero ? detail::power_law_error(r.fine[i], r.coarse[i], f.dim - 2)
                                          : std::abs(r.fine[i] - r.coarse[i]);
    out.push_back({r.fine[i], err});
  }
  return out;
}

/// I2(x) = int g^(k) e^{-ik.x} dk/(2 pi)^d with g^ = f^ (1 - chi^).
/// g^ is smooth on the torus, so the halved-grid difference bounds the error.
inline std::vector<Estimate> i2_smooth_part(const Symbol& f, const BumpFunction& chi,
                                            std::span<const LatticePoint> xs, const QuadratureGrid& grid) {
  require(chi.dim() == f.dim && grid.dim == f.dim, "i2_smooth_part: dimension mismatch");
  auto ys = detail::to_real(xs);
  auto g = g_symbol(f, chi);
  auto r = detail::two_level(g, ys, axis_counts(grid, ys, kPi), 0.0);
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < ys.size(); ++i)
    out.push_back({r.fine[i], std::abs(r.fine[i] - r.coarse[i])});
  return out;
}

inline Estimate i2_smooth_part(const Symbol& f, const BumpFunction& chi, const LatticePoint& x,
                               const QuadratureGrid& grid) {
  return i2_smooth_part(f, chi, std::span<const LatticePoint>(&x, 1), grid).front();
}

/// s(y) = int h^ chi^ e^{-ik.y} dk/(2 pi)^d at real points y, on explicit
/// per-axis node counts. The support of s^ lies inside the fundamental cell,
/// so the rule returns sum_m (-1)^{|m|} s(y + n m) exactly.
inline std::vector<cplx> s_eval_on(const Symbol& h, const BumpFunction& chi, std::span<const RealVector> ys,
                                   const AxisCounts& counts) {
  return offset_grid_transform(s_symbol(h, chi), ys, counts, chi.r_outer());
}

/// s(y) with nodes-per-oscillation >= 8 on every axis. s^ has a kink of
/// homogeneous degree 2 at k = 0, so the error decays like n^{-(d+2)}.
inline std::vector<Estimate> s_eval(const Symbol& h, const BumpFunction& chi, std::span<const RealVector> ys,
                                    const QuadratureGrid& grid) {
  require(chi.dim() == h.dim && grid.dim == h.dim, "s_eval: dimension mismatch");
  auto counts = axis_counts(grid, ys, chi.r_outer());
  auto r = detail::two_level(s_symbol(h, chi), ys, counts, chi.r_outer());
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < ys.size(); ++i)
    out.push_back({r.fine[i], detail::power_law_error(r.fine[i], r.coarse[i], h.dim + 2)});
  return out;
}

inline Estimate s_eval(const Symbol& h, const BumpFunction& chi, const RealVector& y, const QuadratureGrid& grid) {
  return s_eval(h, chi, std::span<const RealVector>(&y, 1), grid).front();
}

/// int_{S^{d-1}} e^{-i rho u.e} du = (2 pi)^{d/2} rho^{1-d/2} J_{d/2-1}(rho).
inline double sphere_average_phase(int d, double rho) {
  if (rho < 1e-8) return sphere_area(d);
  const double nu = 0.5 * d - 1.0;
  return std::pow(kTwoPi, 0.5 * d) * std::pow(rho, -nu) * std::cyl_bessel_j(nu, rho);
}

/// (2 pi)^{-d} int chi^(k) |k|^{-2} e^{-ik.x} dk over R^d, reduced to a radial
/// integral: the angular part is a Bessel function and the polar Jacobian
/// r^{d-1} absorbs |k|^{-2}. Composite Gauss-Legendre on [0, r_inner] and
/// [r_inner, r_outer], `panels` panels each.
inline double radial_riesz_term(int d, const BumpFunction& chi, double xnorm, int panels) {
  double sum = 0;
  auto piece = [&](double a, double b) {
    auto rule = gauss_legendre(a, b, panels);
    for (std::size_t i = 0; i < rule.x.size(); ++i) {
      const double r = rule.x[i];
      sum += rule.w[i] * chi.radial(r) * std::pow(r, d - 3) * sphere_average_phase(d, r * xnorm);
    }
  };
  piece(0.0, chi.r_inner());
  piece(chi.r_inner(), chi.r_outer());
  return sum * std::pow(kTwoPi, -d);
}

/// I1(x) = int chi^ f^ e^{-ik.x} dk/(2 pi)^d, written as
///   h(0) int chi^ |k|^{-2} e^{-ik.x} + int chi^ (h^ - h(0)) |k|^{-2} e^{-ik.x}.
/// The first term is radial; the second has a bounded integrand and goes on
/// the offset grid restricted to the ball |k| <= r_outer.
inline std::vector<Estimate> i1_subtraction(const Symbol& h, const BumpFunction& chi,
                                            std::span<const LatticePoint> xs, const QuadratureGrid& grid) {
  const int d = h.dim;
  require(chi.dim() == d && grid.dim == d, "i1_subtraction: dimension mismatch");
  require(d >= 3, "i1_subtraction: dimension must be >= 3");
  const cplx h0 = limit_at_zero_of(h);
  auto ys = detail::to_real(xs);
  auto sub = subtracted_symbol(h, chi);
  auto r = detail::two_level(sub, ys, axis_counts(grid, ys, chi.r_outer()), chi.r_outer());
  std::vector<Estimate> out;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    const double xn = ys[i].norm();
    const int panels = 4 + static_cast<int>(std::ceil(chi.r_outer() * xn / kPi));
    const double t1 = radial_riesz_term(d, chi, xn, panels);
    const double t1_ref = radial_riesz_term(d, chi, xn, 2 * panels);
    const cplx value = h0 * t1_ref + r.fine[i];
    const double err = std::abs(h0) * std::abs(t1_ref - t1) + detail::power_law_error(r.fine[i], r.coarse[i], d);
    out.push_back({value, err});
  }
  return out;
}

inline Estimate i1_subtraction(const Symbol& h, const BumpFunction& chi, const LatticePoint& x,
                               const QuadratureGrid& grid) {
  return i1_subtraction(h, chi, std::span<const LatticePoint>(&x, 1), grid).front();
}

/// f(x) = I1(x) + I2(x) with I1 by subtraction; f^ = h^ / |k|^2.
inline std::vector<DecompositionResult> decompose(const Symbol& f, const Symbol& h, const BumpFunction& chi,
                                                  std::span<const LatticePoint> xs, const QuadratureGrid& grid) {
  auto i1 = i1_subtraction(h, chi, xs, grid);
  auto i2 = i2_smooth_part(f, chi, xs, grid);
  std::vector<DecompositionResult> out;
  for (std::size_t i = 0; i < xs.size(); ++i)
    out.push_back({xs[i], i1[i].value, i2[i].value, i1[i].value + i2[i].value, "subtraction+offset-grid",
                   i1[i].error + i2[i].error});
  return out;
}

struct RieszOptions {
  double eta = 2.0;           // Ewald splitting length
  double alias_factor = 3.0;  // s-grid nodes per unit of evaluation radius
  int radial_panels = 5;      // short-range radial Gauss-Legendre panels
  int sphere_order = 12;      // short-range angular resolution
};

struct RieszResult {
  cplx value;
  double error;
  cplx long_range;
  cplx short_range;
  cplx tail_estimate;  // change of the long-range sum between windows 3R/4 and R
};

namespace detail {

// Window equal to 1 on |y| <= R/2 and 0 on |y| >= R.
inline double window(double r, double R) { return smooth_step(2.0 * r / R - 1.0); }

// sum_{|y| < R} s(y) W(|y|/R) k(y) over Z^d, with s read from orthant samples.
template <typename K>
double windowed_lattice_sum(const std::vector<double>& s, int N, int d, double R, const K& kernel) {
  const int rc = static_cast<int>(std::ceil(R));
  require(rc < N, "windowed_lattice_sum: radius exceeds the sampled box");
  std::array<int, kMaxDim> y{};
  for (int j = 0; j < d; ++j) y[j] = -rc;
  double sum = 0;
  while (true) {
    double r2 = 0;
    std::size_t flat = 0;
    for (int j = 0; j < d; ++j) {
      r2 += double(y[j]) * y[j];
      flat = flat * N + std::abs(y[j]);
    }
    if (r2 < R * R) {
      RealVector yv(d);
      for (int j = 0; j < d; ++j) yv[j] = y[j];
      sum += s[flat] * window(std::sqrt(r2), R) * kernel(yv);
    }
    int j = d - 1;
    while (j >= 0 && ++y[j] > rc) y[j--] = -rc;
    if (j < 0) break;
  }
  return sum;
}

// Images of the sign-alternating periodization sit at distance >= 2N - R from the window.
inline int samples_half_width(double R) { return round_up_to(static_cast<int>(std::ceil(1.5 * R)) + 16, 8); }

}  // namespace detail

/// Long-range part of the Ewald split of the Riesz kernel:
/// a_d r^{2-d} P((d-2)/2, r^2/eta^2), smooth at r = 0.
inline double riesz_long_range(int d, double a_d, double r, double eta) {
  const double z = r * r / (eta * eta);
  const double s = 0.5 * (d - 2);
  if (z > 60) return a_d * std::pow(r, 2.0 - d);
  if (r < 1e-6 * eta) return a_d * std::pow(eta, 2.0 - d) / std::tgamma(s + 1.0);
  return a_d * std::pow(r, 2.0 - d) * boost::math::gamma_p(s, z);
}

/// I1(x) = a_d int |x - y|^{2-d} s(y) dy, evaluated on the y side.
///
/// The kernel is split as K = K_long + K_short (Ewald). The Fourier transform
/// of K_long * s is supported, up to a factor exp(-eta^2 (2 pi - r_outer)^2 / 4),
/// inside the fundamental cell, so its integral equals the lattice sum
/// sum_y s(y) K_long(x - y); s on Z^d comes from a DCT. The lattice sum is
/// windowed at domain_radius R; the change against the window at 3R/4 is the
/// tail estimate. The short-range part is a polar integral centred at x, where
/// the r^{2-d} singularity cancels against the Jacobian.
inline RieszResult i1_riesz(const Symbol& h, const BumpFunction& chi, const LatticePoint& x, double domain_radius,
                            const QuadratureGrid& grid, const RieszOptions& opt = {}) {
  const int d = h.dim;
  require(chi.dim() == d && grid.dim == d && d >= 3, "i1_riesz: dimension mismatch");
  require(h.even, "i1_riesz: symbol must be even in every coordinate");
  const RealVector xr = to_real(x);
  require(domain_radius >= 2.0 * xr.norm() && domain_radius >= 8.0,
          "i1_riesz: domain_radius must be >= 2|x| and >= 8");
  const double a_d = constants(d).a;
  const double R = domain_radius;

  // Long range.
  const int N = detail::samples_half_width(R);
  auto s = lattice_samples_even(s_symbol(h, chi), N, chi.r_outer());
  auto kl = [&](const RealVector& y) { return riesz_long_range(d, a_d, (xr - y).norm(), opt.eta); };
  const double long_range = detail::windowed_lattice_sum(s, N, d, R, kl);
  const double tail = long_range - detail::windowed_lattice_sum(s, N, d, 0.75 * R, kl);
  const double ewald_alias = std::exp(-0.25 * opt.eta * opt.eta * std::pow(kTwoPi - chi.r_outer(), 2)) *
                             std::abs(long_range);

  // Short range: a_d int rho Q((d-2)/2, rho^2/eta^2) Sbar(rho) d rho.
  const double rho_max = opt.eta * 6.0;
  const double sa = 0.5 * (d - 2);
  const int n_s = round_up_to(static_cast<int>(std::ceil(opt.alias_factor * (xr.norm() + rho_max))) + 32, 8);
  auto short_part = [&](int panels, int order) {
    auto radial = gauss_legendre(0.0, rho_max, panels);
    auto dirs = sphere_rule(d, order);
    std::vector<RealVector> pts;
    pts.reserve(radial.x.size() * dirs.size());
    for (double rho : radial.x)
      for (const auto& [u, w] : dirs) {
        RealVector p = xr;
        for (int j = 0; j < d; ++j) p[j] += rho * u[j];
        pts.push_back(p);
      }
    auto sv = s_eval_on(h, chi, pts, uniform_counts(d, n_s));
    cplx total = 0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < radial.x.size(); ++i) {
      const double rho = radial.x[i];
      cplx sbar = 0;
      for (const auto& dw : dirs) sbar += dw.second * sv[at++];
      total += radial.w[i] * rho * boost::math::gamma_q(sa, rho * rho / (opt.eta * opt.eta)) * sbar;
    }
    return a_d * total;
  };
  const cplx sr = short_part(opt.radial_panels, opt.sphere_order);
  const cplx sr_coarse = short_part(std::max(1, (2 * opt.radial_panels + 2) / 3), std::max(4, (2 * opt.sphere_order + 2) / 3));

  const cplx value = long_range + sr;
  const double err = std::abs(tail) + std::abs(sr - sr_coarse) + ewald_alias;
  if (std::abs(tail) > 0.1 * std::abs(value))
    throw NumericalError("i1_riesz: tail estimate exceeds 10% of the value; increase domain_radius");
  return {value, err, long_range, sr, tail};
}

/// int s(y) dy as the windowed lattice sum sum_y s(y) W(|y|/R): exact up to the
/// window tail because s^ is supported inside the fundamental cell. The error
/// estimate is the change against the window at 4R/5. The DCT box is wide
/// enough that periodization images, summed over the window, stay below 1e-7
/// for the default bump.
inline Estimate s_mass(const Symbol& h, const BumpFunction& chi, double R = 144.0) {
  const int d = h.dim;
  const int N = round_up_to(static_cast<int>(std::ceil(2.5 * R)) + 24, 8);
  auto s = lattice_samples_even(s_symbol(h, chi), N, chi.r_outer());
  auto one = [](const RealVector&) { return 1.0; };
  const double full = detail::windowed_lattice_sum(s, N, d, R, one);
  const double inner = detail::windowed_lattice_sum(s, N, d, 0.8 * R, one);
  return {full, std::abs(full - inner)};
}

struct J2Result {
  double scaled;  // |x|^{d-2} J2(x)
  double error;
  cplx i1;
  cplx j1;
};

/// |x|^{d-2} J2(x), J2(x) = a_d int_{|y| >= eps|x|} |x-y|^{2-d} s(y) dy, computed
/// as I1(x) - J1(x). J1 covers the inner ball |y| < eps|x|, on which the kernel
/// is smooth, by polar quadrature about the origin.
inline J2Result j2_tail(const Symbol& h, const BumpFunction& chi, const LatticePoint& x, double epsilon,
                        const QuadratureGrid& grid, double alias_factor = 4.0) {
  const int d = h.dim;
  require(epsilon > 0 && epsilon < 1, "j2_tail: epsilon must lie in (0, 1)");
  const RealVector xr = to_real(x);
  const double xn = xr.norm();
  require(xn > 0, "j2_tail: x must be nonzero");
  const double a_d = constants(d).a;
  const double rin = epsilon * xn;
  auto i1 = i1_subtraction(h, chi, x, grid);
  const int n_s = round_up_to(static_cast<int>(std::ceil(alias_factor * rin)) + 32, 8);
  auto j1_at = [&](int panels, int order) {
    auto radial = gauss_legendre(0.0, rin, panels);
    auto dirs = sphere_rule(d, order);
    std::vector<RealVector> pts;
    for (double r : radial.x)
      for (const auto& [u, w] : dirs) {
        RealVector p(d);
        for (int j = 0; j < d; ++j) p[j] = r * u[j];
        pts.push_back(p);
      }
    auto sv = s_eval_on(h, chi, pts, uniform_counts(d, n_s));
    cplx total = 0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < radial.x.size(); ++i) {
      cplx shell = 0;
      for (const auto& [u, w] : dirs) {
        shell += w * std::pow((xr - pts[at]).norm(), 2.0 - d) * sv[at];
        ++at;
      }
      total += radial.w[i] * std::pow(radial.x[i], d - 1) * shell;
    }
    return a_d * total;
  };
  // s is band-limited to |k| < r_outer: about r_outer * r spherical-harmonic
  // degrees on the sphere of radius r, and wavelength 2 pi / r_outer radially.
  const int panels = std::max(4, static_cast<int>(std::ceil(chi.r_outer() * rin / 6.0)) + 2);
  const int order = std::max(8, static_cast<int>(std::ceil(0.75 * chi.r_outer() * rin)) + 8);
  const cplx j1 = j1_at(panels, order);
  const cplx j1_coarse = j1_at(std::max(2, (2 * panels + 2) / 3), std::max(6, (2 * order + 2) / 3));
  const double scale = std::pow(xn, d - 2);
  return {scale * (i1.value - j1).real(), scale * (i1.error + std::abs(j1 - j1_coarse)), i1.value, j1};
}

}  // namespace latgf
