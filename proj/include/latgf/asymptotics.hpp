#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "latgf/bump.hpp"
#include "latgf/constants.hpp"
#include "latgf/core.hpp"
#include "latgf/quadrature.hpp"
#include "latgf/symbols.hpp"
#include "latgf/transform.hpp"

namespace latgf {

/// R_f(x) = |x|^{d-2} f(x) / a_d - h(0).
inline double remainder(double f_val, const LatticePoint& x, double h0, int d) {
  const double r = x.norm();
  require(r > 0, "remainder: x must be nonzero");
  return std::pow(r, d - 2) * f_val / constants(d).a - h0;
}

struct DecayFit {
  double slope;
  double intercept;
  double r2;
  bool sign_varying;  // some f <= 0: |f| was fitted
};

/// Least-squares fit of log|f| against log|x|.
inline DecayFit fit_decay_exponent(const std::vector<std::pair<double, double>>& rows) {
  require(rows.size() >= 3, "fit_decay_exponent: need at least 3 rows");
  std::vector<double> xs, ys;
  bool sign_varying = false;
  for (const auto& [r, f] : rows) {
    require(r > 0, "fit_decay_exponent: |x| must be positive");
    if (f == 0.0) throw InvalidArgument("fit_decay_exponent: f = 0 has no logarithm");
    sign_varying = sign_varying || f < 0;
    xs.push_back(std::log(r));
    ys.push_back(std::log(std::abs(f)));
  }
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(), "fit_decay_exponent: |x| values must be distinct");
  const double n = xs.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return {slope, my - slope * mx, r2, sign_varying};
}

enum class Region { U, TorusMinusV };

inline std::string to_string(Region r) { return r == Region::U ? "U" : "torus-minus-V"; }

struct SobolevResult {
  double value;
  double fd_change;  // the same norm applied to the Richardson corrections
  std::size_t nodes;
};

/// sum_{|alpha| <= n} ( int_region |nabla^alpha f|^p dk/(2 pi)^d )^{1/p}
///
/// Derivatives by Richardson-extrapolated central differences with the bump's
/// step; quadrature on the offset grid, restricted to the region shrunk by the
/// stencil reach. The measure is the normalized torus measure.
inline SobolevResult sobolev_norm(const Symbol& f, Region region, int n, double p, const QuadratureGrid& grid,
                                  const BumpFunction& chi) {
  const int d = f.dim;
  require(grid.dim == d && chi.dim() == d, "sobolev_norm: dimension mismatch");
  require(n >= 0 && p >= 1, "sobolev_norm: need n >= 0 and p >= 1");
  const double h = chi.fd_step();
  const double reach = 0.5 * n * h * std::sqrt(double(d));
  const double lo2 = region == Region::TorusMinusV ? std::pow(chi.r_inner() + reach, 2) : -1.0;
  const double hi2 = region == Region::U ? std::pow(chi.r_outer() - reach, 2) : 1e300;
  if (region == Region::U && f.singular_at_zero)
    throw InvalidArgument("sobolev_norm: symbol is singular at 0, which lies in U");

  const auto alphas = multi_indices(d, n);
  std::vector<double> acc(alphas.size(), 0.0), chg(alphas.size(), 0.0);
  auto F = [&f](const RealVector& k) { return f(TorusPoint::from(k)); };

  const int nn = grid.n_per_axis;
  const bool fold = f.even;
  const int m = fold ? nn / 2 : nn;
  const double w = std::pow((fold ? 2.0 : 1.0) / nn, d);
  const double step = kTwoPi / nn;
  std::array<int, kMaxDim> idx{};
  std::size_t nodes = 0;
  while (true) {
    RealVector k(d);
    for (int j = 0; j < d; ++j) k[j] = fold ? (idx[j] + 0.5) * step : (idx[j] - nn / 2 + 0.5) * step;
    const double r2 = k.norm2();
    if (r2 >= lo2 && r2 <= hi2) {
      ++nodes;
      for (std::size_t a = 0; a < alphas.size(); ++a) {
        auto r = fd_derivative(F, k, alphas[a], h);
        acc[a] += w * std::pow(std::abs(r.value), p);
        chg[a] += w * std::pow(r.refinement_change, p);
      }
    }
    int j = d - 1;
    while (j >= 0 && ++idx[j] == m) idx[j--] = 0;
    if (j < 0) break;
  }
  double value = 0, change = 0;
  for (std::size_t a = 0; a < alphas.size(); ++a) {
    value += std::pow(acc[a], 1.0 / p);
    change += std::pow(chg[a], 1.0 / p);
  }
  if (value > 0 && change > 0.5 * value)
    throw NumericalError("sobolev_norm: finite differences do not settle under step refinement");
  return {value, change, nodes};
}

/// (radius, sup over a fixed angular sample of |y|^{n_d} |s(y)|) per radius.
inline std::vector<std::pair<double, double>> u_decay_check(const Symbol& h, const BumpFunction& chi,
                                                            const std::vector<double>& radii,
                                                            const QuadratureGrid& grid, int angular_order = 8) {
  const int d = h.dim;
  require(!radii.empty(), "u_decay_check: no radii");
  for (std::size_t i = 0; i < radii.size(); ++i) {
    require(radii[i] > 0, "u_decay_check: radii must be positive");
    require(i == 0 || radii[i] > radii[i - 1], "u_decay_check: radii must be increasing");
  }
  const int nd = constants(d).n;
  const auto dirs = sphere_rule(d, angular_order);
  std::vector<std::pair<double, double>> out;
  for (double r : radii) {
    std::vector<RealVector> pts;
    for (const auto& [u, w] : dirs) {
      RealVector y(d);
      for (int j = 0; j < d; ++j) y[j] = r * u[j];
      pts.push_back(y);
    }
    auto s = s_eval(h, chi, pts, grid);
    double sup = 0;
    for (const auto& e : s) sup = std::max(sup, std::abs(e.value));
    out.emplace_back(r, std::pow(r, nd) * sup);
  }
  return out;
}

struct AsymptoticsRow {
  LatticePoint x;
  double f;
  double scaled;     // |x|^{d-2} f / a_d
  double remainder;  // scaled - h0
  double error_estimate;
};

struct AsymptoticsReport {
  int d = 0;
  std::string model_id;
  std::vector<AsymptoticsRow> rows;
  double fitted_exponent = 0;
  double fit_intercept = 0;
  double fit_r2 = 0;
  bool sign_varying = false;
  double h0 = 0;
  double norm_f = 0;  // ||f^||_{W^{d-2,1}(T^d \ V)}
  double norm_h = 0;  // ||h^||_{W^{n_d,p_d}(U)}
  double bound_ratio = 0;
  double r_inner = 0;
  double r_outer = 0;
  int grid_n = 0;
  int norm_grid_n = 0;
};

/// max_x |R_f(x)| / (||f^||_{W^{d-2,1}(T^d \ V)} + ||h^||_{W^{n_d,p_d}(U)}).
inline double verify_bound(const AsymptoticsReport& report) {
  require(report.norm_f > 0 && report.norm_h > 0, "verify_bound: norms missing or nonpositive");
  require(!report.rows.empty(), "verify_bound: report has no rows");
  double m = 0;
  for (const auto& r : report.rows) m = std::max(m, std::abs(r.remainder));
  return m / (report.norm_f + report.norm_h);
}

/// Fills rows (sorted by |x|), the decay fit and h0 from pipeline values.
inline void set_rows(AsymptoticsReport& rep, const std::vector<DecompositionResult>& values) {
  const double a = constants(rep.d).a;
  rep.rows.clear();
  for (const auto& v : values) {
    const double f = v.f_total.real();
    const double scaled = std::pow(v.x.norm(), rep.d - 2) * f / a;
    rep.rows.push_back({v.x, f, scaled, scaled - rep.h0, v.error_estimate});
  }
  std::stable_sort(rep.rows.begin(), rep.rows.end(),
                   [](const AsymptoticsRow& p, const AsymptoticsRow& q) { return p.x.norm2() < q.x.norm2(); });
  if (rep.rows.size() >= 3) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rep.rows) pts.emplace_back(r.x.norm(), r.f);
    auto fit = fit_decay_exponent(pts);
    rep.fitted_exponent = fit.slope;
    rep.fit_intercept = fit.intercept;
    rep.fit_r2 = fit.r2;
    rep.sign_varying = fit.sign_varying;
  }
}

inline std::string fmt12(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string point_string(const LatticePoint& x, char sep = ' ') {
  std::string s;
  for (int j = 0; j < x.dim(); ++j) {
    if (j) s += sep;
    s += std::to_string(x[j]);
  }
  return s;
}

inline constexpr int kSchemaVersion = 1;

inline nlohmann::ordered_json to_json(const AsymptoticsReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["d"] = r.d;
  j["model_id"] = r.model_id;
  j["h0"] = r.h0;
  j["r_inner"] = r.r_inner;
  j["r_outer"] = r.r_outer;
  j["grid_n"] = r.grid_n;
  j["norm_grid_n"] = r.norm_grid_n;
  j["fitted_exponent"] = r.fitted_exponent;
  j["fit_intercept"] = r.fit_intercept;
  j["fit_r2"] = r.fit_r2;
  j["sign_varying"] = r.sign_varying;
  j["norm_f"] = r.norm_f;
  j["norm_h"] = r.norm_h;
  j["bound_ratio"] = r.bound_ratio;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    nlohmann::ordered_json o;
    o["L"] = row.x.norm();
    o["x"] = std::vector<int>(row.x.begin(), row.x.end());
    o["f"] = row.f;
    o["scaled"] = row.scaled;
    o["remainder"] = row.remainder;
    o["error_estimate"] = row.error_estimate;
    o["log_L"] = std::log(row.x.norm());
    o["log_f"] = std::log(std::abs(row.f));
    rows.push_back(o);
  }
  j["rows"] = rows;
  return j;
}

/// Rows as CSV: one "#" line echoing the configuration, a header, then
/// L,x,f,scaled,remainder at 12 significant digits. x is space-separated.
inline std::string to_csv(const AsymptoticsReport& r, const std::string& config_echo) {
  std::ostringstream os;
  os << "# latgf asymptote schema_version=" << kSchemaVersion << " " << config_echo << "\n";
  os << "L,x,f,scaled,remainder\n";
  for (const auto& row : r.rows)
    os << fmt12(row.x.norm()) << "," << point_string(row.x) << "," << fmt12(row.f) << "," << fmt12(row.scaled)
       << "," << fmt12(row.remainder) << "\n";
  return os.str();
}

}  // namespace latgf
