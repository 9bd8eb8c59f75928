#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include "latgf/core.hpp"

namespace latgf {

namespace detail {

// All images of p under the hyperoctahedral group (coordinate permutations
// and sign flips), without duplicates, in lexicographic order.
inline std::vector<LatticePoint> symmetry_orbit(const LatticePoint& p) {
  const int d = p.dim();
  std::array<int, kMaxDim> perm{};
  std::iota(perm.begin(), perm.begin() + d, 0);
  std::vector<LatticePoint> out;
  do {
    for (unsigned mask = 0; mask < (1u << d); ++mask) {
      LatticePoint q(d);
      for (int i = 0; i < d; ++i) {
        int v = p[perm[i]];
        q[i] = (mask >> i & 1u) ? -v : v;
      }
      out.push_back(q);
    }
  } while (std::next_permutation(perm.begin(), perm.begin() + d));
  auto less = [](const LatticePoint& a, const LatticePoint& b) {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  };
  std::sort(out.begin(), out.end(), less);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Canonical orbit representative: absolute values sorted descending.
inline LatticePoint orbit_key(const LatticePoint& p) {
  LatticePoint q = p;
  std::array<int, kMaxDim> a{};
  for (int i = 0; i < p.dim(); ++i) a[i] = std::abs(p[i]);
  std::sort(a.begin(), a.begin() + p.dim(), std::greater<>());
  for (int i = 0; i < p.dim(); ++i) q[i] = a[i];
  return q;
}

struct PointLess {
  bool operator()(const LatticePoint& a, const LatticePoint& b) const {
    return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
  }
};

}  // namespace detail

/// One-step transition weights D(x) of a (possibly signed) walk on Z^d.
///
/// The support is finite and closed under the hyperoctahedral group with
/// equal weights on each orbit; weights sum to one. Negative weights and a
/// nonzero D(0) are allowed.
class StepDistribution {
 public:
  /// One weighted support point per orbit. Weights are per point (not per orbit).
  struct Orbit {
    LatticePoint point;
    double weight;
  };

  /// Term of the folded cosine form D^(k) = sum_t weight_t prod_j cos(k_j abs_t[j]),
  /// obtained by summing each sign-flip class.
  struct CosineTerm {
    LatticePoint abs;
    double weight;
  };

  StepDistribution(int dim, std::vector<std::pair<LatticePoint, double>> support)
      : dim_(dim), support_(std::move(support)) {
    validate();
  }

  /// Generates every orbit from a representative; rejects overlapping orbits.
  static StepDistribution from_orbits(int dim, const std::vector<Orbit>& orbits) {
    require(dim >= 1 && dim <= kMaxDim, "step distribution: bad dimension");
    std::map<LatticePoint, double, detail::PointLess> seen;
    for (const auto& o : orbits) {
      require(o.point.dim() == dim, "step distribution: orbit point has wrong dimension");
      for (const auto& q : detail::symmetry_orbit(o.point)) {
        require(!seen.count(q), "step distribution: orbits overlap at a point");
        seen.emplace(q, o.weight);
      }
    }
    std::vector<std::pair<LatticePoint, double>> support(seen.begin(), seen.end());
    return StepDistribution(dim, std::move(support));
  }

  int dim() const { return dim_; }
  const std::vector<std::pair<LatticePoint, double>>& support() const { return support_; }
  int range() const { return range_; }
  const std::vector<CosineTerm>& cosine_terms() const { return cosine_terms_; }

  double weight(const LatticePoint& x) const {
    for (const auto& [p, w] : support_)
      if (p == x) return w;
    return 0.0;
  }
  bool nonnegative() const {
    return std::all_of(support_.begin(), support_.end(),
                       [](const auto& pw) { return pw.second >= 0.0; });
  }
  double abs_mass() const {
    double s = 0;
    for (const auto& [p, w] : support_) s += std::abs(w);
    return s;
  }

 private:
  void validate() {
    require(dim_ >= 1 && dim_ <= kMaxDim, "step distribution: bad dimension");
    require(!support_.empty(), "step distribution: empty support");
    std::map<LatticePoint, double, detail::PointLess> table;
    double total = 0;
    for (const auto& [p, w] : support_) {
      require(p.dim() == dim_, "step distribution: support point has wrong dimension");
      require(std::isfinite(w), "step distribution: non-finite weight");
      require(!table.count(p), "step distribution: duplicate support point");
      table.emplace(p, w);
      total += w;
      range_ = std::max(range_, p.sup_norm());
    }
    require(std::abs(total - 1.0) <= 1e-12, "step distribution: weights sum to " +
                                                std::to_string(total) + ", expected 1");
    for (const auto& [p, w] : support_) {
      for (const auto& q : detail::symmetry_orbit(p)) {
        auto it = table.find(q);
        require(it != table.end() && std::abs(it->second - w) <= 1e-15 * (1 + std::abs(w)),
                "step distribution: not closed under lattice symmetries");
      }
    }
    std::map<LatticePoint, double, detail::PointLess> folded;
    for (const auto& [p, w] : support_) {
      LatticePoint a = p;
      for (int i = 0; i < dim_; ++i) a[i] = std::abs(p[i]);
      folded[a] += w;
    }
    for (const auto& [a, w] : folded)
      if (w != 0.0) cosine_terms_.push_back({a, w});
    std::sort(support_.begin(), support_.end(), [](const auto& l, const auto& r) {
      return detail::PointLess{}(l.first, r.first);
    });
  }

  int dim_;
  std::vector<std::pair<LatticePoint, double>> support_;
  int range_ = 0;
  std::vector<CosineTerm> cosine_terms_;
};

/// Nearest-neighbour simple random walk.
inline StepDistribution simple_random_walk(int dim) {
  return StepDistribution::from_orbits(dim, {{axis_point(dim, 1), 1.0 / (2 * dim)}});
}

/// Uniform distribution on 0 < |x|_inf <= range.
inline StepDistribution spread_out_walk(int dim, int range) {
  require(range >= 1, "spread-out walk: range must be >= 1");
  double count = std::pow(2.0 * range + 1, dim) - 1;
  std::vector<StepDistribution::Orbit> orbits;
  LatticePoint p(dim);
  // Enumerate sorted-descending nonnegative representatives.
  std::function<void(int, int)> rec = [&](int i, int cap) {
    if (i == dim) {
      if (p.sup_norm() > 0) orbits.push_back({p, 1.0 / count});
      return;
    }
    for (int v = 0; v <= cap; ++v) {
      p[i] = v;
      rec(i + 1, v);
    }
  };
  rec(0, range);
  return StepDistribution::from_orbits(dim, orbits);
}

/// sum_x |x|^m D(x) for even m >= 0.
inline double moment(const StepDistribution& D, int m) {
  require(m >= 0 && m % 2 == 0, "moment: order must be a nonnegative even integer");
  double s = 0;
  for (const auto& [p, w] : D.support()) s += std::pow(p.norm2(), m / 2) * w;
  return s;
}

/// Finitely supported complex function on Z^d, stored densely on a box.
/// Points outside the box carry `default_value()`.
class LatticeFunction {
 public:
  LatticeFunction() = default;
  LatticeFunction(LatticePoint lo, LatticePoint extent, cplx default_value = 0.0)
      : lo_(lo), extent_(extent), default_(default_value) {
    require(lo.dim() == extent.dim(), "lattice function: lo/extent dimension mismatch");
    std::size_t n = 1;
    for (int e : extent_) {
      require(e >= 0, "lattice function: negative extent");
      n *= static_cast<std::size_t>(e);
    }
    values_.assign(n, 0.0);
  }

  /// Box [-radius, radius]^d.
  static LatticeFunction centered(int dim, int radius) {
    LatticePoint lo(dim), ext(dim);
    for (int i = 0; i < dim; ++i) {
      lo[i] = -radius;
      ext[i] = 2 * radius + 1;
    }
    return LatticeFunction(lo, ext);
  }

  static LatticeFunction delta(int dim) {
    auto f = centered(dim, 0);
    f.values_[0] = 1.0;
    return f;
  }

  static LatticeFunction from(const StepDistribution& D) {
    auto f = centered(D.dim(), D.range());
    for (const auto& [p, w] : D.support()) f.set(p, w);
    return f;
  }

  int dim() const { return lo_.dim(); }
  const LatticePoint& lo() const { return lo_; }
  const LatticePoint& extent() const { return extent_; }
  cplx default_value() const { return default_; }
  std::size_t size() const { return values_.size(); }

  bool contains(const LatticePoint& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo_[i] || x[i] >= lo_[i] + extent_[i]) return false;
    return true;
  }
  cplx at(const LatticePoint& x) const {
    require(x.dim() == dim(), "lattice function: point dimension mismatch");
    return contains(x) ? values_[index(x)] : default_;
  }
  void set(const LatticePoint& x, cplx v) {
    require(x.dim() == dim() && contains(x), "lattice function: point outside storage box");
    values_[index(x)] = v;
  }

  LatticePoint point(std::size_t flat) const {
    LatticePoint x(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      x[i] = lo_[i] + static_cast<int>(flat % extent_[i]);
      flat /= extent_[i];
    }
    return x;
  }
  const std::vector<cplx>& values() const { return values_; }
  std::vector<cplx>& values() { return values_; }

 private:
  std::size_t index(const LatticePoint& x) const {
    std::size_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * extent_[i] + (x[i] - lo_[i]);
    return idx;
  }

  LatticePoint lo_;
  LatticePoint extent_;
  cplx default_ = 0.0;
  std::vector<cplx> values_;
};

/// (f*g)(x) = sum_y f(y) g(x-y). Entries with modulus below 1e-300 are dropped.
inline LatticeFunction convolve(const LatticeFunction& f, const LatticeFunction& g) {
  require(f.dim() == g.dim(), "convolve: dimension mismatch");
  require(f.default_value() == 0.0 && g.default_value() == 0.0,
          "convolve: both operands must vanish outside their boxes");
  const int d = f.dim();
  LatticePoint lo(d), ext(d);
  for (int i = 0; i < d; ++i) {
    lo[i] = f.lo()[i] + g.lo()[i];
    ext[i] = std::max(0, f.extent()[i] + g.extent()[i] - 1);
  }
  LatticeFunction out(lo, ext);
  std::vector<std::pair<LatticePoint, cplx>> gnz;
  for (std::size_t j = 0; j < g.size(); ++j)
    if (g.values()[j] != 0.0) gnz.emplace_back(g.point(j), g.values()[j]);
  for (std::size_t i = 0; i < f.size(); ++i) {
    cplx fv = f.values()[i];
    if (fv == 0.0) continue;
    LatticePoint y = f.point(i);
    for (const auto& [z, gv] : gnz) {
      LatticePoint x = y + z;
      out.set(x, out.at(x) + fv * gv);
    }
  }
  for (auto& v : out.values())
    if (std::abs(v) < 1e-300) v = 0.0;
  return out;
}

}  // namespace latgf
