#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

namespace latgf {

using cplx = std::complex<double>;

inline constexpr int kMaxDim = 6;
inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Precondition violations (bad dimension, bad radii, malformed model ...).
struct InvalidArgument : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A computation ran but could not meet its own accuracy contract.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InvalidArgument(what);
}

inline void check_dim(int d) {
  if (d < 1 || d > kMaxDim)
    throw InvalidArgument("dimension " + std::to_string(d) + " outside [1, " +
                          std::to_string(kMaxDim) + "]");
}

// Fixed-capacity coordinate vector; dimension is a runtime value <= kMaxDim.
template <typename T>
class Coords {
 public:
  Coords() = default;
  explicit Coords(int dim) : dim_(dim) { check_dim(dim); }
  Coords(std::initializer_list<T> v) : dim_(static_cast<int>(v.size())) {
    check_dim(dim_);
    std::copy(v.begin(), v.end(), c_.begin());
  }
  template <typename Range>
  static Coords from_range(const Range& r) {
    Coords out(static_cast<int>(std::size(r)));
    int i = 0;
    for (const auto& v : r) out.c_[i++] = static_cast<T>(v);
    return out;
  }

  int dim() const { return dim_; }
  T& operator[](int i) { return c_[i]; }
  const T& operator[](int i) const { return c_[i]; }
  const T* begin() const { return c_.data(); }
  const T* end() const { return c_.data() + dim_; }

  friend bool operator==(const Coords& a, const Coords& b) {
    return a.dim_ == b.dim_ && std::equal(a.begin(), a.end(), b.begin());
  }
  friend Coords operator+(Coords a, const Coords& b) {
    for (int i = 0; i < a.dim_; ++i) a.c_[i] += b.c_[i];
    return a;
  }
  friend Coords operator-(Coords a, const Coords& b) {
    for (int i = 0; i < a.dim_; ++i) a.c_[i] -= b.c_[i];
    return a;
  }
  Coords operator-() const {
    Coords out = *this;
    for (int i = 0; i < dim_; ++i) out.c_[i] = -out.c_[i];
    return out;
  }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < dim_; ++i) s += double(c_[i]) * double(c_[i]);
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  T sup_norm() const {
    T m{};
    for (int i = 0; i < dim_; ++i) m = std::max<T>(m, c_[i] < 0 ? -c_[i] : c_[i]);
    return m;
  }

  friend std::ostream& operator<<(std::ostream& os, const Coords& p) {
    os << '(';
    for (int i = 0; i < p.dim_; ++i) os << (i ? "," : "") << p.c_[i];
    return os << ')';
  }

 private:
  int dim_ = 0;
  std::array<T, kMaxDim> c_{};
};

/// A point x of Z^d.
using LatticePoint = Coords<int>;
/// A point y of R^d (real-space argument of s, u and the Riesz convolution).
using RealVector = Coords<double>;

inline RealVector to_real(const LatticePoint& x) {
  RealVector y(x.dim());
  for (int i = 0; i < x.dim(); ++i) y[i] = x[i];
  return y;
}

inline LatticePoint zero_point(int dim) { return LatticePoint(dim); }

inline LatticePoint axis_point(int dim, int length, int axis = 0) {
  LatticePoint x(dim);
  x[axis] = length;
  return x;
}

struct LatticePointHash {
  std::size_t operator()(const LatticePoint& p) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (int v : p) {
      h ^= static_cast<std::uint64_t>(static_cast<std::uint32_t>(v));
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Maps an angle into the canonical representative (-pi, pi].
inline double reduce_angle(double k) {
  if (k > -kPi && k <= kPi) return k;
  double r = std::remainder(k, kTwoPi);  // in [-pi, pi]
  if (r <= -kPi) r += kTwoPi;
  return r;
}

/// k in T^d, stored as its representative in (-pi, pi]^d together with
/// cos(k_j), which every lattice symbol evaluation needs.
class TorusPoint {
 public:
  TorusPoint() = default;
  explicit TorusPoint(int dim) : dim_(dim) {
    check_dim(dim);
    cos_.fill(1.0);
  }
  TorusPoint(std::initializer_list<double> v) : TorusPoint(static_cast<int>(v.size())) {
    int i = 0;
    for (double k : v) set(i++, k);
  }
  static TorusPoint from(const RealVector& v) {
    TorusPoint t(v.dim());
    for (int i = 0; i < v.dim(); ++i) t.set(i, v[i]);
    return t;
  }

  int dim() const { return dim_; }
  double operator[](int i) const { return k_[i]; }
  double cos(int i) const { return cos_[i]; }

  void set(int i, double k) {
    k_[i] = reduce_angle(k);
    cos_[i] = std::cos(k_[i]);
  }
  // For grid engines that already hold a reduced coordinate and its cosine.
  void set_reduced(int i, double k, double c) {
    k_[i] = k;
    cos_[i] = c;
  }

  double norm2() const {
    double s = 0;
    for (int i = 0; i < dim_; ++i) s += k_[i] * k_[i];
    return s;
  }
  double norm() const { return std::sqrt(norm2()); }
  bool is_zero() const {
    for (int i = 0; i < dim_; ++i)
      if (k_[i] != 0.0) return false;
    return true;
  }
  RealVector coords() const {
    RealVector v(dim_);
    for (int i = 0; i < dim_; ++i) v[i] = k_[i];
    return v;
  }

 private:
  int dim_ = 0;
  std::array<double, kMaxDim> k_{};
  std::array<double, kMaxDim> cos_{};
};

}  // namespace latgf
