#pragma once

#include <cmath>
#include <optional>

#include "latgf/core.hpp"

namespace latgf {

/// Dimension-dependent constants of the |x|^{-(d-2)} decay law.
///
/// `a` is the Riesz constant Gamma((d-2)/2) / (4 pi^{d/2}), so that a |y|^{2-d}
/// is the inverse Fourier transform of |k|^{-2} on R^d. `n` is the number of
/// derivatives of h^ = |k|^2 f^ needed near the origin (d-2 for d > 4, d-1 for
/// d = 3, 4). `p` is the integrability exponent of those derivatives and `q`
/// its dual index.
struct DimensionConstants {
  int d;
  double a;
  int n;
  double p;
  double q;
};

/// p defaults to 2, which lies in the admissible range (d/(d-2), 2] for every
/// d > 4 and is the only admissible value for d = 3, 4.
inline DimensionConstants constants(int d, std::optional<double> p = std::nullopt) {
  require(d >= 3, "constants: dimension must be >= 3, got " + std::to_string(d));
  check_dim(d);
  DimensionConstants c{};
  c.d = d;
  c.a = std::tgamma(0.5 * (d - 2)) / (4.0 * std::pow(kPi, 0.5 * d));
  c.n = d > 4 ? d - 2 : d - 1;
  c.p = p.value_or(2.0);
  if (d <= 4) {
    require(c.p == 2.0, "constants: p must be 2 for d = 3, 4");
  } else {
    require(c.p > double(d) / (d - 2) && c.p <= 2.0,
            "constants: p must lie in (d/(d-2), 2] for d > 4");
  }
  c.q = c.p / (c.p - 1.0);
  return c;
}

/// Surface area of the unit sphere S^{d-1}.
inline double sphere_area(int d) { return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d); }

}  // namespace latgf
