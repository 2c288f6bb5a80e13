#pragma once

// Shared corpus builders and independent oracles for the test binaries.

#include <wrl/anisotropy.hpp>
#include <wrl/geometry.hpp>
#include <wrl/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

namespace wrl::test {

inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(std::mt19937_64& rng, double a, double b) { return a + (b - a) * uniform01(rng); }

/// Convex polygon inscribed in a random ellipse: sorted random angles with a
/// minimum gap, so every vertex is a strict corner.
inline Polygon random_convex_polygon(std::mt19937_64& rng, int n) {
  std::vector<double> t;
  const double gap = 0.5 * 2.0 * std::numbers::pi / n;
  while (static_cast<int>(t.size()) < n) {
    t.clear();
    for (int k = 0; k < n; ++k) t.push_back(uniform(rng, 0.0, 2.0 * std::numbers::pi));
    std::sort(t.begin(), t.end());
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      const double next = k + 1 < n ? t[static_cast<std::size_t>(k + 1)] : t[0] + 2.0 * std::numbers::pi;
      ok = next - t[static_cast<std::size_t>(k)] > 0.3 * gap;
    }
    if (!ok) t.clear();
  }
  const double a = uniform(rng, 0.6, 1.4);
  const double b = uniform(rng, 0.6, 1.4);
  const double rot = uniform(rng, 0.0, std::numbers::pi);
  const Vec2 shift(uniform(rng, -0.5, 0.5), uniform(rng, -0.5, 0.5));
  Points2<double> pts(2, n);
  for (int k = 0; k < n; ++k) {
    const Vec2 e(a * std::cos(t[static_cast<std::size_t>(k)]), b * std::sin(t[static_cast<std::size_t>(k)]));
    pts.col(k) = Eigen::Rotation2Dd(rot) * e + shift;
  }
  return Polygon(pts);
}

inline Polygon unit_square() { return Polygon{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)}; }

inline Polygon irregular_pentagon() {
  return Polygon{Vec2(0, 0), Vec2(1.2, -0.1), Vec2(1.6, 0.7), Vec2(0.8, 1.3), Vec2(-0.1, 0.8)};
}

inline Polygon symmetric(int n, std::optional<double> angle = std::nullopt) {
  return build_symmetric_polygon(SymmetricPolygonSpec<double>{n, angle});
}

/// Riesz potential at an interior point x by the polar route:
/// v(x) = 1/(2 - alpha) int_0^{2 pi} rho_x(theta)^(2 - alpha) d theta,
/// integrated exactly between consecutive vertex directions, where rho is
/// smooth, with high-order Gauss-Legendre.
inline double polar_potential(const Polygon& e, const Vec2& x, double alpha) {
  const auto& rule = quad::gauss_legendre(64);
  double total = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const Vec2 a = e.vertex(i) - x;
    const Vec2 b = e.vertex(i + 1) - x;
    const double t0 = std::atan2(a.y(), a.x());
    double t1 = std::atan2(b.y(), b.x());
    while (t1 < t0) t1 += 2.0 * std::numbers::pi;
    const Vec2 ab = b - a;
    const Vec2 nrm(ab.y(), -ab.x());
    const double h = a.dot(nrm) / nrm.norm();  // distance from x to the side line
    const Vec2 nu = nrm / nrm.norm();
    auto rho_pow = [&](double t) {
      const double c = std::cos(t) * nu.x() + std::sin(t) * nu.y();
      return std::pow(h / c, 2.0 - alpha);
    };
    // Split at the foot of the perpendicular, where rho has its minimum.
    const double tf = std::atan2(nu.y(), nu.x());
    std::vector<double> cuts{t0, t1};
    for (int k = -2; k <= 2; ++k) {
      const double c = tf + 2.0 * std::numbers::pi * k;
      if (c > t0 && c < t1) cuts.insert(cuts.begin() + 1, c);
    }
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k)
      for (int piece = 0; piece < 8; ++piece) {
        const double lo = cuts[k] + (cuts[k + 1] - cuts[k]) * piece / 8.0;
        const double hi = cuts[k] + (cuts[k + 1] - cuts[k]) * (piece + 1) / 8.0;
        total += quad::fixed(rho_pow, lo, hi, rule);
      }
  }
  return total / (2.0 - alpha);
}

/// Closed form for the unit square at alpha = 1.
inline double unit_square_energy_alpha1() {
  return 4.0 * std::log(1.0 + std::sqrt(2.0)) - 4.0 / 3.0 * (std::sqrt(2.0) - 1.0);
}

}  // namespace wrl::test
