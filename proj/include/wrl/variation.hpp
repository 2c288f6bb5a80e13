#pragma once

// The competitor class C(P, eps): polygons P(d) obtained by moving side i of P
// a distance d_i along its outward normal, with one compensating side chosen
// so that the area is restored.

#include <wrl/geometry.hpp>
#include <wrl/riesz.hpp>

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

namespace wrl {

struct VariationVector {
  Eigen::VectorXd d;  // one entry per side of the base polygon
  double epsilon = 0.0;
};

/// Lines {x : x . nu_i = h_i + d_i} of a base polygon, kept in its side order.
class SideLines {
 public:
  explicit SideLines(const Polygon& base);

  Eigen::Index size() const { return static_cast<Eigen::Index>(normals_.size()); }
  const std::vector<Vec2>& normals() const { return normals_; }
  const Eigen::VectorXd& offsets() const { return offsets_; }

  /// Vertex k is the start of side k, the crossing of lines k-1 and k.
  std::vector<Vec2> vertices(const Eigen::VectorXd& d) const;
  /// Side lengths of P(d), affine in d (negative once a side has collapsed).
  Eigen::VectorXd lengths(const Eigen::VectorXd& d) const;
  /// d lengths / d d, constant.
  const Eigen::MatrixXd& length_jacobian() const { return jacobian_; }
  /// Signed area 1/2 sum (h_k + d_k) l_k(d); d area / d d_k = l_k(d).
  double area(const Eigen::VectorXd& d) const;
  /// Throws Infeasible unless every side keeps positive length.
  Polygon polygon(const Eigen::VectorXd& d) const;
  bool feasible(const Eigen::VectorXd& d) const;

 private:
  Vec2 crossing(Eigen::Index k, const Eigen::VectorXd& d) const;

  std::vector<Vec2> normals_;
  Eigen::VectorXd offsets_;
  Eigen::VectorXd base_lengths_;
  Eigen::MatrixXd jacobian_;
  double scale_;
};

/// 0.25 * min l_i * min sin(exterior angle): every |d|_inf < eps keeps all sides.
double feasibility_epsilon(const Polygon& p);

/// P(d) with the same normal fan; Infeasible if a side collapses.
Polygon perturbed_polygon(const Polygon& p, const VariationVector& v);

/// Index of the side of `p` whose outward normal is closest to `normal`.
Eigen::Index side_with_normal(const Polygon& p, const Vec2& normal);

/// The compensating side defaults to n - 1.
inline Eigen::Index default_compensating(const Polygon& p) { return p.size() - 1; }

/// Full variation with the compensating entry left at zero.
Eigen::VectorXd expand_partial(const Polygon& p, const Eigen::VectorXd& d_partial,
                               Eigen::Index compensating);

/// d_c restoring the area of P; safeguarded Newton (slope l_c) with bisection
/// fallback on the interval where all sides stay positive. NoRoot otherwise.
double volume_adjust(const Polygon& p, const Eigen::VectorXd& d_partial,
                     Eigen::Index compensating = -1);

/// Full area-preserving variation (d_partial, f(d_partial)).
Eigen::VectorXd restore_volume(const Polygon& p, const Eigen::VectorXd& d_partial,
                               Eigen::Index compensating = -1);

/// V(d_1, ..., d_{n-1}) = self energy of the volume-restored P(d).
EnergyValue reduced_nonlocal(const Polygon& p, const Eigen::VectorXd& d_partial,
                             const RieszParams& rp, const QuadratureSpec& q = {},
                             Eigen::Index compensating = -1);

/// dV/dd_i with side j compensating: 2 l_i (avg_i - avg_j).
EnergyValue first_variation_estimate(const Polygon& p, Eigen::Index i, Eigen::Index j,
                                     const RieszParams& rp, const QuadratureSpec& q = {});

inline double first_variation_analytic(const Polygon& p, Eigen::Index i, Eigen::Index j,
                                       const RieszParams& rp, const QuadratureSpec& q = {}) {
  return first_variation_estimate(p, i, j, rp, q).value;
}

struct CriticalityReport {
  std::vector<double> side_averages;
  double residual = 0.0;          // (max - min) / mean of the side averages
  double quadrature_error = 0.0;  // propagated bound on the residual error
};

CriticalityReport criticality_residual(const Polygon& p, const RieszParams& rp,
                                       const QuadratureSpec& q = {});

struct ProbeSample {
  double t = 0.0;
  double symdiff = 0.0;
  double energy_diff = 0.0;
  double energy_error = 0.0;
  bool used = false;  // energy_diff above 10x its error
};

struct QuadraticProbe {
  double slope = 0.0;
  double intercept = 0.0;  // log-log fit: log|dV| = intercept + slope log|P sym P~|
  int used = 0;
  std::vector<ProbeSample> samples;
};

/// |V(t dir) - V(0)| against |P sym P(t dir, f)| for each t; log-log least squares.
/// DegenerateDirection for a zero direction; the fit uses samples above 10x
/// their quadrature error.
QuadraticProbe quadratic_bound_probe(const Polygon& p, const Eigen::VectorXd& direction,
                                     const std::vector<double>& scales, const RieszParams& rp,
                                     const QuadratureSpec& q = {}, Eigen::Index compensating = -1);

/// Unit direction in R^(n-1), uniform entries then normalized, redrawn until
/// the volume-restored variation at max_scale keeps every side (the probe
/// precondition). Deterministic in `seed`; Infeasible after 1000 draws.
Eigen::VectorXd feasible_probe_direction(const Polygon& p, double max_scale, std::uint64_t seed,
                                         Eigen::Index compensating = -1);

/// Least-squares slope and intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace wrl
