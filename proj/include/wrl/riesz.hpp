#pragma once

// Riesz interaction I(E,F) = int_E int_F |x - y|^(-alpha), self-energy
// V(E) = I(E,E) and potential v_E(x) = int_E |x - y|^(-alpha) dy on convex
// polygons in the plane.
//
// Both area integrals are reduced to the boundary with the divergence theorem:
// div_x div_y |x - y|^(2-alpha) = -(2-alpha)^2 |x - y|^(-alpha), so
//
//   I(E,F) = -1/(2-alpha)^2 sum_{i in dE, j in dF} (nu_i . nu_j) int_{L_i} int_{M_j} |x - y|^(2-alpha),
//
// whose kernel is continuous; similarly div_y (y - x)|y - x|^(-alpha) =
// (2-alpha)|y - x|^(-alpha) gives
//
//   v_E(x) = 1/(2-alpha) sum_j delta_j(x) int_{L_j} |y - x|^(-alpha),   delta_j = h_j - x . nu_j.

#include <wrl/boundary_integrals.hpp>
#include <wrl/errors.hpp>
#include <wrl/geometry.hpp>

#include <cstdint>

namespace wrl {

struct RieszParams {
  double alpha = 1.0;

  RieszParams() = default;
  /// Throws InvalidArgument unless 0.01 < alpha < 1.99.
  explicit RieszParams(double a);
};

struct QuadratureSpec {
  int base_order = 8;         // Gauss points per direction
  int refinement_depth = 6;   // maximal bisection levels
  double near_ratio = 2.0;    // split while distance < near_ratio * length
  bool singular_transform = true;
  double target_rel_tol = 1e-6;

  /// Throws InvalidArgument when a field is outside its domain.
  void validate() const;
  PairQuadrature pair_rule() const;
};

struct EnergyValue {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Thrown when refinement is exhausted above tolerance; carries the best value.
class ToleranceNotMet : public Error {
 public:
  ToleranceNotMet(const std::string& what, EnergyValue best)
      : Error(ErrorCode::ToleranceNotMet, what), best_(best) {}
  const EnergyValue& best() const { return best_; }

 private:
  EnergyValue best_;
};

/// c_{alpha,2} = 2 pi^(alpha/2) / (2 - alpha): v_E <= c |E|^(1 - alpha/2).
double riesz_constant(double alpha);

EnergyValue interaction(const Polygon& e, const Polygon& f, const RieszParams& p,
                        const QuadratureSpec& q = {});

EnergyValue self_energy(const Polygon& e, const RieszParams& p, const QuadratureSpec& q = {});

EnergyValue potential_estimate(const Polygon& e, const Vec2& x, const RieszParams& p,
                               const QuadratureSpec& q = {});

inline double potential(const Polygon& e, const Vec2& x, const RieszParams& p,
                        const QuadratureSpec& q = {}) {
  return potential_estimate(e, x, p, q).value;
}

/// int_{L_i} v_P dH^1 by graded Gauss-Legendre panels along the side.
EnergyValue side_potential_integral(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                    const QuadratureSpec& q = {});

/// Same integral through the boundary pair form
/// 1/(2-alpha) sum_{j != i} int_{L_i} int_{L_j} (-z . nu_j)|z|^(-alpha), z = x - y.
EnergyValue side_potential_flux(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                const QuadratureSpec& q = {});

/// (1/l_i) int_{L_i} v_P dH^1.
EnergyValue side_average_estimate(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                  const QuadratureSpec& q = {});

inline double side_average_potential(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                     const QuadratureSpec& q = {}) {
  return side_average_estimate(poly, i, p, q).value;
}

struct QmcEstimate {
  double value = 0.0;
  double standard_error = 0.0;
  std::uint64_t samples = 0;
  int replicates = 0;
};

/// Randomized quasi-Monte-Carlo estimate of I(E,F), independent of the
/// boundary quadrature: x is drawn from E by area-weighted triangle mapping, y
/// in polar coordinates about x with radial density r^(1-alpha), and the
/// indicator of F is averaged. Randomization is by Cranley-Patterson shifts
/// of a Kronecker sequence; the standard error is over the shifts.
QmcEstimate qmc_oracle_interaction(const Polygon& e, const Polygon& f, const RieszParams& p,
                                   std::uint64_t samples, std::uint64_t seed, int replicates = 32);

struct AnalyticBounds {
  double constant = 0.0;
  double potential_bound = 0.0;    // c |E|^(1 - alpha/2)
  double interaction_bound = 0.0;  // c |E|^(1 - alpha/2) |F|
  double lipschitz_bound = 0.0;    // c (|E|^(1 - alpha/2) + |F|^(1 - alpha/2)) |E sym F|
};

AnalyticBounds analytic_bounds(const Polygon& e, const Polygon& f, const RieszParams& p);

struct RectangleProbe {
  Polygon r1;  // l x h1 along u1 = e1
  Polygon r2;  // l x h2 along u2 = (cos theta, sin theta)
  EnergyValue value;
  double c_theta = 0.0;
  double bound = 0.0;
  bool within_bound = false;
};

/// Rectangles sharing the corner at the origin, on opposite sides of the
/// wedge between u1 and u2; heights d1 and 2 d1 (swapped when requested).
/// Never throws ToleranceNotMet: value.error_estimate carries the accuracy.
RectangleProbe rectangle_interaction_probe(double length, double d1, double theta,
                                           const RieszParams& p, const QuadratureSpec& q = {},
                                           bool swap_heights = false);

/// C_theta d1^2 l^(2-alpha) (2^(2-alpha) - 2) / ((1-alpha)(2-alpha)), or
/// C_theta d1^2 2 l log 2 at alpha = 1.
double rectangle_bound(double length, double d1, double theta, double alpha);

}  // namespace wrl
