#include <wrl/riesz.hpp>

#include <wrl/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace wrl {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct BoundarySide {
  Segment seg;
  Vec2 normal;
  double offset;
};

std::vector<BoundarySide> boundary(const Polygon& p) {
  std::vector<BoundarySide> out;
  for (const auto& s : sides(p)) out.push_back({{s.start, s.end}, s.normal, s.offset()});
  return out;
}

/// Strict lexicographic order on vertex lists; fixes the evaluation order of I(E,F).
bool polygon_less(const Polygon& a, const Polygon& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (Eigen::Index i = 0; i < a.size(); ++i)
    for (int c = 0; c < 2; ++c)
      if (a.vertices()(c, i) != b.vertices()(c, i)) return a.vertices()(c, i) < b.vertices()(c, i);
  return false;
}

bool identical(const Polygon& a, const Polygon& b) {
  return a.size() == b.size() && a.vertices() == b.vertices();
}

double max_vertex_distance(const Polygon& p, const Vec2& x) {
  return (p.vertices().colwise() - x).colwise().norm().maxCoeff();
}

double union_diameter(const Polygon& e, const Polygon& f) {
  double d = std::max(e.diameter(), f.diameter());
  for (Eigen::Index i = 0; i < e.size(); ++i) d = std::max(d, max_vertex_distance(f, e.vertex(i)));
  return d;
}

void check_tolerance(const EnergyValue& v, const QuadratureSpec& q, const char* what) {
  if (v.error_estimate > q.target_rel_tol * std::abs(v.value)) {
    char buf[160];
    std::snprintf(buf, sizeof buf, ": refinement exhausted with error estimate %.3g above %.3g", v.error_estimate,
                  q.target_rel_tol * std::abs(v.value));
    throw ToleranceNotMet(std::string(what) + buf, v);
  }
}

/// Boundary form of I(E,F); `same` uses the symmetry of the pair matrix.
EnergyValue boundary_interaction(const Polygon& e, const Polygon& f, bool same, const RieszParams& p,
                                 const QuadratureSpec& q) {
  const double a = p.alpha;
  const double degree = 2.0 - a;
  const double factor = -1.0 / ((2.0 - a) * (2.0 - a));
  const auto se = boundary(e);
  const auto sf = boundary(f);

  struct Term {
    std::size_t i, j;
    double weight;  // factor * (nu_i . nu_j), doubled for mirrored off-diagonal pairs
  };
  std::vector<Term> terms;
  for (std::size_t i = 0; i < se.size(); ++i)
    for (std::size_t j = same ? i : 0; j < sf.size(); ++j) {
      const double dot = se[i].normal.dot(sf[j].normal);
      if (std::abs(dot) < 1e-15) continue;
      const double mult = (same && i != j) ? 2.0 : 1.0;
      terms.push_back({i, j, mult * factor * dot});
    }

  // |E||F| D^(-alpha) <= I(E,F): the tolerance is relative to a lower bound.
  const double lower = area(e) * area(f) * std::pow(union_diameter(e, f), -a);
  const double abs_tol = q.target_rel_tol * lower;
  const PairQuadrature rule = q.pair_rule();
  const PowerKernel kernel{degree};

  std::vector<double> values(terms.size());
  std::vector<double> errors(terms.size());
  quad::parallel_for(terms.size(), [&](std::size_t k) {
    const Term& t = terms[k];
    const double pair_tol = abs_tol / (static_cast<double>(terms.size()) * std::abs(t.weight));
    const auto est = segment_pair_integral(se[t.i].seg, sf[t.j].seg, kernel, degree, rule, pair_tol);
    values[k] = t.weight * est.value;
    errors[k] = std::abs(t.weight) * est.error;
  });

  EnergyValue out;
  out.value = quad::pairwise_sum(values);
  double magnitude = 0.0;
  for (double v : values) magnitude += std::abs(v);
  out.error_estimate = quad::pairwise_sum(errors) + 4.0 * kEps * magnitude;
  return out;
}

/// int_{u1}^{u2} (d^2 + u^2)^(-alpha/2) du for 0 <= u1 <= u2, d > 0: direct
/// Gauss on [0, d], logarithmic substitution u = d e^tau beyond.
quad::Estimate radial_line_integral(double d, double u1, double u2, double alpha,
                                    const QuadratureSpec& q, double tol) {
  quad::Estimate out;
  if (u2 <= u1) return out;
  const double e = -0.5 * alpha;
  if (u1 < d) {
    auto near = [&](double u) { return std::pow(d * d + u * u, e); };
    out += quad::adaptive(near, u1, std::min(u2, d), q.base_order, q.refinement_depth + 4, 0.5 * tol);
  }
  if (u2 > d) {
    const double scale = std::pow(d, 1.0 - alpha);
    auto far = [&](double tau) {
      const double g = std::exp(tau);
      return scale * g * std::pow(1.0 + g * g, e);
    };
    out += quad::adaptive(far, std::log(std::max(u1, d) / d), std::log(u2 / d), q.base_order,
                          q.refinement_depth + 6, 0.5 * tol);
  }
  return out;
}

}  // namespace

RieszParams::RieszParams(double a) : alpha(a) {
  if (!(a > 0.01 && a < 1.99))
    throw Error(ErrorCode::InvalidArgument, "alpha must lie in (0.01, 1.99)");
}

void QuadratureSpec::validate() const {
  if (base_order < 2 || base_order > 64)
    throw Error(ErrorCode::InvalidArgument, "base_order must lie in [2, 64]");
  if (refinement_depth < 0 || refinement_depth > 30)
    throw Error(ErrorCode::InvalidArgument, "refinement_depth must lie in [0, 30]");
  if (!(near_ratio > 0.0)) throw Error(ErrorCode::InvalidArgument, "near_ratio must be positive");
  if (!(target_rel_tol > 0.0 && target_rel_tol < 1.0))
    throw Error(ErrorCode::InvalidArgument, "target_rel_tol must lie in (0, 1)");
}

PairQuadrature QuadratureSpec::pair_rule() const {
  return {base_order, refinement_depth, near_ratio, singular_transform};
}

double riesz_constant(double alpha) { return 2.0 * std::pow(kPi, 0.5 * alpha) / (2.0 - alpha); }

EnergyValue interaction(const Polygon& e, const Polygon& f, const RieszParams& p,
                        const QuadratureSpec& q) {
  q.validate();
  if (identical(e, f)) return self_energy(e, p, q);
  const bool swap = polygon_less(f, e);
  const EnergyValue v = boundary_interaction(swap ? f : e, swap ? e : f, false, p, q);
  check_tolerance(v, q, "interaction");
  return v;
}

EnergyValue self_energy(const Polygon& e, const RieszParams& p, const QuadratureSpec& q) {
  q.validate();
  const EnergyValue v = boundary_interaction(e, e, true, p, q);
  check_tolerance(v, q, "self_energy");
  return v;
}

EnergyValue potential_estimate(const Polygon& e, const Vec2& x, const RieszParams& p,
                               const QuadratureSpec& q) {
  q.validate();
  const double a = p.alpha;
  const auto sd = boundary(e);
  const double lower = area(e) * std::pow(max_vertex_distance(e, x), -a);
  const double abs_tol = q.target_rel_tol * lower;
  const double on_line = 1e-13 * e.scale();

  std::vector<double> values;
  std::vector<double> errors;
  for (const auto& s : sd) {
    const double delta = s.offset - x.dot(s.normal);
    if (std::abs(delta) <= on_line) continue;  // x on the line of L_j: no contribution
    const double d = std::abs(delta);
    const Vec2 tangent = perp(s.normal);
    const double t0 = (s.seg.a - x).dot(tangent);
    const double t1 = (s.seg.b - x).dot(tangent);
    const double lo = std::min(t0, t1);
    const double hi = std::max(t0, t1);
    const double tol = abs_tol * (2.0 - a) / (d * static_cast<double>(sd.size()));
    quad::Estimate g;
    if (lo < 0.0 && hi > 0.0) {
      g += radial_line_integral(d, 0.0, -lo, a, q, 0.5 * tol);
      g += radial_line_integral(d, 0.0, hi, a, q, 0.5 * tol);
    } else if (lo >= 0.0) {
      g += radial_line_integral(d, lo, hi, a, q, tol);
    } else {
      g += radial_line_integral(d, -hi, -lo, a, q, tol);
    }
    values.push_back(delta * g.value / (2.0 - a));
    errors.push_back(d * g.error / (2.0 - a));
  }
  EnergyValue out;
  out.value = quad::pairwise_sum(values);
  double magnitude = 0.0;
  for (double v : values) magnitude += std::abs(v);
  out.error_estimate = quad::pairwise_sum(errors) + 4.0 * kEps * magnitude;
  return out;
}

EnergyValue side_potential_integral(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                    const QuadratureSpec& q) {
  q.validate();
  if (i < 0 || i >= poly.size()) throw Error(ErrorCode::InvalidArgument, "side index out of range");
  const Vec2 a = poly.vertex(i);
  const Vec2 b = poly.vertex(i + 1);
  const double len = (b - a).norm();
  const Vec2 tangent = (b - a) / len;

  // Panels graded dyadically toward both endpoints; the innermost tail panel
  // is kept once v_max * width falls below a tenth of the tolerance.
  const double v_max = riesz_constant(p.alpha) * std::pow(area(poly), 1.0 - 0.5 * p.alpha);
  const double v_min = area(poly) * std::pow(poly.diameter(), -p.alpha);
  const double tail_limit = 0.1 * q.target_rel_tol * len * v_min / v_max;
  std::vector<std::pair<double, double>> panels;
  double hi = 0.5 * len;
  while (hi > tail_limit && hi > 1e-300) {
    panels.emplace_back(0.5 * hi, hi);
    hi *= 0.5;
  }
  panels.emplace_back(0.0, hi);
  const std::size_t half = panels.size();
  for (std::size_t k = 0; k < half; ++k) panels.emplace_back(len - panels[k].second, len - panels[k].first);

  QuadratureSpec inner = q;
  inner.target_rel_tol = 0.1 * q.target_rel_tol;
  const auto& rule = quad::gauss_legendre(q.base_order);
  std::vector<double> values(panels.size());
  std::vector<double> errors(panels.size());
  quad::parallel_for(panels.size(), [&](std::size_t k) {
    double eval_error = 0.0;
    auto f = [&](double s) {
      const auto v = potential_estimate(poly, Vec2(a + s * tangent), p, inner);
      eval_error += v.error_estimate;
      return v.value;
    };
    const auto [s0, s1] = panels[k];
    const double m = 0.5 * (s0 + s1);
    const double coarse = quad::fixed(f, s0, s1, rule);
    eval_error = 0.0;
    const double fine = quad::fixed(f, s0, m, rule) + quad::fixed(f, m, s1, rule);
    values[k] = fine;
    errors[k] = std::abs(fine - coarse) + eval_error * (s1 - s0) / (2.0 * static_cast<double>(rule.nodes.size()));
  });
  EnergyValue out;
  out.value = quad::pairwise_sum(values);
  out.error_estimate = quad::pairwise_sum(errors) + 4.0 * kEps * std::abs(out.value);
  check_tolerance(out, q, "side_average_potential");
  return out;
}

EnergyValue side_potential_flux(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                const QuadratureSpec& q) {
  q.validate();
  if (i < 0 || i >= poly.size()) throw Error(ErrorCode::InvalidArgument, "side index out of range");
  const auto sd = boundary(poly);
  const auto& li = sd[static_cast<std::size_t>(i)];
  const double lower = li.seg.length() * area(poly) * std::pow(poly.diameter(), -p.alpha);
  const double abs_tol = q.target_rel_tol * lower * (2.0 - p.alpha) / static_cast<double>(sd.size());
  const PairQuadrature rule = q.pair_rule();
  std::vector<double> values;
  std::vector<double> errors;
  for (std::size_t j = 0; j < sd.size(); ++j) {
    if (static_cast<Eigen::Index>(j) == i) continue;
    const FluxKernel kernel{sd[j].normal, p.alpha};
    const auto est = segment_pair_integral(li.seg, sd[j].seg, kernel, 1.0 - p.alpha, rule, abs_tol);
    values.push_back(est.value / (2.0 - p.alpha));
    errors.push_back(est.error / (2.0 - p.alpha));
  }
  EnergyValue out;
  out.value = quad::pairwise_sum(values);
  out.error_estimate = quad::pairwise_sum(errors) + 4.0 * kEps * std::abs(out.value);
  return out;
}

EnergyValue side_average_estimate(const Polygon& poly, Eigen::Index i, const RieszParams& p,
                                  const QuadratureSpec& q) {
  const EnergyValue total = side_potential_integral(poly, i, p, q);
  const double len = (poly.vertex(i + 1) - poly.vertex(i)).norm();
  return {total.value / len, total.error_estimate / len};
}

QmcEstimate qmc_oracle_interaction(const Polygon& e, const Polygon& f, const RieszParams& p,
                                   std::uint64_t samples, std::uint64_t seed, int replicates) {
  if (samples < 10000) throw Error(ErrorCode::InvalidArgument, "the oracle needs at least 1e4 samples");
  if (replicates < 2) throw Error(ErrorCode::InvalidArgument, "at least two replicates are needed");
  const double a = p.alpha;
  const double power = 2.0 - a;

  const auto tris = triangulate(e);
  std::vector<double> cdf;
  double acc = 0.0;
  for (const auto& t : tris) cdf.push_back(acc += triangle_area(t));
  const double area_e = acc;
  for (double& c : cdf) c /= area_e;
  cdf.back() = 1.0;

  const auto sf = boundary(f);
  const Vec2 centroid_f = f.centroid();
  auto inside_f = [&](const Vec2& y) {
    for (const auto& s : sf)
      if (y.dot(s.normal) > s.offset) return false;
    return true;
  };

  // Kronecker sequence with the generalized golden ratio in four dimensions.
  double phi = 1.5;
  for (int k = 0; k < 100; ++k) phi = std::pow(1.0 + phi, 0.2);
  std::array<double, 4> step{};
  for (std::size_t k = 0; k < 4; ++k) step[k] = std::pow(1.0 / phi, static_cast<double>(k + 1));

  std::mt19937_64 rng(seed);
  auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  const auto per = static_cast<std::uint64_t>(
      std::ceil(static_cast<double>(samples) / static_cast<double>(replicates)));
  std::vector<std::array<double, 4>> shifts(static_cast<std::size_t>(replicates));
  for (auto& s : shifts)
    for (double& v : s) v = uniform();

  std::vector<double> means(static_cast<std::size_t>(replicates));
  quad::parallel_for(means.size(), [&](std::size_t r) {
    std::array<double, 4> u = shifts[r];
    std::vector<double> chunk;
    chunk.reserve(static_cast<std::size_t>(per / 4096 + 1));
    double sum = 0.0;
    for (std::uint64_t n = 0; n < per; ++n) {
      for (std::size_t k = 0; k < 4; ++k) {
        u[k] += step[k];
        if (u[k] >= 1.0) u[k] -= 1.0;
      }
      std::size_t t = 0;
      while (t + 1 < cdf.size() && u[0] >= cdf[t]) ++t;
      const double lo = t == 0 ? 0.0 : cdf[t - 1];
      const double w = std::clamp((u[0] - lo) / (cdf[t] - lo), 0.0, 1.0);
      const double sq = std::sqrt(w);
      const auto& tri = tris[t];
      const Vec2 x = (1.0 - sq) * tri.col(0) + sq * (1.0 - u[1]) * tri.col(1) + sq * u[1] * tri.col(2);

      double theta0 = 0.0;
      double span = 2.0 * kPi;
      double r_min = 0.0;
      const double r_max = max_vertex_distance(f, x);
      if (!inside_f(x)) {
        const Vec2 c = centroid_f - x;
        const double base = std::atan2(c.y(), c.x());
        double lo_angle = 0.0;
        double hi_angle = 0.0;
        for (Eigen::Index k = 0; k < f.size(); ++k) {
          const Vec2 v = f.vertex(k) - x;
          const double ang = std::atan2(cross2(c, v), c.dot(v));
          lo_angle = std::min(lo_angle, ang);
          hi_angle = std::max(hi_angle, ang);
        }
        theta0 = base + lo_angle;
        span = hi_angle - lo_angle;
        r_min = std::numeric_limits<double>::infinity();
        for (const auto& s : sf) r_min = std::min(r_min, point_segment_distance(x, s.seg));
      }
      const double v_min = std::pow(r_min, power);
      const double v_max = std::pow(r_max, power);
      const double rad = std::pow(v_min + u[3] * (v_max - v_min), 1.0 / power);
      const double theta = theta0 + span * u[2];
      const Vec2 y = x + rad * Vec2(std::cos(theta), std::sin(theta));
      if (inside_f(y)) sum += span * (v_max - v_min) / power;
      if ((n & 4095u) == 4095u) {
        chunk.push_back(sum);
        sum = 0.0;
      }
    }
    chunk.push_back(sum);
    means[r] = area_e * quad::pairwise_sum(chunk) / static_cast<double>(per);
  });

  QmcEstimate out;
  out.replicates = replicates;
  out.samples = per * static_cast<std::uint64_t>(replicates);
  out.value = quad::pairwise_sum(means) / replicates;
  double var = 0.0;
  for (double m : means) var += (m - out.value) * (m - out.value);
  var /= (replicates - 1);
  out.standard_error = std::sqrt(var / replicates);
  return out;
}

AnalyticBounds analytic_bounds(const Polygon& e, const Polygon& f, const RieszParams& p) {
  AnalyticBounds b;
  b.constant = riesz_constant(p.alpha);
  const double ae = std::pow(area(e), 1.0 - 0.5 * p.alpha);
  const double af = std::pow(area(f), 1.0 - 0.5 * p.alpha);
  b.potential_bound = b.constant * ae;
  b.interaction_bound = b.constant * ae * area(f);
  b.lipschitz_bound = b.constant * (ae + af) * symmetric_difference_area(e, f);
  return b;
}

double rectangle_bound(double length, double d1, double theta, double alpha) {
  const double c_theta = std::pow(2.0 / (1.0 - std::cos(theta)), 0.5 * alpha);
  if (std::abs(alpha - 1.0) < 1e-12) return c_theta * d1 * d1 * 2.0 * length * std::log(2.0);
  return c_theta * d1 * d1 * std::pow(length, 2.0 - alpha) * (std::pow(2.0, 2.0 - alpha) - 2.0) /
         ((1.0 - alpha) * (2.0 - alpha));
}

RectangleProbe rectangle_interaction_probe(double length, double d1, double theta,
                                           const RieszParams& p, const QuadratureSpec& q,
                                           bool swap_heights) {
  if (!(length > 0.0) || !(d1 > 0.0))
    throw Error(ErrorCode::InvalidArgument, "rectangle length and height must be positive");
  if (!(theta > 0.0 && theta < kPi)) throw Error(ErrorCode::InvalidArgument, "theta must lie in (0, pi)");
  const double h1 = swap_heights ? 2.0 * d1 : d1;
  const double h2 = swap_heights ? d1 : 2.0 * d1;
  const Vec2 u1(1.0, 0.0);
  const Vec2 n1(0.0, -1.0);
  const Vec2 u2(std::cos(theta), std::sin(theta));
  const Vec2 n2(-std::sin(theta), std::cos(theta));
  const Vec2 o = Vec2::Zero();
  RectangleProbe out{Polygon{o, Vec2(length * u1), Vec2(length * u1 + h1 * n1), Vec2(h1 * n1)},
                     Polygon{o, Vec2(length * u2), Vec2(length * u2 + h2 * n2), Vec2(h2 * n2)},
                     {}, 0.0, 0.0, false};
  // Thin rectangles hit the cancellation floor of the boundary form; the probe
  // reports the best value with its error estimate instead of failing.
  try {
    out.value = interaction(out.r1, out.r2, p, q);
  } catch (const ToleranceNotMet& e) {
    out.value = e.best();
  }
  out.c_theta = std::pow(2.0 / (1.0 - std::cos(theta)), 0.5 * p.alpha);
  out.bound = rectangle_bound(length, d1, theta, p.alpha);
  out.within_bound = out.value.value <= out.bound;
  return out;
}

}  // namespace wrl
