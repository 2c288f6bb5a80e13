#include <wrl/variation.hpp>

#include <wrl/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace wrl {

SideLines::SideLines(const Polygon& base) : scale_(base.scale()) {
  const auto s = sides(base);
  const auto n = static_cast<Eigen::Index>(s.size());
  offsets_.resize(n);
  base_lengths_.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    normals_.push_back(s[static_cast<std::size_t>(k)].normal);
    offsets_(k) = s[static_cast<std::size_t>(k)].offset();
    base_lengths_(k) = s[static_cast<std::size_t>(k)].length;
  }
  // Vertex k = M_k^{-1} (h_{k-1} + d_{k-1}, h_k + d_k); l_k = (v_{k+1} - v_k) . t_k.
  std::vector<Matrix2<double>> inv(static_cast<std::size_t>(n));
  for (Eigen::Index k = 0; k < n; ++k) {
    Matrix2<double> m;
    m.row(0) = normals_[static_cast<std::size_t>((k + n - 1) % n)].transpose();
    m.row(1) = normals_[static_cast<std::size_t>(k)].transpose();
    inv[static_cast<std::size_t>(k)] = m.inverse();
  }
  jacobian_ = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index next = (k + 1) % n;
    const Eigen::Index prev = (k + n - 1) % n;
    const Vec2 t = perp(normals_[static_cast<std::size_t>(k)]);
    const auto& mk = inv[static_cast<std::size_t>(k)];
    const auto& mn = inv[static_cast<std::size_t>(next)];
    jacobian_(k, prev) -= mk.col(0).dot(t);
    jacobian_(k, k) += mn.col(0).dot(t) - mk.col(1).dot(t);
    jacobian_(k, next) += mn.col(1).dot(t);
  }
}

Vec2 SideLines::crossing(Eigen::Index k, const Eigen::VectorXd& d) const {
  const Eigen::Index n = size();
  const Eigen::Index prev = (k + n - 1) % n;
  return detail::line_intersection(normals_[static_cast<std::size_t>(prev)], offsets_(prev) + d(prev),
                                   normals_[static_cast<std::size_t>(k)], offsets_(k) + d(k));
}

std::vector<Vec2> SideLines::vertices(const Eigen::VectorXd& d) const {
  if (d.size() != size()) throw Error(ErrorCode::InvalidArgument, "variation has the wrong length");
  std::vector<Vec2> out;
  for (Eigen::Index k = 0; k < size(); ++k) out.push_back(crossing(k, d));
  return out;
}

Eigen::VectorXd SideLines::lengths(const Eigen::VectorXd& d) const {
  if (d.size() != size()) throw Error(ErrorCode::InvalidArgument, "variation has the wrong length");
  return base_lengths_ + jacobian_ * d;
}

double SideLines::area(const Eigen::VectorXd& d) const {
  return 0.5 * (offsets_ + d).dot(lengths(d));
}

bool SideLines::feasible(const Eigen::VectorXd& d) const {
  return (lengths(d).array() > tol::duplicate * scale_).all();
}

Polygon SideLines::polygon(const Eigen::VectorXd& d) const {
  if (!feasible(d))
    throw Error(ErrorCode::Infeasible, "a side collapses: the variation changes the normal fan");
  return Polygon(detail::to_points(vertices(d)));
}

double feasibility_epsilon(const Polygon& p) {
  const auto s = sides(p);
  double min_len = std::numeric_limits<double>::infinity();
  double min_sin = 1.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    min_len = std::min(min_len, s[k].length);
    min_sin = std::min(min_sin, std::abs(cross2(s[k].normal, s[(k + 1) % s.size()].normal)));
  }
  return 0.25 * min_len * min_sin;
}

Polygon perturbed_polygon(const Polygon& p, const VariationVector& v) {
  return SideLines(p).polygon(v.d);
}

Eigen::Index side_with_normal(const Polygon& p, const Vec2& normal) {
  const auto s = sides(p);
  Eigen::Index best = 0;
  double best_dot = -2.0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double dot = s[k].normal.dot(normal);
    if (dot > best_dot) {
      best_dot = dot;
      best = static_cast<Eigen::Index>(k);
    }
  }
  return best;
}

namespace {

Eigen::Index resolve_compensating(const Polygon& p, Eigen::Index c) {
  if (c < 0) return default_compensating(p);
  if (c >= p.size()) throw Error(ErrorCode::InvalidArgument, "compensating side out of range");
  return c;
}

}  // namespace

Eigen::VectorXd expand_partial(const Polygon& p, const Eigen::VectorXd& d_partial,
                               Eigen::Index compensating) {
  const Eigen::Index n = p.size();
  const Eigen::Index c = resolve_compensating(p, compensating);
  if (d_partial.size() != n - 1)
    throw Error(ErrorCode::InvalidArgument, "partial variation must have n - 1 entries");
  Eigen::VectorXd d(n);
  for (Eigen::Index k = 0, m = 0; k < n; ++k) d(k) = k == c ? 0.0 : d_partial(m++);
  return d;
}

double volume_adjust(const Polygon& p, const Eigen::VectorXd& d_partial, Eigen::Index compensating) {
  const Eigen::Index c = resolve_compensating(p, compensating);
  const SideLines lines(p);
  Eigen::VectorXd d = expand_partial(p, d_partial, c);
  const double target = area(p);

  // Side lengths are affine in s = d_c; they stay positive on (lo, hi).
  const Eigen::VectorXd len0 = lines.lengths(d);
  const Eigen::VectorXd slope = lines.length_jacobian().col(c);
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < len0.size(); ++k) {
    if (slope(k) > 0.0) lo = std::max(lo, -len0(k) / slope(k));
    else if (slope(k) < 0.0) hi = std::min(hi, -len0(k) / slope(k));
    else if (len0(k) <= 0.0) lo = hi;
  }
  if (!(lo < hi)) throw Error(ErrorCode::NoRoot, "no compensating offset keeps every side");

  auto area_at = [&](double s) {
    d(c) = s;
    return lines.area(d) - target;
  };
  const double tol = 1e-13 * std::max(1.0, target);
  const double unit = std::sqrt(target);
  if (!std::isfinite(lo)) {
    double step = unit;
    lo = std::min(0.0, hi) - step;
    for (int k = 0; k < 200 && area_at(lo) > 0.0; ++k) lo -= (step *= 2.0);
  }
  if (!std::isfinite(hi)) {
    double step = unit;
    hi = std::max(0.0, lo) + step;
    for (int k = 0; k < 200 && area_at(hi) < 0.0; ++k) hi += (step *= 2.0);
  }
  if (area_at(lo) > 0.0 || area_at(hi) < 0.0)
    throw Error(ErrorCode::NoRoot, "the area cannot be restored inside the feasible interval");

  double a = lo;
  double b = hi;
  double s = std::clamp(0.0, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double r = area_at(s);
    if (std::abs(r) < tol) {
      // One polishing Newton step when it helps.
      const double polished = s - r / lines.lengths(d)(c);
      if (polished > lo && polished < hi && std::abs(area_at(polished)) < std::abs(r)) return polished;
      return s;
    }
    (r < 0.0 ? a : b) = s;
    const double dr = lines.lengths(d)(c);
    double next = dr > 0.0 ? s - r / dr : std::numeric_limits<double>::quiet_NaN();
    if (iter >= 50 || !(next > a && next < b)) next = 0.5 * (a + b);
    if (next == s || b - a <= std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(s)))
      return s;
    s = next;
  }
  return s;
}

Eigen::VectorXd restore_volume(const Polygon& p, const Eigen::VectorXd& d_partial,
                               Eigen::Index compensating) {
  const Eigen::Index c = resolve_compensating(p, compensating);
  Eigen::VectorXd d = expand_partial(p, d_partial, c);
  d(c) = volume_adjust(p, d_partial, c);
  return d;
}

EnergyValue reduced_nonlocal(const Polygon& p, const Eigen::VectorXd& d_partial,
                             const RieszParams& rp, const QuadratureSpec& q,
                             Eigen::Index compensating) {
  const Eigen::VectorXd d = restore_volume(p, d_partial, compensating);
  return self_energy(SideLines(p).polygon(d), rp, q);
}

EnergyValue first_variation_estimate(const Polygon& p, Eigen::Index i, Eigen::Index j,
                                     const RieszParams& rp, const QuadratureSpec& q) {
  if (i == j) throw Error(ErrorCode::InvalidArgument, "the reference side must differ from side i");
  if (i < 0 || j < 0 || i >= p.size() || j >= p.size())
    throw Error(ErrorCode::InvalidArgument, "side index out of range");
  const double len_i = (p.vertex(i + 1) - p.vertex(i)).norm();
  const EnergyValue ai = side_average_estimate(p, i, rp, q);
  const EnergyValue aj = side_average_estimate(p, j, rp, q);
  return {2.0 * len_i * (ai.value - aj.value), 2.0 * len_i * (ai.error_estimate + aj.error_estimate)};
}

CriticalityReport criticality_residual(const Polygon& p, const RieszParams& rp,
                                       const QuadratureSpec& q) {
  const auto n = static_cast<std::size_t>(p.size());
  std::vector<EnergyValue> avg(n);
  quad::parallel_for(n, [&](std::size_t k) {
    avg[k] = side_average_estimate(p, static_cast<Eigen::Index>(k), rp, q);
  });
  CriticalityReport report;
  double max_err = 0.0;
  for (const auto& a : avg) {
    report.side_averages.push_back(a.value);
    max_err = std::max(max_err, a.error_estimate);
  }
  const auto [lo, hi] = std::minmax_element(report.side_averages.begin(), report.side_averages.end());
  const double mean = quad::pairwise_sum(report.side_averages) / static_cast<double>(n);
  report.residual = (*hi - *lo) / mean;
  report.quadrature_error = 2.0 * max_err / mean;
  return report;
}

Eigen::VectorXd feasible_probe_direction(const Polygon& p, double max_scale, std::uint64_t seed,
                                         Eigen::Index compensating) {
  std::mt19937_64 rng(seed);
  const SideLines lines(p);
  Eigen::VectorXd dir(p.size() - 1);
  for (int attempt = 0; attempt < 1000; ++attempt) {
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir(i) = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    const double norm = dir.norm();
    if (!(norm > 0.0)) continue;
    dir /= norm;
    try {
      if (lines.feasible(restore_volume(p, Eigen::VectorXd(max_scale * dir), compensating))) return dir;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NoRoot && e.code() != ErrorCode::Infeasible) throw;
    }
  }
  throw Error(ErrorCode::Infeasible, "no direction keeps the polygon feasible at the largest scale");
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k, 0) = x[static_cast<std::size_t>(k)];
    a(k, 1) = 1.0;
    b(k) = y[static_cast<std::size_t>(k)];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  return {coef(0), coef(1)};
}

QuadraticProbe quadratic_bound_probe(const Polygon& p, const Eigen::VectorXd& direction,
                                     const std::vector<double>& scales, const RieszParams& rp,
                                     const QuadratureSpec& q, Eigen::Index compensating) {
  if (direction.size() != p.size() - 1)
    throw Error(ErrorCode::InvalidArgument, "direction must have n - 1 entries");
  const double norm = direction.norm();
  if (!(norm > 0.0)) throw Error(ErrorCode::DegenerateDirection, "the probe direction is zero");
  const Eigen::VectorXd dir = direction / norm;
  const SideLines lines(p);
  const EnergyValue v0 = self_energy(p, rp, q);

  QuadraticProbe probe;
  probe.samples.resize(scales.size());
  quad::parallel_for(scales.size(), [&](std::size_t k) {
    const double t = scales[k];
    const Eigen::VectorXd d = restore_volume(p, Eigen::VectorXd(t * dir), compensating);
    const Polygon moved = lines.polygon(d);
    const EnergyValue v = self_energy(moved, rp, q);
    ProbeSample& s = probe.samples[k];
    s.t = t;
    s.symdiff = symmetric_difference_area(p, moved);
    s.energy_diff = std::abs(v.value - v0.value);
    s.energy_error = v.error_estimate + v0.error_estimate +
                     4.0 * std::numeric_limits<double>::epsilon() * std::abs(v0.value);
    s.used = s.symdiff > 0.0 && s.energy_diff > 10.0 * s.energy_error;
  });
  std::vector<double> lx;
  std::vector<double> ly;
  for (const auto& s : probe.samples)
    if (s.used) {
      lx.push_back(std::log(s.symdiff));
      ly.push_back(std::log(s.energy_diff));
    }
  probe.used = static_cast<int>(lx.size());
  if (lx.size() < 2) {
    probe.slope = std::numeric_limits<double>::quiet_NaN();
    probe.intercept = std::numeric_limits<double>::quiet_NaN();
    return probe;
  }
  std::tie(probe.slope, probe.intercept) = linear_fit(lx, ly);
  return probe;
}

}  // namespace wrl
