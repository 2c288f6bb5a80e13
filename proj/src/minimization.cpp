#include <wrl/minimization.hpp>

#include <wrl/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace wrl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Reduced objective d_partial -> P_psi + gamma V on the volume-restored polygon.
class ReducedEnergy {
 public:
  ReducedEnergy(const Polygon& base, const Tension& t, double gamma, const RieszParams& rp,
                const QuadratureSpec& q, Eigen::Index compensating)
      : base_(base), lines_(base), tension_(t), gamma_(gamma), rp_(rp), q_(q),
        c_(compensating < 0 ? default_compensating(base) : compensating) {
    psi_.resize(lines_.size());
    for (Eigen::Index k = 0; k < lines_.size(); ++k) psi_(k) = t(lines_.normals()[static_cast<std::size_t>(k)]);
  }

  Eigen::Index compensating() const { return c_; }

  /// +inf outside the feasible set.
  double value(const Eigen::VectorXd& x) const {
    try {
      return report(x).total;
    } catch (const Error&) {
      return kInf;
    }
  }

  EnergyReport report(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd d = restore_volume(base_, x, c_);
    return total_energy(lines_.polygon(d), tension_, gamma_, rp_, q_);
  }

  /// d/dx_k = G_k - (l_k / l_c) G_c with G = J^T psi + 2 gamma (int_{L_k} v).
  Eigen::VectorXd gradient(const Eigen::VectorXd& x) const {
    const Eigen::VectorXd d = restore_volume(base_, x, c_);
    const Polygon poly = lines_.polygon(d);
    const Eigen::VectorXd len = lines_.lengths(d);
    Eigen::VectorXd g = lines_.length_jacobian().transpose() * psi_;
    if (gamma_ > 0.0) {
      const auto n = static_cast<std::size_t>(lines_.size());
      std::vector<double> flux(n);
      quad::parallel_for(n, [&](std::size_t k) {
        const Eigen::Index side = side_with_normal(poly, lines_.normals()[k]);
        flux[k] = side_potential_integral(poly, side, rp_, q_).value;
      });
      for (std::size_t k = 0; k < n; ++k) g(static_cast<Eigen::Index>(k)) += 2.0 * gamma_ * flux[k];
    }
    Eigen::VectorXd out(lines_.size() - 1);
    for (Eigen::Index k = 0, m = 0; k < lines_.size(); ++k)
      if (k != c_) out(m++) = g(k) - len(k) / len(c_) * g(c_);
    return out;
  }

 private:
  const Polygon& base_;
  SideLines lines_;
  const Tension& tension_;
  double gamma_;
  RieszParams rp_;
  QuadratureSpec q_;
  Eigen::Index c_;
  Eigen::VectorXd psi_;
};

struct DescentResult {
  Eigen::VectorXd x;
  double f = kInf;
  int iterations = 0;
  bool converged = false;
};

double projected_gradient_norm(const Eigen::VectorXd& x, const Eigen::VectorXd& g, double bound) {
  return ((x - g).cwiseMax(-bound).cwiseMin(bound) - x).lpNorm<Eigen::Infinity>();
}

/// Projected BFGS on [-bound, bound]^m with Armijo backtracking along the projected path.
DescentResult projected_bfgs(const ReducedEnergy& obj, Eigen::VectorXd x, double bound, int max_iters,
                             double tol) {
  const Eigen::Index m = x.size();
  DescentResult out;
  x = x.cwiseMax(-bound).cwiseMin(bound);
  double f = obj.value(x);
  if (!std::isfinite(f)) return out;
  Eigen::VectorXd g = obj.gradient(x);
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(m, m);
  bool fresh = true;
  int iter = 0;
  for (; iter < max_iters; ++iter) {
    if (projected_gradient_norm(x, g, bound) < tol) {
      out.converged = true;
      break;
    }
    // Variables pinned at a bound with the gradient pushing outward stay fixed.
    Eigen::VectorXd free = Eigen::VectorXd::Ones(m);
    for (Eigen::Index k = 0; k < m; ++k)
      if ((x(k) <= -bound && g(k) > 0.0) || (x(k) >= bound && g(k) < 0.0)) free(k) = 0.0;
    Eigen::VectorXd dir = -(free.asDiagonal() * h * free.asDiagonal() * g);
    if (dir.dot(g) >= 0.0) {
      h.setIdentity();
      fresh = true;
      dir = -(free.asDiagonal() * g);
    }
    // Keep the first trial inside a fraction of the box.
    double step = std::min(1.0, 0.5 * bound / std::max(dir.lpNorm<Eigen::Infinity>(), 1e-300));
    bool accepted = false;
    Eigen::VectorXd x_new;
    double f_new = kInf;
    for (int ls = 0; ls < 50; ++ls, step *= 0.5) {
      x_new = (x + step * dir).cwiseMax(-bound).cwiseMin(bound);
      if ((x_new - x).lpNorm<Eigen::Infinity>() == 0.0) break;
      f_new = obj.value(x_new);
      if (f_new <= f + 1e-4 * g.dot(x_new - x)) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (fresh) break;
      h.setIdentity();
      fresh = true;
      continue;
    }
    const Eigen::VectorXd g_new = obj.gradient(x_new);
    const Eigen::VectorXd s = x_new - x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (fresh) h *= sy / y.squaredNorm();
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd v = Eigen::MatrixXd::Identity(m, m) - rho * s * y.transpose();
      h = v * h * v.transpose() + rho * s * s.transpose();
      fresh = false;
    }
    x = x_new;
    f = f_new;
    g = g_new;
  }
  if (!out.converged && projected_gradient_norm(x, g, bound) < tol) out.converged = true;
  out.x = x;
  out.f = f;
  out.iterations = iter;
  return out;
}

}  // namespace

EnergyReport total_energy(const Polygon& e, const Tension& t, double gamma, const RieszParams& p,
                          const QuadratureSpec& q) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  EnergyReport r;
  r.gamma = gamma;
  r.perimeter_term = anisotropic_perimeter(e, t);
  r.nonlocal_term = self_energy(e, p, q);
  r.total = r.perimeter_term + gamma * r.nonlocal_term.value;
  return r;
}

MassScaling mass_scaling_check(const Polygon& e, const Tension& t, double gamma, const RieszParams& p,
                               const QuadratureSpec& q) {
  const double m = area(e);
  const Polygon unit = scale(e, 1.0 / std::sqrt(m));
  MassScaling out;
  out.lhs = total_energy(e, t, gamma, p, q).total;
  out.rhs = std::sqrt(m) * (anisotropic_perimeter(unit, t) +
                            gamma * std::pow(m, 1.5 - 0.5 * p.alpha) * self_energy(unit, p, q).value);
  out.rel_err = std::abs(out.lhs - out.rhs) / std::abs(out.lhs);
  return out;
}

Eigen::VectorXd remove_translation(const Polygon& p, const Eigen::VectorXd& d) {
  const auto s = sides(p);
  Eigen::MatrixXd n(static_cast<Eigen::Index>(s.size()), 2);
  for (std::size_t k = 0; k < s.size(); ++k) n.row(static_cast<Eigen::Index>(k)) = s[k].normal.transpose();
  const Eigen::Vector2d x0 = n.colPivHouseholderQr().solve(d);
  return d - n * x0;
}

MinimizationResult minimize_over_class(const Polygon& p, const Tension& t, double gamma, double epsilon,
                                       const RieszParams& rp, const QuadratureSpec& q,
                                       const MinimizeOptions& opts) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be positive");
  if (opts.starts < 1) throw Error(ErrorCode::InvalidArgument, "at least one start is needed");
  const ReducedEnergy obj(p, t, gamma, rp, q, opts.compensating);
  const Eigen::Index m = p.size() - 1;
  const double bound = epsilon * (1.0 - 1e-9);

  std::mt19937_64 rng(opts.seed);
  std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(m)};
  while (static_cast<int>(starts.size()) < opts.starts) {
    Eigen::VectorXd x(m);
    for (Eigen::Index k = 0; k < m; ++k) x(k) = epsilon * (uniform01(rng) - 0.5);
    starts.push_back(x);
  }

  MinimizationResult result;
  result.energy_at_zero = obj.report(Eigen::VectorXd::Zero(m));
  std::vector<DescentResult> runs(starts.size());
  quad::parallel_for(starts.size(), [&](std::size_t k) {
    runs[k] = projected_bfgs(obj, starts[k], bound, opts.max_iters, opts.tol);
  });

  std::size_t best = 0;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    StartRecord rec;
    rec.start = starts[k];
    rec.total = runs[k].f;
    rec.iterations = runs[k].iterations;
    rec.converged = runs[k].converged;
    if (runs[k].x.size() == m) {
      rec.d_star = remove_translation(p, restore_volume(p, runs[k].x, obj.compensating()));
      rec.sup_norm = rec.d_star.lpNorm<Eigen::Infinity>();
    } else {
      rec.sup_norm = kInf;
    }
    result.starts.push_back(rec);
    if (runs[k].f < runs[best].f) best = k;
  }
  if (!std::isfinite(runs[best].f)) throw Error(ErrorCode::Infeasible, "no feasible start point");
  result.d_star = {result.starts[best].d_star, epsilon};
  result.energy_at_dstar = obj.report(runs[best].x);
  result.converged = runs[best].converged;
  for (const auto& r : runs) result.iterations += r.iterations;
  return result;
}

ThresholdEstimate gamma_threshold_estimate(const Polygon& p, const Tension& t, double epsilon,
                                           const RieszParams& rp, const QuadratureSpec& q,
                                           const ThresholdOptions& opts) {
  ThresholdEstimate est;
  auto holds = [&](double gamma) {
    ++est.evaluations;
    return minimize_over_class(p, t, gamma, epsilon, rp, q, opts.minimize).d_star.d.lpNorm<Eigen::Infinity>() <
           opts.predicate_tol;
  };
  if (holds(opts.gamma_max)) {
    est.found = false;
    est.lower = est.upper = est.gamma_hat = opts.gamma_max;
    return est;
  }
  double lo = 0.0;
  double hi = opts.gamma_max;
  for (int k = 0; k < opts.max_bisections && hi - lo > opts.rel_width * hi; ++k) {
    const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.1 * hi;
    (holds(mid) ? lo : hi) = mid;
  }
  est.lower = lo;
  est.upper = hi;
  est.gamma_hat = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
  return est;
}

RigidityReport rigidity_diagnostic(const Polygon& e, const Tension& t, const RieszParams& p,
                                   const QuadratureSpec& q, double angular_tol, int samples_per_side) {
  if (samples_per_side < 16) throw Error(ErrorCode::InvalidArgument, "at least 16 samples per side");
  RigidityReport report;
  report.samples_per_side = samples_per_side;
  const auto wulff_sides = sides(t.hull());
  const auto es = sides(e);
  for (std::size_t k = 0; k < es.size(); ++k) {
    double best = kInf;
    for (const auto& w : wulff_sides)
      best = std::min(best, std::atan2(std::abs(cross2(es[k].normal, w.normal)), es[k].normal.dot(w.normal)));
    (best <= angular_tol ? report.gamma_aligned_sides : report.free_sides).push_back(static_cast<Eigen::Index>(k));
  }
  if (report.free_sides.empty()) return report;

  const auto& rule = quad::gauss_legendre(samples_per_side);
  std::vector<double> lo(report.free_sides.size(), kInf);
  std::vector<double> hi(report.free_sides.size(), -kInf);
  std::vector<double> integral(report.free_sides.size());
  quad::parallel_for(report.free_sides.size(), [&](std::size_t f) {
    const auto& side = es[static_cast<std::size_t>(report.free_sides[f])];
    auto v = [&](double s) { return potential(e, Vec2(side.start + s * (side.end - side.start)), p, q); };
    // Parameters: endpoints and Gauss nodes; interior extrema are refined by golden section.
    std::vector<double> ts{0.0};
    for (double x : rule.nodes) ts.push_back(0.5 * (1.0 + x));
    ts.push_back(1.0);
    std::vector<double> vs;
    for (double s : ts) vs.push_back(v(s));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      lo[f] = std::min(lo[f], vs[k]);
      hi[f] = std::max(hi[f], vs[k]);
    }
    const double golden = 0.5 * (std::sqrt(5.0) - 1.0);
    for (std::size_t k = 1; k + 1 < ts.size(); ++k) {
      const bool is_max = vs[k] >= vs[k - 1] && vs[k] >= vs[k + 1];
      const bool is_min = vs[k] <= vs[k - 1] && vs[k] <= vs[k + 1];
      if (!is_max && !is_min) continue;
      const double sign = is_max ? -1.0 : 1.0;
      double a = ts[k - 1];
      double b = ts[k + 1];
      double c = b - golden * (b - a);
      double d = a + golden * (b - a);
      double fc = sign * v(c);
      double fd = sign * v(d);
      while (b - a > 1e-9) {
        if (fc < fd) {
          b = d, d = c, fd = fc;
          c = b - golden * (b - a);
          fc = sign * v(c);
        } else {
          a = c, c = d, fc = fd;
          d = a + golden * (b - a);
          fd = sign * v(d);
        }
      }
      const double extreme = sign * std::min(fc, fd);
      lo[f] = std::min(lo[f], extreme);
      hi[f] = std::max(hi[f], extreme);
    }
    integral[f] = side_potential_integral(e, report.free_sides[f], p, q).value;
  });
  double total_len = 0.0;
  for (Eigen::Index s : report.free_sides) total_len += es[static_cast<std::size_t>(s)].length;
  report.potential_spread = *std::max_element(hi.begin(), hi.end()) - *std::min_element(lo.begin(), lo.end());
  report.v0_estimate = quad::pairwise_sum(integral) / total_len;
  return report;
}

SplitComparison split_comparison(const Tension& t, double gamma, const std::vector<double>& fractions,
                                 const RieszParams& p, const QuadratureSpec& q) {
  if (!(gamma >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  if (fractions.empty()) throw Error(ErrorCode::InvalidArgument, "no mass fractions given");
  double sum = 0.0;
  for (double m : fractions) {
    if (!(m > 0.0)) throw Error(ErrorCode::InvalidArgument, "mass fractions must be positive");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "mass fractions must sum to 1");
  const Polygon w1 = with_area(centered(wulff_shape(t)), 1.0);
  const double per1 = anisotropic_perimeter(w1, t);
  const EnergyValue v1 = self_energy(w1, p, q);
  SplitComparison out;
  out.single_energy = per1 + gamma * v1.value;
  std::vector<double> parts;
  for (double m : fractions)
    parts.push_back(std::sqrt(m) * per1 + gamma * std::pow(m, 0.5 * (4.0 - p.alpha)) * v1.value);
  out.split_energy = quad::pairwise_sum(parts);
  const double margin = 1e-12 * std::max(1.0, std::abs(out.single_energy));
  if (out.single_energy < out.split_energy - margin) out.winner = "single";
  else if (out.split_energy < out.single_energy - margin) out.winner = "split";
  else out.winner = "tie";
  return out;
}

namespace {

/// Polygon with side k on {x . (cos a_k, sin a_k) = h_k}; nullopt unless every line gives a side.
std::optional<Polygon> polygon_from_fan(const Eigen::VectorXd& angles, const Eigen::VectorXd& offsets) {
  const Eigen::Index n = angles.size();
  std::vector<Vec2> normals;
  for (Eigen::Index k = 0; k < n; ++k) normals.emplace_back(std::cos(angles(k)), std::sin(angles(k)));
  for (Eigen::Index k = 0; k < n; ++k) {
    const double turn = cross2(normals[static_cast<std::size_t>(k)], normals[static_cast<std::size_t>((k + 1) % n)]);
    if (!(turn > 1e-9)) return std::nullopt;  // consecutive normals must turn counter-clockwise by < pi
  }
  double total = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& a = normals[static_cast<std::size_t>(k)];
    const auto& b = normals[static_cast<std::size_t>((k + 1) % n)];
    total += std::atan2(cross2(a, b), a.dot(b));
  }
  if (std::abs(total - 2.0 * std::numbers::pi) > 1e-6) return std::nullopt;
  std::vector<Vec2> verts;
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index prev = (k + n - 1) % n;
    verts.push_back(detail::line_intersection(normals[static_cast<std::size_t>(prev)], offsets(prev),
                                              normals[static_cast<std::size_t>(k)], offsets(k)));
  }
  double scale = 0.0;
  for (const auto& v : verts) scale = std::max(scale, v.norm());
  for (Eigen::Index k = 0; k < n; ++k) {
    const Vec2 e = verts[static_cast<std::size_t>((k + 1) % n)] - verts[static_cast<std::size_t>(k)];
    if (!(e.dot(perp(normals[static_cast<std::size_t>(k)])) > 1e-9 * scale)) return std::nullopt;
  }
  auto poly = Polygon::try_from(detail::to_points(verts));
  if (!poly || poly->size() != n) return std::nullopt;
  return with_area(*poly, 1.0);
}

}  // namespace

SearchResult search_noncritical(int n, const RieszParams& p, const QuadratureSpec& q,
                                const SearchOptions& opts) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "n must be at least 3");
  const Polygon seed = opts.seed_polygon ? with_area(centered(*opts.seed_polygon), 1.0)
                                         : unit_area_regular_polygon<double>(n);
  if (seed.size() != n) throw Error(ErrorCode::InvalidArgument, "seed polygon must have n sides");
  const auto seed_sides = sides(seed);
  Eigen::VectorXd angles0(n);
  Eigen::VectorXd offsets0(n);
  for (int k = 0; k < n; ++k) {
    const auto& s = seed_sides[static_cast<std::size_t>(k)];
    angles0(k) = std::atan2(s.normal.y(), s.normal.x());
    offsets0(k) = s.offset();
  }
  for (int k = 1; k < n; ++k)
    while (angles0(k) <= angles0(k - 1)) angles0(k) += 2.0 * std::numbers::pi;

  const int dims = opts.free_normals ? 2 * n : n;
  auto decode = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd offsets = offsets0 + z.head(n);
    Eigen::VectorXd angles = angles0;
    if (opts.free_normals) angles += z.tail(n);
    return polygon_from_fan(angles, offsets);
  };
  auto residual_of = [&](const Polygon& poly) { return criticality_residual(poly, p, q).residual; };

  std::mt19937_64 rng(opts.seed);
  std::vector<Eigen::VectorXd> starts{Eigen::VectorXd::Zero(dims)};
  while (static_cast<int>(starts.size()) < opts.starts) {
    Eigen::VectorXd z(dims);
    for (int k = 0; k < n; ++k) z(k) = 0.3 * offsets0(k) * (2.0 * uniform01(rng) - 1.0);
    if (opts.free_normals)
      for (int k = 0; k < n; ++k) z(n + k) = 0.2 * (2.0 * std::numbers::pi / n) * (2.0 * uniform01(rng) - 1.0);
    if (decode(z)) starts.push_back(z);
  }

  SearchResult result;
  result.runs.resize(starts.size(), SearchCandidate{seed, 0.0, false, {}, 0});
  quad::parallel_for(starts.size(), [&](std::size_t s) {
    Eigen::VectorXd z = starts[s];
    Polygon best = *decode(z);
    double f = residual_of(best);
    SearchCandidate& run = result.runs[s];
    run.history.push_back(f);
    int evaluations = 1;
    double step = opts.initial_step;
    while (step >= opts.min_step && evaluations < opts.max_evaluations && f > 0.0) {
      bool improved = false;
      for (int k = 0; k < dims && !improved && evaluations < opts.max_evaluations; ++k)
        for (double sign : {1.0, -1.0}) {
          Eigen::VectorXd trial = z;
          trial(k) += sign * step * (k < n ? std::sqrt(area(seed)) : 1.0);
          const auto poly = decode(trial);
          if (!poly) continue;
          const double ft = residual_of(*poly);
          ++evaluations;
          if (ft < f) {
            z = trial;
            f = ft;
            best = *poly;
            run.history.push_back(f);
            improved = true;
            break;
          }
        }
      if (!improved) step *= 0.5;
    }
    run.polygon = best;
    run.residual = f;
    run.evaluations = evaluations;
    run.is_member = verify_class_membership(best).is_member;
  });
  for (const auto& run : result.runs)
    if (run.residual < opts.report_tol) result.candidates.push_back(run);
  return result;
}

}  // namespace wrl
