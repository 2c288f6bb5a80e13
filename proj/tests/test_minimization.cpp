#include <doctest.h>

#include "support.hpp"

#include <wrl/minimization.hpp>

using namespace wrl;

namespace {

QuadratureSpec tight(double tol) {
  QuadratureSpec q;
  q.target_rel_tol = tol;
  q.refinement_depth = 12;
  return q;
}

const Polygon half_square{Vec2(-0.5, -0.5), Vec2(0.5, -0.5), Vec2(0.5, 0.5), Vec2(-0.5, 0.5)};

/// Second derivative in s of V on the unit-area rectangles e^s x e^-s.
double rectangle_curvature(double alpha) {
  const QuadratureSpec q = tight(1e-12);
  auto v = [&](double s) {
    const double x = 0.5 * std::exp(s);
    const double y = 0.5 * std::exp(-s);
    return self_energy(Polygon{Vec2(-x, -y), Vec2(x, -y), Vec2(x, y), Vec2(-x, y)}, RieszParams(alpha), q).value;
  };
  const double h = 1e-2;
  return (v(h) - 2.0 * v(0.0) + v(-h)) / (h * h);
}

}  // namespace

TEST_CASE("total energy is the perimeter plus gamma times the self energy") {
  const Tension t = tension_from_polygon(half_square);
  const Polygon pent = test::irregular_pentagon();
  const RieszParams rp(1.2);
  for (double gamma : {0.0, 0.3, 7.0}) {
    const EnergyReport r = total_energy(pent, t, gamma, rp);
    CHECK(r.gamma == gamma);
    CHECK(r.perimeter_term == doctest::Approx(anisotropic_perimeter(pent, t)).epsilon(1e-14));
    CHECK(r.nonlocal_term.value == doctest::Approx(self_energy(pent, rp).value).epsilon(1e-14));
    CHECK(r.total == doctest::Approx(r.perimeter_term + gamma * r.nonlocal_term.value).epsilon(1e-14));
  }
  CHECK_THROWS_AS(total_energy(pent, t, -1.0, rp), Error);
}

TEST_CASE("property: mass scaling identity") {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 8; ++trial) {
    const Polygon e = test::random_convex_polygon(rng, 3 + trial);
    const Tension t = tension_from_polygon(centered(test::random_convex_polygon(rng, 5)));
    const MassScaling m = mass_scaling_check(e, t, 0.1 + trial, RieszParams(0.3 + 0.2 * trial), tight(1e-10));
    CHECK(m.lhs == doctest::Approx(m.rhs).epsilon(1e-9));
    CHECK(m.rel_err < 1e-9);
  }
}

TEST_CASE("translations are removed from a variation") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Polygon p = test::random_convex_polygon(rng, 4 + trial % 5);
    const Vec2 x0(test::uniform(rng, -1, 1), test::uniform(rng, -1, 1));
    Eigen::VectorXd shift(p.size());
    const auto ss = sides(p);
    for (Eigen::Index k = 0; k < p.size(); ++k) shift(k) = ss[static_cast<std::size_t>(k)].normal.dot(x0);
    CHECK(remove_translation(p, shift).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::VectorXd d(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) d(k) = test::uniform(rng, -0.1, 0.1);
    const Eigen::VectorXd r = remove_translation(p, d);
    CHECK((remove_translation(p, Eigen::VectorXd(d + shift)) - r).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((remove_translation(p, r) - r).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("Wulff square and hexagon minimise at small gamma and at gamma = 0") {
  const RieszParams rp(1.0);
  MinimizeOptions opts;
  opts.starts = 4;
  for (const Polygon& w : {half_square, centered(unit_area_regular_polygon<double>(6))}) {
    const Tension t = tension_from_polygon(w);
    for (double gamma : {0.0, 1e-3}) {
      const auto r = minimize_over_class(w, t, gamma, feasibility_epsilon(w), rp, {}, opts);
      CHECK(r.converged);
      CHECK(r.d_star.d.cwiseAbs().maxCoeff() < 1e-4);
      CHECK(r.starts.size() == 4);
      CHECK(r.starts[0].start.cwiseAbs().maxCoeff() == 0.0);
      for (const auto& s : r.starts) {
        CHECK(s.sup_norm < 1e-4);
        CHECK(s.total >= r.energy_at_zero.total - 1e-9);
      }
      CHECK(r.energy_at_dstar.total == doctest::Approx(r.energy_at_zero.total).epsilon(1e-9));
    }
  }
}

TEST_CASE("a non-Wulff start moves towards the Wulff shape when gamma = 0") {
  const Tension t = tension_from_polygon(half_square);
  const Polygon rect{Vec2(-0.55, -0.5), Vec2(0.55, -0.5), Vec2(0.55, 0.5), Vec2(-0.55, 0.5)};
  MinimizeOptions opts;
  opts.starts = 2;
  const auto r = minimize_over_class(rect, t, 0.0, feasibility_epsilon(rect), RieszParams(1.0), {}, opts);
  CHECK(r.energy_at_dstar.total < r.energy_at_zero.total);
  CHECK(r.d_star.d.cwiseAbs().maxCoeff() > 1e-3);
}

TEST_CASE("square threshold against the rectangle-family curvature") {
  // On unit-area rectangles e^s x e^-s the square tension gives P = 2 cosh s,
  // so the square stops being a local minimiser at gamma = 2 / (-V''(0)).
  const double alpha = 1.0;
  const double gamma_local = 2.0 / (-rectangle_curvature(alpha));
  ThresholdOptions opts;
  opts.gamma_max = 10.0;
  opts.rel_width = 0.02;
  opts.minimize.starts = 3;
  const auto th = gamma_threshold_estimate(half_square, tension_from_polygon(half_square), feasibility_epsilon(half_square),
                                           RieszParams(alpha), {}, opts);
  CHECK(th.found);
  CHECK(th.lower < th.upper);
  CHECK(th.gamma_hat >= th.lower);
  CHECK(th.gamma_hat <= th.upper);
  CHECK(th.gamma_hat == doctest::Approx(gamma_local).epsilon(0.05));
  opts.gamma_max = 0.5;
  const auto none = gamma_threshold_estimate(half_square, tension_from_polygon(half_square),
                                             feasibility_epsilon(half_square), RieszParams(alpha), {}, opts);
  CHECK_FALSE(none.found);
}

TEST_CASE("split comparison crosses over at the closed-form gamma") {
  // E(single) = P1 + gamma V1, E(two halves) = sqrt(2) P1 + gamma 2^((alpha - 2) / 2) V1.
  const Tension t = tension_from_polygon(half_square);
  for (double alpha : {0.5, 1.0, 1.5}) {
    const RieszParams rp(alpha);
    const double v1 = alpha == 1.0 ? test::unit_square_energy_alpha1() : self_energy(test::unit_square(), rp, tight(1e-10)).value;
    const double p1 = 2.0;
    const double crossover = (std::sqrt(2.0) - 1.0) * p1 / ((1.0 - std::pow(2.0, 0.5 * (alpha - 2.0))) * v1);
    const auto below = split_comparison(t, 0.98 * crossover, {0.5, 0.5}, rp);
    const auto above = split_comparison(t, 1.02 * crossover, {0.5, 0.5}, rp);
    CHECK(below.winner == "single");
    CHECK(above.winner == "split");
    CHECK(below.single_energy == doctest::Approx(p1 + 0.98 * crossover * v1).epsilon(1e-6));
    const auto at = split_comparison(t, crossover, {0.5, 0.5}, rp);
    CHECK(at.single_energy == doctest::Approx(at.split_energy).epsilon(1e-6));
  }
  const auto whole = split_comparison(t, 2.0, {1.0}, RieszParams(1.0));
  CHECK(whole.winner == "tie");
  CHECK(whole.single_energy == doctest::Approx(whole.split_energy).epsilon(1e-14));
  const auto three = split_comparison(t, 1e-3, {0.2, 0.3, 0.5}, RieszParams(1.0));
  CHECK(three.winner == "single");
  CHECK_THROWS_AS(split_comparison(t, 1.0, {0.5, 0.6}, RieszParams(1.0)), Error);
}

TEST_CASE("rigidity diagnostic: Wulff shape and chamfered square") {
  const Tension t = tension_from_polygon(half_square);
  const RieszParams rp(1.0);
  const auto wulff = rigidity_diagnostic(half_square, t, rp);
  CHECK(wulff.free_sides.empty());
  CHECK(wulff.gamma_aligned_sides.size() == 4);
  CHECK(wulff.potential_spread == 0.0);

  const Polygon chamfered{Vec2(-0.5, -0.5), Vec2(0.5, -0.5), Vec2(0.5, 0.3), Vec2(0.3, 0.5), Vec2(-0.5, 0.5)};
  const auto r = rigidity_diagnostic(chamfered, t, rp, {}, 1e-6, 16);
  REQUIRE(r.free_sides.size() == 1);
  const Eigen::Index chamfer = side_with_normal(chamfered, Vec2(1, 1).normalized());
  CHECK(r.free_sides[0] == chamfer);
  CHECK(r.gamma_aligned_sides.size() == 4);
  CHECK(r.potential_spread > 0.0);
  CHECK(r.v0_estimate == doctest::Approx(side_average_potential(chamfered, chamfer, rp)).epsilon(1e-2));
  const auto rotated = rigidity_diagnostic(apply_isometry(half_square, rotation_about<double>(Vec2::Zero(), 0.3)), t, rp);
  CHECK(rotated.free_sides.size() == 4);
  CHECK(rotated.gamma_aligned_sides.empty());
  const auto doubled = rigidity_diagnostic(chamfered, t, rp, {}, 1e-6, 32);
  CHECK(doubled.free_sides == r.free_sides);
  CHECK(doubled.potential_spread == doctest::Approx(r.potential_spread).epsilon(1e-6));
}

TEST_CASE("critical-point search: monotone histories and the seed polygon") {
  SearchOptions opts;
  opts.starts = 2;
  opts.max_evaluations = 40;
  const auto r = search_noncritical(5, RieszParams(1.0), {}, opts);
  REQUIRE(r.runs.size() == 2);
  CHECK(r.runs[0].residual < 1e-8);
  CHECK(r.runs[0].is_member);
  for (const auto& run : r.runs) {
    CHECK(area(run.polygon) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(run.evaluations <= opts.max_evaluations);
    REQUIRE_FALSE(run.history.empty());
    for (std::size_t k = 1; k < run.history.size(); ++k) CHECK(run.history[k] < run.history[k - 1]);
    CHECK(run.history.back() == doctest::Approx(run.residual));
  }
  for (const auto& c : r.candidates) CHECK(c.residual < opts.report_tol);
}
