#include "scenarios.hpp"

#include <wrl/quadrature.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace wrl::cli {

namespace {

double parse_number(const std::string& s, const char* what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || s.find_first_not_of(" \t", used) != std::string::npos)
    throw Error(ErrorCode::Config, std::string("cannot read ") + what + " from '" + s + "'");
  return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep))
    if (item.find_first_not_of(" \t") != std::string::npos) out.push_back(item);
  return out;
}

RieszParams riesz(const Common& c) { return RieszParams(c.alpha); }

Eigen::Index compensating_index(const Polygon& p, int c) {
  if (c < 0) return default_compensating(p);
  if (c >= p.size()) throw Error(ErrorCode::Config, "compensating side index out of range");
  return c;
}

io::CsvTable side_table(const Polygon& p, const std::vector<double>& averages) {
  io::CsvTable csv({"side", "length", "normal_x", "normal_y", "side_average"});
  const auto ss = sides(p);
  for (std::size_t i = 0; i < ss.size(); ++i)
    csv.add_row({static_cast<long long>(i), ss[i].length, ss[i].normal.x(), ss[i].normal.y(), averages[i]});
  return csv;
}

std::vector<double> gamma_values(const std::optional<double>& gamma, const std::string& sweep) {
  if (gamma) return {*gamma};
  if (!sweep.empty()) return parse_range(sweep);
  throw Error(ErrorCode::Config, "either gamma or a gamma sweep is required");
}

json membership_json(const Polygon& p) {
  const auto m = verify_class_membership(p);
  return {{"is_member", m.is_member}, {"reason", m.reason}};
}

}  // namespace

Points2<double> parse_points(const std::string& s) {
  const auto items = split(s, ';');
  Points2<double> pts(2, static_cast<Eigen::Index>(items.size()));
  for (std::size_t k = 0; k < items.size(); ++k) {
    const auto xy = split(items[k], ',');
    if (xy.size() != 2) throw Error(ErrorCode::Config, "points must be written as x,y;x,y;...");
    pts(0, static_cast<Eigen::Index>(k)) = parse_number(xy[0], "a coordinate");
    pts(1, static_cast<Eigen::Index>(k)) = parse_number(xy[1], "a coordinate");
  }
  return pts;
}

std::vector<double> parse_range(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw Error(ErrorCode::Config, "ranges are written a:b:k");
  const double a = parse_number(parts[0], "a range start");
  const double b = parse_number(parts[1], "a range end");
  const double kd = parse_number(parts[2], "a range count");
  if (kd < 1 || kd != std::floor(kd) || kd > 10000) throw Error(ErrorCode::Config, "range count must be a positive integer");
  const int k = static_cast<int>(kd);
  if (k == 1) return {a};
  if (!(b > a)) throw Error(ErrorCode::Config, "range end must exceed its start");
  std::vector<double> out(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const double s01 = static_cast<double>(i) / (k - 1);
    out[static_cast<std::size_t>(i)] =
        a > 0.0 ? std::exp(std::log(a) + s01 * (std::log(b) - std::log(a))) : a + s01 * (b - a);
  }
  out.front() = a;
  out.back() = b;
  return out;
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  for (const auto& item : split(s, ',')) out.push_back(parse_number(item, "a list entry"));
  return out;
}

Polygon PolygonSource::resolve() const {
  const int chosen = (regular > 0) + (n > 0) + !vertices.empty() + !file.empty();
  if (chosen != 1)
    throw Error(ErrorCode::Config, "give exactly one of --regular, --n, --vertices or --polygon-file");
  if (angle && n <= 0) throw Error(ErrorCode::Config, "--angle needs --n");
  if (regular > 0) return build_symmetric_polygon(SymmetricPolygonSpec<double>{regular, std::nullopt});
  if (n > 0) return build_symmetric_polygon(SymmetricPolygonSpec<double>{n, angle});
  if (!vertices.empty()) return Polygon(parse_points(vertices));
  std::ifstream in(file);
  if (!in) throw Error(ErrorCode::Config, "cannot open polygon file " + file);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::Config, "polygon file is not valid JSON: " + std::string(e.what()));
  }
  return io::polygon_from_json(j);
}

json PolygonSource::describe() const {
  json d = json::object();
  if (regular > 0) d["regular"] = regular;
  if (n > 0) d["n"] = n;
  if (angle) d["angle"] = *angle;
  if (!vertices.empty()) d["vertices"] = vertices;
  if (!file.empty()) d["file"] = file;
  return d;
}

Tension TensionSource::resolve(const std::optional<Polygon>& own) const {
  if (!wulff_vertices.empty()) return Tension(parse_points(wulff_vertices));
  if (wulff_regular > 0)
    return tension_from_polygon(centered(build_symmetric_polygon(SymmetricPolygonSpec<double>{wulff_regular, std::nullopt})));
  if (!own) throw Error(ErrorCode::Config, "a Wulff shape is required (--wulff-regular or --wulff-vertices)");
  return tension_from_polygon(centered(*own));
}

json TensionSource::describe() const {
  json d = json::object();
  if (!wulff_vertices.empty()) d["wulff_vertices"] = wulff_vertices;
  else if (wulff_regular > 0) d["wulff_regular"] = wulff_regular;
  else d["own_shape"] = true;
  return d;
}

json Common::describe() const {
  return {{"alpha", alpha}, {"seed", seed}, {"quadrature", io::to_json(quad)}};
}

json describe(const WulffConfig& c) {
  json d = c.common.describe();
  d["polygon"] = c.polygon.describe();
  if (!c.generators.empty()) d["generators"] = c.generators;
  return d;
}

json describe(const EnergyConfig& c) {
  json d = c.common.describe();
  d["polygon"] = c.polygon.describe();
  d["tension"] = c.tension.describe();
  d["gamma"] = c.gamma;
  return d;
}

json describe(const CriticalityConfig& c) {
  json d = c.common.describe();
  d["polygon"] = c.polygon.describe();
  d["threshold"] = c.threshold;
  return d;
}

json describe(const QuadboundConfig& c) {
  json d = c.common.describe();
  d["polygon"] = c.polygon.describe();
  d["scales"] = c.scales;
  d["directions"] = c.directions;
  d["compensating"] = c.compensating;
  d["slope_threshold"] = c.slope_threshold;
  return d;
}

json describe(const MinimizeConfig& c) {
  json d = c.common.describe();
  d["polygon"] = c.polygon.describe();
  d["tension"] = c.tension.describe();
  if (c.gamma) d["gamma"] = *c.gamma;
  if (!c.gamma_sweep.empty()) d["gamma_sweep"] = c.gamma_sweep;
  d["threshold"] = c.threshold;
  d["gamma_max"] = c.gamma_max;
  d["starts"] = c.starts;
  d["max_iters"] = c.max_iters;
  d["tol"] = c.tol;
  if (c.epsilon) d["epsilon"] = *c.epsilon;
  d["compensating"] = c.compensating;
  d["report_tol"] = c.report_tol;
  return d;
}

json describe(const RigidityConfig& c) {
  json d = c.common.describe();
  d["polygon"] = c.polygon.describe();
  d["tension"] = c.tension.describe();
  d["samples"] = c.samples;
  d["angular_tol"] = c.angular_tol;
  return d;
}

json describe(const SplitConfig& c) {
  json d = c.common.describe();
  d["tension"] = c.tension.describe();
  if (c.gamma) d["gamma"] = *c.gamma;
  else d["gamma_sweep"] = c.gamma_sweep;
  d["fractions"] = c.fractions;
  return d;
}

json describe(const SearchConfig& c) {
  json d = c.common.describe();
  d["sides"] = c.sides;
  d["starts"] = c.starts;
  d["max_evaluations"] = c.max_evaluations;
  d["initial_step"] = c.initial_step;
  d["report_tol"] = c.report_tol;
  d["free_normals"] = c.free_normals;
  return d;
}

json describe(const SelftestConfig& c) { return c.common.describe(); }

Artifacts run_wulff(const WulffConfig& c) {
  if (c.generators.empty() == !c.polygon.given())
    throw Error(ErrorCode::Config, "give either --generators or a polygon");
  const Tension t = c.generators.empty() ? tension_from_polygon(centered(c.polygon.resolve()))
                                         : Tension(parse_points(c.generators));
  const Polygon w = wulff_shape(t);
  // Round trip: the tension rebuilt from W must agree with psi on every normal of W.
  const Tension back = tension_from_polygon(w);
  double round_trip = 0.0;
  io::CsvTable csv({"side", "normal_x", "normal_y", "psi", "support", "length"});
  const auto ss = sides(w);
  for (std::size_t i = 0; i < ss.size(); ++i) {
    round_trip = std::max(round_trip, std::abs(t(ss[i].normal) - back(ss[i].normal)));
    csv.add_row({static_cast<long long>(i), ss[i].normal.x(), ss[i].normal.y(), t(ss[i].normal),
                 ss[i].offset(), ss[i].length});
  }
  const Polygon w1 = with_area(w, 1.0);
  const double perim = anisotropic_perimeter(w, t);
  json redundant = json::array();
  for (auto k : t.redundant_generators()) redundant.push_back(static_cast<long long>(k));

  Artifacts a;
  a.results = {{"tension", io::to_json(t)},
               {"wulff_shape", io::to_json(w)},
               {"unit_area_wulff_shape", io::to_json(w1)},
               {"is_minimal", t.is_minimal()},
               {"redundant_generators", redundant},
               {"round_trip_error", round_trip},
               {"area", area(w)},
               {"anisotropic_perimeter", perim},
               {"perimeter_over_twice_area", perim / (2.0 * area(w))},
               {"membership", membership_json(w1)}};
  a.csv = std::move(csv);
  a.svg = io::svg_polygons({{w, "#1f4e79", "#dbe8f5", 1.5}});
  return a;
}

Artifacts run_energy(const EnergyConfig& c) {
  const Polygon e = c.polygon.resolve();
  const Tension t = c.tension.resolve(e);
  const RieszParams p = riesz(c.common);
  const EnergyReport report = total_energy(e, t, c.gamma, p, c.common.quad);
  const AnalyticBounds bounds = analytic_bounds(e, e, p);
  const EnergyValue centre = potential_estimate(e, e.centroid(), p, c.common.quad);
  const MassScaling ms = mass_scaling_check(e, t, c.gamma, p, c.common.quad);

  std::vector<double> averages(static_cast<std::size_t>(e.size()));
  quad::parallel_for(averages.size(), [&](std::size_t i) {
    averages[i] = side_average_potential(e, static_cast<Eigen::Index>(i), p, c.common.quad);
  });

  Artifacts a;
  a.results = {{"polygon", io::to_json(e)},
               {"area", area(e)},
               {"energy", io::to_json(report)},
               {"bounds", io::to_json(bounds)},
               {"potential_at_centroid", io::to_json(centre)},
               {"potential_within_bound", centre.value <= bounds.potential_bound},
               {"self_energy_within_bound", report.nonlocal_term.value <= bounds.interaction_bound},
               {"mass_scaling", {{"lhs", ms.lhs}, {"rhs", ms.rhs}, {"rel_err", ms.rel_err}}}};
  a.csv = side_table(e, averages);
  a.svg = io::svg_polygons({{e, "#1f4e79", "#dbe8f5", 1.5}});
  return a;
}

Artifacts run_criticality(const CriticalityConfig& c) {
  const Polygon e = c.polygon.resolve();
  const CriticalityReport r = criticality_residual(e, riesz(c.common), c.common.quad);
  Artifacts a;
  a.results = {{"polygon", io::to_json(e)},
               {"report", io::to_json(r)},
               {"threshold", c.threshold},
               {"critical", r.residual < c.threshold},
               {"membership", membership_json(e)}};
  a.csv = side_table(e, r.side_averages);
  a.svg = io::svg_polygons({{e, "#1f4e79", "#dbe8f5", 1.5}});
  return a;
}

Artifacts run_quadbound(const QuadboundConfig& c) {
  if (c.directions < 1) throw Error(ErrorCode::Config, "at least one direction is needed");
  const Polygon e = c.polygon.resolve();
  const RieszParams p = riesz(c.common);
  const Eigen::Index comp = compensating_index(e, c.compensating);
  const auto scales = parse_range(c.scales);
  const double max_scale = *std::max_element(scales.begin(), scales.end());

  json probes = json::array();
  io::CsvTable csv({"direction", "t", "symdiff", "energy_diff", "energy_error", "used"});
  std::vector<io::SvgSeries> series;
  static const char* colors[] = {"#1f4e79", "#b5442c", "#3a7d2c", "#7a4f9a", "#b58a1e", "#2c8a8a"};
  double min_slope = std::numeric_limits<double>::infinity();
  bool all_finite = true;
  for (int k = 0; k < c.directions; ++k) {
    const Eigen::VectorXd dir = feasible_probe_direction(e, max_scale, c.common.seed + static_cast<std::uint64_t>(k), comp);
    const QuadraticProbe probe = quadratic_bound_probe(e, dir, scales, p, c.common.quad, comp);
    json pj = io::to_json(probe);
    pj["direction"] = io::to_json(dir);
    probes.push_back(pj);
    if (std::isfinite(probe.slope)) min_slope = std::min(min_slope, probe.slope);
    else all_finite = false;
    io::SvgSeries s;
    s.color = colors[k % 6];
    for (const auto& smp : probe.samples) {
      csv.add_row({static_cast<long long>(k), smp.t, smp.symdiff, smp.energy_diff, smp.energy_error,
                   static_cast<long long>(smp.used)});
      s.x.push_back(smp.symdiff);
      s.y.push_back(smp.energy_diff);
    }
    series.push_back(std::move(s));
  }
  Artifacts a;
  a.results = {{"polygon", io::to_json(e)},
               {"compensating", static_cast<long long>(comp)},
               {"scales", scales},
               {"probes", probes},
               {"min_slope", all_finite ? json(min_slope) : json(nullptr)},
               {"slope_threshold", c.slope_threshold},
               {"quadratic", all_finite && min_slope >= c.slope_threshold},
               {"membership", membership_json(e)}};
  a.csv = std::move(csv);
  a.svg = io::svg_loglog(series, "|P sym P~|", "|V(P~) - V(P)|");
  return a;
}

Artifacts run_minimize(const MinimizeConfig& c) {
  const Polygon e = c.polygon.resolve();
  const Tension t = c.tension.resolve(e);
  const RieszParams p = riesz(c.common);
  const double eps = c.epsilon.value_or(feasibility_epsilon(e));
  MinimizeOptions mo;
  mo.starts = c.starts;
  mo.max_iters = c.max_iters;
  mo.tol = c.tol;
  mo.seed = c.common.seed;
  mo.compensating = c.compensating < 0 ? -1 : compensating_index(e, c.compensating);

  Artifacts a;
  a.results = {{"polygon", io::to_json(e)}, {"epsilon", eps}};
  io::CsvTable csv({"gamma", "start", "sup_norm", "total", "iterations", "converged"});
  std::vector<io::SvgShape> shapes{{e, "#1f4e79", "#dbe8f5", 1.5}};

  if (c.threshold) {
    ThresholdOptions to;
    to.gamma_max = c.gamma_max;
    to.predicate_tol = c.report_tol;
    to.minimize = mo;
    const ThresholdEstimate th = gamma_threshold_estimate(e, t, eps, p, c.common.quad, to);
    a.results["threshold"] = io::to_json(th);
  }
  if (c.gamma || !c.gamma_sweep.empty()) {
    json runs = json::array();
    bool all_small = true;
    for (double g : gamma_values(c.gamma, c.gamma_sweep)) {
      const MinimizationResult r = minimize_over_class(e, t, g, eps, p, c.common.quad, mo);
      double worst = 0.0;
      for (std::size_t s = 0; s < r.starts.size(); ++s) {
        const auto& st = r.starts[s];
        worst = std::max(worst, st.sup_norm);
        csv.add_row({g, static_cast<long long>(s), st.sup_norm, st.total, static_cast<long long>(st.iterations),
                     static_cast<long long>(st.converged)});
      }
      const bool small = worst < c.report_tol;
      all_small = all_small && small;
      json rj = io::to_json(r);
      rj["gamma"] = g;
      rj["worst_start_sup_norm"] = worst;
      rj["wulff_within_tol"] = small;
      runs.push_back(rj);
      if (runs.size() == 1 || !small)
        shapes.push_back({perturbed_polygon(e, r.d_star), "#b5442c", "none", 1.0});
    }
    a.results["runs"] = runs;
    a.results["report_tol"] = c.report_tol;
    a.results["all_within_tol"] = all_small;
  }
  if (!a.results.contains("runs") && !a.results.contains("threshold"))
    throw Error(ErrorCode::Config, "give --gamma, --gamma-sweep or --threshold");
  a.csv = std::move(csv);
  a.svg = io::svg_polygons(shapes);
  return a;
}

Artifacts run_rigidity(const RigidityConfig& c) {
  const Polygon e = c.polygon.resolve();
  const Tension t = c.tension.resolve(std::nullopt);
  const RieszParams p = riesz(c.common);
  const RigidityReport r = rigidity_diagnostic(e, t, p, c.common.quad, c.angular_tol, c.samples);
  const RigidityReport r2 = rigidity_diagnostic(e, t, p, c.common.quad, c.angular_tol, 2 * c.samples);
  const double change = std::max(std::abs(r.potential_spread - r2.potential_spread),
                                 std::abs(r.v0_estimate - r2.v0_estimate));

  std::vector<double> averages(static_cast<std::size_t>(e.size()));
  quad::parallel_for(averages.size(), [&](std::size_t i) {
    averages[i] = side_average_potential(e, static_cast<Eigen::Index>(i), p, c.common.quad);
  });
  io::CsvTable csv({"side", "length", "normal_x", "normal_y", "gamma_aligned", "side_average"});
  const auto ss = sides(e);
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const bool aligned = std::find(r.gamma_aligned_sides.begin(), r.gamma_aligned_sides.end(),
                                   static_cast<Eigen::Index>(i)) != r.gamma_aligned_sides.end();
    csv.add_row({static_cast<long long>(i), ss[i].length, ss[i].normal.x(), ss[i].normal.y(),
                 static_cast<long long>(aligned), averages[i]});
  }
  std::vector<io::SvgShape> shapes{{with_area(wulff_shape(t), area(e)), "#999999", "none", 1.0},
                                   {e, "#1f4e79", "none", 1.5}};
  Artifacts a;
  a.results = {{"polygon", io::to_json(e)},
               {"tension", io::to_json(t)},
               {"report", io::to_json(r)},
               {"doubled_density", io::to_json(r2)},
               {"max_change_under_doubling", change},
               {"stable", change <= 1e-6}};
  a.csv = std::move(csv);
  a.svg = io::svg_polygons(shapes);
  return a;
}

Artifacts run_split(const SplitConfig& c) {
  const Tension t = c.tension.resolve(std::nullopt);
  const RieszParams p = riesz(c.common);
  const auto fractions = parse_list(c.fractions);
  io::CsvTable csv({"gamma", "single_energy", "split_energy", "winner"});
  json rows = json::array();
  io::SvgSeries single;
  io::SvgSeries apart;
  apart.color = "#b5442c";
  std::optional<double> crossover;
  std::string previous;
  double previous_gamma = 0.0;
  for (double g : gamma_values(c.gamma, c.gamma_sweep)) {
    const SplitComparison s = split_comparison(t, g, fractions, p, c.common.quad);
    json sj = io::to_json(s);
    sj["gamma"] = g;
    rows.push_back(sj);
    csv.add_row({g, s.single_energy, s.split_energy, s.winner});
    single.x.push_back(g);
    single.y.push_back(s.single_energy);
    apart.x.push_back(g);
    apart.y.push_back(s.split_energy);
    if (!crossover && !previous.empty() && previous == "single" && s.winner == "split")
      crossover = std::sqrt(previous_gamma * g);
    previous = s.winner;
    previous_gamma = g;
  }
  Artifacts a;
  a.results = {{"tension", io::to_json(t)},
               {"fractions", fractions},
               {"comparisons", rows},
               {"crossover_gamma_estimate", crossover ? json(*crossover) : json(nullptr)}};
  a.csv = std::move(csv);
  a.svg = io::svg_loglog({single, apart}, "gamma", "energy");
  return a;
}

Artifacts run_search(const SearchConfig& c) {
  SearchOptions so;
  so.starts = c.starts;
  so.max_evaluations = c.max_evaluations;
  so.initial_step = c.initial_step;
  so.report_tol = c.report_tol;
  so.free_normals = c.free_normals;
  so.seed = c.common.seed;
  const SearchResult r = search_noncritical(c.sides, riesz(c.common), c.common.quad, so);
  json runs = json::array();
  json candidates = json::array();
  io::CsvTable csv({"run", "step", "residual"});
  std::vector<io::SvgShape> shapes;
  int non_members = 0;
  for (std::size_t k = 0; k < r.runs.size(); ++k) {
    runs.push_back(io::to_json(r.runs[k]));
    for (std::size_t s = 0; s < r.runs[k].history.size(); ++s)
      csv.add_row({static_cast<long long>(k), static_cast<long long>(s), r.runs[k].history[s]});
    shapes.push_back({centered(r.runs[k].polygon), k == 0 ? "#1f4e79" : "#b5442c", "none", 1.0});
  }
  for (const auto& cand : r.candidates) {
    candidates.push_back(io::to_json(cand));
    if (!cand.is_member) ++non_members;
  }
  Artifacts a;
  a.results = {{"runs", runs},
               {"candidates", candidates},
               {"non_member_candidates", non_members},
               {"report_tol", c.report_tol}};
  a.csv = std::move(csv);
  a.svg = io::svg_polygons(shapes);
  return a;
}

Artifacts run_selftest(const SelftestConfig& c) {
  const QuadratureSpec& q = c.common.quad;
  const RieszParams p1(1.0);
  json checks = json::array();
  bool all = true;
  auto record = [&](const std::string& name, double value, double limit, bool passed) {
    checks.push_back({{"name", name}, {"value", value}, {"limit", limit}, {"passed", passed}});
    all = all && passed;
  };

  const Polygon square = build_symmetric_polygon(SymmetricPolygonSpec<double>{4, std::nullopt});
  const Polygon hexagon = regular_polygon<double>(6, 1.0);
  record("hexagon_area", std::abs(area(hexagon) - 1.5 * std::sqrt(3.0)), 1e-12,
         std::abs(area(hexagon) - 1.5 * std::sqrt(3.0)) < 1e-12);
  {
    const double s = symmetric_difference_area(square, translate(square, Vec2(0.5, 0.0)));
    record("square_shift_symdiff", std::abs(s - 1.0), 1e-12, std::abs(s - 1.0) < 1e-12);
  }
  {
    const Tension t = tension_from_polygon(centered(hexagon));
    const double ratio = anisotropic_perimeter(wulff_shape(t), t) / (2.0 * area(wulff_shape(t)));
    record("wulff_perimeter_twice_area", std::abs(ratio - 1.0), 1e-12, std::abs(ratio - 1.0) < 1e-12);
  }
  {
    const double exact = 4.0 * std::log(1.0 + std::sqrt(2.0)) - 4.0 / 3.0 * (std::sqrt(2.0) - 1.0);
    const double err = std::abs(self_energy(square, p1, q).value - exact) / exact;
    record("unit_square_self_energy", err, 1e-6, err < 1e-6);
  }
  {
    const Polygon e = Polygon(parse_points("0,0;1.3,0.1;1.1,0.9;0.2,1.2"));
    const EnergyValue v = self_energy(e, RieszParams(0.7), q);
    const Polygon moved = apply_isometry(e, rotation_about<double>(Vec2(0.3, -0.2), 0.9));
    const double inv = std::abs(self_energy(moved, RieszParams(0.7), q).value - v.value) / v.value;
    record("rigid_motion_invariance", inv, 1e-6, inv < 1e-6);
    const double lam = 1.7;
    const double sc = std::abs(self_energy(scale(e, lam), RieszParams(0.7), q).value /
                                   (std::pow(lam, 4.0 - 0.7) * v.value) - 1.0);
    record("scaling_law", sc, 1e-6, sc < 1e-6);
    const Polygon f = translate(hexagon, Vec2(0.4, 0.3));
    const double ef = interaction(e, f, RieszParams(0.7), q).value;
    const double fe = interaction(f, e, RieszParams(0.7), q).value;
    record("interaction_symmetry", std::abs(ef - fe) / ef, 1e-12, std::abs(ef - fe) / ef < 1e-12);
  }
  for (int n = 3; n <= 8; ++n) {
    const auto r = criticality_residual(build_symmetric_polygon(SymmetricPolygonSpec<double>{n, std::nullopt}), p1, q);
    record("criticality_regular_" + std::to_string(n), r.residual, 1e-4, r.residual < 1e-4);
  }
  {
    const Polygon hex = build_symmetric_polygon(SymmetricPolygonSpec<double>{6, 0.6 * std::numbers::pi});
    const auto r = criticality_residual(hex, RieszParams(1.5), q);
    record("criticality_symmetric_hexagon", r.residual, 1e-4, r.residual < 1e-4);
  }
  {
    const double d1 = 0.05;
    const Eigen::Index adjacent = side_with_normal(square, sides(square)[0].tangent());
    // The partial vector skips the compensating side, which is never side 0 here.
    Eigen::VectorXd partial = Eigen::VectorXd::Zero(3);
    partial(0) = d1;
    const double dc = volume_adjust(square, partial, adjacent);
    const double err = std::abs(dc + d1 / (1.0 + d1));
    record("volume_restoration_adjacent", err, 1e-12, err < 1e-12);
  }
  {
    const Polygon pent = Polygon(parse_points("0,0;1.2,-0.1;1.6,0.7;0.8,1.3;-0.1,0.8"));
    const Eigen::Index j = pent.size() - 1;
    const double h = 1e-3;
    Eigen::VectorXd dp = Eigen::VectorXd::Zero(pent.size() - 1);
    dp(1) = h;
    const double plus = reduced_nonlocal(pent, dp, p1, q, j).value;
    const double minus = reduced_nonlocal(pent, Eigen::VectorXd(-dp), p1, q, j).value;
    const double fd = (plus - minus) / (2.0 * h);
    const double an = first_variation_analytic(pent, 1, j, p1, q);
    const double err = std::abs(fd - an) / std::abs(an);
    record("first_variation_finite_difference", err, 1e-4, err < 1e-4);
  }
  {
    const RieszParams p(0.5);
    const QmcEstimate mc = qmc_oracle_interaction(hexagon, hexagon, p, std::uint64_t(1) << 20, c.common.seed);
    const EnergyValue v = self_energy(hexagon, p, q);
    const double sigma = std::hypot(mc.standard_error, v.error_estimate);
    const double z = std::abs(mc.value - v.value) / sigma;
    record("qmc_oracle_agreement_sigmas", z, 3.0, z < 3.0);
  }
  {
    MinimizeOptions mo;
    mo.starts = 3;
    mo.seed = c.common.seed;
    const Tension t = tension_from_polygon(centered(square));
    const auto r = minimize_over_class(square, t, 1e-3, feasibility_epsilon(square), p1, q, mo);
    double worst = 0.0;
    for (const auto& s : r.starts) worst = std::max(worst, s.sup_norm);
    record("square_minimizes_in_class", worst, 1e-4, worst < 1e-4);
    const auto rig = rigidity_diagnostic(square, t, p1, q);
    record("wulff_rigidity_free_sides", static_cast<double>(rig.free_sides.size()), 0.0, rig.free_sides.empty());
    const auto small = split_comparison(t, 1e-2, {0.5, 0.5}, p1, q);
    const auto large = split_comparison(t, 1e1, {0.5, 0.5}, p1, q);
    record("split_winner_flips", small.winner == "single" && large.winner == "split" ? 1.0 : 0.0, 1.0,
           small.winner == "single" && large.winner == "split");
  }
  Artifacts a;
  a.results = {{"checks", checks}, {"all_passed", all}};
  io::CsvTable csv({"name", "value", "limit", "passed"});
  for (const auto& ch : checks)
    csv.add_row({ch["name"].get<std::string>(), ch["value"].get<double>(), ch["limit"].get<double>(),
                 static_cast<long long>(ch["passed"].get<bool>())});
  a.csv = std::move(csv);
  return a;
}

}  // namespace wrl::cli
