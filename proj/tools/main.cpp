// wrl: command-line runner for the planar crystalline nonlocal isoperimetric lab.
//
// Exit codes: 0 success, 1 selftest failure or I/O error, 2 configuration
// error, 3 numerical failure. Errors are reported as JSON on stderr.

#include "scenarios.hpp"

#include <wrl/quadrature.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <functional>
#include <iostream>

namespace {

using wrl::cli::json;

constexpr const char* kVersion = "0.1.0";

int report_error(const std::string& code, const std::string& message, int exit_code) {
  json err = {{"error", {{"code", code}, {"message", message}, {"exit_code", exit_code}}}};
  std::cerr << err.dump() << '\n';
  return exit_code;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void add_common(CLI::App* sub, wrl::cli::Common& c) {
  c.out = "runs/" + sub->get_name();
  sub->add_option("--alpha", c.alpha, "Riesz exponent in (0.01, 1.99)")->capture_default_str();
  sub->add_option("--seed", c.seed, "random seed (WRL_SEED overrides)")->capture_default_str();
  sub->add_option("--out", c.out, "run directory")->capture_default_str();
  sub->add_option("--order", c.quad.base_order, "Gauss points per direction")->capture_default_str();
  sub->add_option("--depth", c.quad.refinement_depth, "maximal refinement depth")->capture_default_str();
  sub->add_option("--near-ratio", c.quad.near_ratio, "near-field splitting ratio")->capture_default_str();
  sub->add_option("--rel-tol", c.quad.target_rel_tol, "relative quadrature tolerance")->capture_default_str();
  sub->add_flag("!--no-singular-transform", c.quad.singular_transform, "disable the Duffy transform");
}

void add_polygon(CLI::App* sub, wrl::cli::PolygonSource& p) {
  sub->add_option("--regular", p.regular, "regular n-gon of unit area");
  sub->add_option("--n", p.n, "bisector-symmetric n-gon of unit area");
  sub->add_option("--angle", p.angle, "interior angle (radians) for --n");
  sub->add_option("--vertices", p.vertices, "polygon vertices x,y;x,y;...");
  sub->add_option("--polygon-file", p.file, "polygon JSON {\"vertices\": [...]}")->check(CLI::ExistingFile);
}

void add_tension(CLI::App* sub, wrl::cli::TensionSource& t) {
  sub->add_option("--wulff-regular", t.wulff_regular, "Wulff shape: regular n-gon")->capture_default_str();
  sub->add_option("--wulff-vertices", t.wulff_vertices, "Wulff shape vertices x,y;x,y;... (takes precedence)");
}

template <typename Config>
std::function<int()> runner(Config& cfg, wrl::cli::Artifacts (*run)(const Config&), const std::string& name) {
  return [&cfg, run, name]() {
    if (const char* env = std::getenv("WRL_SEED")) {
      try {
        std::size_t used = 0;
        cfg.common.seed = std::stoull(env, &used);
        if (env[used] != '\0') throw std::invalid_argument("trailing characters");
      } catch (const std::exception&) {
        throw wrl::Error(wrl::ErrorCode::Config, std::string("WRL_SEED is not an unsigned integer: ") + env);
      }
    }
    wrl::RieszParams(cfg.common.alpha);
    cfg.common.quad.validate();
    const auto artifacts = run(cfg);
    const std::filesystem::path dir(cfg.common.out);
    json summary = {{"command", name},
                    {"config", wrl::cli::describe(cfg)},
                    {"results", artifacts.results},
                    {"metadata",
                     {{"timestamp", utc_timestamp()},
                      {"threads", wrl::quad::worker_count()},
                      {"version", kVersion}}}};
    wrl::io::write_atomic(dir / "summary.json", summary.dump(2) + "\n");
    if (artifacts.csv) wrl::io::write_atomic(dir / "data.csv", artifacts.csv->str());
    if (artifacts.svg) wrl::io::write_atomic(dir / "figure.svg", *artifacts.svg);
    std::cout << (dir / "summary.json").string() << '\n';
    if (name == "selftest" && !artifacts.results.at("all_passed").template get<bool>()) return 1;
    return 0;
  };
}

}  // namespace

int main(int argc, char** argv) {
  using namespace wrl::cli;
  CLI::App app{"Planar lab for the crystalline nonlocal isoperimetric problem"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML file with one section per subcommand");
  app.require_subcommand(1);

  std::map<std::string, std::function<int()>> runners;

  WulffConfig wulff;
  auto* s = app.add_subcommand("wulff", "tension and Wulff shape round trips");
  add_common(s, wulff.common);
  add_polygon(s, wulff.polygon);
  s->add_option("--generators", wulff.generators, "tension generators x,y;x,y;...");
  runners["wulff"] = runner(wulff, &run_wulff, "wulff");

  EnergyConfig energy;
  s = app.add_subcommand("energy", "total energy with analytic bounds");
  add_common(s, energy.common);
  add_polygon(s, energy.polygon);
  add_tension(s, energy.tension);
  s->add_option("--gamma", energy.gamma, "nonlocal weight")->capture_default_str();
  runners["energy"] = runner(energy, &run_energy, "energy");

  CriticalityConfig crit;
  s = app.add_subcommand("criticality", "side-averaged potential residual");
  add_common(s, crit.common);
  add_polygon(s, crit.polygon);
  s->add_option("--threshold", crit.threshold, "residual reported as critical below this")->capture_default_str();
  runners["criticality"] = runner(crit, &run_criticality, "criticality");

  QuadboundConfig qb;
  s = app.add_subcommand("quadbound", "log-log slope of |dV| against |P sym P~|");
  add_common(s, qb.common);
  add_polygon(s, qb.polygon);
  s->add_option("--scales", qb.scales, "variation sizes a:b:k")->capture_default_str();
  s->add_option("--directions", qb.directions, "random directions")->capture_default_str();
  s->add_option("--compensating", qb.compensating, "compensating side (default n-1)");
  s->add_option("--slope-threshold", qb.slope_threshold, "slope reported as quadratic")->capture_default_str();
  runners["quadbound"] = runner(qb, &run_quadbound, "quadbound");

  MinimizeConfig mz;
  s = app.add_subcommand("minimize", "minimization over the side-translation class");
  add_common(s, mz.common);
  add_polygon(s, mz.polygon);
  add_tension(s, mz.tension);
  s->add_option("--gamma", mz.gamma, "nonlocal weight");
  s->add_option("--gamma-sweep", mz.gamma_sweep, "gamma values a:b:k");
  s->add_flag("--threshold", mz.threshold, "bisect for the gamma where d* leaves zero");
  s->add_option("--gamma-max", mz.gamma_max, "upper end of the threshold search")->capture_default_str();
  s->add_option("--starts", mz.starts, "multi-starts")->capture_default_str();
  s->add_option("--max-iters", mz.max_iters, "iterations per start")->capture_default_str();
  s->add_option("--tol", mz.tol, "projected-gradient tolerance")->capture_default_str();
  s->add_option("--epsilon", mz.epsilon, "class radius (default: feasibility radius)");
  s->add_option("--compensating", mz.compensating, "compensating side (default n-1)");
  s->add_option("--report-tol", mz.report_tol, "|d*| reported as zero below this")->capture_default_str();
  runners["minimize"] = runner(mz, &run_minimize, "minimize");

  RigidityConfig rg;
  s = app.add_subcommand("rigidity", "aligned and free sides with potential spread");
  add_common(s, rg.common);
  add_polygon(s, rg.polygon);
  add_tension(s, rg.tension);
  s->add_option("--samples", rg.samples, "samples per free side")->capture_default_str();
  s->add_option("--angular-tol", rg.angular_tol, "normal alignment tolerance")->capture_default_str();
  runners["rigidity"] = runner(rg, &run_rigidity, "rigidity");

  SplitConfig sp;
  s = app.add_subcommand("split", "one Wulff shape against far-apart pieces");
  add_common(s, sp.common);
  add_tension(s, sp.tension);
  s->add_option("--gamma", sp.gamma, "single nonlocal weight");
  s->add_option("--gamma-sweep", sp.gamma_sweep, "gamma values a:b:k")->capture_default_str();
  s->add_option("--fractions", sp.fractions, "mass fractions summing to 1")->capture_default_str();
  runners["split"] = runner(sp, &run_split, "split");

  SearchConfig sc;
  s = app.add_subcommand("search-critical", "search for critical polygons outside the symmetric class");
  add_common(s, sc.common);
  s->add_option("--sides", sc.sides, "number of sides")->capture_default_str();
  s->add_option("--starts", sc.starts, "independent starts")->capture_default_str();
  s->add_option("--max-evals", sc.max_evaluations, "residual evaluations per start")->capture_default_str();
  s->add_option("--initial-step", sc.initial_step, "compass step")->capture_default_str();
  s->add_option("--report-tol", sc.report_tol, "residual reported as critical below this")->capture_default_str();
  s->add_flag("--free-normals", sc.free_normals, "let side normals move");
  runners["search-critical"] = runner(sc, &run_search, "search-critical");

  SelftestConfig st;
  s = app.add_subcommand("selftest", "property corpus");
  add_common(s, st.common);
  runners["selftest"] = runner(st, &run_selftest, "selftest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("Config", e.what(), 2);
  }

  try {
    return runners.at(app.get_subcommands().front()->get_name())();
  } catch (const wrl::Error& e) {
    return report_error(std::string(wrl::to_string(e.code())), e.what(), wrl::is_numerical(e.code()) ? 3 : 2);
  } catch (const json::exception& e) {
    return report_error("Config", e.what(), 2);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), 1);
  }
}
