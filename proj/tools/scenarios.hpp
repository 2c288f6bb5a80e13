#pragma once

// Scenario records and runners behind the command-line subcommands. A runner
// is a pure function of its config: everything it returns is deterministic
// for a fixed config and seed.

#include <wrl/io.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace wrl::cli {

using io::json;

/// Exactly one of regular, symmetric (n with optional angle), vertices or file.
struct PolygonSource {
  int regular = 0;
  int n = 0;
  std::optional<double> angle;  // radians
  std::string vertices;         // "x,y;x,y;..."
  std::string file;             // {"vertices": [...]}

  bool given() const { return regular > 0 || n > 0 || !vertices.empty() || !file.empty(); }
  Polygon resolve() const;
  json describe() const;
};

/// Wulff shape of a crystalline tension: explicit vertices, else a regular
/// n-gon of unit area.
struct TensionSource {
  int wulff_regular = 0;
  std::string wulff_vertices;

  bool given() const { return wulff_regular > 0 || !wulff_vertices.empty(); }
  /// Falls back to the centred copy of `own` when nothing is given.
  Tension resolve(const std::optional<Polygon>& own) const;
  json describe() const;
};

struct Common {
  double alpha = 1.0;
  QuadratureSpec quad;
  std::uint64_t seed = 42;
  std::string out;

  json describe() const;
};

struct Artifacts {
  json results = json::object();
  std::optional<io::CsvTable> csv;
  std::optional<std::string> svg;
};

struct WulffConfig {
  Common common;
  PolygonSource polygon;
  std::string generators;
};

struct EnergyConfig {
  Common common;
  PolygonSource polygon;
  TensionSource tension;
  double gamma = 1.0;
};

struct CriticalityConfig {
  Common common;
  PolygonSource polygon;
  double threshold = 1e-4;
};

struct QuadboundConfig {
  Common common;
  PolygonSource polygon;
  std::string scales = "1e-3:1e-1:10";
  int directions = 5;
  int compensating = -1;
  double slope_threshold = 1.9;
};

struct MinimizeConfig {
  Common common;
  PolygonSource polygon;
  TensionSource tension;
  std::optional<double> gamma;
  std::string gamma_sweep;  // "a:b:k"
  bool threshold = false;
  double gamma_max = 100.0;
  int starts = 10;
  int max_iters = 200;
  double tol = 1e-6;
  std::optional<double> epsilon;
  int compensating = -1;
  double report_tol = 1e-4;
};

struct RigidityConfig {
  Common common;
  PolygonSource polygon;
  TensionSource tension{4, ""};
  int samples = 16;
  double angular_tol = 1e-6;
};

struct SplitConfig {
  Common common;
  TensionSource tension{4, ""};
  std::optional<double> gamma;
  std::string gamma_sweep = "1e-3:1e1:9";
  std::string fractions = "0.5,0.5";
};

struct SearchConfig {
  Common common;
  int sides = 5;
  int starts = 8;
  int max_evaluations = 400;
  double initial_step = 0.05;
  double report_tol = 1e-6;
  bool free_normals = false;
};

struct SelftestConfig {
  Common common;
};

Artifacts run_wulff(const WulffConfig& c);
Artifacts run_energy(const EnergyConfig& c);
Artifacts run_criticality(const CriticalityConfig& c);
Artifacts run_quadbound(const QuadboundConfig& c);
Artifacts run_minimize(const MinimizeConfig& c);
Artifacts run_rigidity(const RigidityConfig& c);
Artifacts run_split(const SplitConfig& c);
Artifacts run_search(const SearchConfig& c);
Artifacts run_selftest(const SelftestConfig& c);

json describe(const WulffConfig& c);
json describe(const EnergyConfig& c);
json describe(const CriticalityConfig& c);
json describe(const QuadboundConfig& c);
json describe(const MinimizeConfig& c);
json describe(const RigidityConfig& c);
json describe(const SplitConfig& c);
json describe(const SearchConfig& c);
json describe(const SelftestConfig& c);

/// "x,y;x,y;..." as a 2 x m matrix.
Points2<double> parse_points(const std::string& s);
/// "a:b:k": k log-spaced values when a > 0, linear otherwise.
std::vector<double> parse_range(const std::string& s);
/// "a,b,c"
std::vector<double> parse_list(const std::string& s);

}  // namespace wrl::cli
