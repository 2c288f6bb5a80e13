#pragma once

// JSON encodings, shortest round-trip CSV, SVG figures and atomic file output.

#include <wrl/anisotropy.hpp>
#include <wrl/minimization.hpp>
#include <wrl/riesz.hpp>
#include <wrl/variation.hpp>

#include <json.hpp>

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace wrl::io {

using json = nlohmann::ordered_json;

json to_json(const Polygon& p);
/// Accepts {"vertices": [[x, y], ...]} and re-canonicalizes.
Polygon polygon_from_json(const json& j);

json to_json(const Tension& t);
Tension tension_from_json(const json& j);

json to_json(const EnergyValue& v);
json to_json(const VariationVector& v);
json to_json(const CriticalityReport& r);
json to_json(const QuadraticProbe& r);
json to_json(const EnergyReport& r);
json to_json(const MinimizationResult& r);
json to_json(const ThresholdEstimate& r);
json to_json(const RigidityReport& r);
json to_json(const SplitComparison& r);
json to_json(const SearchCandidate& r);
json to_json(const AnalyticBounds& b);
json to_json(const QuadratureSpec& q);
json to_json(const Eigen::VectorXd& v);

/// Shortest decimal string that reads back to the same double.
std::string format_double(double x);

class CsvTable {
 public:
  using Cell = std::variant<std::string, double, long long>;

  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  /// Throws InvalidArgument on a width mismatch.
  void add_row(std::vector<Cell> row);
  std::string str() const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<Cell>> rows_;
};

struct SvgShape {
  Polygon polygon;
  std::string stroke = "#1f4e79";
  std::string fill = "none";
  double stroke_width = 1.5;
};

/// Polygons in a common frame, y axis pointing up.
std::string svg_polygons(const std::vector<SvgShape>& shapes, int size = 480);

struct SvgSeries {
  std::vector<double> x;
  std::vector<double> y;
  std::string color = "#1f4e79";
};

/// Log-log scatter with straight segments between consecutive points.
std::string svg_loglog(const std::vector<SvgSeries>& series, const std::string& x_label,
                       const std::string& y_label, int width = 520, int height = 400);

/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace wrl::io
