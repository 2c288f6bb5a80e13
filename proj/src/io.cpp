#include <wrl/io.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

namespace wrl::io {

namespace {

json vector_array(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

json index_array(const std::vector<Eigen::Index>& v) {
  json out = json::array();
  for (auto x : v) out.push_back(static_cast<long long>(x));
  return out;
}

Points2<double> points_from_json(const json& arr, const char* what) {
  if (!arr.is_array()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must be an array");
  Points2<double> pts(2, static_cast<Eigen::Index>(arr.size()));
  for (std::size_t k = 0; k < arr.size(); ++k) {
    const auto& p = arr[k];
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw Error(ErrorCode::InvalidArgument, std::string(what) + " entries must be [x, y] pairs");
    pts(0, static_cast<Eigen::Index>(k)) = p[0].get<double>();
    pts(1, static_cast<Eigen::Index>(k)) = p[1].get<double>();
  }
  return pts;
}

json points_to_json(const Points2<double>& pts) {
  json out = json::array();
  for (Eigen::Index k = 0; k < pts.cols(); ++k) out.push_back({pts(0, k), pts(1, k)});
  return out;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

json to_json(const Polygon& p) { return {{"vertices", points_to_json(p.vertices())}}; }

Polygon polygon_from_json(const json& j) {
  if (!j.is_object() || !j.contains("vertices"))
    throw Error(ErrorCode::InvalidArgument, "polygon JSON needs a \"vertices\" array");
  return Polygon(points_from_json(j.at("vertices"), "vertices"));
}

json to_json(const Tension& t) { return {{"generators", points_to_json(t.generators())}}; }

Tension tension_from_json(const json& j) {
  if (!j.is_object() || !j.contains("generators"))
    throw Error(ErrorCode::InvalidArgument, "tension JSON needs a \"generators\" array");
  return Tension(points_from_json(j.at("generators"), "generators"));
}

json to_json(const EnergyValue& v) { return {{"value", v.value}, {"error_estimate", v.error_estimate}}; }

json to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k));
  return out;
}

json to_json(const VariationVector& v) { return {{"d", to_json(v.d)}, {"epsilon", v.epsilon}}; }

json to_json(const CriticalityReport& r) {
  return {{"side_averages", vector_array(r.side_averages)},
          {"residual", r.residual},
          {"quadrature_error", r.quadrature_error}};
}

json to_json(const QuadraticProbe& r) {
  json samples = json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"t", s.t},
                       {"symdiff", s.symdiff},
                       {"energy_diff", s.energy_diff},
                       {"energy_error", s.energy_error},
                       {"used", s.used}});
  return {{"slope", r.slope}, {"intercept", r.intercept}, {"used", r.used}, {"samples", samples}};
}

json to_json(const EnergyReport& r) {
  return {{"gamma", r.gamma},
          {"perimeter_term", r.perimeter_term},
          {"nonlocal_term", to_json(r.nonlocal_term)},
          {"total", r.total}};
}

json to_json(const MinimizationResult& r) {
  json starts = json::array();
  for (const auto& s : r.starts)
    starts.push_back({{"start", to_json(s.start)},
                      {"d_star", to_json(s.d_star)},
                      {"sup_norm", s.sup_norm},
                      {"total", s.total},
                      {"iterations", s.iterations},
                      {"converged", s.converged}});
  return {{"d_star", to_json(r.d_star)},
          {"d_star_sup_norm", r.d_star.d.lpNorm<Eigen::Infinity>()},
          {"energy_at_dstar", to_json(r.energy_at_dstar)},
          {"energy_at_zero", to_json(r.energy_at_zero)},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"starts", starts}};
}

json to_json(const ThresholdEstimate& r) {
  return {{"gamma_hat", r.gamma_hat},
          {"lower", r.lower},
          {"upper", r.upper},
          {"evaluations", r.evaluations},
          {"found", r.found}};
}

json to_json(const RigidityReport& r) {
  return {{"gamma_aligned_sides", index_array(r.gamma_aligned_sides)},
          {"free_sides", index_array(r.free_sides)},
          {"potential_spread", r.potential_spread},
          {"v0_estimate", r.v0_estimate},
          {"samples_per_side", r.samples_per_side}};
}

json to_json(const SplitComparison& r) {
  return {{"single_energy", r.single_energy}, {"split_energy", r.split_energy}, {"winner", r.winner}};
}

json to_json(const SearchCandidate& r) {
  return {{"polygon", to_json(r.polygon)},
          {"residual", r.residual},
          {"is_member", r.is_member},
          {"accepted_steps", static_cast<long long>(r.history.size()) - 1},
          {"evaluations", r.evaluations},
          {"history", vector_array(r.history)}};
}

json to_json(const AnalyticBounds& b) {
  return {{"constant", b.constant},
          {"potential_bound", b.potential_bound},
          {"interaction_bound", b.interaction_bound},
          {"lipschitz_bound", b.lipschitz_bound}};
}

json to_json(const QuadratureSpec& q) {
  return {{"base_order", q.base_order},
          {"refinement_depth", q.refinement_depth},
          {"near_ratio", q.near_ratio},
          {"singular_transform", q.singular_transform},
          {"target_rel_tol", q.target_rel_tol}};
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != header_.size()) throw Error(ErrorCode::InvalidArgument, "CSV row width mismatch");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  for (std::size_t k = 0; k < header_.size(); ++k) out += (k ? "," : "") + header_[k];
  out += '\n';
  for (const auto& row : rows_) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      if (const auto* s = std::get_if<std::string>(&row[k])) out += *s;
      else if (const auto* d = std::get_if<double>(&row[k])) out += format_double(*d);
      else out += std::to_string(std::get<long long>(row[k]));
    }
    out += '\n';
  }
  return out;
}

std::string svg_polygons(const std::vector<SvgShape>& shapes, int size) {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& s : shapes) {
    xmin = std::min(xmin, s.polygon.vertices().row(0).minCoeff());
    xmax = std::max(xmax, s.polygon.vertices().row(0).maxCoeff());
    ymin = std::min(ymin, s.polygon.vertices().row(1).minCoeff());
    ymax = std::max(ymax, s.polygon.vertices().row(1).maxCoeff());
  }
  const double span = std::max(xmax - xmin, ymax - ymin);
  const double pad = 0.08 * size;
  const double k = (size - 2.0 * pad) / (span > 0 ? span : 1.0);
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size
     << "\" viewBox=\"0 0 " << size << ' ' << size << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (const auto& s : shapes) {
    os << "<polygon points=\"";
    for (Eigen::Index i = 0; i < s.polygon.size(); ++i) {
      const Vec2 v = s.polygon.vertex(i);
      os << (i ? " " : "") << format_double(pad + k * (v.x() - xmin)) << ','
         << format_double(size - pad - k * (v.y() - ymin));
    }
    os << "\" fill=\"" << s.fill << "\" stroke=\"" << s.stroke << "\" stroke-width=\""
       << format_double(s.stroke_width) << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string svg_loglog(const std::vector<SvgSeries>& series, const std::string& x_label,
                       const std::string& y_label, int width, int height) {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      xmin = std::min(xmin, std::log10(s.x[i]));
      xmax = std::max(xmax, std::log10(s.x[i]));
      ymin = std::min(ymin, std::log10(s.y[i]));
      ymax = std::max(ymax, std::log10(s.y[i]));
    }
  if (!std::isfinite(xmin)) xmin = ymin = 0.0, xmax = ymax = 1.0;
  if (xmax == xmin) xmax = xmin + 1.0;
  if (ymax == ymin) ymax = ymin + 1.0;
  const double left = 70, right = 20, top = 20, bottom = 50;
  auto px = [&](double x) { return left + (std::log10(x) - xmin) / (xmax - xmin) * (width - left - right); };
  auto py = [&](double y) { return height - bottom - (std::log10(y) - ymin) / (ymax - ymin) * (height - top - bottom); };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
     << height - top - bottom << "\" fill=\"none\" stroke=\"#888\"/>\n";
  for (int d = static_cast<int>(std::ceil(xmin)); d <= static_cast<int>(std::floor(xmax)); ++d)
    os << "<text x=\"" << format_double(px(std::pow(10.0, d))) << "\" y=\"" << height - bottom + 16
       << "\" font-size=\"11\" text-anchor=\"middle\">1e" << d << "</text>\n";
  for (int d = static_cast<int>(std::ceil(ymin)); d <= static_cast<int>(std::floor(ymax)); ++d)
    os << "<text x=\"" << left - 6 << "\" y=\"" << format_double(py(std::pow(10.0, d)) + 4)
       << "\" font-size=\"11\" text-anchor=\"end\">1e" << d << "</text>\n";
  os << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 12
     << "\" font-size=\"13\" text-anchor=\"middle\">" << xml_escape(x_label) << "</text>\n"
     << "<text x=\"16\" y=\"" << (top + height - bottom) / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
     << "transform=\"rotate(-90 16 " << (top + height - bottom) / 2 << ")\">" << xml_escape(y_label) << "</text>\n";
  for (const auto& s : series) {
    std::string path;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !(s.y[i] > 0.0)) continue;
      path += (path.empty() ? "M" : " L") + format_double(px(s.x[i])) + "," + format_double(py(s.y[i]));
      os << "<circle cx=\"" << format_double(px(s.x[i])) << "\" cy=\"" << format_double(py(s.y[i]))
         << "\" r=\"2.5\" fill=\"" << s.color << "\"/>\n";
    }
    if (!path.empty()) os << "<path d=\"" << path << "\" fill=\"none\" stroke=\"" << s.color << "\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("failed writing " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace wrl::io
