#pragma once

// Planar convex-polygon kernel. Polygons are stored in canonical form:
// counter-clockwise, no repeated or collinear vertices, first vertex the
// lexicographically smallest one (x first, then y).

#include <wrl/errors.hpp>

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <vector>

namespace wrl {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Points2 = Eigen::Matrix<Scalar, 2, Eigen::Dynamic>;
template <typename Scalar>
using Triangle2 = Eigen::Matrix<Scalar, 2, 3>;
template <typename Scalar>
using Isometry2 = Eigen::Transform<Scalar, 2, Eigen::Isometry>;

template <typename DerivedA, typename DerivedB>
auto cross2(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return a.x() * b.y() - a.y() * b.x();
}

/// Counter-clockwise rotation by a quarter turn.
template <typename Derived>
Vector2<typename Derived::Scalar> perp(const Eigen::MatrixBase<Derived>& v) {
  return {-v.y(), v.x()};
}

namespace tol {
inline constexpr double collinear = 1e-12;  // times scale^2, on the turn cross product
inline constexpr double duplicate = 1e-12;  // times scale
inline constexpr double lexicographic = 1e-9;
inline constexpr double symmetry = 1e-9;
}  // namespace tol

template <typename Scalar>
class ConvexPolygon {
 public:
  using Point = Vector2<Scalar>;
  using Points = Points2<Scalar>;

  /// Throws Error(Degenerate) unless the points describe a strictly convex
  /// polygon with positive area (either orientation is accepted).
  explicit ConvexPolygon(const Points& vertices) {
    auto normalized = normalize(vertices);
    if (!normalized) {
      throw Error(ErrorCode::Degenerate,
                  "vertex list does not describe a convex polygon with positive area");
    }
    vertices_ = std::move(*normalized);
  }

  ConvexPolygon(std::initializer_list<Point> vertices) : ConvexPolygon(from_list(vertices)) {}

  static std::optional<ConvexPolygon> try_from(const Points& vertices) {
    auto normalized = normalize(vertices);
    if (!normalized) return std::nullopt;
    ConvexPolygon p;
    p.vertices_ = std::move(*normalized);
    return p;
  }

  const Points& vertices() const { return vertices_; }
  Eigen::Index size() const { return vertices_.cols(); }

  /// Cyclic vertex access.
  Point vertex(Eigen::Index i) const { return vertices_.col(wrap(i)); }

  Eigen::Index wrap(Eigen::Index i) const {
    const Eigen::Index n = size();
    return ((i % n) + n) % n;
  }

  /// Bounding-box diagonal; the length scale used by all tolerances.
  Scalar scale() const {
    return (vertices_.rowwise().maxCoeff() - vertices_.rowwise().minCoeff()).norm();
  }

  Scalar diameter() const {
    Scalar d = 0;
    for (Eigen::Index i = 0; i < size(); ++i)
      for (Eigen::Index j = i + 1; j < size(); ++j)
        d = std::max(d, (vertices_.col(i) - vertices_.col(j)).norm());
    return d;
  }

  /// Area centroid.
  Point centroid() const {
    const Point o = vertices_.col(0);
    Point acc = Point::Zero();
    Scalar twice_area = 0;
    for (Eigen::Index i = 1; i + 1 < size(); ++i) {
      const Point a = vertices_.col(i) - o;
      const Point b = vertices_.col(i + 1) - o;
      const Scalar w = cross2(a, b);
      acc += w * (a + b) / Scalar(3);
      twice_area += w;
    }
    return o + acc / twice_area;
  }

  bool contains(const Point& x, Scalar margin = 0) const {
    for (Eigen::Index i = 0; i < size(); ++i) {
      const Point a = vertex(i);
      const Point e = vertex(i + 1) - a;
      if (cross2(e, Point(x - a)) / e.norm() < margin) return false;
    }
    return true;
  }

 private:
  ConvexPolygon() = default;

  static Points from_list(std::initializer_list<Point> list) {
    Points pts(2, static_cast<Eigen::Index>(list.size()));
    Eigen::Index i = 0;
    for (const auto& p : list) pts.col(i++) = p;
    return pts;
  }

  static std::optional<Points> normalize(const Points& input) {
    using std::abs;
    if (input.cols() < 3 || !input.allFinite()) return std::nullopt;
    const Scalar scale = (input.rowwise().maxCoeff() - input.rowwise().minCoeff()).norm();
    if (!(scale > 0)) return std::nullopt;
    const Scalar dup_tol = Scalar(tol::duplicate) * scale;
    const Scalar turn_tol = Scalar(tol::collinear) * scale * scale;

    std::vector<Point> v;
    v.reserve(static_cast<std::size_t>(input.cols()));
    for (Eigen::Index i = 0; i < input.cols(); ++i) v.emplace_back(input.col(i));

    Scalar twice_area = 0;
    for (std::size_t i = 0; i < v.size(); ++i)
      twice_area += cross2(Point(v[i] - v[0]), Point(v[(i + 1) % v.size()] - v[0]));
    if (twice_area < 0) std::reverse(v.begin(), v.end());

    bool changed = true;
    while (changed && v.size() >= 3) {
      changed = false;
      for (std::size_t i = 0; i < v.size() && v.size() >= 3;) {
        const Point prev = v[(i + v.size() - 1) % v.size()];
        const Point next = v[(i + 1) % v.size()];
        if ((v[i] - prev).norm() <= dup_tol) {
          v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          continue;
        }
        const Scalar turn = cross2(Point(v[i] - prev), Point(next - v[i]));
        if (turn <= turn_tol) {
          if (turn < -turn_tol) return std::nullopt;  // reflex vertex
          v.erase(v.begin() + static_cast<std::ptrdiff_t>(i));
          changed = true;
          continue;
        }
        ++i;
      }
    }
    if (v.size() < 3) return std::nullopt;

    // Total turning must be one full revolution (rules out self-overlapping stars).
    Scalar turning = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const Point e0 = v[(i + 1) % v.size()] - v[i];
      const Point e1 = v[(i + 2) % v.size()] - v[(i + 1) % v.size()];
      turning += std::atan2(cross2(e0, e1), e0.dot(e1));
    }
    if (abs(turning - Scalar(2) * std::numbers::pi_v<Scalar>) > Scalar(1e-6)) return std::nullopt;

    const Scalar lex_tol = Scalar(tol::lexicographic) * scale;
    auto lex_less = [lex_tol](const Point& a, const Point& b) {
      if (a.x() < b.x() - lex_tol) return true;
      if (abs(a.x() - b.x()) <= lex_tol) return a.y() < b.y();
      return false;
    };
    std::size_t first = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
      if (lex_less(v[i], v[first])) first = i;
    std::rotate(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(first), v.end());

    Points out(2, static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = v[i];
    return out;
  }

  Points vertices_;
};

using Polygon = ConvexPolygon<double>;
using Vec2 = Vector2<double>;

template <typename Scalar>
Scalar area(const ConvexPolygon<Scalar>& p) {
  const Eigen::Index n = p.size();
  const Points2<Scalar> rel = p.vertices().colwise() - p.vertices().col(0);
  Points2<Scalar> next(2, n);
  next << rel.rightCols(n - 1), rel.col(0);
  return Scalar(0.5) *
         (rel.row(0).cwiseProduct(next.row(1)) - rel.row(1).cwiseProduct(next.row(0))).sum();
}

template <typename Scalar>
struct Side {
  Vector2<Scalar> start;
  Vector2<Scalar> end;
  Scalar length;
  Vector2<Scalar> normal;  // outward unit normal

  Vector2<Scalar> tangent() const { return perp(normal); }
  /// Support value of the side's line, normal . x for x on the side.
  Scalar offset() const { return normal.dot(start); }
};

/// Sides in counter-clockwise order; side i joins vertex i to vertex i + 1.
template <typename Scalar>
std::vector<Side<Scalar>> sides(const ConvexPolygon<Scalar>& p) {
  std::vector<Side<Scalar>> out;
  out.reserve(static_cast<std::size_t>(p.size()));
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const Vector2<Scalar> a = p.vertex(i);
    const Vector2<Scalar> b = p.vertex(i + 1);
    const Vector2<Scalar> e = b - a;
    const Scalar len = e.norm();
    out.push_back({a, b, len, Vector2<Scalar>(e.y(), -e.x()) / len});
  }
  return out;
}

template <typename Scalar>
struct HalfPlane {
  Vector2<Scalar> normal;  // unit
  Scalar offset;           // the set {x : x . normal <= offset}
};

/// Half-planes with distinct unit normals and positive offsets (origin inside).
template <typename Scalar>
class HalfPlaneSet {
 public:
  explicit HalfPlaneSet(std::vector<HalfPlane<Scalar>> entries) : entries_(std::move(entries)) {
    for (auto& e : entries_) {
      const Scalar len = e.normal.norm();
      if (!(len > 0) || !std::isfinite(len) || !std::isfinite(e.offset))
        throw Error(ErrorCode::InvalidArgument, "half-plane normal must be a finite nonzero vector");
      e.normal /= len;
      e.offset /= len;
      if (!(e.offset > 0))
        throw Error(ErrorCode::OriginOutside, "half-plane offsets must be positive (origin interior)");
    }
    for (std::size_t i = 0; i < entries_.size(); ++i)
      for (std::size_t j = i + 1; j < entries_.size(); ++j)
        if ((entries_[i].normal - entries_[j].normal).norm() < Scalar(1e-12))
          throw Error(ErrorCode::InvalidArgument, "half-plane normals must be distinct");
  }

  const std::vector<HalfPlane<Scalar>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::vector<HalfPlane<Scalar>> entries_;
};

namespace detail {

template <typename Scalar>
Vector2<Scalar> line_intersection(const Vector2<Scalar>& n0, Scalar h0, const Vector2<Scalar>& n1,
                                  Scalar h1) {
  Matrix2<Scalar> m;
  m.row(0) = n0.transpose();
  m.row(1) = n1.transpose();
  return m.inverse() * Vector2<Scalar>(h0, h1);
}

/// Sutherland-Hodgman step: keep the part of `poly` with x . n <= h.
template <typename Scalar>
std::vector<Vector2<Scalar>> clip(const std::vector<Vector2<Scalar>>& poly, const Vector2<Scalar>& n,
                                  Scalar h) {
  std::vector<Vector2<Scalar>> out;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const auto& a = poly[i];
    const auto& b = poly[(i + 1) % m];
    const Scalar sa = n.dot(a) - h;
    const Scalar sb = n.dot(b) - h;
    if (sa <= 0) out.push_back(a);
    if ((sa < 0 && sb > 0) || (sa > 0 && sb < 0)) out.push_back(a + (sa / (sa - sb)) * (b - a));
  }
  return out;
}

template <typename Scalar>
Points2<Scalar> to_points(const std::vector<Vector2<Scalar>>& v) {
  Points2<Scalar> out(2, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = v[i];
  return out;
}

}  // namespace detail

/// Intersection of a minimal, bounded half-plane set.
template <typename Scalar>
ConvexPolygon<Scalar> polygon_from_halfplanes(const HalfPlaneSet<Scalar>& hps) {
  using std::atan2;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  auto entries = hps.entries();
  const std::size_t n = entries.size();
  if (n < 3) throw Error(ErrorCode::EmptyOrUnbounded, "fewer than three half-planes are unbounded");
  auto angle = [](const HalfPlane<Scalar>& e) { return atan2(e.normal.y(), e.normal.x()); };
  std::sort(entries.begin(), entries.end(),
            [&](const auto& a, const auto& b) { return angle(a) < angle(b); });
  for (std::size_t i = 0; i < n; ++i) {
    Scalar gap = angle(entries[(i + 1) % n]) - angle(entries[i]);
    if (i + 1 == n) gap += 2 * pi;
    if (gap >= pi - Scalar(1e-12))
      throw Error(ErrorCode::EmptyOrUnbounded, "half-plane intersection is unbounded");
  }

  Scalar h_max = 0;
  for (const auto& e : entries) h_max = std::max(h_max, std::abs(e.offset));

  std::vector<Vector2<Scalar>> verts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& prev = entries[(i + n - 1) % n];
    verts[i] = detail::line_intersection(prev.normal, prev.offset, entries[i].normal, entries[i].offset);
  }
  bool all_positive = true;
  for (std::size_t i = 0; i < n; ++i) {
    const Scalar len = (verts[(i + 1) % n] - verts[i]).dot(perp(entries[i].normal));
    if (!(len > Scalar(tol::duplicate) * h_max)) all_positive = false;
  }
  if (all_positive) return ConvexPolygon<Scalar>(detail::to_points(verts));

  // Some entry contributes no side: decide between an empty and a non-minimal set.
  const Scalar big = Scalar(1e6) * h_max;
  std::vector<Vector2<Scalar>> box{{-big, -big}, {big, -big}, {big, big}, {-big, big}};
  for (const auto& e : entries) {
    box = detail::clip(box, e.normal, e.offset);
    if (box.size() < 3) break;
  }
  auto clipped = box.size() >= 3 ? ConvexPolygon<Scalar>::try_from(detail::to_points(box))
                                 : std::nullopt;
  if (!clipped || area(*clipped) <= Scalar(1e-14) * h_max * h_max)
    throw Error(ErrorCode::EmptyOrUnbounded, "half-plane intersection is empty");
  throw Error(ErrorCode::Degenerate, "half-plane set is not minimal (a side has zero length)");
}

/// Inverse of polygon_from_halfplanes; requires the origin in the interior.
template <typename Scalar>
HalfPlaneSet<Scalar> halfplanes_of(const ConvexPolygon<Scalar>& p) {
  std::vector<HalfPlane<Scalar>> out;
  for (const auto& s : sides(p)) {
    if (!(s.offset() > 0))
      throw Error(ErrorCode::OriginOutside, "origin is not interior to the polygon");
    out.push_back({s.normal, s.offset()});
  }
  return HalfPlaneSet<Scalar>(std::move(out));
}

/// Convex intersection; std::nullopt when empty or of zero area.
template <typename Scalar>
std::optional<ConvexPolygon<Scalar>> intersection(const ConvexPolygon<Scalar>& p,
                                                  const ConvexPolygon<Scalar>& q) {
  std::vector<Vector2<Scalar>> poly;
  for (Eigen::Index i = 0; i < p.size(); ++i) poly.emplace_back(p.vertices().col(i));
  for (const auto& s : sides(q)) {
    poly = detail::clip(poly, s.normal, s.offset());
    if (poly.size() < 3) return std::nullopt;
  }
  auto result = ConvexPolygon<Scalar>::try_from(detail::to_points(poly));
  const Scalar sc = std::max(p.scale(), q.scale());
  if (!result || area(*result) <= Scalar(1e-14) * sc * sc) return std::nullopt;
  return result;
}

template <typename Scalar>
Scalar symmetric_difference_area(const ConvexPolygon<Scalar>& p, const ConvexPolygon<Scalar>& q) {
  const auto common = intersection(p, q);
  const Scalar shared = common ? area(*common) : Scalar(0);
  return std::max(Scalar(0), area(p) + area(q) - 2 * shared);
}

/// Fan from the area centroid; a triangle is returned unchanged.
template <typename Scalar>
std::vector<Triangle2<Scalar>> triangulate(const ConvexPolygon<Scalar>& p) {
  std::vector<Triangle2<Scalar>> out;
  if (p.size() == 3) {
    out.emplace_back(p.vertices());
    return out;
  }
  const Vector2<Scalar> c = p.centroid();
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    Triangle2<Scalar> t;
    t << c, p.vertex(i), p.vertex(i + 1);
    out.push_back(t);
  }
  return out;
}

template <typename Scalar>
Scalar triangle_area(const Triangle2<Scalar>& t) {
  return Scalar(0.5) * cross2(Vector2<Scalar>(t.col(1) - t.col(0)), Vector2<Scalar>(t.col(2) - t.col(0)));
}

template <typename Scalar>
ConvexPolygon<Scalar> apply_isometry(const ConvexPolygon<Scalar>& p, const Isometry2<Scalar>& iso) {
  Points2<Scalar> mapped = (iso.linear() * p.vertices()).colwise() + iso.translation();
  return ConvexPolygon<Scalar>(mapped);
}

template <typename Scalar>
ConvexPolygon<Scalar> translate(const ConvexPolygon<Scalar>& p, const Vector2<Scalar>& v) {
  return ConvexPolygon<Scalar>(Points2<Scalar>(p.vertices().colwise() + v));
}

template <typename Scalar>
ConvexPolygon<Scalar> scale(const ConvexPolygon<Scalar>& p, Scalar factor) {
  return ConvexPolygon<Scalar>(Points2<Scalar>(factor * p.vertices()));
}

/// Translate so the area centroid is the origin.
template <typename Scalar>
ConvexPolygon<Scalar> centered(const ConvexPolygon<Scalar>& p) {
  return translate(p, Vector2<Scalar>(-p.centroid()));
}

template <typename Scalar>
ConvexPolygon<Scalar> with_area(const ConvexPolygon<Scalar>& p, Scalar target) {
  return scale(p, std::sqrt(target / area(p)));
}

template <typename Scalar>
Isometry2<Scalar> reflection_about_line(const Vector2<Scalar>& point, Vector2<Scalar> direction) {
  direction.normalize();
  Isometry2<Scalar> iso = Isometry2<Scalar>::Identity();
  iso.linear() = 2 * direction * direction.transpose() - Matrix2<Scalar>::Identity();
  iso.translation() = point - iso.linear() * point;
  return iso;
}

template <typename Scalar>
Isometry2<Scalar> rotation_about(const Vector2<Scalar>& center, Scalar angle) {
  Isometry2<Scalar> iso = Isometry2<Scalar>::Identity();
  iso.linear() = Eigen::Rotation2D<Scalar>(angle).toRotationMatrix();
  iso.translation() = center - iso.linear() * center;
  return iso;
}

/// Vertex-wise equality up to a cyclic relabelling, tolerance relative to scale.
template <typename Scalar>
bool approx_equal(const ConvexPolygon<Scalar>& p, const ConvexPolygon<Scalar>& q, Scalar rel_tol) {
  if (p.size() != q.size()) return false;
  const Scalar limit = rel_tol * std::max(p.scale(), q.scale());
  for (Eigen::Index shift = 0; shift < p.size(); ++shift) {
    bool match = true;
    for (Eigen::Index i = 0; i < p.size() && match; ++i)
      match = (p.vertex(i) - q.vertex(i + shift)).norm() <= limit;
    if (match) return true;
  }
  return false;
}

/// Regular n-gon with the given circumradius centred at the origin, first vertex at `phase`.
template <typename Scalar>
ConvexPolygon<Scalar> regular_polygon(int n, Scalar circumradius, Scalar phase = 0) {
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "a polygon needs at least three sides");
  Points2<Scalar> pts(2, n);
  for (int k = 0; k < n; ++k) {
    const Scalar t = phase + 2 * std::numbers::pi_v<Scalar> * Scalar(k) / Scalar(n);
    pts.col(k) << circumradius * std::cos(t), circumradius * std::sin(t);
  }
  return ConvexPolygon<Scalar>(pts);
}

template <typename Scalar>
ConvexPolygon<Scalar> unit_area_regular_polygon(int n, Scalar phase = 0) {
  return with_area(regular_polygon<Scalar>(n, Scalar(1), phase), Scalar(1));
}

}  // namespace wrl
