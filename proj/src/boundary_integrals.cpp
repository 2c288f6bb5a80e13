#include <wrl/boundary_integrals.hpp>

namespace wrl {

double point_segment_distance(const Vec2& x, const Segment& s) {
  const Vec2 d = s.delta();
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (x - s.a).norm();
  const double u = std::clamp((x - s.a).dot(d) / len2, 0.0, 1.0);
  return (x - s.at(u)).norm();
}

double segment_distance(const Segment& s, const Segment& t) {
  const Vec2 ds = s.delta();
  const Vec2 dt = t.delta();
  const double cr = cross2(ds, dt);
  if (cr != 0.0) {
    const Vec2 w = t.a - s.a;
    const double u = cross2(w, dt) / cr;
    const double v = cross2(w, ds) / cr;
    if (u >= 0.0 && u <= 1.0 && v >= 0.0 && v <= 1.0) return 0.0;
  }
  return std::min({point_segment_distance(s.a, t), point_segment_distance(s.b, t),
                   point_segment_distance(t.a, s), point_segment_distance(t.b, s)});
}

}  // namespace wrl
