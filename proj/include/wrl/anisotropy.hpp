#pragma once

// Crystalline surface tensions psi(nu) = max_i nu . xi_i, their duals and Wulff
// shapes, and the class of unit-area polygons that are reflection symmetric
// about every angle bisector.

#include <wrl/geometry.hpp>

#include <optional>
#include <string>
#include <vector>

namespace wrl {

namespace detail {

/// Andrew's monotone chain; returns hull vertex indices in counter-clockwise order.
template <typename Scalar>
std::vector<Eigen::Index> convex_hull_indices(const Points2<Scalar>& pts) {
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(pts.cols()));
  for (Eigen::Index i = 0; i < pts.cols(); ++i) idx[static_cast<std::size_t>(i)] = i;
  std::sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
    return pts(0, a) < pts(0, b) || (pts(0, a) == pts(0, b) && pts(1, a) < pts(1, b));
  });
  const Scalar sc = (pts.rowwise().maxCoeff() - pts.rowwise().minCoeff()).norm();
  const Scalar eps = Scalar(tol::collinear) * sc * sc;
  auto turn = [&](Eigen::Index o, Eigen::Index a, Eigen::Index b) {
    return cross2(Vector2<Scalar>(pts.col(a) - pts.col(o)), Vector2<Scalar>(pts.col(b) - pts.col(o)));
  };
  std::vector<Eigen::Index> hull;
  for (int pass = 0; pass < 2; ++pass) {
    const std::size_t base = hull.size();
    for (Eigen::Index i : idx) {
      while (hull.size() >= base + 2 && turn(hull[hull.size() - 2], hull.back(), i) <= eps)
        hull.pop_back();
      hull.push_back(i);
    }
    hull.pop_back();
    std::reverse(idx.begin(), idx.end());
  }
  return hull;
}

}  // namespace detail

template <typename Scalar>
class CrystallineTension {
 public:
  /// Generators are the candidate Wulff-shape vertices; the origin must lie
  /// strictly inside their convex hull.
  explicit CrystallineTension(Points2<Scalar> generators) : generators_(std::move(generators)) {
    if (generators_.cols() < 3)
      throw Error(ErrorCode::InvalidArgument, "a crystalline tension needs at least three generators");
    if ((generators_.colwise().norm().array() <= Scalar(0)).any())
      throw Error(ErrorCode::InvalidArgument, "generators must be nonzero");
    const auto hull = detail::convex_hull_indices(generators_);
    if (hull.size() < 3) throw Error(ErrorCode::Degenerate, "generators are collinear");
    Points2<Scalar> hv(2, static_cast<Eigen::Index>(hull.size()));
    for (std::size_t i = 0; i < hull.size(); ++i) hv.col(static_cast<Eigen::Index>(i)) = generators_.col(hull[i]);
    wulff_ = ConvexPolygon<Scalar>(hv);
    const Scalar margin = Scalar(tol::duplicate) * wulff_->scale();
    if (!wulff_->contains(Vector2<Scalar>::Zero(), margin))
      throw Error(ErrorCode::OriginOutside, "origin is not interior to the generator hull");
    for (Eigen::Index i = 0; i < generators_.cols(); ++i) {
      bool is_vertex = false;
      for (Eigen::Index k = 0; k < wulff_->size() && !is_vertex; ++k)
        is_vertex = (wulff_->vertex(k) - generators_.col(i)).norm() <= margin;
      if (!is_vertex) redundant_.push_back(i);
    }
    for (const auto& s : sides(*wulff_)) dual_generators_.push_back(s.normal / s.offset());
  }

  const Points2<Scalar>& generators() const { return generators_; }

  /// psi(nu) = max_i nu . xi_i
  template <typename Derived>
  Scalar operator()(const Eigen::MatrixBase<Derived>& nu) const {
    return (nu.transpose() * generators_).maxCoeff();
  }

  /// Generators that are not vertices of their hull (non-minimal input).
  const std::vector<Eigen::Index>& redundant_generators() const { return redundant_; }
  bool is_minimal() const { return redundant_.empty(); }

  /// sigma_i = nu_i / h_i over the Wulff-shape sides.
  const std::vector<Vector2<Scalar>>& dual_generators() const { return dual_generators_; }

  const ConvexPolygon<Scalar>& hull() const { return *wulff_; }

 private:
  Points2<Scalar> generators_;
  std::optional<ConvexPolygon<Scalar>> wulff_;
  std::vector<Eigen::Index> redundant_;
  std::vector<Vector2<Scalar>> dual_generators_;
};

using Tension = CrystallineTension<double>;

/// The tension whose Wulff shape is K; the origin must be interior to K.
template <typename Scalar>
CrystallineTension<Scalar> tension_from_polygon(const ConvexPolygon<Scalar>& k) {
  if (!k.contains(Vector2<Scalar>::Zero(), Scalar(tol::duplicate) * k.scale()))
    throw Error(ErrorCode::OriginOutside, "origin is not interior to the polygon");
  return CrystallineTension<Scalar>(k.vertices());
}

/// psi_*(xi) = max_i xi . sigma_i; the unit ball of psi_* is the Wulff shape.
template <typename Scalar, typename Derived>
Scalar dual_value(const CrystallineTension<Scalar>& t, const Eigen::MatrixBase<Derived>& xi) {
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  for (const auto& sigma : t.dual_generators()) best = std::max(best, xi.dot(sigma));
  return std::max(best, Scalar(0));
}

template <typename Scalar>
ConvexPolygon<Scalar> wulff_shape(const CrystallineTension<Scalar>& t) {
  return t.hull();
}

/// Sum over sides of psi(nu_i) * l_i.
template <typename Scalar>
Scalar anisotropic_perimeter(const ConvexPolygon<Scalar>& p, const CrystallineTension<Scalar>& t) {
  Scalar total = 0;
  for (const auto& s : sides(p)) total += t(s.normal) * s.length;
  return total;
}

template <typename Scalar>
struct SymmetricPolygonSpec {
  int n = 4;
  std::optional<Scalar> angle;  // interior angle alpha; ignored (must be regular) for odd n
};

/// Interior angle of the regular n-gon.
template <typename Scalar>
Scalar regular_interior_angle(int n) {
  return std::numbers::pi_v<Scalar> * Scalar(n - 2) / Scalar(n);
}

/// Unit-area equilateral polygon with alternating interior angles alpha, beta,
/// glued from n copies of the triangle with base angles alpha/2 and beta/2.
/// The first side is horizontal at the bottom.
template <typename Scalar>
ConvexPolygon<Scalar> build_symmetric_polygon(const SymmetricPolygonSpec<Scalar>& spec) {
  using std::abs;
  constexpr Scalar pi = std::numbers::pi_v<Scalar>;
  const int n = spec.n;
  if (n < 3) throw Error(ErrorCode::InvalidArgument, "n must be at least 3");
  const Scalar regular = regular_interior_angle<Scalar>(n);
  Scalar alpha = spec.angle.value_or(regular);
  if (n % 2 == 1) {
    if (abs(alpha - regular) > Scalar(1e-12))
      throw Error(ErrorCode::OddNWithAngle, "for odd n only the regular polygon is symmetric");
    alpha = regular;
  } else {
    const Scalar lower = Scalar(n - 4) * pi / Scalar(n);
    if (!(alpha > lower && alpha < pi))
      throw Error(ErrorCode::AngleOutOfRange, "interior angle outside ((n-4)pi/n, pi)");
  }
  const Scalar beta = 2 * pi * Scalar(n - 2) / Scalar(n) - alpha;
  // Law of sines in the glued triangle (apex angle 2pi/n at the centre).
  const Scalar r_alpha = std::sin(beta / 2);
  const Scalar r_beta = std::sin(alpha / 2);
  const Scalar phase = -pi / 2 - pi / Scalar(n);
  Points2<Scalar> pts(2, n);
  for (int k = 0; k < n; ++k) {
    const Scalar r = (k % 2 == 0) ? r_alpha : r_beta;
    const Scalar t = phase + 2 * pi * Scalar(k) / Scalar(n);
    pts.col(k) << r * std::cos(t), r * std::sin(t);
  }
  // Rotate so that the side joining vertices 0 and 1 is horizontal.
  const Vector2<Scalar> e = pts.col(1) - pts.col(0);
  const Matrix2<Scalar> rot = Eigen::Rotation2D<Scalar>(-std::atan2(e.y(), e.x())).toRotationMatrix();
  return with_area(ConvexPolygon<Scalar>(Points2<Scalar>(rot * pts)), Scalar(1));
}

template <typename Scalar>
struct SideIsometry {
  Eigen::Index from;
  Eigen::Index to;
  Isometry2<Scalar> map;
};

template <typename Scalar>
struct MembershipReport {
  bool is_member = false;
  std::string reason;
  std::vector<SideIsometry<Scalar>> witnesses;  // S_ij with S_ij(L_i) = L_j, S_ij(P) = P
};

/// Reflection about the interior angle bisector at vertex k.
template <typename Scalar>
Isometry2<Scalar> bisector_reflection(const ConvexPolygon<Scalar>& p, Eigen::Index k) {
  const Vector2<Scalar> v = p.vertex(k);
  const Vector2<Scalar> to_prev = (p.vertex(k - 1) - v).normalized();
  const Vector2<Scalar> to_next = (p.vertex(k + 1) - v).normalized();
  return reflection_about_line<Scalar>(v, to_prev + to_next);
}

template <typename Scalar>
MembershipReport<Scalar> verify_class_membership(const ConvexPolygon<Scalar>& p) {
  MembershipReport<Scalar> report;
  if (std::abs(area(p) - Scalar(1)) > Scalar(1e-9)) {
    report.reason = "area is not 1";
    return report;
  }
  const Eigen::Index n = p.size();
  std::vector<Isometry2<Scalar>> reflections;
  for (Eigen::Index k = 0; k < n; ++k) {
    reflections.push_back(bisector_reflection(p, k));
    if (!approx_equal(apply_isometry(p, reflections.back()), p, Scalar(tol::symmetry))) {
      report.reason = "not symmetric about the bisector at vertex " + std::to_string(k);
      return report;
    }
  }
  // Reflection k swaps sides k-1 and k, so walking forward composes S_ij.
  const auto all_sides = sides(p);
  const Scalar limit = Scalar(tol::symmetry) * p.scale();
  for (Eigen::Index i = 0; i < n; ++i) {
    Isometry2<Scalar> map = Isometry2<Scalar>::Identity();
    for (Eigen::Index step = 0; step < n; ++step) {
      const Eigen::Index j = (i + step) % n;
      const auto& from = all_sides[static_cast<std::size_t>(i)];
      const auto& to = all_sides[static_cast<std::size_t>(j)];
      const Vector2<Scalar> a = map * from.start;
      const Vector2<Scalar> b = map * from.end;
      const bool hits = ((a - to.start).norm() <= limit && (b - to.end).norm() <= limit) ||
                        ((a - to.end).norm() <= limit && (b - to.start).norm() <= limit);
      if (!hits) {
        report.reason = "composed reflections do not map side " + std::to_string(i) + " onto side " +
                        std::to_string(j);
        report.witnesses.clear();
        return report;
      }
      report.witnesses.push_back({i, j, map});
      map = reflections[static_cast<std::size_t>((j + 1) % n)] * map;
    }
  }
  report.is_member = true;
  return report;
}

}  // namespace wrl
