#pragma once

// Double line integrals over pairs of segments,
//
//   J = int_{x in S} int_{y in T} K(x - y) ds(x) ds(y),
//
// for kernels K that are positively homogeneous of some degree p > -1 in
// z = x - y. Touching pairs (shared endpoint, T-junction, crossing) are split
// at the common point and Duffy-transformed so the radial factor r^(p+1) is
// integrated exactly; collinear touching pairs use the closed form of
// int int |s - t|^p; separated pairs use adaptive tensor Gauss-Legendre.

#include <wrl/geometry.hpp>
#include <wrl/quadrature.hpp>

#include <array>
#include <cmath>

namespace wrl {

struct Segment {
  Vec2 a;
  Vec2 b;

  Vec2 delta() const { return b - a; }
  double length() const { return (b - a).norm(); }
  Vec2 at(double u) const { return a + u * (b - a); }
};

struct PairQuadrature {
  int order = 8;
  int max_depth = 6;
  double near_ratio = 2.0;
  bool singular_transform = true;
};

/// |z|^p
struct PowerKernel {
  double p;
  double operator()(const Vec2& z) const { return std::pow(z.squaredNorm(), 0.5 * p); }
};

/// (-z . nu) |z|^(-alpha): the double-layer-like flux kernel of the Riesz potential.
struct FluxKernel {
  Vec2 nu;
  double alpha;
  double operator()(const Vec2& z) const { return -z.dot(nu) * std::pow(z.squaredNorm(), -0.5 * alpha); }
};

double point_segment_distance(const Vec2& x, const Segment& s);
double segment_distance(const Segment& s, const Segment& t);

namespace detail {

inline double power_antiderivative2(double u, double p) {
  // H(u) = u_+^(p+2) / ((p+1)(p+2)), so that H'' = u_+^p.
  return u > 0.0 ? std::pow(u, p + 2.0) / ((p + 1.0) * (p + 2.0)) : 0.0;
}

/// int_{a}^{b} int_{c}^{d} (s - t)_+^p dt ds.
inline double positive_part_power(double a, double b, double c, double d, double p) {
  return power_antiderivative2(b - c, p) + power_antiderivative2(a - d, p) -
         power_antiderivative2(b - d, p) - power_antiderivative2(a - c, p);
}

template <typename K>
double tensor_gauss(const Segment& s, const Segment& t, const K& kernel, const quad::GaussRule& rule) {
  const Vec2 ds = s.delta();
  const Vec2 dt = t.delta();
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Vec2 x = s.a + 0.5 * (1.0 + rule.nodes[i]) * ds;
    double inner = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
      const Vec2 y = t.a + 0.5 * (1.0 + rule.nodes[j]) * dt;
      inner += rule.weights[j] * kernel(Vec2(x - y));
    }
    sum += rule.weights[i] * inner;
  }
  return 0.25 * sum * ds.norm() * dt.norm();
}

inline std::array<Segment, 2> halves(const Segment& s) {
  const Vec2 m = 0.5 * (s.a + s.b);
  return {Segment{s.a, m}, Segment{m, s.b}};
}

template <typename K>
void separated_step(const Segment& s, const Segment& t, const K& kernel, double coarse,
                    const PairQuadrature& q, const quad::GaussRule& rule, int depth, double tol,
                    quad::Estimate& out) {
  const auto sh = halves(s);
  const auto th = halves(t);
  std::array<double, 4> child{};
  double fine = 0.0;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      child[static_cast<std::size_t>(2 * i + j)] = tensor_gauss(sh[static_cast<std::size_t>(i)], th[static_cast<std::size_t>(j)], kernel, rule);
      fine += child[static_cast<std::size_t>(2 * i + j)];
    }
  out.evaluations += 4 * static_cast<int>(rule.nodes.size() * rule.nodes.size());
  const double diff = std::abs(fine - coarse);
  const bool too_close =
      segment_distance(s, t) < q.near_ratio * std::max(s.length(), t.length());
  if (depth <= 0 || (!too_close && diff <= tol)) {
    if (diff > tol) out.converged = false;
    out.value += fine;
    out.error += diff;
    return;
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      separated_step(sh[static_cast<std::size_t>(i)], th[static_cast<std::size_t>(j)], kernel,
                     child[static_cast<std::size_t>(2 * i + j)], q, rule, depth - 1, 0.25 * tol, out);
}

template <typename K>
quad::Estimate separated_pair(const Segment& s, const Segment& t, const K& kernel,
                              const PairQuadrature& q, double tol) {
  quad::Estimate out;
  const auto& rule = quad::gauss_legendre(q.order);
  const double coarse = tensor_gauss(s, t, kernel, rule);
  out.evaluations += static_cast<int>(rule.nodes.size() * rule.nodes.size());
  separated_step(s, t, kernel, coarse, q, rule, q.max_depth, tol, out);
  return out;
}

/// Both pieces start at the shared point x0: x = x0 + sigma e1, y = x0 + tau e2.
template <typename K>
quad::Estimate duffy_corner(const Vec2& e1, double a, const Vec2& e2, double b, const K& kernel,
                            double degree, const PairQuadrature& q, double tol) {
  quad::Estimate out;
  const double radial_a = (b / a) * std::pow(a, degree + 2.0) / (degree + 2.0);
  const double radial_b = (a / b) * std::pow(b, degree + 2.0) / (degree + 2.0);
  const double ratio_ba = b / a;
  const double ratio_ab = a / b;
  auto lower = [&](double w) { return kernel(Vec2(e1 - ratio_ba * w * e2)); };
  auto upper = [&](double w) { return kernel(Vec2(ratio_ab * w * e1 - e2)); };
  auto j1 = quad::adaptive(lower, 0.0, 1.0, q.order, q.max_depth, 0.5 * tol / std::abs(radial_a));
  auto j2 = quad::adaptive(upper, 0.0, 1.0, q.order, q.max_depth, 0.5 * tol / std::abs(radial_b));
  out.value = radial_a * j1.value + radial_b * j2.value;
  out.error = std::abs(radial_a) * j1.error + std::abs(radial_b) * j2.error;
  out.converged = j1.converged && j2.converged;
  out.evaluations = j1.evaluations + j2.evaluations;
  return out;
}

}  // namespace detail

/// Integral of K(x - y) over S x T with absolute tolerance `tol`; `degree` is
/// the homogeneity degree of K.
template <typename K>
quad::Estimate segment_pair_integral(const Segment& s, const Segment& t, const K& kernel,
                                     double degree, const PairQuadrature& q, double tol) {
  const Vec2 ds = s.delta();
  const Vec2 dt = t.delta();
  const double ls = ds.norm();
  const double lt = dt.norm();
  if (ls == 0.0 || lt == 0.0) return {};
  const double scale = std::max(ls, lt);
  const double cr = cross2(ds, dt);

  if (std::abs(cr) <= 1e-13 * ls * lt) {
    const double offset = std::abs(cross2(ds, Vec2(t.a - s.a))) / ls;
    if (offset > 1e-13 * scale) return detail::separated_pair(s, t, kernel, q, tol);
    // Collinear: coordinates along the common line.
    const Vec2 e = ds / ls;
    double c0 = (t.a - s.a).dot(e);
    double c1 = (t.b - s.a).dot(e);
    if (c0 > c1) std::swap(c0, c1);
    if (c0 > ls || c1 < 0.0) return detail::separated_pair(s, t, kernel, q, tol);
    quad::Estimate out;
    out.value = kernel(e) * detail::positive_part_power(0.0, ls, c0, c1, degree) +
                kernel(Vec2(-e)) * detail::positive_part_power(c0, c1, 0.0, ls, degree);
    return out;
  }

  const Vec2 w = t.a - s.a;
  const double u = cross2(w, dt) / cr;  // parameter on s of the line crossing
  const double v = cross2(w, ds) / cr;  // parameter on t
  const double eps_u = 1e-12 * scale / ls;
  const double eps_v = 1e-12 * scale / lt;
  const bool touching = u >= -eps_u && u <= 1.0 + eps_u && v >= -eps_v && v <= 1.0 + eps_v;
  if (!touching || !q.singular_transform) return detail::separated_pair(s, t, kernel, q, tol);

  const double uc = std::clamp(u, 0.0, 1.0);
  const double vc = std::clamp(v, 0.0, 1.0);
  const Vec2 e1 = ds / ls;
  const Vec2 e2 = dt / lt;
  // Pieces measured from the common point: (direction, length).
  std::array<std::pair<Vec2, double>, 2> sp{{{-e1, uc * ls}, {e1, (1.0 - uc) * ls}}};
  std::array<std::pair<Vec2, double>, 2> tp{{{-e2, vc * lt}, {e2, (1.0 - vc) * lt}}};
  const double min_piece = 1e-14 * scale;
  int pieces = 0;
  for (const auto& a : sp)
    for (const auto& b : tp)
      if (a.second > min_piece && b.second > min_piece) ++pieces;
  quad::Estimate out;
  for (const auto& a : sp)
    for (const auto& b : tp) {
      if (a.second <= min_piece || b.second <= min_piece) continue;
      out += detail::duffy_corner(a.first, a.second, b.first, b.second, kernel, degree, q,
                                  tol / pieces);
    }
  return out;
}

}  // namespace wrl
