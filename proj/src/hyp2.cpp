#include "marimba/hyp2.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <utility>

#include "marimba/errors.hpp"

namespace marimba {

bool same_ideal(Ideal p, Ideal q, double tol) {
  if (p.inf || q.inf) return p.inf && q.inf;
  return std::abs(p.x - q.x) <= tol * (1.0 + std::abs(p.x));
}

double wrap_angle(double t) {
  double r = std::fmod(t, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r = 0.0;
  return r;
}

Isometry2 operator*(const Isometry2& g, const Isometry2& h) {
  return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d,
          g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

// Adjugate: the inverse Moebius map, and the exact matrix inverse for unit
// determinant. Keeps inverse(inverse(g)) == g bitwise.
Isometry2 inverse(const Isometry2& g) { return {g.d, -g.b, -g.c, g.a}; }

Isometry2 renormalize(const Isometry2& g) {
  double det = g.det();
  if (!(det >= kPolicy.det_min && det <= kPolicy.det_max))
    throw Error(Errc::Degenerate, "isometry determinant " + std::to_string(det));
  double s = 1.0 / std::sqrt(det);
  return {g.a * s, g.b * s, g.c * s, g.d * s};
}

Isometry2 translation(double t) {
  double e = std::exp(0.5 * t);
  return {e, 0.0, 0.0, 1.0 / e};
}

Isometry2 rotation(double alpha) {
  double c = std::cos(0.5 * alpha), s = std::sin(0.5 * alpha);
  return {c, s, -s, c};
}

Isometry2 affine_to(PointH2 p) {
  double r = std::sqrt(p.im);
  return {r, p.re / r, 0.0, 1.0 / r};
}

PointH2 apply(const Isometry2& g, PointH2 p) {
  // (a z + b)/(c z + d) with z = x + i y
  double nx = g.a * p.re + g.b, ny = g.a * p.im;
  double dx = g.c * p.re + g.d, dy = g.c * p.im;
  double den = dx * dx + dy * dy;
  return {(nx * dx + ny * dy) / den, (ny * dx - nx * dy) / den};
}

Ideal apply(const Isometry2& g, Ideal p) {
  if (p.inf) {
    if (g.c == 0.0) return Ideal::infinity();
    return Ideal::at(g.a / g.c);
  }
  double den = g.c * p.x + g.d;
  if (den == 0.0) return Ideal::infinity();
  return Ideal::at((g.a * p.x + g.b) / den);
}

GeodesicH2 apply(const Isometry2& g, const GeodesicH2& geo) {
  return {apply(g, geo.a), apply(g, geo.b)};
}

UnitTangentH2 apply(const Isometry2& g, const UnitTangentH2& v) {
  double cx = g.c * v.base.re + g.d, cy = g.c * v.base.im;
  return {apply(g, v.base), wrap_angle(v.dir - 2.0 * std::atan2(cy, cx))};
}

Isometry2 frame(const UnitTangentH2& v) {
  return affine_to(v.base) * rotation(v.dir - 0.5 * kPi);
}

UnitTangentH2 tangent_of_frame(const Isometry2& f) {
  return apply(f, UnitTangentH2{{0.0, 1.0}, 0.5 * kPi});
}

UnitTangentH2 flow(const UnitTangentH2& v, double t) {
  return tangent_of_frame(frame(v) * translation(t));
}

double dist(PointH2 p, PointH2 q) {
  double dx = p.re - q.re, dy = p.im - q.im;
  return 2.0 * std::asinh(std::sqrt(dx * dx + dy * dy) / (2.0 * std::sqrt(p.im * q.im)));
}

double direction_to(PointH2 p, PointH2 q) {
  PointH2 w = apply(inverse(affine_to(p)), q);
  // Cayley transform to the disk centred at i gives the direction toward w.
  double nx = w.re, ny = w.im - 1.0;
  double dx = w.re, dy = w.im + 1.0;
  double qx = nx * dx + ny * dy, qy = ny * dx - nx * dy;
  return wrap_angle(std::atan2(qy, qx) + 0.5 * kPi);
}

GeodesicH2 geodesic_through(PointH2 p, PointH2 q) {
  Isometry2 f = frame({p, direction_to(p, q)});
  // Snap endpoints that are infinite up to rounding, so vertical lines are
  // represented exactly instead of by enormous half-circles.
  auto snap = [](double num, double den) {
    return std::abs(den) <= 1e-13 * std::abs(num) ? Ideal::infinity() : Ideal::at(num / den);
  };
  return {snap(f.b, f.d), snap(f.a, f.c)};
}

double side_value(const GeodesicH2& g, PointH2 z) {
  if (g.b.inf) return g.a.x - z.re;
  if (g.a.inf) return z.re - g.b.x;
  double c = 0.5 * (g.a.x + g.b.x), r = 0.5 * (g.b.x - g.a.x);
  double dx = z.re - c;
  double v = dx * dx + z.im * z.im - r * r;
  return r > 0 ? v : -v;
}

namespace {

Isometry2 unit_det(const Isometry2& m) {
  double s = 1.0 / std::sqrt(m.det());
  return {m.a * s, m.b * s, m.c * s, m.d * s};
}

// Orientation-preserving map sending g.a to 0 and g.b to infinity.
Isometry2 normalizer(const GeodesicH2& g) {
  if (g.b.inf) return {1.0, -g.a.x, 0.0, 1.0};
  if (g.a.inf) return {0.0, -1.0, 1.0, -g.b.x};
  double s = g.a.x > g.b.x ? 1.0 : -1.0;
  return unit_det({s, -s * g.a.x, 1.0, -g.b.x});
}

std::array<double, 3> hyperboloid(PointH2 z) {
  double r2 = z.re * z.re + z.im * z.im;
  return {(1.0 + r2) / (2.0 * z.im), z.re / z.im, (r2 - 1.0) / (2.0 * z.im)};
}

}  // namespace

Perpendicular common_perpendicular(const GeodesicH2& g1, const GeodesicH2& g2) {
  double tol = kPolicy.geom_tol;
  if (same_ideal(g1.a, g2.a, tol) || same_ideal(g1.a, g2.b, tol) ||
      same_ideal(g1.b, g2.a, tol) || same_ideal(g1.b, g2.b, tol))
    throw Error(Errc::SharedEndpoint, "geodesics share an ideal endpoint");
  Isometry2 m = normalizer(g1);
  Ideal pa = apply(m, g2.a), pb = apply(m, g2.b);
  if (pa.inf || pb.inf || pa.x == 0.0 || pb.x == 0.0)
    throw Error(Errc::SharedEndpoint, "geodesics share an ideal endpoint");
  if (pa.x * pb.x < 0.0) throw Error(Errc::Crossing, "geodesics intersect");
  double sign = pa.x > 0 ? 1.0 : -1.0;
  double p = std::abs(pa.x), q = std::abs(pb.x);
  if (p > q) std::swap(p, q);
  double radius = std::sqrt(p * q);
  double fx = 2.0 * p * q / (p + q);
  double fy = std::sqrt(std::max(0.0, radius * radius - fx * fx));
  Isometry2 back = inverse(m);
  Perpendicular out;
  out.length = 2.0 * std::atanh(std::sqrt(p / q));
  out.foot1 = apply(back, PointH2{0.0, radius});
  out.foot2 = apply(back, PointH2{sign * fx, fy});
  return out;
}

double geodesic_position(const GeodesicH2& g, PointH2 p) {
  if (g.b.inf) return std::log(p.im);
  if (g.a.inf) return -std::log(p.im);
  double c = 0.5 * (g.a.x + g.b.x), r = 0.5 * std::abs(g.b.x - g.a.x);
  double pos = std::atanh(std::clamp((p.re - c) / r, -1.0, 1.0));
  return g.b.x > g.a.x ? pos : -pos;
}

std::optional<Hit> hit_geodesic(const UnitTangentH2& v, const GeodesicH2& g) {
  Isometry2 f = frame(v);
  Isometry2 fi = inverse(f);
  Ideal u1 = apply(fi, g.a), u2 = apply(fi, g.b);
  if (u1.inf || u2.inf) return std::nullopt;
  double prod = -u1.x * u2.x;
  if (!(prod > 1.0)) return std::nullopt;
  double h = std::sqrt(prod);
  double c0 = 0.5 * (u1.x + u2.x);
  double s = u2.x > u1.x ? 1.0 : -1.0;
  Hit out;
  out.time = std::log(h);
  out.angle = wrap_angle(std::atan2(s * h, s * c0));
  out.point = apply(f, PointH2{0.0, h});
  out.position = geodesic_position(g, out.point);
  return out;
}

double segment_geodesic_distance(PointH2 p, PointH2 q, const GeodesicH2& g) {
  Isometry2 m = normalizer(g);
  PointH2 mp = apply(m, p), mq = apply(m, q);
  auto P = hyperboloid(mp), Q = hyperboloid(mq);
  double len = dist(mp, mq);
  double a = P[1];
  double best = std::min(std::abs(P[1]), std::abs(Q[1]));
  if (P[1] * Q[1] <= 0.0) return 0.0;
  if (len > 1e-14) {
    double u = (Q[1] - std::cosh(len) * P[1]) / std::sinh(len);
    if (std::abs(u) < std::abs(a)) {
      double s = std::atanh(-u / a);
      if (s > 0.0 && s < len) {
        double f = a * std::cosh(s) + u * std::sinh(s);
        if (f * a <= 0.0) return 0.0;
        best = std::min(best, std::abs(f));
      }
    }
  }
  return std::asinh(best);
}

}  // namespace marimba
