#pragma once

#include <optional>

namespace marimba {

struct NumericPolicy {
  double geom_tol = 1e-10;
  double matrix_tol = 1e-12;
  double tangency_tol = 1e-9;
  double det_min = 0.5;
  double det_max = 2.0;
};

inline constexpr NumericPolicy kPolicy{};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

struct PointH2 {
  double re = 0.0;
  double im = 1.0;
};

// Boundary point of the upper half-plane; the point at infinity is tagged.
struct Ideal {
  double x = 0.0;
  bool inf = false;
  static Ideal at(double v) { return {v, false}; }
  static Ideal infinity() { return {0.0, true}; }
};

bool same_ideal(Ideal p, Ideal q, double tol);

// Oriented from a to b.
struct GeodesicH2 {
  Ideal a;
  Ideal b;
};

// Acts by z -> (a z + b) / (c z + d).
struct Isometry2 {
  double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
  double det() const { return a * d - b * c; }
};

struct UnitTangentH2 {
  PointH2 base;
  double dir = 0.0;
};

double wrap_angle(double t);

Isometry2 operator*(const Isometry2& g, const Isometry2& h);
Isometry2 inverse(const Isometry2& g);
Isometry2 renormalize(const Isometry2& g);
Isometry2 translation(double t);  // diag(e^{t/2}, e^{-t/2})
Isometry2 rotation(double alpha); // rotation about i by alpha
Isometry2 affine_to(PointH2 p);   // z -> im(p) z + re(p)

PointH2 apply(const Isometry2& g, PointH2 p);
Ideal apply(const Isometry2& g, Ideal p);
GeodesicH2 apply(const Isometry2& g, const GeodesicH2& geo);
UnitTangentH2 apply(const Isometry2& g, const UnitTangentH2& v);

// Isometry sending the upward vector at i to v.
Isometry2 frame(const UnitTangentH2& v);
UnitTangentH2 tangent_of_frame(const Isometry2& f);
UnitTangentH2 flow(const UnitTangentH2& v, double t);

double dist(PointH2 p, PointH2 q);

// Direction at p of the geodesic toward q.
double direction_to(PointH2 p, PointH2 q);

// Geodesic through p and q, oriented from p to q.
GeodesicH2 geodesic_through(PointH2 p, PointH2 q);

// Signed arclength coordinate of a point on g, increasing from a to b; zero at
// the apex of a half-circle or at height 1 on a vertical line.
double geodesic_position(const GeodesicH2& g, PointH2 p);

// Positive to the left of the oriented geodesic, negative to the right.
double side_value(const GeodesicH2& g, PointH2 z);

struct Perpendicular {
  double length;
  PointH2 foot1;
  PointH2 foot2;
};

Perpendicular common_perpendicular(const GeodesicH2& g1, const GeodesicH2& g2);

struct Hit {
  double time;
  // Counterclockwise angle from the direction of g to the ray, in (0, 2pi).
  double angle;
  // Signed arclength along g from its apex (or from height 1 on vertical lines).
  double position;
  PointH2 point;
};

std::optional<Hit> hit_geodesic(const UnitTangentH2& v, const GeodesicH2& g);

// Lower bound on dist(z, g) over z on the segment [p, q].
double segment_geodesic_distance(PointH2 p, PointH2 q, const GeodesicH2& g);

}  // namespace marimba
