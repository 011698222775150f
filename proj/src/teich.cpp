#include "marimba/teich.hpp"

#include <algorithm>
#include <cmath>

#include "marimba/errors.hpp"

namespace marimba {

TwoStepParts two_step_components(const Surface& surface, const ArcClass& arc) {
  if (arc.k != 2) throw Error(Errc::WrongStepCount, "arc is not a 2-step arc");
  OrthoArc ortho = orthogeodesic_length(surface, arc);
  const CellSide& start = surface.cells[arc.start_cell].sides[arc.start_side];
  Isometry2 m;
  std::vector<std::pair<GeodesicH2, int>> crossed;
  for (int id : arc.word) {
    int cell, side, index;
    decode_portal(id, cell, side, index);
    const CellSide& s = surface.cells[cell].sides[side];
    if (s.kind == SideKind::Cuff && !surface.cuffs[s.cuff].label.empty()) crossed.push_back({apply(m, s.line), s.cuff});
    m = renormalize(m * inverse(s.portals.at(index).g));
  }
  GeodesicH2 end_line = apply(m, surface.cells[arc.end_cell].sides[arc.end_side].line);
  PointH2 foot1 = ortho.foot_start, foot2 = apply(m, ortho.foot_end);
  const double tol = 1e-9;
  for (auto [line, cuff] : crossed) {
    double u = side_value(line, foot1), v = side_value(line, foot2);
    if (!((u > tol && v < -tol) || (u < -tol && v > tol))) continue;
    if (u > 0) std::swap(line.a, line.b);
    Perpendicular first = common_perpendicular(start.line, line);
    Perpendicular second = common_perpendicular(line, end_line);
    TwoStepParts out;
    out.first = first.length;
    out.second = second.length;
    out.offset = geodesic_position(line, second.foot1) - geodesic_position(line, first.foot2);
    out.cuff = cuff;
    return out;
  }
  throw Error(Errc::WrongStepCount, "no labelled curve separates the arc's feet");
}

double two_step_formula(double first, double second, double offset) {
  return std::acosh(std::sinh(first) * std::sinh(second) * std::cosh(offset) + std::cosh(first) * std::cosh(second));
}

namespace {

int gluing_cuff(const Surface& surface, const std::string& gluing) {
  for (size_t i = 0; i < surface.cuffs.size(); ++i)
    if (surface.cuffs[i].gluing == gluing) return static_cast<int>(i);
  throw Error(Errc::Validation, "unknown gluing '" + gluing + "'");
}

TwistArc arc_data(const TwoStepParts& p) {
  return {std::sinh(p.first) * std::sinh(p.second), std::cosh(p.first) * std::cosh(p.second), p.offset, 0.0, p.first,
          p.second};
}

}  // namespace

TwistFamily make_twist_family(const MarimbaSpec& spec, const std::string& gluing, const std::vector<ArcClass>& arcs) {
  if (arcs.size() < 2) throw Error(Errc::OutOfRange, "a twist family needs at least two arcs");
  Surface surface = build_surface(spec);
  TwistFamily fam{spec, gluing, gluing_cuff(surface, gluing), {}};
  if (surface.cuffs[fam.cuff].label.empty()) throw Error(Errc::Validation, "gluing is not a labelled curve");
  for (const auto& c : arcs) {
    TwoStepParts p = two_step_components(surface, c);
    if (p.cuff != fam.cuff) throw Error(Errc::WrongStepCount, "arc does not cross the family's curve");
    fam.arcs.push_back(arc_data(p));
  }
  for (auto& a : fam.arcs) a.delta = a.d - fam.arcs.front().d;
  return fam;
}

TwistFamily make_twist_family(const MarimbaSpec& spec, const std::string& gluing, int r, double l_max) {
  if (r < 2) throw Error(Errc::OutOfRange, "a twist family needs at least two arcs");
  Surface surface = build_surface(spec);
  int cuff = gluing_cuff(surface, gluing);
  std::vector<ArcClass> chosen;
  std::vector<TwoStepParts> parts;
  for (const auto& arc : enumerate_arcs(surface, 2, l_max)) {
    TwoStepParts p = two_step_components(surface, arc.cls);
    if (p.cuff != cuff) continue;
    // Orientation reversal gives the same halves swapped and the same offset.
    bool seen = false;
    for (const auto& q : parts) {
      bool same = std::abs(q.offset - p.offset) < 1e-9 &&
                  ((std::abs(q.first - p.first) < 1e-9 && std::abs(q.second - p.second) < 1e-9) ||
                   (std::abs(q.first - p.second) < 1e-9 && std::abs(q.second - p.first) < 1e-9));
      seen = seen || same;
    }
    if (seen) continue;
    parts.push_back(p);
    chosen.push_back(arc.cls);
    if (static_cast<int>(chosen.size()) == r) break;
  }
  if (static_cast<int>(chosen.size()) < r) throw Error(Errc::BudgetExceeded, "not enough distinct arcs below the length bound");
  return make_twist_family(spec, gluing, chosen);
}

double two_step_length(const TwistFamily& family, int i, double theta) {
  const TwistArc& a = family.arcs.at(i);
  return std::acosh(a.a * std::cosh(a.d + theta) + a.b);
}

std::vector<double> family_cosh_lengths(const TwistFamily& family, double theta) {
  std::vector<double> out;
  for (const auto& a : family.arcs) out.push_back(a.a * std::cosh(a.d + theta) + a.b);
  return out;
}

std::vector<double> twist_variety_residual(const TwistFamily& family, const std::vector<double>& x) {
  size_t r = family.arcs.size();
  if (r < 2 || x.size() != r) throw Error(Errc::OutOfRange, "need one cosh-length per family arc");
  std::vector<double> y(r);
  for (size_t i = 0; i < r; ++i) {
    const TwistArc& a = family.arcs[i];
    if (!(x[i] > a.b)) throw Error(Errc::OutOfRange, "cosh-length below its minimum");
    y[i] = (x[i] - a.b) / (a.a * std::cosh(a.delta));
  }
  std::vector<double> out;
  for (size_t i = 1; i < r; ++i) {
    double t = std::tanh(family.arcs[i].delta);
    out.push_back(t * t * y[0] * y[0] - (y[i] - y[0]) * (y[i] - y[0]) - t * t);
  }
  return out;
}

MarimbaSpec twisted_spec(const TwistFamily& family, double theta) {
  MarimbaSpec out = family.base;
  for (auto& g : out.gluings)
    if (g.id == family.gluing) g.twist += theta;
  if (out.family) {
    if (family.gluing == "alpha") out.family->twist_alpha += theta;
    if (family.gluing == "beta") out.family->twist_beta += theta;
  }
  return out;
}

double rebuilt_two_step_length(const TwistFamily& family, int i, double theta, double l_max) {
  const TwistArc& want = family.arcs.at(i);
  Surface surface = build_surface(twisted_spec(family, theta));
  for (const auto& arc : enumerate_arcs(surface, 2, l_max)) {
    TwoStepParts p = two_step_components(surface, arc.cls);
    if (p.cuff != family.cuff) continue;
    if (std::abs(p.first - want.first) < 1e-7 && std::abs(p.second - want.second) < 1e-7 &&
        std::abs(p.offset - (want.d + theta)) < 1e-7)
      return arc.length;
  }
  return NAN;
}

}  // namespace marimba
