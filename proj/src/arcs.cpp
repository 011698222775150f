#include "marimba/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <deque>
#include <set>
#include <sstream>
#include <tuple>

#include "marimba/errors.hpp"

namespace marimba {

int portal_id(int cell, int side, int index) { return (cell * 6 + side) * 64 + index; }

void decode_portal(int id, int& cell, int& side, int& index) {
  index = id % 64;
  side = (id / 64) % 6;
  cell = id / 384;
}

std::string ArcClass::key() const {
  std::ostringstream out;
  out << k << ":" << start_cell << "." << start_side << ":";
  for (size_t i = 0; i < word.size(); ++i) out << (i ? "," : "") << word[i];
  out << ":" << end_cell << "." << end_side;
  return out.str();
}

namespace {

bool labelled(const Surface& surface, const CellSide& side) {
  return side.kind == SideKind::Cuff && !surface.cuffs[side.cuff].label.empty();
}

const Portal& portal_of(const Surface& surface, int id) {
  int cell, side, index;
  decode_portal(id, cell, side, index);
  return surface.cells[cell].sides[side].portals.at(index);
}

double side_coordinate(const Surface& surface, int cell, int side, PointH2 p, int* cuff) {
  const CellSide& s = surface.cells[cell].sides[side];
  double param = dist(s.start, p);
  if (s.a_side) {
    *cuff = s.cuff;
    double len = surface.cuffs[s.cuff].length;
    return std::fmod(s.offset + param, len);
  }
  const Portal& port = portal_at(s, param);
  const CellSide& other = surface.cells[port.target_cell].sides[port.target_side];
  *cuff = other.cuff;
  double len = surface.cuffs[other.cuff].length;
  return std::fmod(other.offset + dist(other.start, apply(port.g, p)), len);
}

}  // namespace

Isometry2 word_transform(const Surface& surface, const std::vector<int>& word) {
  Isometry2 m;
  for (int id : word) m = renormalize(m * inverse(portal_of(surface, id).g));
  return m;
}

std::vector<GeodesicH2> lifted_gamma_lines(const Surface& surface, const ArcClass& c) {
  std::vector<GeodesicH2> out;
  out.push_back(surface.cells[c.start_cell].sides[c.start_side].line);
  Isometry2 m;
  for (int id : c.word) {
    int cell, side, index;
    decode_portal(id, cell, side, index);
    const CellSide& s = surface.cells[cell].sides[side];
    if (labelled(surface, s)) out.push_back(apply(m, s.line));
    m = renormalize(m * inverse(s.portals.at(index).g));
  }
  out.push_back(apply(m, surface.cells[c.end_cell].sides[c.end_side].line));
  return out;
}

namespace {

bool same_line(const GeodesicH2& g, const GeodesicH2& h) {
  const double tol = 1e-8;
  return (same_ideal(g.a, h.a, tol) && same_ideal(g.b, h.b, tol)) || (same_ideal(g.a, h.b, tol) && same_ideal(g.b, h.a, tol));
}

// Whether segment pq lies on line g. Compares hyperbolic distances, which stay
// accurate for segments near an ideal endpoint of g where the lifted line's
// own endpoints are badly conditioned.
bool segment_on_line(PointH2 p, PointH2 q, const GeodesicH2& g) {
  const double tol = 1e-7;
  return segment_geodesic_distance(p, p, g) < tol && segment_geodesic_distance(q, q, g) < tol;
}

enum class Realization { Ok, NoPerpendicular, FootOutside, WrongSide, WrongCount };

// Orthogeodesic of a class whose end chart maps into the start chart by m.
// Interior labelled incidences are the lifted labelled lines separating the
// feet: every path between the two lifted cells crosses exactly those lines
// an odd number of times.
Realization realize(const Surface& surface, const ArcClass& c, const Isometry2& m, OrthoArc* arc) {
  const CellSide& start = surface.cells[c.start_cell].sides[c.start_side];
  const CellSide& end = surface.cells[c.end_cell].sides[c.end_side];
  GeodesicH2 end_line = apply(m, end.line);
  if (same_line(start.line, end_line) || segment_on_line(apply(m, end.start), apply(m, end.end), start.line))
    return Realization::NoPerpendicular;
  Perpendicular perp;
  try {
    perp = common_perpendicular(start.line, end_line);
  } catch (const Error& e) {
    if (e.code() == Errc::Crossing || e.code() == Errc::SharedEndpoint) return Realization::NoPerpendicular;
    throw;
  }
  const double tol = 1e-9;
  auto on_segment = [&](PointH2 a, PointH2 b, double len, PointH2 z) {
    return dist(a, z) + dist(z, b) - len <= tol * (1 + len);
  };
  if (!on_segment(start.start, start.end, start.length, perp.foot1)) return Realization::FootOutside;
  if (!on_segment(apply(m, end.start), apply(m, end.end), end.length, perp.foot2)) return Realization::FootOutside;
  // Cell interiors lie on the right of their sides.
  if (side_value(start.line, perp.foot2) > 0 || side_value(end_line, perp.foot1) > 0) return Realization::WrongSide;

  std::vector<GeodesicH2> seen;
  int separating = 0;
  for (const auto& line : lifted_gamma_lines(surface, c)) {
    if (same_line(line, start.line) || same_line(line, end_line)) continue;
    bool dup = false;
    for (const auto& h : seen) dup = dup || same_line(h, line);
    if (dup) continue;
    seen.push_back(line);
    double u = side_value(line, perp.foot1), v = side_value(line, perp.foot2);
    if ((u > tol && v < -tol) || (u < -tol && v > tol)) ++separating;
  }
  if (separating != c.k - 1) return Realization::WrongCount;

  arc->cls = c;
  arc->length = perp.length;
  arc->foot_start = perp.foot1;
  arc->foot_end = apply(inverse(m), perp.foot2);
  arc->start_x = side_coordinate(surface, c.start_cell, c.start_side, arc->foot_start, &arc->start_cuff);
  arc->end_x = side_coordinate(surface, c.end_cell, c.end_side, arc->foot_end, &arc->end_cuff);
  return Realization::Ok;
}

}  // namespace

OrthoArc orthogeodesic_length(const Surface& surface, const ArcClass& c) {
  if (c.k < 1) throw Error(Errc::WrongStepCount, "k must be >= 1");
  if (!labelled(surface, surface.cells.at(c.start_cell).sides.at(c.start_side)) ||
      !labelled(surface, surface.cells.at(c.end_cell).sides.at(c.end_side)))
    throw Error(Errc::InvalidRealization, "arc ends must lie on labelled sides");
  OrthoArc arc;
  switch (realize(surface, c, word_transform(surface, c.word), &arc)) {
    case Realization::Ok:
      return arc;
    case Realization::NoPerpendicular:
      throw Error(Errc::InvalidRealization, "lifted end curves meet or share an endpoint");
    case Realization::FootOutside:
      throw Error(Errc::InvalidRealization, "perpendicular foot outside its side");
    case Realization::WrongSide:
      throw Error(Errc::InvalidRealization, "perpendicular leaves through the outside of a side");
    case Realization::WrongCount:
      throw Error(Errc::WrongStepCount, "perpendicular meets the labelled curves a different number of times");
  }
  return arc;
}

namespace {

struct Node {
  int cell;
  Isometry2 m;  // this lift's chart to the start chart
  int parent;
  int via;  // portal id crossed to get here
  int depth;
};

using TileKey = std::tuple<int, long long, long long>;

TileKey tile_key(const Surface& surface, int cell, const Isometry2& m) {
  PointH2 z = apply(m, surface.cells[cell].vertices[0]);
  return {cell, std::llround(1e6 * std::log(z.im)), std::llround(1e6 * z.re / z.im)};
}

}  // namespace

std::vector<OrthoArc> enumerate_arcs(const Surface& surface, int k, double l_max, const EnumerateOptions& opt) {
  if (k < 1) throw Error(Errc::OutOfRange, "k must be >= 1");
  if (!(l_max > 0)) throw Error(Errc::OutOfRange, "length bound must be positive");
  std::vector<OrthoArc> out;
  long long visited = 0;
  for (int c0 = 0; c0 < static_cast<int>(surface.cells.size()); ++c0) {
    for (int s0 = 0; s0 < 6; ++s0) {
      const CellSide& start = surface.cells[c0].sides[s0];
      if (!labelled(surface, start)) continue;
      // Lower bound on any orthogeodesic from the start side through segment pq.
      auto too_far = [&](PointH2 p, PointH2 q) {
        if (!opt.prune) return false;
        return std::max(segment_geodesic_distance(p, q, start.line),
                        segment_geodesic_distance(start.start, start.end, geodesic_through(p, q))) > l_max;
      };
      std::vector<Node> nodes{{c0, Isometry2{}, -1, -1, 0}};
      std::set<TileKey> tiles{tile_key(surface, c0, Isometry2{})};
      std::deque<int> todo{0};
      while (!todo.empty()) {
        int id;
        if (opt.depth_first) id = todo.back(), todo.pop_back();
        else id = todo.front(), todo.pop_front();
        // Queued tiles count as well, so memory stays bounded by the budget.
        if (++visited + static_cast<long long>(todo.size()) > opt.budget)
          throw Error(Errc::BudgetExceeded, "arc search exceeded its tile budget");
        const Node node = nodes[id];
        const Cell& cell = surface.cells[node.cell];
        for (int s = 0; s < 6; ++s) {
          const CellSide& side = cell.sides[s];
          PointH2 p = apply(node.m, side.start), q = apply(node.m, side.end);
          // The arc stays on the inner side of the start curve.
          if (segment_on_line(p, q, start.line)) continue;
          if (too_far(p, q)) continue;
          if (labelled(surface, side)) {
            ArcClass cls{k, c0, s0, {}, node.cell, s};
            for (int n = id; nodes[n].parent >= 0; n = nodes[n].parent) cls.word.push_back(nodes[n].via);
            std::reverse(cls.word.begin(), cls.word.end());
            OrthoArc arc;
            if (realize(surface, cls, node.m, &arc) == Realization::Ok && arc.length <= l_max) {
              out.push_back(arc);
              if (static_cast<long long>(out.size()) > opt.budget / 5)
                throw Error(Errc::BudgetExceeded, "arc search found more arcs than its budget allows");
            }
          }
          if (node.depth >= opt.max_depth) continue;
          for (size_t pi = 0; pi < side.portals.size(); ++pi) {
            const Portal& port = side.portals[pi];
            if (side.portals.size() > 1 &&
                too_far(apply(node.m, side_point(side, port.s_lo)), apply(node.m, side_point(side, port.s_hi))))
              continue;
            Isometry2 m = renormalize(node.m * inverse(port.g));
            if (!tiles.insert(tile_key(surface, port.target_cell, m)).second) continue;
            nodes.push_back({port.target_cell, m, id, portal_id(node.cell, s, static_cast<int>(pi)), node.depth + 1});
            todo.push_back(static_cast<int>(nodes.size()) - 1);
          }
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const OrthoArc& a, const OrthoArc& b) {
    if (a.length != b.length) return a.length < b.length;
    return a.cls.key() < b.cls.key();
  });
  // An arc running along a cell boundary or through a vertex is realised in
  // several cell chains; keep one per pair of feet on the surface.
  auto circ = [&](double x, double y, int cuff) {
    double len = surface.cuffs[cuff].length;
    double d = std::fmod(std::abs(x - y), len);
    return std::min(d, len - d);
  };
  std::vector<OrthoArc> unique;
  for (const auto& a : out) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend() && a.length - it->length <= 1e-8; ++it) {
      if (it->start_cuff == a.start_cuff && it->end_cuff == a.end_cuff && circ(it->start_x, a.start_x, a.start_cuff) < 1e-7 &&
          circ(it->end_x, a.end_x, a.end_cuff) < 1e-7) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(a);
  }
  return unique;
}

std::vector<ArcClass> enumerate_arc_classes(const Surface& surface, int k, double l_max, const EnumerateOptions& opt) {
  std::vector<ArcClass> out;
  for (const auto& a : enumerate_arcs(surface, k, l_max, opt)) out.push_back(a.cls);
  return out;
}

std::vector<SpectrumLine> orthospectrum_oracle(const Surface& surface, int k, double l_max, const EnumerateOptions& opt) {
  std::vector<SpectrumLine> out;
  for (const auto& a : enumerate_arcs(surface, k, l_max, opt)) {
    if (!out.empty() && a.length - out.back().length <= 1e-9) {
      ++out.back().multiplicity;
      out.back().words.push_back(a.cls.key());
    } else {
      out.push_back({a.length, 1, {a.cls.key()}});
    }
  }
  return out;
}

}  // namespace marimba

namespace marimba {

double shortest_loop_crossing(const Surface& surface, int cuff, double l_max, long long budget) {
  if (cuff < 0 || cuff >= static_cast<int>(surface.cuffs.size())) throw Error(Errc::OutOfRange, "cuff out of range");
  double diam = 0.0;
  for (const auto& cell : surface.cells)
    for (const auto& p : cell.vertices)
      for (const auto& q : cell.vertices) diam = std::max(diam, dist(p, q));
  double best = INFINITY;
  long long visited = 0;
  for (int c0 = 0; c0 < static_cast<int>(surface.cells.size()); ++c0) {
    for (const auto& start : surface.cells[c0].sides) {
      if (start.kind != SideKind::Cuff || start.cuff != cuff) continue;
      // A translation whose axis crosses this side moves the start cell
      // within l of itself, so its image stays within this radius.
      PointH2 mid = side_point(start, 0.5 * start.length);
      double radius = 0.5 * start.length + std::min(l_max, best) + diam;
      std::set<TileKey> tiles{tile_key(surface, c0, Isometry2{})};
      std::deque<std::pair<int, Isometry2>> todo{{c0, Isometry2{}}};
      while (!todo.empty()) {
        auto [cell, m] = todo.front();
        todo.pop_front();
        if (++visited + static_cast<long long>(todo.size()) > budget)
          throw Error(Errc::BudgetExceeded, "loop search exceeded its tile budget");
        if (cell == c0 && tiles.size() > 1) {
          double trace = std::abs(m.a + m.d);
          if (trace > 2.0 + 1e-12) {
            double length = 2.0 * std::acosh(0.5 * trace);
            double disc = std::sqrt((m.a + m.d) * (m.a + m.d) - 4.0);
            GeodesicH2 axis;
            if (std::abs(m.c) > 1e-300) {
              axis = {Ideal::at((m.a - m.d - disc) / (2 * m.c)), Ideal::at((m.a - m.d + disc) / (2 * m.c))};
            } else {
              axis = {Ideal::at(m.b / (m.d - m.a)), Ideal::infinity()};
            }
            if (length <= l_max && !same_line(axis, start.line) &&
                segment_geodesic_distance(start.start, start.end, axis) <= 1e-9)
              best = std::min(best, length);
          }
        }
        for (const auto& side : surface.cells[cell].sides) {
          for (const auto& port : side.portals) {
            Isometry2 next = renormalize(m * inverse(port.g));
            double near = INFINITY;
            for (const auto& v : surface.cells[port.target_cell].vertices) near = std::min(near, dist(mid, apply(next, v)));
            if (near > radius) continue;
            if (!tiles.insert(tile_key(surface, port.target_cell, next)).second) continue;
            todo.push_back({port.target_cell, next});
          }
        }
      }
    }
  }
  return best;
}

}  // namespace marimba
