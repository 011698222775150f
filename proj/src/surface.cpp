#include "marimba/surface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <tuple>

#include "marimba/errors.hpp"

namespace marimba {

namespace {

PointH2 reflect(PointH2 z) { return {-z.re, z.im}; }

Ideal reflect(Ideal p) { return p.inf ? p : Ideal::at(-p.x); }

int mod_inverse(int a, int m) {
  if (m == 1) return 0;
  a = positive_mod(a, m);
  for (int x = 1; x < m; ++x)
    if ((static_cast<long long>(a) * x) % m == 1) return x;
  throw Error(Errc::Validation, "monodromy is not invertible");
}

double max_abs(const Isometry2& g) {
  return std::max({std::abs(g.a), std::abs(g.b), std::abs(g.c), std::abs(g.d)});
}

}  // namespace

double seam_length(double l_opposite, double l_left, double l_right) {
  double a = 0.5 * l_opposite, b = 0.5 * l_left, c = 0.5 * l_right;
  return std::acosh((std::cosh(a) + std::cosh(b) * std::cosh(c)) / (std::sinh(b) * std::sinh(c)));
}

RightHexagon pants_hexagon(double l0, double l1, double l2) {
  if (!(l0 > 0) || !(l1 > 0) || !(l2 > 0) || !std::isfinite(l0 + l1 + l2))
    throw Error(Errc::NonPositiveLength, "cuff lengths must be positive");
  std::array<double, 3> l{l0, l1, l2};
  RightHexagon hex;
  for (int k = 0; k < 3; ++k) {
    hex.sides[2 * k] = 0.5 * l[k];
    hex.sides[2 * k + 1] = seam_length(l[(k + 2) % 3], l[k], l[(k + 1) % 3]);
  }
  Isometry2 f;
  Isometry2 turn = rotation(0.5 * kPi);
  double scale = 1.0;
  std::array<PointH2, 6> raw;
  for (int i = 0; i < 6; ++i) {
    raw[i] = apply(f, PointH2{0.0, 1.0});
    f = f * translation(hex.sides[i]) * turn;
    scale = std::max(scale, max_abs(f));
  }
  double plus = std::max({std::abs(f.a - 1), std::abs(f.b), std::abs(f.c), std::abs(f.d - 1)});
  double minus = std::max({std::abs(f.a + 1), std::abs(f.b), std::abs(f.c), std::abs(f.d + 1)});
  hex.closure_error = std::min(plus, minus) / scale;

  // Recentre so the hyperboloid barycentre of the vertices sits at i.
  double s0 = 0, s1 = 0, s2 = 0;
  for (const auto& z : raw) {
    double r2 = z.re * z.re + z.im * z.im;
    s0 += (1 + r2) / (2 * z.im);
    s1 += z.re / z.im;
    s2 += (r2 - 1) / (2 * z.im);
  }
  double norm = std::sqrt(s0 * s0 - s1 * s1 - s2 * s2);
  s0 /= norm, s1 /= norm, s2 /= norm;
  double y = 1.0 / (s0 - s2);
  Isometry2 back = inverse(affine_to({s1 * y, y}));
  for (int i = 0; i < 6; ++i) hex.vertices[i] = apply(back, raw[i]);
  return hex;
}

double hexagon_area(const std::array<PointH2, 6>& v) {
  double angles = 0.0;
  for (int i = 0; i < 6; ++i) {
    double to_prev = direction_to(v[i], v[(i + 5) % 6]);
    double to_next = direction_to(v[i], v[(i + 1) % 6]);
    angles += wrap_angle(to_prev - to_next);
  }
  return 4.0 * kPi - angles;
}

PointH2 side_point(const CellSide& side, double s) {
  return apply(side.start_frame * translation(s), PointH2{0.0, 1.0});
}

const Portal& portal_at(const CellSide& side, double s) {
  const Portal* best = &side.portals.front();
  double best_gap = INFINITY;
  for (const auto& p : side.portals) {
    if (s >= p.s_lo && s < p.s_hi) return p;
    double gap = s < p.s_lo ? p.s_lo - s : s - p.s_hi;
    if (gap < best_gap) best_gap = gap, best = &p;
  }
  return *best;
}

bool inside_cell(const Cell& cell, PointH2 z, double tol) {
  for (const auto& side : cell.sides)
    if (side_value(side.line, z) > tol) return false;
  return true;
}

int Surface::cell_index(int piece, int sheet, bool mirror) const {
  if (cover_n > 1) return sheet * base_cells + 2 * piece + (mirror ? 1 : 0);
  int offset = 0;
  for (int p = 0; p < piece; ++p) offset += 2 * pieces[p].sheets;
  return offset + 2 * sheet + (mirror ? 1 : 0);
}

int Surface::cuff_for_label(const std::string& label) const {
  for (size_t i = 0; i < cuffs.size(); ++i)
    if (cuffs[i].label == label) return static_cast<int>(i);
  throw Error(Errc::UnknownLabel, "no cuff carries label '" + label + "'");
}

namespace {

struct SlotPoint {
  int sheet;
  bool mirror;
  double half_start;
};

// Cell of a piece boundary component at own-slot coordinate x.
SlotPoint locate_slot(const PieceLayout& lay, int k, int comp, double x) {
  int m = lay.sheets;
  int v = lay.along[k];
  int g = gcd_mod(v, m);
  int laps = m / g;
  double ell = lay.ell[k];
  double total = laps * ell;
  x = std::fmod(x, total);
  if (x < 0) x += total;
  int lap = std::min(laps - 1, static_cast<int>(std::floor(x / ell)));
  double r = x - lap * ell;
  bool mirror = r >= 0.5 * ell;
  int j = positive_mod(comp + static_cast<long long>(lap) * v, m);
  if (mirror) j = positive_mod(j + lay.sigma[(k + 2) % 3], m);
  return {j, mirror, lap * ell + (mirror ? 0.5 * ell : 0.0)};
}

// Component and own-slot start coordinate of a cell's cuff half.
std::pair<int, double> slot_of_cell(const PieceLayout& lay, int k, int sheet, bool mirror) {
  int m = lay.sheets;
  int v = lay.along[k];
  int g = gcd_mod(v, m);
  int laps = m / g;
  int big_j = positive_mod(sheet - (mirror ? lay.sigma[(k + 2) % 3] : 0), m);
  int comp = big_j % g;
  int lap = laps == 1 ? 0 : static_cast<int>((static_cast<long long>((big_j - comp) / g) * mod_inverse((v / g) % laps, laps)) % laps);
  lap = positive_mod(lap, laps);
  return {comp, lap * lay.ell[k] + (mirror ? 0.5 * lay.ell[k] : 0.0)};
}

struct CuffPortalRecord {
  int a_cell, a_side, b_cell, b_side;
  double a_lo, a_hi, b_lo, b_hi;
  double x_mid;
  Isometry2 g;
};

Cell make_cell(const RightHexagon& hex, int piece, int sheet, bool mirror) {
  Cell cell;
  cell.piece = piece;
  cell.sheet = sheet;
  cell.mirror = mirror;
  for (int i = 0; i < 6; ++i) cell.vertices[i] = mirror ? reflect(hex.vertices[i]) : hex.vertices[i];
  for (int i = 0; i < 6; ++i) {
    CellSide& side = cell.sides[i];
    PointH2 vi = cell.vertices[i], vn = cell.vertices[(i + 1) % 6];
    side.start = mirror ? vi : vn;
    side.end = mirror ? vn : vi;
    side.length = hex.sides[i];
    GeodesicH2 base = geodesic_through(hex.vertices[(i + 1) % 6], hex.vertices[i]);
    side.line = mirror ? GeodesicH2{reflect(base.b), reflect(base.a)} : base;
    side.start_frame = frame({side.start, direction_to(side.start, side.end)});
    side.kind = i % 2 == 0 ? SideKind::Cuff : SideKind::Seam;
  }
  std::array<PointH2, 6> ordered = cell.vertices;
  if (mirror) std::reverse(ordered.begin(), ordered.end());
  cell.area = hexagon_area(ordered);
  cell.xmin = cell.ymin = INFINITY;
  cell.xmax = cell.ymax = -INFINITY;
  for (const auto& side : cell.sides) {
    for (PointH2 z : {side.start, side.end}) {
      cell.xmin = std::min(cell.xmin, z.re), cell.xmax = std::max(cell.xmax, z.re);
      cell.ymin = std::min(cell.ymin, z.im), cell.ymax = std::max(cell.ymax, z.im);
    }
    if (!side.line.a.inf && !side.line.b.inf) {
      double c = 0.5 * (side.line.a.x + side.line.b.x), r = 0.5 * std::abs(side.line.b.x - side.line.a.x);
      if (c > std::min(side.start.re, side.end.re) && c < std::max(side.start.re, side.end.re))
        cell.ymax = std::max(cell.ymax, r);
    }
  }
  return cell;
}

Errc issue_errc(const std::vector<ValidationIssue>& issues) {
  for (const auto& i : issues) {
    if (i.code == "CocycleOrderViolation") return Errc::CocycleOrderViolation;
    if (i.code == "CocycleNotClosed") return Errc::CocycleNotClosed;
    if (i.code == "CoverNotSupported") return Errc::NotSupported;
  }
  return Errc::Validation;
}

}  // namespace

SidePoint Surface::locate(int cuff, double x) const {
  if (cuff < 0 || cuff >= static_cast<int>(cuffs.size())) throw Error(Errc::OutOfRange, "no such cuff");
  const CuffInfo& info = cuffs[cuff];
  SlotPoint sp = locate_slot(pieces[info.a_piece], info.a_cuff, info.a_component, x);
  double total = info.length;
  double xr = std::fmod(x, total);
  if (xr < 0) xr += total;
  return {cell_index(info.a_piece, sp.sheet, sp.mirror), 2 * info.a_cuff, xr - sp.half_start};
}

namespace {

// Side-pairing isometries for one gluing, computed on the given layouts.
std::vector<CuffPortalRecord> cuff_portals(const Surface& surf, const std::vector<PieceLayout>& lays,
                                           const std::function<int(int, int, bool)>& index, int pa, int ka,
                                           int ca, int pb, int kb, int cb, double length, double twist) {
  const PieceLayout& la = lays[pa];
  const PieceLayout& lb = lays[pb];
  int laps_a = la.sheets / gcd_mod(la.along[ka], la.sheets);
  int laps_b = lb.sheets / gcd_mod(lb.along[kb], lb.sheets);
  double ell_a = la.ell[ka], ell_b = lb.ell[kb];
  std::vector<double> breaks;
  for (int q = 0; q < 2 * laps_a; ++q) breaks.push_back(q * 0.5 * ell_a);
  for (int q = 0; q < 2 * laps_b; ++q) {
    double x = std::fmod(twist - q * 0.5 * ell_b, length);
    if (x < 0) x += length;
    breaks.push_back(x);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> cuts;
  double eps = 1e-12 * length;
  for (double b : breaks) {
    if (length - b <= eps) continue;
    if (cuts.empty() || b - cuts.back() > eps) cuts.push_back(b);
  }
  cuts.push_back(length);
  std::vector<CuffPortalRecord> out;
  for (size_t i = 0; i + 1 < cuts.size(); ++i) {
    double x0 = cuts[i], x1 = cuts[i + 1];
    double xm = 0.5 * (x0 + x1);
    double ym = std::fmod(twist - xm, length);
    if (ym < 0) ym += length;
    SlotPoint a = locate_slot(la, ka, ca, xm);
    SlotPoint b = locate_slot(lb, kb, cb, ym);
    CuffPortalRecord rec;
    rec.a_cell = index(pa, a.sheet, a.mirror);
    rec.b_cell = index(pb, b.sheet, b.mirror);
    rec.a_side = 2 * ka;
    rec.b_side = 2 * kb;
    double xa = xm - a.half_start, yb = ym - b.half_start;
    rec.a_lo = x0 - a.half_start;
    rec.a_hi = x1 - a.half_start;
    rec.b_lo = yb - (x1 - xm);
    rec.b_hi = yb + (xm - x0);
    rec.x_mid = xm;
    const CellSide& sa = surf.cells[rec.a_cell].sides[rec.a_side];
    const CellSide& sb = surf.cells[rec.b_cell].sides[rec.b_side];
    Isometry2 ga = sa.start_frame * translation(xa);
    Isometry2 gb = sb.start_frame * translation(yb);
    // Build the product from the side with the smaller (side, mirror, s) key
    // so that symmetric gluings yield bitwise identical matrices.
    auto key_a = std::make_tuple(rec.a_side, a.mirror, xa), key_b = std::make_tuple(rec.b_side, b.mirror, yb);
    if (key_a < key_b) {
      rec.g = renormalize(gb * rotation(kPi) * inverse(ga));
    } else if (key_b < key_a) {
      rec.g = inverse(renormalize(ga * rotation(kPi) * inverse(gb)));
    } else {
      // Equal keys: the gluing swaps two congruent positions, so g is an
      // involution; make it one exactly (trace zero).
      Isometry2 g = gb * rotation(kPi) * inverse(ga);
      double half = 0.5 * (g.a - g.d);
      rec.g = renormalize({half, g.b, g.c, -half});
    }
    out.push_back(rec);
  }
  return out;
}

void add_pair(Surface& surf, int c, int sc, double lo, double hi, int d, int sd, double dlo, double dhi,
              const Isometry2& g) {
  surf.cells[c].sides[sc].portals.push_back({lo, hi, d, sd, g});
  surf.cells[d].sides[sd].portals.push_back({dlo, dhi, c, sc, inverse(g)});
}

}  // namespace

Surface build_surface(const MarimbaSpec& spec) {
  auto issues = validate_spec(spec);
  if (!issues.empty()) {
    std::string msg;
    for (const auto& i : issues) msg += (msg.empty() ? "" : "; ") + i.code + ": " + i.message;
    throw Error(issue_errc(issues), msg);
  }
  Surface surf;
  surf.spec = spec;
  surf.hash = spec_hash(spec);
  surf.chi = euler_characteristic(spec);
  surf.cover_n = spec.cover ? spec.cover->n : 1;

  std::map<std::string, int> index;
  for (size_t i = 0; i < spec.pants.size(); ++i) index[spec.pants[i].name] = static_cast<int>(i);

  // Base layouts (as declared) and realized layouts (covers applied).
  std::vector<PieceLayout> base(spec.pants.size());
  for (size_t i = 0; i < spec.pants.size(); ++i) {
    base[i].sheets = spec.pants[i].sheets;
    base[i].along = spec.pants[i].along;
  }
  for (const auto& g : spec.gluings) {
    for (const SlotRef* s : {&g.a, &g.b}) {
      PieceLayout& lay = base[index[s->pants]];
      int laps = lay.sheets / gcd_mod(lay.along[s->cuff], lay.sheets);
      lay.ell[s->cuff] = g.length / laps;
    }
  }
  auto set_sigma = [](PieceLayout& lay) {
    lay.sigma[0] = 0;
    lay.sigma[1] = positive_mod(-static_cast<long long>(lay.along[1]), lay.sheets);
    lay.sigma[2] = positive_mod(static_cast<long long>(lay.sigma[1]) - lay.along[2], lay.sheets);
  };
  for (auto& lay : base) {
    set_sigma(lay);
    lay.hexagon = pants_hexagon(lay.ell[0], lay.ell[1], lay.ell[2]);
    if (lay.hexagon.closure_error > 1e-9)
      throw Error(Errc::GeometryFailure, "hexagon does not close (error " + std::to_string(lay.hexagon.closure_error) + ")");
  }
  surf.pieces = base;
  int n = surf.cover_n;
  if (spec.cover) {
    for (auto& lay : surf.pieces) lay.sheets = n, lay.along = {0, 0, 0};
    for (const auto& g : spec.gluings) {
      auto it = spec.cover->along.find(g.id);
      int w = it == spec.cover->along.end() ? 0 : it->second;
      surf.pieces[index[g.a.pants]].along[g.a.cuff] += w;
      surf.pieces[index[g.b.pants]].along[g.b.cuff] -= w;
    }
    for (auto& lay : surf.pieces) set_sigma(lay);
  }

  int base_count = 0;
  for (const auto& lay : base) base_count += 2 * lay.sheets;
  surf.base_cells = base_count;
  surf.cells.resize(static_cast<size_t>(base_count) * n);
  for (size_t p = 0; p < surf.pieces.size(); ++p)
    for (int j = 0; j < surf.pieces[p].sheets; ++j)
      for (bool mirror : {false, true})
        surf.cells[surf.cell_index(static_cast<int>(p), j, mirror)] =
            make_cell(surf.pieces[p].hexagon, static_cast<int>(p), j, mirror);

  // Seams: H^j side 2k+1 meets Hbar^{j+sigma_k} side 2k+1.
  for (size_t p = 0; p < surf.pieces.size(); ++p) {
    const PieceLayout& lay = surf.pieces[p];
    for (int k = 0; k < 3; ++k) {
      int side = 2 * k + 1;
      for (int j = 0; j < lay.sheets; ++j) {
        int c = surf.cell_index(static_cast<int>(p), j, false);
        int d = surf.cell_index(static_cast<int>(p), positive_mod(j + lay.sigma[k], lay.sheets), true);
        const CellSide& sc = surf.cells[c].sides[side];
        UnitTangentH2 mid = tangent_of_frame(sc.start_frame * translation(0.5 * sc.length));
        UnitTangentH2 img{reflect(mid.base), wrap_angle(kPi - mid.dir)};
        Isometry2 g = renormalize(frame(img) * inverse(frame(mid)));
        double len = sc.length;
        add_pair(surf, c, side, 0.0, len, d, side, 0.0, len, g);
      }
    }
  }

  // Cuff table.
  std::map<std::tuple<int, int, int>, int> a_slot_cuff;
  for (const auto& g : spec.gluings) {
    int pa = index[g.a.pants];
    auto label_it = spec.gamma.find(g.id);
    std::string label = label_it == spec.gamma.end() ? "" : label_it->second;
    if (!spec.cover) {
      a_slot_cuff[{pa, g.a.cuff, g.a.component}] = static_cast<int>(surf.cuffs.size());
      surf.cuffs.push_back({g.id, label, g.length, g.twist, pa, g.a.cuff, g.a.component});
    } else {
      const PieceLayout& lay = surf.pieces[pa];
      int comps = gcd_mod(lay.along[g.a.cuff], n);
      for (int c = 0; c < comps; ++c) {
        a_slot_cuff[{pa, g.a.cuff, c}] = static_cast<int>(surf.cuffs.size());
        surf.cuffs.push_back({g.id, label, (n / comps) * g.length, g.twist, pa, g.a.cuff, c});
      }
    }
  }
  for (auto& cell : surf.cells) {
    const PieceLayout& lay = surf.pieces[cell.piece];
    for (int k = 0; k < 3; ++k) {
      auto [comp, start] = slot_of_cell(lay, k, cell.sheet, cell.mirror);
      CellSide& side = cell.sides[2 * k];
      side.offset = start;
      auto it = a_slot_cuff.find({cell.piece, k, comp});
      if (it != a_slot_cuff.end()) side.cuff = it->second, side.a_side = true;
    }
  }

  // Cuff pairings.
  auto base_index = [&](int p, int j, bool mirror) {
    int offset = 0;
    for (int q = 0; q < p; ++q) offset += 2 * base[q].sheets;
    return offset + 2 * j + (mirror ? 1 : 0);
  };
  for (const auto& g : spec.gluings) {
    int pa = index[g.a.pants], pb = index[g.b.pants];
    auto recs = cuff_portals(surf, base, base_index, pa, g.a.cuff, g.a.component, pb, g.b.cuff, g.b.component,
                             g.length, g.twist);
    if (!spec.cover) {
      for (const auto& r : recs) add_pair(surf, r.a_cell, r.a_side, r.a_lo, r.a_hi, r.b_cell, r.b_side, r.b_lo, r.b_hi, r.g);
      continue;
    }
    auto along_it = spec.cover->along.find(g.id);
    auto cross_it = spec.cover->cross.find(g.id);
    int v = along_it == spec.cover->along.end() ? 0 : along_it->second;
    int w = cross_it == spec.cover->cross.end() ? 0 : cross_it->second;
    double t = std::fmod(g.twist, g.length);
    if (t < 0) t += g.length;
    const PieceLayout& lp = surf.pieces[pa];
    const PieceLayout& lq = surf.pieces[pb];
    for (const auto& r : recs) {
      bool a_mirror = r.a_cell % 2 == 1, b_mirror = r.b_cell % 2 == 1;
      long long shift = static_cast<long long>(w) + (r.x_mid > t ? v : 0) +
                        (b_mirror ? lq.sigma[(g.b.cuff + 2) % 3] : 0) - (a_mirror ? lp.sigma[(g.a.cuff + 2) % 3] : 0);
      for (int s = 0; s < n; ++s) {
        int c = s * base_count + r.a_cell;
        int d = positive_mod(s + shift, n) * base_count + r.b_cell;
        add_pair(surf, c, r.a_side, r.a_lo, r.a_hi, d, r.b_side, r.b_lo, r.b_hi, r.g);
      }
    }
  }
  for (auto& cell : surf.cells)
    for (auto& side : cell.sides)
      std::sort(side.portals.begin(), side.portals.end(),
                [](const Portal& x, const Portal& y) { return x.s_lo < y.s_lo; });

  // b-side cuff ids follow from where their portals lead.
  for (auto& cell : surf.cells)
    for (int k = 0; k < 3; ++k) {
      CellSide& side = cell.sides[2 * k];
      if (side.a_side) continue;
      const Portal& p = side.portals.front();
      side.cuff = surf.cells[p.target_cell].sides[p.target_side].cuff;
    }

  std::set<std::string> labels;
  for (const auto& c : surf.cuffs)
    if (!c.label.empty()) labels.insert(c.label), surf.gamma_length += c.length;
  surf.labels.assign(labels.begin(), labels.end());

  std::vector<char> seen(surf.cells.size(), 0);
  std::queue<int> todo;
  todo.push(0);
  seen[0] = 1;
  while (!todo.empty()) {
    int c = todo.front();
    todo.pop();
    for (const auto& side : surf.cells[c].sides)
      for (const auto& p : side.portals)
        if (!seen[p.target_cell]) seen[p.target_cell] = 1, todo.push(p.target_cell);
  }
  if (std::find(seen.begin(), seen.end(), 0) != seen.end())
    throw Error(Errc::Validation, "Disconnected: cover is not connected");
  return surf;
}

}  // namespace marimba
