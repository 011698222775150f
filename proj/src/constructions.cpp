#include "marimba/constructions.hpp"

#include <cmath>
#include <numeric>

#include "marimba/errors.hpp"

namespace marimba {

namespace {

void check(const MarimbaSpec& spec) {
  auto issues = validate_spec(spec);
  if (issues.empty()) return;
  for (const auto& i : issues) {
    if (i.code == "CocycleOrderViolation") throw Error(Errc::CocycleOrderViolation, i.message);
    if (i.code == "CocycleNotClosed") throw Error(Errc::CocycleNotClosed, i.message);
  }
  throw Error(Errc::Validation, issues.front().code + ": " + issues.front().message);
}

}  // namespace

MarimbaSpec symmetric_family_marimba(const SymmetricFamilyParams& p) {
  if (!(p.l_alpha > 0) || !(p.l_beta > 0)) throw Error(Errc::NonPositiveLength, "family lengths must be positive");
  MarimbaSpec spec;
  spec.pants = {{"W", 2, {1, 1, 0}}};
  spec.gluings = {{"alpha", {"W", 0, 0}, {"W", 1, 0}, p.l_alpha, p.twist_alpha},
                  {"beta", {"W", 2, 0}, {"W", 2, 1}, p.l_beta, p.twist_beta}};
  spec.gamma = {{"alpha", "A"}, {"beta", "B"}};
  spec.family = p;
  check(spec);
  return spec;
}

MarimbaSpec half_twist_partner(const MarimbaSpec& spec) {
  if (!spec.family) throw Error(Errc::NotInFamily, "spec carries no family tag");
  MarimbaSpec expected = symmetric_family_marimba(*spec.family);
  if (write_spec(expected) != write_spec(spec)) throw Error(Errc::NotInFamily, "spec differs from its tagged family member");
  SymmetricFamilyParams p = *spec.family;
  p.twist_alpha += 0.5 * p.l_alpha;
  return symmetric_family_marimba(p);
}

double deck_involution_defect(const Surface& surface) {
  if (!surface.spec.family || surface.pieces.size() != 1 || surface.pieces[0].sheets != 2)
    throw Error(Errc::NotInFamily, "surface is not a symmetric family member");
  auto tau = [&](int cell) {
    const Cell& c = surface.cells[cell];
    return surface.cell_index(c.piece, 1 - c.sheet, c.mirror);
  };
  double worst = 0.0;
  for (int i = 0; i < static_cast<int>(surface.cells.size()); ++i) {
    const Cell& c = surface.cells[i];
    const Cell& d = surface.cells[tau(i)];
    for (int v = 0; v < 6; ++v) worst = std::max(worst, dist(c.vertices[v], d.vertices[v]));
    for (int s = 0; s < 6; ++s) {
      const auto& pc = c.sides[s].portals;
      const auto& pd = d.sides[s].portals;
      if (pc.size() != pd.size()) return INFINITY;
      for (size_t k = 0; k < pc.size(); ++k) {
        if (tau(pc[k].target_cell) != pd[k].target_cell || pc[k].target_side != pd[k].target_side) return INFINITY;
        worst = std::max({worst, std::abs(pc[k].s_lo - pd[k].s_lo), std::abs(pc[k].s_hi - pd[k].s_hi)});
        // g and -g are the same isometry.
        const Isometry2 &g = pc[k].g, &h = pd[k].g;
        double same = std::max({std::abs(g.a - h.a), std::abs(g.b - h.b), std::abs(g.c - h.c), std::abs(g.d - h.d)});
        double flip = std::max({std::abs(g.a + h.a), std::abs(g.b + h.b), std::abs(g.c + h.c), std::abs(g.d + h.d)});
        worst = std::max(worst, std::min(same, flip));
      }
    }
  }
  return worst;
}

CoverCocycle default_cocycle(const MarimbaSpec& spec, int n) {
  CoverCocycle c;
  c.n = n;
  for (const auto& [gid, label] : spec.gamma) c.along[gid] = 1;
  // Close each pants in turn with an unlabelled gluing not yet used.
  std::map<std::string, int> index;
  for (size_t i = 0; i < spec.pants.size(); ++i) index[spec.pants[i].name] = static_cast<int>(i);
  std::vector<long long> sum(spec.pants.size(), 0);
  for (const auto& g : spec.gluings) {
    int w = c.along.count(g.id) ? c.along[g.id] : 0;
    sum[index[g.a.pants]] += w;
    sum[index[g.b.pants]] -= w;
  }
  for (const auto& g : spec.gluings) {
    if (spec.gamma.count(g.id)) continue;
    int pa = index[g.a.pants], pb = index[g.b.pants];
    if (pa == pb) continue;
    int w = positive_mod(-sum[pa], n);
    if (w == 0) continue;
    c.along[g.id] = w;
    sum[pa] += w;
    sum[pb] -= w;
  }
  return c;
}

MarimbaSpec cyclic_cover(const MarimbaSpec& spec, const CoverCocycle& c) {
  if (c.n < 1) throw Error(Errc::OutOfRange, "cover modulus must be >= 1");
  if (spec.cover) throw Error(Errc::NotSupported, "spec is already a cover");
  for (const auto& p : spec.pants)
    if (p.sheets != 1) throw Error(Errc::NotSupported, "covers of multi-sheet pieces are not supported");
  if (c.n == 1) {
    MarimbaSpec out = spec;
    out.family.reset();
    check(out);
    return out;
  }
  MarimbaSpec out = spec;
  out.family.reset();
  out.cover = CoverSpec{c.n, c.along, c.cross};
  check(out);
  return out;
}

InteriorState lift_state(const Surface& cover, const InteriorState& base, int sheet) {
  if (sheet < 0) throw Error(Errc::SheetOutOfRange, "sheet must be non-negative");
  if (base.cell < 0 || base.cell >= cover.base_cells) throw Error(Errc::OutOfRange, "base cell out of range");
  InteriorState out = base;
  out.cell = (sheet % cover.cover_n) * cover.base_cells + base.cell;
  return out;
}

InteriorState transport_half_twist(const MarimbaSpec& x, const MarimbaSpec& partner, const Surface& surface_x,
                                   const InteriorState& start) {
  if (write_spec(half_twist_partner(x)) != write_spec(partner))
    throw Error(Errc::NotInFamily, "second spec is not the half-twist partner of the first");
  if (start.cell < 0 || start.cell >= static_cast<int>(surface_x.cells.size()))
    throw Error(Errc::OutOfRange, "cell out of range");
  for (const auto& side : surface_x.cells[start.cell].sides) {
    if (side.kind != SideKind::Cuff || surface_x.cuffs[side.cuff].label.empty()) continue;
    if (segment_geodesic_distance(start.v.base, start.v.base, side.line) <= kPolicy.geom_tol)
      throw Error(Errc::OnGamma, "state is based on a labelled curve");
  }
  return start;
}

}  // namespace marimba
