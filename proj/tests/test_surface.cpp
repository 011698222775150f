#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "marimba/errors.hpp"
#include "marimba/rng.hpp"
#include "marimba/spec.hpp"
#include "marimba/surface.hpp"

using namespace marimba;
using marimba::testing::theta_spec;
using Catch::Approx;

namespace {

bool has_issue(const MarimbaSpec& s, const std::string& code) {
  for (const auto& i : validate_spec(s))
    if (i.code == code) return true;
  return false;
}

}  // namespace

TEST_CASE("spec text round-trips and hashes deterministically", "[surface][spec]") {
  MarimbaSpec s = theta_spec();
  std::string text = write_spec(s);
  MarimbaSpec back = parse_spec(text);
  REQUIRE(write_spec(back) == text);
  REQUIRE(spec_hash(back) == spec_hash(s));
  REQUIRE(spec_hash(s).size() == 64);
  MarimbaSpec other = s;
  other.gluings[0].twist += 1e-9;
  REQUIRE(spec_hash(other) != spec_hash(s));
}

TEST_CASE("parse errors are reported", "[surface][spec]") {
  REQUIRE_THROWS_AS(parse_spec("[[pants]\nname = \"P\""), Error);
  REQUIRE_THROWS_AS(parse_slot("P"), Error);
  REQUIRE(parse_slot("P:2:1").component == 1);
}

TEST_CASE("validation catches malformed specs", "[surface][spec]") {
  REQUIRE(validate_spec(theta_spec()).empty());
  MarimbaSpec s = theta_spec();
  s.gluings[1].length = -1.0;
  REQUIRE(has_issue(s, "NonPositiveLength"));
  s = theta_spec();
  s.gluings[2].b = {"Q", 1, 0};
  REQUIRE(!validate_spec(s).empty());
  s = theta_spec();
  s.gamma["zz"] = "Z";
  REQUIRE(has_issue(s, "UnknownGluing"));
  s = theta_spec();
  s.gluings[0].a.pants = "R";
  REQUIRE(has_issue(s, "UnknownPants"));
  REQUIRE_THROWS_AS(build_surface(s), Error);
}

TEST_CASE("Euler characteristic and area from Gauss-Bonnet", "[surface]") {
  Surface s = build_surface(theta_spec());
  REQUIRE(s.chi == -2);
  REQUIRE(euler_characteristic(theta_spec()) == -2);
  double area = 0.0;
  for (const auto& c : s.cells) area += c.area;
  REQUIRE(area == Approx(2.0 * kPi * 2).epsilon(1e-9));
  REQUIRE(s.cells.size() == 4);
  REQUIRE(s.labels == std::vector<std::string>{"A", "B", "C"});
  REQUIRE(s.gamma_length == Approx(0.8 + 1.0 + 1.3).epsilon(1e-12));
}

TEST_CASE("measured cuff lengths match the spec", "[surface]") {
  Surface s = build_surface(theta_spec());
  for (const auto& cuff : s.cuffs) {
    double spec_len = 0.0;
    for (const auto& g : s.spec.gluings)
      if (g.id == cuff.gluing) spec_len = g.length;
    REQUIRE(cuff.length == Approx(spec_len).epsilon(1e-12));
    // Sum of the lengths of the cell sides lying on this cuff, on one side.
    double measured = 0.0;
    for (const auto& cell : s.cells)
      for (const auto& side : cell.sides)
        if (side.kind == SideKind::Cuff && side.a_side && &s.cuffs[side.cuff] == &cuff) measured += side.length;
    REQUIRE(measured == Approx(spec_len).epsilon(1e-9));
  }
}

TEST_CASE("portals are mutually inverse and respect side geometry", "[surface][property]") {
  Surface s = build_surface(theta_spec());
  for (size_t ci = 0; ci < s.cells.size(); ++ci) {
    const Cell& cell = s.cells[ci];
    for (int si = 0; si < 6; ++si) {
      const CellSide& side = cell.sides[si];
      REQUIRE(dist(side.start, side.end) == Approx(side.length).epsilon(1e-9));
      REQUIRE(!side.portals.empty());
      for (const Portal& p : side.portals) {
        REQUIRE(p.g.det() == Approx(1.0).epsilon(1e-12));
        double mid = 0.5 * (p.s_lo + p.s_hi);
        PointH2 here = side_point(side, mid);
        PointH2 there = apply(p.g, here);
        const CellSide& target = s.cells[p.target_cell].sides[p.target_side];
        REQUIRE(std::abs(side_value(target.line, there)) < 1e-8 * (1.0 + there.im));
        // The portal back from the target maps the point home.
        double back_s = geodesic_position(target.line, there) - geodesic_position(target.line, target.start);
        const Portal& q = portal_at(target, back_s);
        REQUIRE(q.target_cell == static_cast<int>(ci));
        PointH2 home = apply(q.g, there);
        REQUIRE(dist(home, here) < 1e-8);
      }
    }
  }
}

TEST_CASE("locate finds a side point on the requested cuff", "[surface]") {
  Surface s = build_surface(theta_spec());
  Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    int cuff = static_cast<int>(rng.below(s.cuffs.size()));
    double x = rng.uniform() * s.cuffs[cuff].length;
    SidePoint sp = s.locate(cuff, x);
    const CellSide& side = s.cells[sp.cell].sides[sp.side];
    REQUIRE(side.cuff == cuff);
    REQUIRE(side.a_side);
    REQUIRE(sp.s >= -1e-12);
    REQUIRE(sp.s <= side.length + 1e-12);
  }
}

TEST_CASE("interior points are classified by inside_cell", "[surface]") {
  Surface s = build_surface(theta_spec());
  for (const auto& cell : s.cells) {
    // Midpoint of a diagonal of the convex hexagon.
    PointH2 v0 = cell.vertices[0], v3 = cell.vertices[3];
    PointH2 c = flow({v0, direction_to(v0, v3)}, 0.5 * dist(v0, v3)).base;
    REQUIRE(inside_cell(cell, c));
    REQUIRE_FALSE(inside_cell(cell, {c.re, c.im * 1e3}));
  }
}
