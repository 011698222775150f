#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "marimba/arcs.hpp"
#include "marimba/constructions.hpp"
#include "marimba/errors.hpp"
#include "marimba/surface.hpp"

using namespace marimba;
using marimba::testing::theta_spec;
using Catch::Approx;

namespace {

std::vector<double> lengths(const std::vector<SpectrumLine>& spectrum) {
  std::vector<double> out;
  for (const auto& line : spectrum)
    for (int i = 0; i < line.multiplicity; ++i) out.push_back(line.length);
  return out;
}

// Multisets equal up to a length tolerance.
bool same_multiset(std::vector<double> a, std::vector<double> b, double tol) {
  if (a.size() != b.size()) return false;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  for (size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("seams are the shortest 1-step arcs between distinct cuffs", "[arcs]") {
  // Long cuffs make all three seams shorter than any arc returning to its cuff.
  Surface s = build_surface(theta_spec(3.0, 3.5, 4.0));
  auto spectrum = orthospectrum_oracle(s, 1, 1.5);
  REQUIRE(spectrum.size() == 3);
  std::vector<double> seams = {seam_length(4.0, 3.0, 3.5), seam_length(3.0, 3.5, 4.0), seam_length(3.5, 4.0, 3.0)};
  std::sort(seams.begin(), seams.end());
  for (int i = 0; i < 3; ++i) {
    REQUIRE(spectrum[i].length == Approx(seams[i]).epsilon(1e-10));
    // One seam per pants, each in both orientations.
    REQUIRE(spectrum[i].multiplicity == 4);
  }
}

TEST_CASE("pruned enumeration matches the unpruned reference", "[arcs][property]") {
  EnumerateOptions reference;
  reference.prune = false;
  reference.max_depth = 5;
  {
    Surface s = build_surface(theta_spec(3.0, 3.5, 4.0));
    REQUIRE(same_multiset(lengths(orthospectrum_oracle(s, 1, 2.0)), lengths(orthospectrum_oracle(s, 1, 2.0, reference)), 1e-10));
  }
  {
    Surface s = build_surface(theta_spec());
    auto fast = lengths(orthospectrum_oracle(s, 1, 3.2));
    REQUIRE(fast.size() >= 12);
    REQUIRE(same_multiset(fast, lengths(orthospectrum_oracle(s, 1, 3.2, reference)), 1e-10));
  }
}

TEST_CASE("theta surface 1-step spectrum", "[arcs]") {
  Surface s = build_surface(theta_spec());
  auto spectrum = orthospectrum_oracle(s, 1, 4.5);
  REQUIRE(spectrum.size() >= 4);
  for (const auto& line : spectrum) {
    REQUIRE(line.length > 0.0);
    // Orientation reversal pairs every oriented arc with a distinct partner.
    REQUIRE(line.multiplicity % 2 == 0);
    REQUIRE(line.words.size() == static_cast<size_t>(line.multiplicity));
  }
  for (size_t i = 1; i < spectrum.size(); ++i) REQUIRE(spectrum[i].length > spectrum[i - 1].length);
}

TEST_CASE("raising the length bound keeps the existing prefix", "[arcs][property]") {
  Surface s = build_surface(theta_spec());
  for (int k : {1, 2}) {
    double lo = k == 1 ? 3.2 : 5.5, hi = k == 1 ? 4.5 : 6.2;
    auto small = orthospectrum_oracle(s, k, lo), large = orthospectrum_oracle(s, k, hi);
    REQUIRE(small.size() <= large.size());
    for (size_t i = 0; i < small.size(); ++i) {
      REQUIRE(small[i].length == large[i].length);
      REQUIRE(small[i].multiplicity == large[i].multiplicity);
    }
  }
}

TEST_CASE("realized classes reproduce their lengths", "[arcs]") {
  Surface s = build_surface(theta_spec());
  for (int k : {1, 2}) {
    auto arcs = enumerate_arcs(s, k, k == 1 ? 3.5 : 5.6);
    REQUIRE(!arcs.empty());
    for (const auto& arc : arcs) {
      OrthoArc again = orthogeodesic_length(s, arc.cls);
      REQUIRE(again.length == Approx(arc.length).epsilon(1e-12));
      REQUIRE(arc.cls.k == k);
      // Feet lie on labelled cuffs.
      REQUIRE(!s.cuffs[arc.start_cuff].label.empty());
      REQUIRE(!s.cuffs[arc.end_cuff].label.empty());
    }
  }
}

TEST_CASE("a class realized with the wrong step count is rejected", "[arcs]") {
  Surface s = build_surface(theta_spec());
  ArcClass c = enumerate_arc_classes(s, 2, 5.6).front();
  c.k = 1;
  REQUIRE_THROWS_AS(orthogeodesic_length(s, c), Error);
}

TEST_CASE("portal ids round-trip", "[arcs]") {
  for (int cell : {0, 3, 17})
    for (int side = 0; side < 6; ++side)
      for (int index : {0, 1, 5}) {
        int c, sd, i;
        decode_portal(portal_id(cell, side, index), c, sd, i);
        REQUIRE(c == cell);
        REQUIRE(sd == side);
        REQUIRE(i == index);
      }
}

TEST_CASE("enumeration budget and argument checks", "[arcs]") {
  Surface s = build_surface(theta_spec());
  EnumerateOptions tiny;
  tiny.budget = 10;
  REQUIRE_THROWS_AS(enumerate_arcs(s, 1, 4.0, tiny), Error);
  REQUIRE_THROWS_AS(enumerate_arcs(s, 0, 4.0), Error);
  REQUIRE_THROWS_AS(enumerate_arcs(s, 1, -1.0), Error);
}

TEST_CASE("unlabelled curves are invisible to the spectrum", "[arcs]") {
  // With one curve unlabelled, arcs may cross it freely: every 1-step arc of
  // the fully labelled surface between two remaining curves is still present.
  Surface all = build_surface(theta_spec());
  Surface two = build_surface(theta_spec(0.8, 1.0, 1.3, false));
  auto full = enumerate_arcs(all, 1, 3.5);
  auto part = lengths(orthospectrum_oracle(two, 1, 3.5));
  for (const auto& arc : full) {
    if (all.cuffs[arc.start_cuff].label == "C" || all.cuffs[arc.end_cuff].label == "C") continue;
    bool found = std::any_of(part.begin(), part.end(), [&](double l) { return std::abs(l - arc.length) < 1e-10; });
    REQUIRE(found);
  }
}

TEST_CASE("shortest closed geodesic crossing a curve", "[arcs]") {
  SymmetricFamilyParams p{1.125, 0.875, 0.3125, 0.1875};
  MarimbaSpec x = symmetric_family_marimba(p);
  MarimbaSpec back = half_twist_partner(half_twist_partner(x));
  Surface sx = build_surface(x), sb = build_surface(back);
  int ax = sx.cuff_for_label("A"), ab = sb.cuff_for_label("A");
  double lx = shortest_loop_crossing(sx, ax, 4.2);
  REQUIRE(std::isfinite(lx));
  // A full twist is an isometry, so the value returns.
  REQUIRE(shortest_loop_crossing(sb, ab, 4.2) == Approx(lx).epsilon(1e-9));
  REQUIRE_THROWS_AS(shortest_loop_crossing(sx, 99, 4.0), Error);
}
