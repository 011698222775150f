#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "fixtures.hpp"
#include "marimba/errors.hpp"
#include "marimba/surface.hpp"
#include "marimba/teich.hpp"

using namespace marimba;
using marimba::testing::theta_spec;
using Catch::Approx;

namespace {

const TwistFamily& theta_family() {
  static const TwistFamily family = make_twist_family(theta_spec(), "b", 3, 7.0);
  return family;
}

}  // namespace

TEST_CASE("two-step trigonometry matches direct lengths", "[teich]") {
  Surface s = build_surface(theta_spec());
  auto arcs = enumerate_arcs(s, 2, 6.2);
  REQUIRE(arcs.size() >= 20);
  for (const auto& arc : arcs) {
    TwoStepParts parts = two_step_components(s, arc.cls);
    REQUIRE(parts.first > 0.0);
    REQUIRE(parts.second > 0.0);
    REQUIRE(!s.cuffs[parts.cuff].label.empty());
    double predicted = std::cosh(two_step_formula(parts.first, parts.second, parts.offset));
    REQUIRE(predicted == Approx(std::cosh(arc.length)).epsilon(1e-9));
  }
  ArcClass one = enumerate_arc_classes(s, 1, 3.0).front();
  REQUIRE_THROWS_AS(two_step_components(s, one), Error);
}

TEST_CASE("reversed arcs share halves and offset", "[teich]") {
  // Reversing an arc swaps its halves and the orientation of the crossed
  // curve; the displacement is walked backwards along the reversed curve,
  // so the signed offset is unchanged.
  Surface s = build_surface(theta_spec());
  auto arcs = enumerate_arcs(s, 2, 6.0);
  int pairs = 0;
  for (size_t i = 0; i < arcs.size(); ++i)
    for (size_t j = i + 1; j < arcs.size() && arcs[j].length - arcs[i].length < 1e-9; ++j) {
      TwoStepParts a = two_step_components(s, arcs[i].cls), b = two_step_components(s, arcs[j].cls);
      bool reversed = std::abs(a.first - b.second) < 1e-9 && std::abs(a.second - b.first) < 1e-9 &&
                      arcs[i].start_cuff == arcs[j].end_cuff && arcs[i].end_cuff == arcs[j].start_cuff &&
                      std::abs(arcs[i].start_x - arcs[j].end_x) < 1e-7;
      if (!reversed) continue;
      ++pairs;
      REQUIRE(a.offset == Approx(b.offset).margin(1e-9));
    }
  REQUIRE(pairs > 0);
}

TEST_CASE("zero offset reduces to length additivity", "[teich]") {
  for (double p : {0.3, 1.1, 2.4})
    for (double q : {0.5, 1.9}) REQUIRE(two_step_formula(p, q, 0.0) == Approx(p + q).epsilon(1e-14));
}

TEST_CASE("twist family lengths", "[teich]") {
  const TwistFamily& f = theta_family();
  REQUIRE(f.arcs.size() == 3);
  for (int i = 0; i < 3; ++i) {
    const TwistArc& arc = f.arcs[i];
    REQUIRE(two_step_length(f, i, 0.0) == Approx(two_step_formula(arc.first, arc.second, arc.d)).epsilon(1e-12));
    // Minimum at theta = -d.
    REQUIRE(two_step_length(f, i, -arc.d) == Approx(arc.first + arc.second).epsilon(1e-12));
    REQUIRE(two_step_length(f, i, -arc.d + 0.1) > two_step_length(f, i, -arc.d));
    // Closed-form derivative against central differences.
    for (double theta : {-0.4, 0.2, 0.9}) {
      double h = 1e-5;
      double numeric = (two_step_length(f, i, theta + h) - two_step_length(f, i, theta - h)) / (2 * h);
      double len = two_step_length(f, i, theta);
      double exact = arc.a * std::sinh(arc.d + theta) / std::sinh(len);
      REQUIRE(numeric == Approx(exact).epsilon(1e-6));
    }
  }
}

TEST_CASE("formula lengths match rebuilt twisted surfaces", "[teich]") {
  const TwistFamily& f = theta_family();
  for (double theta : {-0.7, -0.3, 0.3, 0.7})
    for (int i = 0; i < 3; ++i) {
      double formula = two_step_length(f, i, theta);
      double rebuilt = rebuilt_two_step_length(f, i, theta, formula + 0.05);
      REQUIRE(std::isfinite(rebuilt));
      REQUIRE(std::abs(rebuilt - formula) < 1e-8);
    }
}

TEST_CASE("twist variety residual", "[teich]") {
  const TwistFamily& f = theta_family();
  double worst = 0.0;
  for (int j = 0; j < 20; ++j) {
    double theta = -1.0 + 2.0 * j / 19.0;
    auto r = twist_variety_residual(f, family_cosh_lengths(f, theta));
    REQUIRE(r.size() == 2);
    for (double v : r) worst = std::max(worst, std::abs(v));
  }
  REQUIRE(worst < 1e-9);
  auto x = family_cosh_lengths(f, 0.37);
  x[1] *= 1.01;
  auto r = twist_variety_residual(f, x);
  REQUIRE(std::max(std::abs(r[0]), std::abs(r[1])) > 1e-4);
  std::vector<double> impossible = family_cosh_lengths(f, 0.0);
  impossible[0] = f.arcs[0].b * 0.5;
  REQUIRE_THROWS_AS(twist_variety_residual(f, impossible), Error);
}

TEST_CASE("degenerate direction difference", "[teich]") {
  // Two copies of the same arc: delta = 0 and the residual is -(y2 - y1)^2.
  TwistFamily f = theta_family();
  f.arcs = {f.arcs[0], f.arcs[0]};
  f.arcs[1].delta = 0.0;
  auto x = family_cosh_lengths(f, 0.25);
  REQUIRE(std::abs(twist_variety_residual(f, x)[0]) < 1e-12);
  x[1] += 0.3;
  double y1 = (x[0] - f.arcs[0].b) / f.arcs[0].a, y2 = (x[1] - f.arcs[1].b) / f.arcs[1].a;
  REQUIRE(twist_variety_residual(f, x)[0] == Approx(-(y2 - y1) * (y2 - y1)).epsilon(1e-12));
}

TEST_CASE("a single arc does not determine a family", "[teich]") {
  REQUIRE_THROWS_AS(make_twist_family(theta_spec(), "b", 1, 7.0), Error);
  TwistFamily f = theta_family();
  MarimbaSpec moved = twisted_spec(f, 0.5);
  for (const auto& g : moved.gluings)
    if (g.id == "b") REQUIRE(g.twist == Approx(0.2 + 0.5).epsilon(1e-15));
}
