#pragma once

#include <string>

#include "marimba/spec.hpp"

namespace marimba::testing {

// Genus 2 from two pants glued cuff to cuff ("theta graph").
inline MarimbaSpec theta_spec(double la = 0.8, double lb = 1.0, double lc = 1.3, bool label_all = true) {
  MarimbaSpec s;
  s.pants = {{"P"}, {"Q"}};
  s.gluings = {{"a", {"P", 0}, {"Q", 0}, la, 0.1}, {"b", {"P", 1}, {"Q", 1}, lb, 0.2}, {"c", {"P", 2}, {"Q", 2}, lc, 0.3}};
  s.gamma = {{"a", "A"}, {"b", "B"}};
  if (label_all) s.gamma["c"] = "C";
  return s;
}

// Genus 2 with a single labelled curve of length `len`: separating if it is
// the waist between two one-holed tori, nonseparating if it is a handle curve.
inline MarimbaSpec single_note_spec(bool separating, double len = 1.0) {
  MarimbaSpec s;
  s.pants = {{"P"}, {"Q"}};
  s.gluings = {{"w", {"P", 0}, {"Q", 0}, len, 0.0}, {"p", {"P", 1}, {"P", 2}, 1.1, 0.15}, {"q", {"Q", 1}, {"Q", 2}, 1.4, 0.35}};
  s.gamma = {{separating ? "w" : "p", "G"}};
  return s;
}

}  // namespace marimba::testing
