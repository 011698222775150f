#pragma once

#include <string>
#include <vector>

#include "marimba/arcs.hpp"
#include "marimba/spec.hpp"

namespace marimba {

// A 2-step orthogeodesic splits into its two 1-step halves joined by a run
// of signed length `offset` along the crossed curve. The crossed curve is
// oriented with the first half's cell on its right; positive offset is the
// direction a positive twist of that curve moves the far half.
struct TwoStepParts {
  double first = 0.0;
  double second = 0.0;
  double offset = 0.0;
  int cuff = -1;  // crossed labelled cuff
};

TwoStepParts two_step_components(const Surface& surface, const ArcClass& arc);

// cosh(length) = sinh(first) sinh(second) cosh(offset) + cosh(first) cosh(second)
double two_step_formula(double first, double second, double offset);

struct TwistArc {
  double a;      // sinh * sinh of the halves
  double b;      // cosh * cosh of the halves
  double d;      // offset at twist 0
  double delta;  // d - d of the first arc
  double first, second;
};

struct TwistFamily {
  MarimbaSpec base;
  std::string gluing;
  int cuff = -1;
  std::vector<TwistArc> arcs;
};

// The r >= 2 shortest distinct 2-step orthogeodesics crossing `gluing`,
// up to length l_max.
TwistFamily make_twist_family(const MarimbaSpec& spec, const std::string& gluing, int r, double l_max);
TwistFamily make_twist_family(const MarimbaSpec& spec, const std::string& gluing, const std::vector<ArcClass>& arcs);

double two_step_length(const TwistFamily& family, int i, double theta);
std::vector<double> family_cosh_lengths(const TwistFamily& family, double theta);
std::vector<double> twist_variety_residual(const TwistFamily& family, const std::vector<double>& x);

// Same spec with the family's gluing twisted by theta more.
MarimbaSpec twisted_spec(const TwistFamily& family, double theta);

// Oracle length on the rebuilt twisted surface of the 2-step arc with the
// same halves and offset d_i + theta; NaN if none is found below l_max.
double rebuilt_two_step_length(const TwistFamily& family, int i, double theta, double l_max);

}  // namespace marimba
