#pragma once

#include <map>
#include <string>

#include "marimba/flow.hpp"
#include "marimba/spec.hpp"
#include "marimba/surface.hpp"

namespace marimba {

// Genus-2 marimba W/(alpha, beta) where W is the two-sheeted cover of the
// pants (l_alpha/2, l_alpha/2, l_beta) whose deck involution swaps sheets.
MarimbaSpec symmetric_family_marimba(const SymmetricFamilyParams& p);

// Same family member with the alpha twist advanced by half of l_alpha.
MarimbaSpec half_twist_partner(const MarimbaSpec& spec);

// Largest deviation between the cell structure and its image under the deck
// involution (sheet j -> j+1); infinite if the combinatorics disagree.
double deck_involution_defect(const Surface& surface);

struct CoverCocycle {
  int n = 2;
  std::map<std::string, int> along;  // monodromy around each gluing curve
  std::map<std::string, int> cross;  // sheet shift for crossing it
};

// Cocycle with monodromy 1 around every labelled curve and weights on the
// remaining curves chosen to close up around each pants, when possible.
CoverCocycle default_cocycle(const MarimbaSpec& spec, int n);

MarimbaSpec cyclic_cover(const MarimbaSpec& spec, const CoverCocycle& c);

// Same cell-chart state in the given sheet of a cover built by cyclic_cover.
InteriorState lift_state(const Surface& cover, const InteriorState& base, int sheet);

// Identically coordinated state in the half-twist partner.
InteriorState transport_half_twist(const MarimbaSpec& x, const MarimbaSpec& partner, const Surface& surface_x,
                                   const InteriorState& start);

}  // namespace marimba
