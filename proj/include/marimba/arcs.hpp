#pragma once

#include <string>
#include <vector>

#include "marimba/surface.hpp"

namespace marimba {

// A k-step arc: leaves a labelled cuff side into start_cell, crosses the
// portals in `word` and ends on a labelled cuff side of the last cell; the
// word fixes the homotopy class, its orthogeodesic meets the labelled curves
// k-1 times in between.
struct ArcClass {
  int k = 1;
  int start_cell = 0;
  int start_side = 0;
  std::vector<int> word;  // global portal ids
  int end_cell = 0;
  int end_side = 0;

  std::string key() const;
};

struct OrthoArc {
  ArcClass cls;
  double length = 0.0;
  PointH2 foot_start;  // in the start cell chart
  PointH2 foot_end;
  int start_cuff = -1, end_cuff = -1;
  double start_x = 0.0, end_x = 0.0;
};

struct SpectrumLine {
  double length;
  int multiplicity;
  std::vector<std::string> words;
};

int portal_id(int cell, int side, int index);
void decode_portal(int id, int& cell, int& side, int& index);

// Image in the start chart of the end cell chart along the word.
Isometry2 word_transform(const Surface& surface, const std::vector<int>& word);

// Labelled cuff geodesics lifted into the start chart: start, then one per
// labelled crossing in the word, then the end.
std::vector<GeodesicH2> lifted_gamma_lines(const Surface& surface, const ArcClass& c);

OrthoArc orthogeodesic_length(const Surface& surface, const ArcClass& c);

struct EnumerateOptions {
  bool prune = true;
  bool depth_first = false;
  int max_depth = 64;
  long long budget = 5000000;  // lifted cells visited or queued
};

std::vector<OrthoArc> enumerate_arcs(const Surface& surface, int k, double l_max, const EnumerateOptions& opt = {});
std::vector<ArcClass> enumerate_arc_classes(const Surface& surface, int k, double l_max, const EnumerateOptions& opt = {});
std::vector<SpectrumLine> orthospectrum_oracle(const Surface& surface, int k, double l_max, const EnumerateOptions& opt = {});

}  // namespace marimba

namespace marimba {

// Shortest closed geodesic crossing the given cuff, among deck translations
// of length <= l_max; infinity if none. Non-isometry certificate for pairs
// whose orthospectra coincide.
double shortest_loop_crossing(const Surface& surface, int cuff, double l_max, long long budget = 5000000);

}  // namespace marimba
