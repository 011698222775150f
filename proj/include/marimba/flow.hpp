#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "marimba/hyp2.hpp"
#include "marimba/surface.hpp"

namespace marimba {

// Unit vector based on a labelled cuff: a-slot position x and angle theta
// measured counterclockwise from the cuff direction. theta in (0, pi) points
// out of the a-slot side.
struct CrossSectionState {
  int cuff = 0;
  double x = 0.0;
  double theta = 0.5 * kPi;
};

struct InteriorState {
  int cell = 0;
  UnitTangentH2 v;
};

using TraceStart = std::variant<InteriorState, CrossSectionState>;

struct Crossing {
  double t;
  int cuff;
  int note;  // index into Surface::labels
  double x;
  double theta;
};

struct TraceConfig {
  double max_length = std::numeric_limits<double>::infinity();
  std::int64_t max_crossings = std::numeric_limits<std::int64_t>::max();
  double tangency_tol = kPolicy.tangency_tol;
  int renorm_period = 1;
};

struct TraceDiagnostics {
  std::int64_t steps = 0;
  std::int64_t renorm_count = 0;
  double min_sin = 1.0;
  double max_det_dev = 0.0;  // largest |det - 1| seen before renormalization
};

struct CrossingLog {
  TraceStart start;
  std::vector<Crossing> entries;
  double total_length = 0.0;
  InteriorState end;
  TraceDiagnostics diag;
};

InteriorState sample_liouville(const Surface& surface, std::uint64_t seed);
// Sample from |sin theta| dx dtheta / (4 * total labelled length).
CrossSectionState sample_cross_section(const Surface& surface, std::uint64_t seed);

CrossingLog trace(const Surface& surface, const TraceStart& start, const TraceConfig& cfg);

struct Return {
  CrossSectionState state;
  double time;
};

Return first_return(const Surface& surface, const CrossSectionState& s);
CrossSectionState reverse(const CrossSectionState& s);

// Interior state of a cross-section vector, in the cell it points into.
InteriorState interior_of(const Surface& surface, const CrossSectionState& s);

struct PathStep {
  int cell;
  int side;
  int portal;  // index into the exit side's portal list
  double time;  // cumulative
};

// Cell-by-cell development from frame f in `cell` (entered through
// `entry_side`, or -1) until the next exit would pass max_length.
std::vector<PathStep> develop_path(const Surface& surface, int cell, int entry_side, Isometry2 f, double max_length);

struct LogHeader {
  std::string spec_hash;
  std::uint64_t seed = 0;
  TraceConfig config;
  std::vector<std::string> labels;
};

void write_log_jsonl(std::ostream& out, const Surface& surface, const CrossingLog& log, const LogHeader& header);

}  // namespace marimba
