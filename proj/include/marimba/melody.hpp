#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "marimba/flow.hpp"

namespace marimba {

struct Note {
  int label;  // index into Melody::labels
  double t;
};

struct Melody {
  std::vector<std::string> labels;
  std::vector<Note> notes;
  double horizon = 0.0;

  int label_index(const std::string& label) const;  // -1 when absent
};

struct Motif {
  std::vector<std::string> labels;  // first label plus one per offset
  std::vector<double> offsets;      // strictly increasing, positive
  double epsilon = 0.0;
};

struct FrequencyEstimate {
  double value = 0.0;
  long long count = 0;
  double horizon = 0.0;
  double std_error = 0.0;
};

struct LengthEstimate {
  double value = 0.0;
  double error = 0.0;
  bool degenerate = false;  // no occurrence at all
};

Melody melody_from_log(const CrossingLog& log, const std::vector<std::string>& labels);
Melody shift(const Melody& m, double s);
void validate_motif(const Motif& motif);
bool motif_played_at(const Melody& m, const Motif& motif, size_t j);
FrequencyEstimate motif_frequency(const Melody& m, const Motif& motif);
FrequencyEstimate note_frequency(const Melody& m, const std::string& label);
LengthEstimate length_from_frequency(const FrequencyEstimate& f, int chi);

// Degenerate motifs for every label plus every ordered label pair at the
// given offsets, all with window epsilon.
std::vector<Motif> default_battery(const Melody& m, double epsilon);
double grid_step_for(const Melody& m);

struct MotifComparison {
  Motif motif;
  FrequencyEstimate a;
  FrequencyEstimate b;
  double z = 0.0;
};

struct IsomelodyReport {
  std::vector<MotifComparison> rows;
  double threshold = 0.0;
  bool consistent = true;
  int witness = -1;  // row index of the largest |z| when distinguished
};

IsomelodyReport isomelody_report(const Melody& a, const Melody& b, const std::vector<Motif>& battery, double alpha);

void write_melody_jsonl(std::ostream& out, const Melody& m, const std::string& header_json);
Melody read_melody_jsonl(std::istream& in);

}  // namespace marimba
