#include "marimba/melody.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <set>

#include "json.hpp"
#include "marimba/errors.hpp"

namespace marimba {

int Melody::label_index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  return it == labels.end() ? -1 : static_cast<int>(it - labels.begin());
}

Melody melody_from_log(const CrossingLog& log, const std::vector<std::string>& labels) {
  if (log.entries.empty()) throw Error(Errc::EmptyLog, "crossing log has no entries");
  Melody m;
  m.labels = labels;
  m.horizon = log.total_length;
  m.notes.reserve(log.entries.size());
  for (const auto& c : log.entries) m.notes.push_back({c.note, c.t});
  return m;
}

Melody shift(const Melody& m, double s) {
  if (!(s >= 0.0 && s < m.horizon)) throw Error(Errc::OutOfRange, "shift outside [0, horizon)");
  Melody out;
  out.labels = m.labels;
  out.horizon = m.horizon - s;
  auto first = std::upper_bound(m.notes.begin(), m.notes.end(), s, [](double v, const Note& n) { return v < n.t; });
  for (auto it = first; it != m.notes.end(); ++it) out.notes.push_back({it->label, it->t - s});
  return out;
}

void validate_motif(const Motif& motif) {
  if (motif.labels.size() != motif.offsets.size() + 1)
    throw Error(Errc::Validation, "motif needs one more label than offsets");
  double prev = 0.0;
  for (double t : motif.offsets) {
    if (!(t > prev)) throw Error(Errc::Validation, "motif offsets must be positive and increasing");
    prev = t;
  }
  if (!motif.offsets.empty() && !(motif.epsilon > 0)) throw Error(Errc::Validation, "motif epsilon must be positive");
}

namespace {

std::vector<int> resolve(const Melody& m, const Motif& motif) {
  std::vector<int> ids;
  for (const auto& l : motif.labels) ids.push_back(m.label_index(l));
  return ids;
}

bool played(const Melody& m, const std::vector<int>& ids, const Motif& motif, size_t j) {
  if (j >= m.notes.size() || m.notes[j].label != ids[0] || ids[0] < 0) return false;
  size_t k = motif.offsets.size();
  if (j + k >= m.notes.size()) return false;
  double t0 = m.notes[j].t;
  for (size_t i = 1; i <= k; ++i) {
    const Note& n = m.notes[j + i];
    if (n.label != ids[i]) return false;
    double gap = n.t - t0;
    if (gap < motif.offsets[i - 1] || gap > motif.offsets[i - 1] + motif.epsilon) return false;
  }
  return true;
}

}  // namespace

bool motif_played_at(const Melody& m, const Motif& motif, size_t j) {
  validate_motif(motif);
  return played(m, resolve(m, motif), motif, j);
}

FrequencyEstimate motif_frequency(const Melody& m, const Motif& motif) {
  validate_motif(motif);
  if (!(m.horizon > 0)) throw Error(Errc::OutOfRange, "melody horizon must be positive");
  auto ids = resolve(m, motif);
  double reach = motif.offsets.empty() ? 0.0 : motif.offsets.back() + motif.epsilon;
  FrequencyEstimate f;
  f.horizon = m.horizon - reach;
  if (!(f.horizon > 0)) return f;
  for (size_t j = 0; j < m.notes.size() && m.notes[j].t <= f.horizon; ++j)
    if (played(m, ids, motif, j)) ++f.count;
  f.value = f.count / f.horizon;
  f.std_error = std::sqrt(static_cast<double>(std::max<long long>(f.count, 1))) / f.horizon;
  return f;
}

FrequencyEstimate note_frequency(const Melody& m, const std::string& label) {
  if (m.label_index(label) < 0) throw Error(Errc::UnknownLabel, "label '" + label + "' is not declared");
  return motif_frequency(m, Motif{{label}, {}, 0.0});
}

LengthEstimate length_from_frequency(const FrequencyEstimate& f, int chi) {
  if (chi >= 0) throw Error(Errc::NonNegativeChi, "Euler characteristic must be negative");
  double scale = kPi * kPi * std::abs(chi);
  return {scale * f.value, scale * f.std_error, f.count == 0};
}

double grid_step_for(const Melody& m) {
  double first = INFINITY;
  for (size_t i = 1; i < m.notes.size(); ++i) first = std::min(first, m.notes[i].t - m.notes[i - 1].t);
  if (!std::isfinite(first)) first = 0.0;
  return (3.0 * first + 5.0) / 1e4;
}

std::vector<Motif> default_battery(const Melody& m, double epsilon) {
  std::vector<Motif> out;
  for (const auto& l : m.labels) out.push_back({{l}, {}, 0.0});
  std::vector<double> gaps;
  for (size_t i = 1; i < m.notes.size(); ++i) gaps.push_back(m.notes[i].t - m.notes[i - 1].t);
  if (gaps.empty()) return out;
  std::sort(gaps.begin(), gaps.end());
  for (int q = 1; q <= 9; ++q) {
    double off = gaps[std::min(gaps.size() - 1, static_cast<size_t>(q * 0.1 * gaps.size()))];
    if (!(off > 0)) continue;
    for (const auto& a : m.labels)
      for (const auto& b : m.labels) out.push_back({{a, b}, {off}, epsilon});
  }
  return out;
}

IsomelodyReport isomelody_report(const Melody& a, const Melody& b, const std::vector<Motif>& battery, double alpha) {
  std::set<std::string> la(a.labels.begin(), a.labels.end()), lb(b.labels.begin(), b.labels.end());
  if (la != lb) throw Error(Errc::LabelMismatch, "melodies use different label sets");
  if (!(alpha > 0 && alpha < 1)) throw Error(Errc::Validation, "alpha must lie in (0, 1)");
  IsomelodyReport rep;
  size_t tests = std::max<size_t>(battery.size(), 1);
  boost::math::normal_distribution<double> normal;
  rep.threshold = boost::math::quantile(normal, 1.0 - alpha / (2.0 * tests));
  double worst = -1.0;
  for (const auto& motif : battery) {
    MotifComparison row{motif, motif_frequency(a, motif), motif_frequency(b, motif), 0.0};
    double se = std::hypot(row.a.std_error, row.b.std_error);
    if (row.a.count + row.b.count > 0 && se > 0) row.z = (row.a.value - row.b.value) / se;
    if (std::abs(row.z) > worst) {
      worst = std::abs(row.z);
      if (worst > rep.threshold) rep.witness = static_cast<int>(rep.rows.size());
    }
    rep.rows.push_back(row);
  }
  rep.consistent = rep.witness < 0;
  return rep;
}

void write_melody_jsonl(std::ostream& out, const Melody& m, const std::string& header_json) {
  nlohmann::json head = header_json.empty() ? nlohmann::json::object() : nlohmann::json::parse(header_json);
  head["horizon"] = m.horizon;
  head["labels"] = m.labels;
  out << head.dump() << "\n";
  char buf[128];
  for (size_t i = 0; i < m.notes.size(); ++i) {
    nlohmann::json note = m.labels[m.notes[i].label];
    std::snprintf(buf, sizeof buf, "{\"i\":%zu,\"note\":%s,\"t\":%.17g}\n", i, note.dump().c_str(), m.notes[i].t);
    out << buf;
  }
}

Melody read_melody_jsonl(std::istream& in) {
  Melody m;
  std::string line;
  bool header = false;
  std::vector<std::pair<std::string, double>> raw;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::Parse, "line " + std::to_string(lineno) + ": " + e.what());
    }
    if (!j.contains("t")) {
      if (header) throw Error(Errc::Parse, "line " + std::to_string(lineno) + ": second header object");
      header = true;
      if (j.contains("horizon")) m.horizon = j["horizon"].get<double>();
      else if (j.contains("total_length")) m.horizon = j["total_length"].get<double>();
      if (j.contains("labels")) m.labels = j["labels"].get<std::vector<std::string>>();
      continue;
    }
    raw.emplace_back(j.at("note").get<std::string>(), j.at("t").get<double>());
  }
  if (m.labels.empty()) {
    std::set<std::string> seen;
    for (const auto& r : raw) seen.insert(r.first);
    m.labels.assign(seen.begin(), seen.end());
  }
  double prev = -INFINITY;
  for (const auto& [label, t] : raw) {
    int id = m.label_index(label);
    if (id < 0) throw Error(Errc::UnknownLabel, "note '" + label + "' not among declared labels");
    if (!(t > prev)) throw Error(Errc::Parse, "note times must be strictly increasing");
    prev = t;
    m.notes.push_back({id, t});
  }
  if (m.horizon <= 0 && !m.notes.empty()) m.horizon = m.notes.back().t;
  if (m.notes.empty()) throw Error(Errc::EmptyLog, "melody file has no notes");
  return m;
}

}  // namespace marimba
