#include "marimba/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "marimba/arcs.hpp"
#include "marimba/constructions.hpp"
#include "marimba/errors.hpp"
#include "marimba/flow.hpp"
#include "marimba/melody.hpp"
#include "marimba/midi.hpp"
#include "marimba/spectra.hpp"
#include "marimba/teich.hpp"
#include "marimba/version.hpp"

namespace marimba {

namespace {

using nlohmann::json;

struct Output {
  std::ostream& stdout_;
  std::string path;

  // Writes to the file when a path was given, else to standard output.
  void write(const std::string& text, bool binary = false) const {
    if (path.empty() || path == "-") {
      stdout_ << text;
      return;
    }
    std::ofstream f(path, binary ? std::ios::binary : std::ios::out);
    if (!f) throw Error(Errc::Io, "cannot write '" + path + "'");
    f << text;
  }
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(Errc::Io, "cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

// Melody or crossing log, plus the provenance fields of its header.
struct LoadedMelody {
  Melody melody;
  json provenance = json::object();
};

LoadedMelody load_melody(const std::string& path) {
  std::string text = slurp(path);
  std::istringstream in(text);
  LoadedMelody out{read_melody_jsonl(in), json::object()};
  std::istringstream first(text);
  std::string line;
  while (std::getline(first, line) && line.find_first_not_of(" \t\r") == std::string::npos) {}
  try {
    json head = json::parse(line);
    for (const char* key : {"spec_hash", "seed", "version"})
      if (head.contains(key)) out.provenance[key] = head[key];
  } catch (const json::exception&) {
  }
  if (!out.provenance.contains("version")) out.provenance["version"] = kVersion;
  return out;
}

std::map<std::string, int> parse_weights(const std::string& text) {
  std::map<std::string, int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(Errc::Parse, "weight '" + item + "' is not of the form gluing=w");
    try {
      out[item.substr(0, eq)] = std::stoi(item.substr(eq + 1));
    } catch (const std::exception&) {
      throw Error(Errc::Parse, "weight '" + item + "' is not an integer");
    }
  }
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double per_note_total_length(const Melody& m, int chi, json* per_note) {
  double total = 0.0;
  for (const auto& label : m.labels) {
    FrequencyEstimate f = note_frequency(m, label);
    LengthEstimate l = length_from_frequency(f, chi);
    if (per_note)
      (*per_note)[label] = {{"length", l.value}, {"error", l.error}, {"frequency", f.value}, {"count", f.count},
                            {"degenerate", l.degenerate}};
    total += l.value;
  }
  return total;
}

json spectrum_json(const OrthospectrumEstimate& est) {
  json entries = json::array();
  for (const auto& e : est.entries)
    entries.push_back({{"length", e.length}, {"multiplicity", e.multiplicity}, {"confidence", e.confidence}});
  return {{"k", est.k},
          {"entries", entries},
          {"max_abs_residual", est.max_abs_residual},
          {"min_scaled_residual", est.min_scaled_residual}};
}

Melody trace_melody(const Surface& surface, std::uint64_t seed, double length) {
  TraceConfig cfg;
  cfg.max_length = length;
  return melody_from_log(trace(surface, sample_liouville(surface, seed), cfg), surface.labels);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic marimbas: geodesic melodies on pants-glued surfaces", "marimba"};
  app.require_subcommand(1);
  bool json_errors = false;
  std::string out_path;
  app.add_flag("--json-errors", json_errors, "Report errors as JSON on standard error");
  app.set_version_flag("--version", kVersion);

  std::string spec_path, log_path, map_path, melody_path, other_path, gluing;
  std::uint64_t seed = 0;
  double length = 1e6, epsilon = -1.0, alpha = 0.01, threshold = 1e-2, lmax = 5.0, area = -1.0;
  long long crossings = -1;
  long long budget = EnumerateOptions{}.budget;
  int chi = 0, k = 1, entries = 5, n = 2, r = 3, samples = 20;
  std::string weights, cross, cdf_path;
  SymmetricFamilyParams family;

  auto add_out = [&](CLI::App* sub) { sub->add_option("-o,--out", out_path, "Output file (default: stdout)"); };

  auto* build = app.add_subcommand("build", "Validate a spec and summarize the built surface");
  build->add_option("spec", spec_path)->required();

  auto* trace_cmd = app.add_subcommand("trace", "Trace a Liouville-random geodesic and log its crossings (JSONL)");
  trace_cmd->add_option("spec", spec_path)->required();
  trace_cmd->add_option("--seed", seed)->required();
  trace_cmd->add_option("--length", length, "Hyperbolic length to trace");
  trace_cmd->add_option("--crossings", crossings, "Stop after this many crossings");
  add_out(trace_cmd);

  auto* melody_cmd = app.add_subcommand("melody", "Extract the melody (note, time) from a crossing log");
  melody_cmd->add_option("log", log_path)->required();
  add_out(melody_cmd);

  auto* midi_cmd = app.add_subcommand("midi", "Render a melody or log as a Standard MIDI File");
  midi_cmd->add_option("melody", melody_path)->required();
  midi_cmd->add_option("--map", map_path, "Note map JSON: {\"keys\": {label: key}, \"time_scale\": s}")->required();
  midi_cmd->add_option("-o,--out", out_path)->required();

  auto* freq_cmd = app.add_subcommand("freq", "Frequencies of the default motif battery (JSON)");
  freq_cmd->add_option("melody", melody_path)->required();
  freq_cmd->add_option("--epsilon", epsilon, "Motif window (default: from the shortest gap)");
  add_out(freq_cmd);

  auto* lengths_cmd = app.add_subcommand("lengths", "Per-note curve lengths from note frequencies (JSON)");
  lengths_cmd->add_option("melody", melody_path)->required();
  lengths_cmd->add_option("--chi", chi, "Euler characteristic of the surface")->required();
  add_out(lengths_cmd);

  auto* spectrum_cmd = app.add_subcommand("spectrum", "Peel the k-step orthospectrum from gap statistics (JSON)");
  spectrum_cmd->add_option("melody", melody_path)->required();
  spectrum_cmd->add_option("--chi", chi)->required();
  spectrum_cmd->add_option("--k", k);
  spectrum_cmd->add_option("--entries", entries);
  spectrum_cmd->add_option("--cdf", cdf_path, "Also write the empirical gap CDF as CSV");
  add_out(spectrum_cmd);

  auto* classify_cmd = app.add_subcommand("classify", "Separating test for a single-note melody (JSON)");
  classify_cmd->add_option("melody", melody_path)->required();
  classify_cmd->add_option("--threshold", threshold);
  add_out(classify_cmd);

  auto* sides_cmd = app.add_subcommand("sides", "Per-side areas and spectra for a single separating note (JSON)");
  sides_cmd->add_option("melody", melody_path)->required();
  sides_cmd->add_option("--chi", chi)->required();
  sides_cmd->add_option("--area", area, "Total area (default 2*pi*|chi|)");
  sides_cmd->add_option("--entries", entries);
  add_out(sides_cmd);

  auto* construct = app.add_subcommand("construct", "Build isomelodic partners");
  construct->require_subcommand(1);
  auto* half = construct->add_subcommand("half-twist", "Half-twist partner of a symmetric family member");
  half->add_option("spec", spec_path)->required();
  add_out(half);
  auto* cover = construct->add_subcommand("cover", "Cyclic cover with unit monodromy around labelled curves");
  cover->add_option("spec", spec_path)->required();
  cover->add_option("--n", n)->required();
  cover->add_option("--weights", weights, "Monodromy per gluing, e.g. a=1,b=1,c=1 (default: automatic)");
  cover->add_option("--cross", cross, "Sheet shift per gluing crossing, e.g. a=1");
  add_out(cover);
  auto* fam = construct->add_subcommand("family", "Member of the symmetric genus-2 family");
  fam->add_option("--l-alpha", family.l_alpha)->required();
  fam->add_option("--l-beta", family.l_beta)->required();
  fam->add_option("--twist-alpha", family.twist_alpha);
  fam->add_option("--twist-beta", family.twist_beta);
  add_out(fam);

  auto* compare = app.add_subcommand("compare", "Isomelody report for two melodies, or two specs traced in parallel");
  compare->add_option("a", melody_path)->required();
  compare->add_option("b", other_path)->required();
  compare->add_option("--epsilon", epsilon);
  compare->add_option("--alpha", alpha, "Family-wise significance level");
  auto* trace_len = compare->add_option("--trace-length", length, "Treat inputs as specs and trace this long");
  compare->add_option("--seed", seed, "Seed of the first trace (second uses seed+1)");
  add_out(compare);

  auto* oracle = app.add_subcommand("oracle", "Brute-force k-step orthospectrum of a spec (JSON)");
  oracle->add_option("spec", spec_path)->required();
  oracle->add_option("--k", k);
  oracle->add_option("--lmax", lmax);
  oracle->add_option("--budget", budget, "Maximum number of lifted cells to explore");
  add_out(oracle);

  auto* twist = app.add_subcommand("twist-check", "Twist-variety residuals along a one-curve twist family (CSV)");
  twist->add_option("spec", spec_path)->required();
  twist->add_option("--gluing", gluing)->required();
  twist->add_option("--r", r);
  twist->add_option("--lmax", lmax);
  twist->add_option("--samples", samples);
  add_out(twist);

  auto fail = [&](const std::string& code, const std::string& message, int exit_code) {
    if (json_errors) err << json({{"error", code}, {"message", message}, {"exit_code", exit_code}}).dump() << "\n";
    else err << "error: " << code << ": " << message << "\n";
    return exit_code;
  };

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion& e) {
    out << kVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    return fail("Usage", e.what(), 1);
  }

  Output sink{out, out_path};
  try {
    if (build->parsed()) {
      MarimbaSpec spec = read_spec_file(spec_path);
      auto issues = validate_spec(spec);
      if (!issues.empty()) {
        json list = json::array();
        for (const auto& i : issues) list.push_back({{"code", i.code}, {"message", i.message}});
        if (json_errors) err << json({{"error", "Validation"}, {"issues", list}, {"exit_code", 1}}).dump() << "\n";
        else
          for (const auto& i : issues) err << "error: " << i.code << ": " << i.message << "\n";
        return 1;
      }
      Surface s = build_surface(spec);
      json cuffs = json::array();
      for (const auto& c : s.cuffs) cuffs.push_back({{"gluing", c.gluing}, {"label", c.label}, {"length", c.length}});
      double total_area = 0.0;
      for (const auto& c : s.cells) total_area += c.area;
      sink.write(json({{"spec_hash", s.hash},
                       {"version", kVersion},
                       {"chi", s.chi},
                       {"genus", 1 - s.chi / 2},
                       {"cells", s.cells.size()},
                       {"area", total_area},
                       {"labels", s.labels},
                       {"gamma_length", s.gamma_length},
                       {"cuffs", cuffs}})
                     .dump(2) +
                 "\n");
    } else if (trace_cmd->parsed()) {
      Surface s = build_surface(read_spec_file(spec_path));
      TraceConfig cfg;
      cfg.max_length = length;
      if (crossings >= 0) cfg.max_crossings = crossings;
      CrossingLog log = trace(s, sample_liouville(s, seed), cfg);
      std::ostringstream text;
      write_log_jsonl(text, s, log, {s.hash, seed, cfg, s.labels});
      sink.write(text.str());
    } else if (melody_cmd->parsed()) {
      LoadedMelody m = load_melody(log_path);
      std::ostringstream text;
      write_melody_jsonl(text, m.melody, m.provenance.dump());
      sink.write(text.str());
    } else if (midi_cmd->parsed()) {
      LoadedMelody m = load_melody(melody_path);
      NoteMap map = parse_note_map(slurp(map_path));
      auto bytes = export_midi(m.melody, map, m.provenance.dump());
      sink.write(std::string(bytes.begin(), bytes.end()), true);
    } else if (freq_cmd->parsed()) {
      LoadedMelody m = load_melody(melody_path);
      double eps = epsilon >= 0 ? epsilon : grid_step_for(m.melody);
      json rows = json::array();
      for (const auto& motif : default_battery(m.melody, eps)) {
        FrequencyEstimate f = motif_frequency(m.melody, motif);
        rows.push_back({{"labels", motif.labels},
                        {"offsets", motif.offsets},
                        {"epsilon", motif.epsilon},
                        {"frequency", f.value},
                        {"count", f.count},
                        {"std_error", f.std_error}});
      }
      sink.write(json({{"provenance", m.provenance}, {"horizon", m.melody.horizon}, {"motifs", rows}}).dump(2) + "\n");
    } else if (lengths_cmd->parsed()) {
      LoadedMelody m = load_melody(melody_path);
      json per_note = json::object();
      double total = per_note_total_length(m.melody, chi, &per_note);
      sink.write(json({{"provenance", m.provenance}, {"chi", chi}, {"notes", per_note}, {"gamma_length", total}}).dump(2) +
                 "\n");
    } else if (spectrum_cmd->parsed()) {
      LoadedMelody m = load_melody(melody_path);
      double l_gamma = per_note_total_length(m.melody, chi, nullptr);
      EmpiricalCDF cdf = gap_cdf(m.melody, k, {});
      PeelOptions opt;
      opt.max_entries = entries;
      OrthospectrumEstimate est = peel_orthospectrum(cdf, l_gamma, k, opt);
      if (!cdf_path.empty()) {
        std::ostringstream csv;
        csv << "# " << m.provenance.dump() << "\n";
        write_cdf_csv(csv, cdf.grid, cdf.values);
        Output{out, cdf_path}.write(csv.str());
      }
      json j = spectrum_json(est);
      j["provenance"] = m.provenance;
      j["gamma_length"] = l_gamma;
      j["samples"] = cdf.n;
      j["trusted_max"] = cdf.trusted_max;
      sink.write(j.dump(2) + "\n");
    } else if (classify_cmd->parsed()) {
      LoadedMelody m = load_melody(melody_path);
      SeparationReport rep = classify_separating(m.melody, threshold);
      sink.write(json({{"provenance", m.provenance},
                       {"verdict", rep.verdict == SeparationVerdict::Separating ? "separating" : "nonseparating-or-nongeneric"},
                       {"min_even_gap", rep.min_even},
                       {"min_odd_gap", rep.min_odd},
                       {"threshold", threshold}})
                     .dump(2) +
                 "\n");
    } else if (sides_cmd->parsed()) {
      LoadedMelody m = load_melody(melody_path);
      double l_gamma = per_note_total_length(m.melody, chi, nullptr);
      double total_area = area > 0 ? area : 2.0 * kPi * std::abs(chi);
      SidesReport rep = single_note_sides(m.melody, chi, total_area, l_gamma, entries);
      auto side = [](const SideReport& s) {
        return json({{"fraction", s.fraction}, {"area", s.area}, {"gaps", s.gaps.size()}, {"spectrum", spectrum_json(s.spectrum)}});
      };
      sink.write(json({{"provenance", m.provenance}, {"even", side(rep.even)}, {"odd", side(rep.odd)}}).dump(2) + "\n");
    } else if (half->parsed()) {
      sink.write(write_spec(half_twist_partner(read_spec_file(spec_path))));
    } else if (cover->parsed()) {
      MarimbaSpec spec = read_spec_file(spec_path);
      CoverCocycle c = weights.empty() ? default_cocycle(spec, n) : CoverCocycle{n, parse_weights(weights), {}};
      c.n = n;
      c.cross = parse_weights(cross);
      sink.write(write_spec(cyclic_cover(spec, c)));
    } else if (fam->parsed()) {
      sink.write(write_spec(symmetric_family_marimba(family)));
    } else if (compare->parsed()) {
      LoadedMelody a, b;
      if (trace_len->count()) {
        Surface sa = build_surface(read_spec_file(melody_path));
        Surface sb = build_surface(read_spec_file(other_path));
        std::exception_ptr failure;
        std::thread worker([&] {
          try {
            b.melody = trace_melody(sb, seed + 1, length);
          } catch (...) {
            failure = std::current_exception();
          }
        });
        a.melody = trace_melody(sa, seed, length);
        worker.join();
        if (failure) std::rethrow_exception(failure);
        a.provenance = {{"spec_hash", sa.hash}, {"seed", seed}, {"version", kVersion}};
        b.provenance = {{"spec_hash", sb.hash}, {"seed", seed + 1}, {"version", kVersion}};
      } else {
        a = load_melody(melody_path);
        b = load_melody(other_path);
      }
      double eps = epsilon >= 0 ? epsilon : grid_step_for(a.melody);
      IsomelodyReport rep = isomelody_report(a.melody, b.melody, default_battery(a.melody, eps), alpha);
      json rows = json::array();
      for (const auto& row : rep.rows)
        rows.push_back({{"labels", row.motif.labels},
                        {"offsets", row.motif.offsets},
                        {"a", row.a.value},
                        {"b", row.b.value},
                        {"z", row.z}});
      sink.write(json({{"a", a.provenance},
                       {"b", b.provenance},
                       {"verdict", rep.consistent ? "CONSISTENT" : "DISTINGUISHED"},
                       {"threshold", rep.threshold},
                       {"witness", rep.witness},
                       {"rows", rows}})
                     .dump(2) +
                 "\n");
    } else if (oracle->parsed()) {
      Surface s = build_surface(read_spec_file(spec_path));
      json rows = json::array();
      EnumerateOptions opt;
      opt.budget = budget;
      for (const auto& line : orthospectrum_oracle(s, k, lmax, opt))
        rows.push_back({{"length", line.length}, {"multiplicity", line.multiplicity}, {"words", line.words}});
      sink.write(json({{"spec_hash", s.hash}, {"version", kVersion}, {"k", k}, {"lmax", lmax}, {"spectrum", rows}}).dump(2) +
                 "\n");
    } else if (twist->parsed()) {
      MarimbaSpec spec = read_spec_file(spec_path);
      TwistFamily f = make_twist_family(spec, gluing, r, lmax);
      std::ostringstream csv;
      csv << "# spec_hash=" << spec_hash(spec) << " version=" << kVersion << " gluing=" << gluing << "\n";
      csv << "theta";
      for (int i = 0; i < r; ++i) csv << ",length_" << i;
      for (int i = 1; i < r; ++i) csv << ",residual_" << i;
      csv << "\n";
      for (int j = 0; j < samples; ++j) {
        double theta = samples == 1 ? 0.0 : -1.0 + 2.0 * j / (samples - 1);
        csv << fmt(theta);
        for (int i = 0; i < r; ++i) csv << "," << fmt(two_step_length(f, i, theta));
        for (double v : twist_variety_residual(f, family_cosh_lengths(f, theta))) csv << "," << fmt(v);
        csv << "\n";
      }
      sink.write(csv.str());
    }
  } catch (const Error& e) {
    return fail(errc_name(e.code()), e.message(), is_numerical(e.code()) ? 2 : 1);
  } catch (const std::exception& e) {
    return fail("Internal", e.what(), 2);
  }
  return 0;
}

}  // namespace marimba
