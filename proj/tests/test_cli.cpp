#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "json.hpp"
#include "marimba/cli.hpp"
#include "marimba/errors.hpp"
#include "marimba/midi.hpp"
#include "marimba/spec.hpp"
#include "marimba/version.hpp"

using namespace marimba;
using nlohmann::json;
using Catch::Approx;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("marimba_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(dir / name) << text;
    return path(name);
  }
};

Melody small_melody() {
  Melody m;
  m.labels = {"A", "B"};
  m.notes = {{0, 0.25}, {1, 1.0}, {0, 1.0}, {1, 2.71828}};
  m.horizon = 3.0;
  return m;
}

}  // namespace

TEST_CASE("build, trace, melody, and analysis commands", "[cli]") {
  Workspace ws;
  std::string spec = ws.write("theta.toml", write_spec(testing::theta_spec()));
  std::string hash = spec_hash(testing::theta_spec());

  Run build = cli({"build", spec});
  REQUIRE(build.code == 0);
  json summary = json::parse(build.out);
  REQUIRE(summary["chi"] == -2);
  REQUIRE(summary["spec_hash"] == hash);
  REQUIRE(summary["area"].get<double>() == Approx(4 * 3.14159265358979).epsilon(1e-9));

  std::string log = ws.path("trace.jsonl");
  REQUIRE(cli({"trace", spec, "--seed", "5", "--length", "2e5", "-o", log}).code == 0);
  std::string first = read_file(log);
  REQUIRE(cli({"trace", spec, "--seed", "5", "--length", "2e5", "-o", log}).code == 0);
  REQUIRE(read_file(log) == first);
  json head = json::parse(first.substr(0, first.find('\n')));
  REQUIRE(head["spec_hash"] == hash);
  REQUIRE(head["seed"] == 5);
  REQUIRE(head["version"] == kVersion);

  std::string melody = ws.path("melody.jsonl");
  REQUIRE(cli({"melody", log, "-o", melody}).code == 0);
  json mhead = json::parse(read_file(melody).substr(0, read_file(melody).find('\n')));
  REQUIRE(mhead.dump().find(hash) != std::string::npos);

  Run lengths = cli({"lengths", melody, "--chi", "-2"});
  REQUIRE(lengths.code == 0);
  json lj = json::parse(lengths.out);
  REQUIRE(lj["notes"]["B"]["length"].get<double>() == Approx(1.0).epsilon(0.05));
  REQUIRE(lj["provenance"]["spec_hash"] == hash);

  Run freq = cli({"freq", melody});
  REQUIRE(freq.code == 0);
  REQUIRE(json::parse(freq.out)["motifs"].size() == 3 + 81);

  Run spectrum = cli({"spectrum", melody, "--chi", "-2", "--k", "1", "--entries", "2", "--cdf", ws.path("cdf.csv")});
  REQUIRE(spectrum.code == 0);
  json sj = json::parse(spectrum.out);
  REQUIRE(sj["entries"].size() >= 1);
  REQUIRE(sj["entries"][0]["length"].get<double>() == Approx(2.599).epsilon(0.03));
  REQUIRE(read_file(ws.path("cdf.csv")).find(hash) != std::string::npos);

  Run compare = cli({"compare", melody, melody});
  REQUIRE(compare.code == 0);
  REQUIRE(json::parse(compare.out)["verdict"] == "CONSISTENT");

  REQUIRE(cli({"classify", melody}).code == 1);  // several notes
}

TEST_CASE("single-note commands", "[cli]") {
  Workspace ws;
  std::string spec = ws.write("sep.toml", write_spec(testing::single_note_spec(true)));
  std::string log = ws.path("sep.jsonl");
  REQUIRE(cli({"trace", spec, "--seed", "9", "--length", "1e5", "-o", log}).code == 0);
  Run classify = cli({"classify", log});
  REQUIRE(classify.code == 0);
  REQUIRE(json::parse(classify.out)["verdict"] == "separating");
  Run sides = cli({"sides", log, "--chi", "-2", "--entries", "1"});
  REQUIRE(sides.code == 0);
  json sj = json::parse(sides.out);
  REQUIRE(sj["even"]["fraction"].get<double>() + sj["odd"]["fraction"].get<double>() == Approx(1.0));
}

TEST_CASE("construct, oracle, and twist-check commands", "[cli]") {
  Workspace ws;
  Run fam = cli({"construct", "family", "--l-alpha", "1.125", "--l-beta", "0.875", "--twist-alpha", "0.3125"});
  REQUIRE(fam.code == 0);
  std::string x = ws.write("x.toml", fam.out);
  Run half = cli({"construct", "half-twist", x});
  REQUIRE(half.code == 0);
  REQUIRE(parse_spec(half.out).family->twist_alpha == 0.3125 + 0.5625);
  REQUIRE(cli({"construct", "half-twist", ws.write("t.toml", write_spec(testing::theta_spec()))}).code == 1);

  std::string base = ws.write("base.toml", write_spec(testing::theta_spec(0.8, 1.0, 1.3, false)));
  Run cover = cli({"construct", "cover", base, "--n", "3"});
  REQUIRE(cover.code == 0);
  std::string covered = ws.write("cover.toml", cover.out);
  REQUIRE(json::parse(cli({"build", covered}).out)["chi"] == -6);

  Run oracle = cli({"oracle", base, "--k", "1", "--lmax", "3.2"});
  REQUIRE(oracle.code == 0);
  json oj = json::parse(oracle.out);
  REQUIRE(oj["spectrum"].size() >= 1);
  REQUIRE(oj["spectrum"][0]["multiplicity"].get<int>() % 2 == 0);

  Run twist = cli({"twist-check", ws.write("theta.toml", write_spec(testing::theta_spec())), "--gluing", "b", "--r", "3",
                   "--lmax", "7", "--samples", "5"});
  REQUIRE(twist.code == 0);
  std::istringstream csv(twist.out);
  std::string line;
  int rows = 0;
  while (std::getline(csv, line))
    if (!line.empty() && line[0] != '#' && line.rfind("theta", 0) != 0) ++rows;
  REQUIRE(rows == 5);
}

TEST_CASE("exit codes and JSON errors", "[cli]") {
  Workspace ws;
  REQUIRE(cli({}).code == 1);
  REQUIRE(cli({"nonsense"}).code == 1);
  std::string spec = ws.write("theta.toml", write_spec(testing::theta_spec()));
  REQUIRE(cli({"trace", spec, "--length", "10"}).code == 1);  // --seed is mandatory
  MarimbaSpec bad = testing::theta_spec();
  bad.gluings[0].length = -1;
  Run invalid = cli({"--json-errors", "build", ws.write("bad.toml", write_spec(bad))});
  REQUIRE(invalid.code == 1);
  REQUIRE(json::parse(invalid.err)["error"] == "Validation");
  Run missing = cli({"--json-errors", "build", ws.path("missing.toml")});
  REQUIRE(missing.code == 1);
  REQUIRE(json::parse(missing.err).contains("message"));
  // Enumeration that exhausts its budget is a numerical failure.
  Run budget = cli({"--json-errors", "oracle", spec, "--k", "3", "--lmax", "40", "--budget", "20000"});
  REQUIRE(budget.code == 2);
  REQUIRE(json::parse(budget.err)["error"] == "BudgetExceeded");
  REQUIRE(cli({"--version"}).out.find(kVersion) != std::string::npos);
}

TEST_CASE("MIDI export", "[cli][midi]") {
  NoteMap map = parse_note_map(R"({"keys": {"A": 60, "B": 64}, "time_scale": 0.5})");
  REQUIRE(map.keys.at("B") == 64);
  REQUIRE_THROWS_AS(parse_note_map(R"({"keys": {"A": 200}})"), Error);
  REQUIRE_THROWS_AS(parse_note_map(R"({"keys": {"A": 60}, "time_scale": 0})"), Error);

  Melody m = small_melody();
  auto bytes = export_midi(m, map, "hash");
  REQUIRE(std::string(bytes.begin(), bytes.begin() + 4) == "MThd");
  REQUIRE(bytes == export_midi(m, map, "hash"));
  auto events = parse_midi(bytes);
  std::vector<MidiEvent> ons;
  for (const auto& e : events)
    if (e.on) ons.push_back(e);
  REQUIRE(ons.size() == m.notes.size());
  for (size_t i = 0; i < ons.size(); ++i) {
    REQUIRE(ons[i].tick == std::llround(m.notes[i].t * map.time_scale * kTicksPerSecond));
    REQUIRE(ons[i].key == map.keys.at(m.labels[m.notes[i].label]));
    if (i) REQUIRE(ons[i].tick >= ons[i - 1].tick);
  }

  Melody empty;
  empty.labels = {"A"};
  auto blank = export_midi(empty, map);
  REQUIRE(parse_midi(blank).empty());
  // Header chunk plus a track with tempo and end-of-track only.
  REQUIRE(blank.size() == 14 + 8 + 7 + 4);

  NoteMap partial = parse_note_map(R"({"keys": {"A": 60}})");
  REQUIRE_THROWS_AS(export_midi(m, partial), Error);
}

TEST_CASE("midi command writes a file with provenance", "[cli][midi]") {
  Workspace ws;
  std::string spec = ws.write("theta.toml", write_spec(testing::theta_spec()));
  std::string log = ws.path("t.jsonl");
  REQUIRE(cli({"trace", spec, "--seed", "2", "--length", "200", "-o", log}).code == 0);
  std::string map = ws.write("map.json", R"({"keys": {"A": 60, "B": 64, "C": 67}})");
  REQUIRE(cli({"midi", log, "--map", map, "-o", ws.path("out.mid")}).code == 0);
  std::string bytes = read_file(ws.path("out.mid"));
  REQUIRE(bytes.find(spec_hash(testing::theta_spec())) != std::string::npos);
  std::string partial = ws.write("partial.json", R"({"keys": {"A": 60}})");
  REQUIRE(cli({"midi", log, "--map", partial, "-o", ws.path("bad.mid")}).code == 1);
}

TEST_CASE("installed binary honours the exit-code contract", "[cli]") {
  const char* exe = std::getenv("MARIMBA_CLI");
  if (!exe) SKIP("MARIMBA_CLI not set");
  Workspace ws;
  std::string spec = ws.write("theta.toml", write_spec(testing::theta_spec()));
  std::string cmd = std::string(exe) + " build " + spec + " > " + ws.path("o.json");
  REQUIRE(std::system(cmd.c_str()) == 0);
  REQUIRE(json::parse(read_file(ws.path("o.json")))["chi"] == -2);
  int status = std::system((std::string(exe) + " build " + ws.path("none.toml") + " 2> /dev/null").c_str());
  REQUIRE(WEXITSTATUS(status) == 1);
}
