#include <openssl/sha.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numeric>
#include <set>
#include <tuple>
#include <sstream>

#include "marimba/errors.hpp"
#include "marimba/spec.hpp"

namespace marimba {

int positive_mod(long long v, int m) {
  long long r = v % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

int gcd_mod(int v, int m) { return std::gcd(positive_mod(v, m), m); }

std::string slot_string(const SlotRef& s) {
  std::string out = s.pants + ":" + std::to_string(s.cuff);
  if (s.component != 0) out += ":" + std::to_string(s.component);
  return out;
}

SlotRef parse_slot(const std::string& text) {
  SlotRef s;
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(item);
  if (parts.size() < 2 || parts.size() > 3 || parts[0].empty())
    throw Error(Errc::Parse, "bad slot '" + text + "', expected PANTS:CUFF[:COMPONENT]");
  s.pants = parts[0];
  try {
    size_t used = 0;
    s.cuff = std::stoi(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("cuff");
    if (parts.size() == 3) {
      s.component = std::stoi(parts[2], &used);
      if (used != parts[2].size()) throw std::invalid_argument("component");
    }
  } catch (const std::logic_error&) {
    throw Error(Errc::Parse, "bad slot '" + text + "'");
  }
  return s;
}

int euler_characteristic(const MarimbaSpec& spec) {
  int cells = 0;
  for (const auto& p : spec.pants) cells += p.sheets;
  return -cells * (spec.cover ? spec.cover->n : 1);
}

namespace {

struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); }
  void join(int x, int y) { parent[find(x)] = find(y); }
};

}  // namespace

std::vector<ValidationIssue> validate_spec(const MarimbaSpec& spec) {
  std::vector<ValidationIssue> issues;
  auto add = [&](const std::string& code, const std::string& msg) { issues.push_back({code, msg}); };

  std::map<std::string, int> index;
  for (size_t i = 0; i < spec.pants.size(); ++i) {
    const auto& p = spec.pants[i];
    if (p.name.empty()) add("EmptyName", "pants without a name");
    if (!index.emplace(p.name, static_cast<int>(i)).second) add("DuplicateName", "pants '" + p.name + "' declared twice");
    if (p.sheets < 1) {
      add("BadSheets", "pants '" + p.name + "' has sheets < 1");
    } else if (positive_mod(static_cast<long long>(p.along[0]) + p.along[1] + p.along[2], p.sheets) != 0) {
      add("AlongNotClosed", "pants '" + p.name + "' monodromy does not sum to 0 mod sheets");
    }
  }
  if (spec.pants.empty()) add("Empty", "no pants");

  // (pants, cuff, component) -> gluing count
  std::map<std::tuple<int, int, int>, int> used;
  std::map<std::pair<int, int>, double> base_length;
  std::set<std::string> ids;
  bool slots_ok = true;
  auto check_slot = [&](const SlotRef& s, const GluingSpec& g) -> bool {
    auto it = index.find(s.pants);
    if (it == index.end()) {
      add("UnknownPants", "gluing '" + g.id + "' refers to unknown pants '" + s.pants + "'");
      return false;
    }
    const auto& p = spec.pants[it->second];
    if (s.cuff < 0 || s.cuff > 2 || p.sheets < 1) {
      add("SlotOutOfRange", "gluing '" + g.id + "' slot " + slot_string(s) + " out of range");
      return false;
    }
    int comps = gcd_mod(p.along[s.cuff], p.sheets);
    if (s.component < 0 || s.component >= comps) {
      add("SlotOutOfRange", "gluing '" + g.id + "' slot " + slot_string(s) + " has no such component");
      return false;
    }
    if (++used[{it->second, s.cuff, s.component}] > 1)
      add("SlotReused", "slot " + slot_string(s) + " glued more than once");
    if (g.length > 0 && std::isfinite(g.length)) {
      int laps = p.sheets / comps;
      double ell = g.length / laps;
      auto key = std::make_pair(it->second, s.cuff);
      auto [bit, fresh] = base_length.emplace(key, ell);
      if (!fresh && std::abs(bit->second - ell) > 1e-12 * ell)
        add("LengthMismatch", "components of " + s.pants + ":" + std::to_string(s.cuff) + " imply different cuff lengths");
    }
    return true;
  };
  for (const auto& g : spec.gluings) {
    if (!ids.insert(g.id).second) add("DuplicateGluing", "gluing id '" + g.id + "' declared twice");
    if (!(g.length > 0) || !std::isfinite(g.length)) add("NonPositiveLength", "gluing '" + g.id + "' has non-positive length");
    if (!std::isfinite(g.twist)) add("NonFiniteTwist", "gluing '" + g.id + "' has non-finite twist");
    bool ok_a = check_slot(g.a, g);
    bool ok_b = check_slot(g.b, g);
    slots_ok = slots_ok && ok_a && ok_b;
  }
  for (size_t i = 0; i < spec.pants.size(); ++i) {
    const auto& p = spec.pants[i];
    if (p.sheets < 1) continue;
    for (int k = 0; k < 3; ++k)
      for (int c = 0; c < gcd_mod(p.along[k], p.sheets); ++c)
        if (!used.count({static_cast<int>(i), k, c}))
          add("SlotUnglued", "slot " + slot_string({p.name, k, c}) + " is not glued");
  }

  std::set<std::string> labels;
  for (const auto& [gid, label] : spec.gamma) {
    if (!ids.count(gid)) add("UnknownGluing", "gamma refers to unknown gluing '" + gid + "'");
    if (label.empty()) add("EmptyLabel", "gluing '" + gid + "' has an empty note label");
    if (!labels.insert(label).second) add("DuplicateLabel", "note label '" + label + "' used twice");
  }

  bool sheets_ok = true;
  for (const auto& p : spec.pants) sheets_ok = sheets_ok && p.sheets >= 1;
  if (issues.empty() && slots_ok && sheets_ok) {
    // Cell-level connectivity: cells (pants, sheet, mirror).
    std::vector<int> offset(spec.pants.size() + 1, 0);
    for (size_t i = 0; i < spec.pants.size(); ++i) offset[i + 1] = offset[i] + 2 * spec.pants[i].sheets;
    UnionFind uf(offset.back());
    for (size_t i = 0; i < spec.pants.size(); ++i) {
      const auto& p = spec.pants[i];
      int sigma = 0;
      for (int k = 0; k < 3; ++k) {
        if (k > 0) sigma = positive_mod(static_cast<long long>(sigma) - p.along[k], p.sheets);
        for (int j = 0; j < p.sheets; ++j)
          uf.join(offset[i] + 2 * j, offset[i] + 2 * positive_mod(j + sigma, p.sheets) + 1);
      }
    }
    for (const auto& g : spec.gluings)
      uf.join(offset[index[g.a.pants]] + 2 * g.a.component, offset[index[g.b.pants]] + 2 * g.b.component);
    for (int c = 1; c < offset.back(); ++c)
      if (uf.find(c) != uf.find(0)) {
        add("Disconnected", "surface is not connected");
        break;
      }
  }

  if (spec.cover) {
    const auto& cv = *spec.cover;
    if (cv.n < 1) add("CoverInvalid", "cover modulus must be >= 1");
    for (const auto& p : spec.pants)
      if (p.sheets != 1) add("CoverNotSupported", "cover over pants with sheets > 1 is not supported");
    for (const auto* m : {&cv.along, &cv.cross})
      for (const auto& [gid, w] : *m)
        if (!ids.count(gid)) add("UnknownGluing", "cover refers to unknown gluing '" + gid + "'");
    if (cv.n >= 1 && issues.empty()) {
      std::vector<long long> sum(spec.pants.size(), 0);
      for (const auto& g : spec.gluings) {
        auto it = cv.along.find(g.id);
        int w = it == cv.along.end() ? 0 : it->second;
        sum[index[g.a.pants]] += w;
        sum[index[g.b.pants]] -= w;
      }
      for (size_t i = 0; i < spec.pants.size(); ++i)
        if (positive_mod(sum[i], cv.n) != 0)
          add("CocycleNotClosed", "cover weights around pants '" + spec.pants[i].name + "' do not sum to 0 mod n");
      for (const auto& [gid, label] : spec.gamma) {
        auto it = cv.along.find(gid);
        int w = it == cv.along.end() ? 0 : it->second;
        if (std::gcd(positive_mod(w, cv.n), cv.n) != 1)
          add("CocycleOrderViolation", "weight of gamma curve '" + gid + "' is not a unit mod n");
      }
    }
  }
  if (spec.family && (!(spec.family->l_alpha > 0) || !(spec.family->l_beta > 0)))
    add("NonPositiveLength", "family lengths must be positive");
  return issues;
}

namespace {

struct Value {
  enum Kind { Str, Num, IntArray } kind = Num;
  std::string str;
  double num = 0.0;
  std::vector<long long> ints;
};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool in_str = false;
  for (size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_str = !in_str;
    if (line[i] == '#' && !in_str) return line.substr(0, i);
  }
  return line;
}

double parse_number(const std::string& t, int line) {
  std::string clean;
  for (char ch : t)
    if (ch != '_') clean += ch;
  size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(clean, &used);
  } catch (const std::logic_error&) {
    throw Error(Errc::Parse, "line " + std::to_string(line) + ": bad number '" + t + "'");
  }
  if (used != clean.size()) throw Error(Errc::Parse, "line " + std::to_string(line) + ": bad number '" + t + "'");
  return v;
}

Value parse_value(const std::string& raw, int line) {
  std::string t = trim(raw);
  Value v;
  if (t.empty()) throw Error(Errc::Parse, "line " + std::to_string(line) + ": missing value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') throw Error(Errc::Parse, "line " + std::to_string(line) + ": unterminated string");
    v.kind = Value::Str;
    for (size_t i = 1; i + 1 < t.size(); ++i) {
      if (t[i] == '\\' && i + 2 < t.size()) ++i;
      v.str += t[i];
    }
    return v;
  }
  if (t.front() == '[') {
    if (t.back() != ']') throw Error(Errc::Parse, "line " + std::to_string(line) + ": unterminated array");
    v.kind = Value::IntArray;
    std::stringstream ss(t.substr(1, t.size() - 2));
    std::string item;
    while (std::getline(ss, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      double x = parse_number(item, line);
      if (x != std::floor(x)) throw Error(Errc::Parse, "line " + std::to_string(line) + ": array entries must be integers");
      v.ints.push_back(static_cast<long long>(x));
    }
    return v;
  }
  v.kind = Value::Num;
  v.num = parse_number(t, line);
  return v;
}

const std::string& as_str(const Value& v, const std::string& key, int line) {
  if (v.kind != Value::Str) throw Error(Errc::Parse, "line " + std::to_string(line) + ": '" + key + "' must be a string");
  return v.str;
}

double as_num(const Value& v, const std::string& key, int line) {
  if (v.kind != Value::Num) throw Error(Errc::Parse, "line " + std::to_string(line) + ": '" + key + "' must be a number");
  return v.num;
}

int as_int(const Value& v, const std::string& key, int line) {
  double x = as_num(v, key, line);
  if (x != std::floor(x) || std::abs(x) > 1e9) throw Error(Errc::Parse, "line " + std::to_string(line) + ": '" + key + "' must be an integer");
  return static_cast<int>(x);
}

std::string fmt_num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out += '\\';
    out += ch;
  }
  return out + "\"";
}

std::string bare_or_quoted(const std::string& key) {
  for (char ch : key)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-')) return quoted(key);
  return key.empty() ? quoted(key) : key;
}

std::string write_body(const MarimbaSpec& spec) {
  std::ostringstream out;
  for (const auto& p : spec.pants) {
    out << "[[pants]]\nname = " << quoted(p.name) << "\n";
    if (p.sheets != 1 || p.along != std::array<int, 3>{0, 0, 0})
      out << "sheets = " << p.sheets << "\nalong = [" << p.along[0] << ", " << p.along[1] << ", " << p.along[2] << "]\n";
    out << "\n";
  }
  for (const auto& g : spec.gluings) {
    out << "[[gluings]]\nid = " << quoted(g.id) << "\na = " << quoted(slot_string(g.a)) << "\nb = "
        << quoted(slot_string(g.b)) << "\nlength = " << fmt_num(g.length) << "\ntwist = " << fmt_num(g.twist) << "\n\n";
  }
  out << "[gamma]\n";
  for (const auto& [gid, label] : spec.gamma) out << bare_or_quoted(gid) << " = " << quoted(label) << "\n";
  if (spec.cover) {
    out << "\n[cover]\nn = " << spec.cover->n << "\n\n[cover.along]\n";
    for (const auto& [gid, w] : spec.cover->along) out << bare_or_quoted(gid) << " = " << w << "\n";
    out << "\n[cover.cross]\n";
    for (const auto& [gid, w] : spec.cover->cross) out << bare_or_quoted(gid) << " = " << w << "\n";
  }
  if (spec.family) {
    const auto& f = *spec.family;
    out << "\n[family]\nl_alpha = " << fmt_num(f.l_alpha) << "\nl_beta = " << fmt_num(f.l_beta)
        << "\ntwist_alpha = " << fmt_num(f.twist_alpha) << "\ntwist_beta = " << fmt_num(f.twist_beta) << "\n";
  }
  return out.str();
}

}  // namespace

MarimbaSpec parse_spec(const std::string& text) {
  MarimbaSpec spec;
  std::string table;  // "", "pants", "gluings", "gamma", "cover", "cover.along", "cover.cross", "family"
  std::set<std::string> seen_tables;
  std::set<std::string> keys_here;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string t = trim(strip_comment(raw));
    if (t.empty()) continue;
    auto fail = [&](const std::string& msg) { throw Error(Errc::Parse, "line " + std::to_string(line) + ": " + msg); };
    if (t.rfind("[[", 0) == 0) {
      if (t.size() < 4 || t.substr(t.size() - 2) != "]]") fail("bad array-of-tables header");
      table = trim(t.substr(2, t.size() - 4));
      if (table == "pants") spec.pants.emplace_back();
      else if (table == "gluings") spec.gluings.emplace_back();
      else fail("unknown array of tables '" + table + "'");
      keys_here.clear();
      continue;
    }
    if (t.front() == '[') {
      if (t.back() != ']') fail("bad table header");
      table = trim(t.substr(1, t.size() - 2));
      if (!seen_tables.insert(table).second) fail("table [" + table + "] declared twice");
      if (table == "gamma") {
      } else if (table == "cover" || table == "cover.along" || table == "cover.cross") {
        if (!spec.cover) spec.cover = CoverSpec{};
      } else if (table == "family") spec.family = SymmetricFamilyParams{};
      else fail("unknown table [" + table + "]");
      keys_here.clear();
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(t.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) fail("empty key");
    if (!keys_here.insert(key).second) fail("duplicate key '" + key + "'");
    Value v = parse_value(t.substr(eq + 1), line);
    if (table == "pants") {
      auto& p = spec.pants.back();
      if (key == "name") p.name = as_str(v, key, line);
      else if (key == "sheets") p.sheets = as_int(v, key, line);
      else if (key == "along") {
        if (v.kind != Value::IntArray || v.ints.size() != 3) fail("'along' must be an array of 3 integers");
        for (int k = 0; k < 3; ++k) p.along[k] = static_cast<int>(v.ints[k]);
      } else fail("unknown key '" + key + "' in [[pants]]");
    } else if (table == "gluings") {
      auto& g = spec.gluings.back();
      if (key == "id") g.id = as_str(v, key, line);
      else if (key == "a") g.a = parse_slot(as_str(v, key, line));
      else if (key == "b") g.b = parse_slot(as_str(v, key, line));
      else if (key == "length") g.length = as_num(v, key, line);
      else if (key == "twist") g.twist = as_num(v, key, line);
      else fail("unknown key '" + key + "' in [[gluings]]");
    } else if (table == "gamma") {
      spec.gamma[key] = as_str(v, key, line);
    } else if (table == "cover") {
      if (key == "n") spec.cover->n = as_int(v, key, line);
      else fail("unknown key '" + key + "' in [cover]");
    } else if (table == "cover.along") {
      spec.cover->along[key] = as_int(v, key, line);
    } else if (table == "cover.cross") {
      spec.cover->cross[key] = as_int(v, key, line);
    } else if (table == "family") {
      double x = as_num(v, key, line);
      if (key == "l_alpha") spec.family->l_alpha = x;
      else if (key == "l_beta") spec.family->l_beta = x;
      else if (key == "twist_alpha") spec.family->twist_alpha = x;
      else if (key == "twist_beta") spec.family->twist_beta = x;
      else fail("unknown key '" + key + "' in [family]");
    } else {
      fail("key '" + key + "' outside of any table");
    }
  }
  for (const auto& g : spec.gluings)
    if (g.id.empty()) throw Error(Errc::Parse, "gluing without an id");
  return spec;
}

MarimbaSpec read_spec_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(Errc::Io, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_spec(ss.str());
}

std::string write_spec(const MarimbaSpec& spec) {
  std::string header =
      "# marimba surface spec\n"
      "# Cuff origin: x = 0 at the seam foot (corner with seam k) of the lower-indexed\n"
      "# hexagon of the a-slot; cuffs are oriented with the pants interior on the right.\n"
      "# Gluing: a-side position X meets b-side position (twist - X) mod length.\n"
      "# Slots are PANTS:CUFF[:COMPONENT].\n\n";
  return header + write_body(spec);
}

std::string spec_hash(const MarimbaSpec& spec) {
  std::string body = write_body(spec);
  unsigned char digest[SHA256_DIGEST_LENGTH];
  SHA256(reinterpret_cast<const unsigned char*>(body.data()), body.size(), digest);
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned char b : digest) {
    out += hex[b >> 4];
    out += hex[b & 15];
  }
  return out;
}

}  // namespace marimba
