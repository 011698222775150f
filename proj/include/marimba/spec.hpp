#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace marimba {

// A pair of pants, or a connected-or-not cyclic cover of one with `sheets`
// sheets and monodromy `along[k]` around cuff k.
struct PantsSpec {
  std::string name;
  int sheets = 1;
  std::array<int, 3> along{0, 0, 0};
};

struct SlotRef {
  std::string pants;
  int cuff = 0;
  int component = 0;
};

struct GluingSpec {
  std::string id;
  SlotRef a;
  SlotRef b;
  double length = 1.0;
  double twist = 0.0;
};

// Global cyclic cover over plain pants: `along` is the monodromy around each
// gluing curve (as seen from its a-slot), `cross` the shift for crossing it.
struct CoverSpec {
  int n = 1;
  std::map<std::string, int> along;
  std::map<std::string, int> cross;
};

struct SymmetricFamilyParams {
  double l_alpha = 1.0;
  double l_beta = 1.0;
  double twist_alpha = 0.0;
  double twist_beta = 0.0;
};

struct MarimbaSpec {
  std::vector<PantsSpec> pants;
  std::vector<GluingSpec> gluings;
  std::map<std::string, std::string> gamma;  // gluing id -> note label
  std::optional<CoverSpec> cover;
  std::optional<SymmetricFamilyParams> family;
};

struct ValidationIssue {
  std::string code;
  std::string message;
};

std::vector<ValidationIssue> validate_spec(const MarimbaSpec& spec);
int euler_characteristic(const MarimbaSpec& spec);

MarimbaSpec parse_spec(const std::string& text);
MarimbaSpec read_spec_file(const std::string& path);
std::string write_spec(const MarimbaSpec& spec);
std::string spec_hash(const MarimbaSpec& spec);

std::string slot_string(const SlotRef& s);
SlotRef parse_slot(const std::string& text);

int positive_mod(long long v, int m);
int gcd_mod(int v, int m);  // gcd(v mod m, m), with gcd(0, m) = m

}  // namespace marimba
