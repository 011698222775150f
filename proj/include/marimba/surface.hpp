#pragma once

#include <array>
#include <string>
#include <vector>

#include "marimba/hyp2.hpp"
#include "marimba/spec.hpp"

namespace marimba {

// Vertices are counterclockwise; side i joins vertex i to vertex i+1.
// Sides 0, 2, 4 are halves of cuffs 0, 1, 2; side 2k+1 is the seam between
// cuff k and cuff k+1.
struct RightHexagon {
  std::array<double, 6> sides{};
  std::array<PointH2, 6> vertices{};
  double closure_error = 0.0;
};

RightHexagon pants_hexagon(double l0, double l1, double l2);
double seam_length(double l_opposite, double l_left, double l_right);
// Area from the interior angles of a geodesic hexagon.
double hexagon_area(const std::array<PointH2, 6>& vertices);

struct Portal {
  double s_lo = 0.0;
  double s_hi = 0.0;
  int target_cell = -1;
  int target_side = -1;
  Isometry2 g;  // source chart to target chart
};

enum class SideKind { Seam, Cuff };

struct CellSide {
  GeodesicH2 line;  // start -> end, cell interior on the right
  PointH2 start;
  PointH2 end;
  double length = 0.0;
  Isometry2 start_frame;  // upward vector at i sent to the start, along the side
  SideKind kind = SideKind::Seam;
  int cuff = -1;          // cuff table index for cuff sides
  bool a_side = false;
  double offset = 0.0;    // own-slot cuff coordinate of the start point
  std::vector<Portal> portals;
};

struct Cell {
  int piece = 0;
  int sheet = 0;
  bool mirror = false;
  std::array<PointH2, 6> vertices{};
  std::array<CellSide, 6> sides{};
  double area = 0.0;
  double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
};

struct CuffInfo {
  std::string gluing;
  std::string label;  // empty unless part of the labelled multicurve
  double length = 0.0;
  double twist = 0.0;
  int a_piece = 0, a_cuff = 0, a_component = 0;
};

// Monodromy data of a piece as actually realized (covers included).
struct PieceLayout {
  int sheets = 1;
  std::array<int, 3> along{0, 0, 0};
  std::array<int, 3> sigma{0, 0, 0};  // seam k joins H^j to Hbar^{j+sigma[k]}
  std::array<double, 3> ell{0, 0, 0};  // base cuff lengths
  RightHexagon hexagon;
};

struct SidePoint {
  int cell;
  int side;
  double s;
};

struct Surface {
  MarimbaSpec spec;
  std::string hash;
  int chi = 0;
  int cover_n = 1;
  int base_cells = 0;
  std::vector<Cell> cells;
  std::vector<CuffInfo> cuffs;
  std::vector<PieceLayout> pieces;
  std::vector<std::string> labels;  // sorted note labels
  double gamma_length = 0.0;

  int cell_index(int piece, int sheet, bool mirror) const;
  // Cell side and parameter at a-slot coordinate x of a cuff.
  SidePoint locate(int cuff, double x) const;
  int cuff_for_label(const std::string& label) const;
};

Surface build_surface(const MarimbaSpec& spec);

// Point on a cell side at parameter s from its start.
PointH2 side_point(const CellSide& side, double s);
const Portal& portal_at(const CellSide& side, double s);
bool inside_cell(const Cell& cell, PointH2 z, double tol = 0.0);

}  // namespace marimba
