#include "marimba/flow.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

#include "json.hpp"
#include "marimba/errors.hpp"
#include "marimba/rng.hpp"
#include "marimba/version.hpp"

namespace marimba {

InteriorState sample_liouville(const Surface& surface, std::uint64_t seed) {
  Rng rng(seed, 0);
  int cell = static_cast<int>(rng.below(surface.cells.size()));
  const Cell& c = surface.cells[cell];
  double inv_lo = 1.0 / c.ymax, inv_hi = 1.0 / c.ymin;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    double x = c.xmin + (c.xmax - c.xmin) * rng.uniform();
    double y = 1.0 / (inv_lo + (inv_hi - inv_lo) * rng.uniform());
    if (inside_cell(c, {x, y})) return {cell, {{x, y}, kTwoPi * rng.uniform()}};
  }
  throw Error(Errc::RejectionBudgetExceeded, "no interior point accepted in cell " + std::to_string(cell));
}

CrossSectionState sample_cross_section(const Surface& surface, std::uint64_t seed) {
  if (surface.gamma_length <= 0) throw Error(Errc::Validation, "surface has no labelled cuffs");
  Rng rng(seed, 1);
  double pick = rng.uniform() * surface.gamma_length;
  int cuff = -1;
  for (size_t i = 0; i < surface.cuffs.size(); ++i) {
    if (surface.cuffs[i].label.empty()) continue;
    cuff = static_cast<int>(i);
    if (pick < surface.cuffs[i].length) break;
    pick -= surface.cuffs[i].length;
  }
  double x = rng.uniform() * surface.cuffs[cuff].length;
  double theta = std::acos(1.0 - 2.0 * rng.uniform());
  if (rng.uniform() < 0.5) theta += kPi;
  return {cuff, x, theta};
}

CrossSectionState reverse(const CrossSectionState& s) { return {s.cuff, s.x, wrap_angle(s.theta + kPi)}; }

namespace {

struct Cursor {
  int cell;
  int entry;
  Isometry2 f;
};

Cursor cursor_of(const Surface& surface, const CrossSectionState& s, double tol) {
  if (s.cuff < 0 || s.cuff >= static_cast<int>(surface.cuffs.size()))
    throw Error(Errc::OutOfRange, "no such cuff");
  if (surface.cuffs[s.cuff].label.empty()) throw Error(Errc::Validation, "cuff is not labelled");
  if (!(s.x >= 0.0 && s.x < surface.cuffs[s.cuff].length)) throw Error(Errc::OutOfRange, "cuff position out of range");
  if (std::abs(std::sin(s.theta)) < tol) throw Error(Errc::TangencyStall, "start vector is tangent to the cuff");
  SidePoint sp = surface.locate(s.cuff, s.x);
  const CellSide& side = surface.cells[sp.cell].sides[sp.side];
  Isometry2 f = side.start_frame * translation(sp.s) * rotation(s.theta);
  if (std::sin(s.theta) < 0) return {sp.cell, sp.side, f};
  const Portal& p = portal_at(side, sp.s);
  return {p.target_cell, p.target_side, renormalize(p.g * f)};
}

}  // namespace

InteriorState interior_of(const Surface& surface, const CrossSectionState& s) {
  Cursor c = cursor_of(surface, s, kPolicy.tangency_tol);
  return {c.cell, tangent_of_frame(c.f)};
}

CrossingLog trace(const Surface& surface, const TraceStart& start, const TraceConfig& cfg) {
  if (!(cfg.max_length > 0) || cfg.max_crossings <= 0 || cfg.renorm_period < 1)
    throw Error(Errc::Validation, "trace bounds must be positive");
  CrossingLog log;
  log.start = start;
  Cursor cur;
  if (const auto* in = std::get_if<InteriorState>(&start)) {
    if (in->cell < 0 || in->cell >= static_cast<int>(surface.cells.size())) throw Error(Errc::OutOfRange, "no such cell");
    cur = {in->cell, -1, frame(in->v)};
  } else {
    cur = cursor_of(surface, std::get<CrossSectionState>(start), cfg.tangency_tol);
  }
  std::vector<int> note_of(surface.cuffs.size(), -1);
  for (size_t i = 0; i < surface.cuffs.size(); ++i)
    for (size_t l = 0; l < surface.labels.size(); ++l)
      if (surface.cuffs[i].label == surface.labels[l]) note_of[i] = static_cast<int>(l);

  double time = 0.0, comp = 0.0;  // compensated sum
  TraceDiagnostics& diag = log.diag;
  int since_renorm = 0;
  while (true) {
    const Cell& cell = surface.cells[cur.cell];
    const Isometry2& f = cur.f;
    double best = INFINITY, bu1 = 0, bu2 = 0;
    int exit = -1;
    for (int s = 0; s < 6; ++s) {
      if (s == cur.entry) continue;
      const GeodesicH2& line = cell.sides[s].line;
      double u1, u2;
      if (line.a.inf) {
        if (f.c == 0.0) continue;
        u1 = -f.d / f.c;
      } else {
        u1 = (f.d * line.a.x - f.b) / (f.a - f.c * line.a.x);
      }
      if (line.b.inf) {
        if (f.c == 0.0) continue;
        u2 = -f.d / f.c;
      } else {
        u2 = (f.d * line.b.x - f.b) / (f.a - f.c * line.b.x);
      }
      double h2 = -u1 * u2;
      if (h2 > 1.0 && h2 < best) best = h2, exit = s, bu1 = u1, bu2 = u2;
    }
    if (exit < 0) throw Error(Errc::GeometryFailure, "ray left cell " + std::to_string(cur.cell) + " through no side");
    double step = 0.5 * std::log(best);
    if (time + step >= cfg.max_length) {
      double rest = cfg.max_length - time;
      log.end = {cur.cell, tangent_of_frame(f * translation(rest))};
      log.total_length = cfg.max_length;
      return log;
    }
    double h = std::sqrt(best);
    double sine = 2.0 * h / std::abs(bu2 - bu1);
    if (sine < diag.min_sin) diag.min_sin = sine;
    if (sine < cfg.tangency_tol)
      throw Error(Errc::TangencyStall, "near-tangent crossing at time " + std::to_string(time));
    const CellSide& side = cell.sides[exit];
    Isometry2 lift = f * Isometry2{std::sqrt(h), 0.0, 0.0, 1.0 / std::sqrt(h)};
    const Portal* portal = &side.portals.front();
    double s_param = 0.0;
    PointH2 hit{};
    bool labelled = side.kind == SideKind::Cuff && note_of[side.cuff] >= 0;
    if (side.portals.size() > 1 || labelled) {
      hit = apply(f, PointH2{0.0, h});
      s_param = dist(side.start, hit);
      portal = &portal_at(side, s_param);
    }
    double y = step - comp;
    double next = time + y;
    comp = (next - time) - y;
    time = next;
    ++diag.steps;
    if (labelled) {
      double sg = bu2 > bu1 ? 1.0 : -1.0;
      double theta = wrap_angle(std::atan2(sg * h, sg * 0.5 * (bu1 + bu2)));
      double x;
      if (side.a_side) {
        x = side.offset + s_param;
      } else {
        const CellSide& other = surface.cells[portal->target_cell].sides[portal->target_side];
        x = other.offset + dist(other.start, apply(portal->g, hit));
        theta = wrap_angle(theta + kPi);
      }
      double len = surface.cuffs[side.cuff].length;
      if (x >= len) x -= len;
      if (x < 0) x += len;
      log.entries.push_back({time, side.cuff, note_of[side.cuff], x, theta});
    }
    Isometry2 nf = portal->g * lift;
    double dev = std::abs(nf.det() - 1.0);
    if (dev > diag.max_det_dev) diag.max_det_dev = dev;
    if (++since_renorm >= cfg.renorm_period) {
      nf = renormalize(nf);
      since_renorm = 0;
      ++diag.renorm_count;
    } else if (dev > 0.5) {
      throw Error(Errc::Degenerate, "isometry determinant drifted by " + std::to_string(dev));
    }
    cur = {portal->target_cell, portal->target_side, nf};
    if (labelled && static_cast<std::int64_t>(log.entries.size()) >= cfg.max_crossings) {
      log.end = {cur.cell, tangent_of_frame(cur.f)};
      log.total_length = time;
      return log;
    }
  }
}

Return first_return(const Surface& surface, const CrossSectionState& s) {
  TraceConfig cfg;
  cfg.max_crossings = 1;
  cfg.max_length = 1e6;
  CrossingLog log = trace(surface, s, cfg);
  if (log.entries.empty()) throw Error(Errc::BudgetExceeded, "no return within length 1e6");
  const Crossing& c = log.entries.front();
  return {{c.cuff, c.x, c.theta}, c.t};
}

std::vector<PathStep> develop_path(const Surface& surface, int cell, int entry_side, Isometry2 f, double max_length) {
  std::vector<PathStep> out;
  double time = 0.0;
  while (true) {
    const Cell& c = surface.cells[cell];
    Isometry2 fi = inverse(f);
    double best = INFINITY;
    int exit = -1;
    for (int s = 0; s < 6; ++s) {
      if (s == entry_side) continue;
      Ideal u1 = apply(fi, c.sides[s].line.a), u2 = apply(fi, c.sides[s].line.b);
      if (u1.inf || u2.inf) continue;
      double h2 = -u1.x * u2.x;
      if (h2 > 1.0 && h2 < best) best = h2, exit = s;
    }
    if (exit < 0) throw Error(Errc::GeometryFailure, "path left a cell through no side");
    double h = std::sqrt(best);
    time += std::log(h);
    if (time > max_length) return out;
    const CellSide& side = c.sides[exit];
    double s_param = dist(side.start, apply(f, PointH2{0.0, h}));
    const Portal& p = portal_at(side, s_param);
    out.push_back({cell, exit, static_cast<int>(&p - side.portals.data()), time});
    f = renormalize(p.g * f * Isometry2{std::sqrt(h), 0.0, 0.0, 1.0 / std::sqrt(h)});
    cell = p.target_cell;
    entry_side = p.target_side;
  }
}

void write_log_jsonl(std::ostream& out, const Surface& surface, const CrossingLog& log, const LogHeader& header) {
  using nlohmann::json;
  json head;
  head["spec_hash"] = header.spec_hash;
  head["seed"] = header.seed;
  head["version"] = kVersion;
  head["config"] = {{"max_length", std::isfinite(header.config.max_length) ? json(header.config.max_length) : json(nullptr)},
                    {"max_crossings", header.config.max_crossings},
                    {"tangency_tol", header.config.tangency_tol},
                    {"renorm_period", header.config.renorm_period}};
  head["labels"] = surface.labels;
  head["total_length"] = log.total_length;
  head["steps"] = log.diag.steps;
  head["max_det_dev"] = log.diag.max_det_dev;
  head["min_sin"] = log.diag.min_sin;
  out << head.dump() << "\n";
  char buf[256];
  for (size_t i = 0; i < log.entries.size(); ++i) {
    const Crossing& c = log.entries[i];
    json note = surface.labels[c.note];
    std::snprintf(buf, sizeof buf, "{\"i\":%zu,\"note\":%s,\"t\":%.17g,\"x\":%.17g,\"theta\":%.17g}\n", i,
                  note.dump().c_str(), c.t, c.x, c.theta);
    out << buf;
  }
}

}  // namespace marimba
