#include "marimba/spectra.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "marimba/errors.hpp"

namespace marimba {

std::vector<double> uniform_grid(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw Error(Errc::Validation, "grid needs at least two points on a nonempty range");
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

std::vector<double> default_grid(double first) { return uniform_grid(0.0, 3.0 * first + 5.0, 10000); }

std::vector<double> k_step_gaps(const Melody& m, int k) {
  if (k < 1) throw Error(Errc::OutOfRange, "step count must be >= 1");
  if (static_cast<long long>(m.notes.size()) <= k) throw Error(Errc::TooFewNotes, "melody needs more than k notes");
  std::vector<double> gaps(m.notes.size() - k);
  for (size_t i = 0; i + k < m.notes.size(); ++i) gaps[i] = m.notes[i + k].t - m.notes[i].t;
  return gaps;
}

EmpiricalCDF cdf_from_samples(std::vector<double> samples, const std::vector<double>& grid) {
  if (samples.empty()) throw Error(Errc::TooFewNotes, "no samples");
  std::sort(samples.begin(), samples.end());
  EmpiricalCDF cdf;
  cdf.grid = grid;
  cdf.n = static_cast<long long>(samples.size());
  cdf.values.resize(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) {
    auto it = std::upper_bound(samples.begin(), samples.end(), grid[i]);
    cdf.values[i] = static_cast<double>(it - samples.begin()) / cdf.n;
  }
  cdf.trusted_max = samples[std::min(samples.size() - 1, static_cast<size_t>(0.9 * samples.size()))];
  cdf.min_gap = samples.front();
  return cdf;
}

EmpiricalCDF gap_cdf(const Melody& m, int k, const std::vector<double>& grid) {
  auto gaps = k_step_gaps(m, k);
  if (grid.empty()) return cdf_from_samples(gaps, default_grid(*std::min_element(gaps.begin(), gaps.end())));
  return cdf_from_samples(std::move(gaps), grid);
}

namespace {

// Integral over u in [0, pi/2] after x = X sin u of the angular mass at x.
struct ArcIntegrand {
  double l, T, X, sl, cl, st;
  double operator()(double u) const {
    double x = X * std::sin(u);
    double c = std::cos(u);
    double gap = X * c * c / (1.0 + std::sin(u));  // X - x
    double rad = std::sinh(gap) * std::sinh(X + x);  // sinh^2 X - sinh^2 x
    if (rad <= 0) return 0.0;
    double sx = std::sinh(x);
    double rho2 = cl * cl + sx * sx * sl * sl;
    return 2.0 * cl * sl * std::sqrt(rad) / (rho2 * st) * X * c;
  }
};

double integrate(const ArcIntegrand& f, Quadrature scheme, int panels) {
  double total = 0.0;
  double width = 0.5 * kPi / panels;
  for (int p = 0; p < panels; ++p) {
    double a = p * width;
    if (scheme == Quadrature::Midpoint) {
      total += f(a + 0.5 * width) * width;
    } else {
      total += boost::math::quadrature::gauss<double, 20>::integrate(f, a, a + width);
    }
  }
  return total;
}

}  // namespace

double arc_cdf_value(double l_gamma, double l_arc, double T, Quadrature scheme, int resolution) {
  if (!(l_gamma > 0) || !(l_arc > 0)) throw Error(Errc::NonPositiveLength, "lengths must be positive");
  if (T <= l_arc) return 0.0;
  double sl = std::sinh(l_arc);
  double X = std::asinh(std::sqrt(std::sinh(T - l_arc) * std::sinh(T + l_arc)) / sl);
  ArcIntegrand f{l_arc, T, X, sl, std::cosh(l_arc), std::sinh(T)};
  double scale = 1.0 / (2.0 * l_gamma);
  if (resolution > 0) return scale * integrate(f, scheme, resolution);
  int panels = scheme == Quadrature::Midpoint ? 256 : 2;
  double prev = integrate(f, scheme, panels);
  for (int round = 0; round < 12; ++round) {
    panels *= 2;
    double cur = integrate(f, scheme, panels);
    if (std::abs(cur - prev) <= 1e-10) return scale * cur;
    prev = cur;
  }
  throw Error(Errc::QuadratureNotConverged, "arc model quadrature did not settle at T = " + std::to_string(T));
}

ArcCDFModel arc_cdf_model(double l_gamma, double l_arc, const std::vector<double>& grid, Quadrature scheme) {
  ArcCDFModel model;
  model.l_gamma = l_gamma;
  model.l_arc = l_arc;
  model.grid = grid;
  model.values.reserve(grid.size());
  for (double T : grid) model.values.push_back(arc_cdf_value(l_gamma, l_arc, T, scheme));
  model.resolution = scheme == Quadrature::Midpoint ? 256 : 2;
  return model;
}

void write_cdf_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<double>& values) {
  out << "T,value\n";
  char buf[64];
  for (size_t i = 0; i < grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", grid[i], values[i]);
    out << buf;
  }
}

namespace {

double noise_at(double phi, long long n) {
  double v = std::max(phi * (1.0 - phi), 0.0) / static_cast<double>(n);
  return std::max(std::sqrt(v), 1.0 / static_cast<double>(n));
}

struct OnsetFit {
  double length;
  double amplitude;
};

// Least-squares onset of one arc model on residual[lo..hi]; the amplitude is
// fitted in closed form unless fixed_amplitude is positive.
OnsetFit fit_onset(const std::vector<double>& grid, const std::vector<double>& residual, size_t lo, size_t hi,
                   double l_min, double l_max, double l_gamma, double fixed_amplitude = 0.0) {
  // Wide windows are subsampled; the model is smooth on the grid scale.
  const size_t stride = std::max<size_t>(1, (hi - lo) / 256);
  auto score = [&](double l, double* amp) {
    double rm = 0, mm = 0;
    std::vector<double> m(hi - lo + 1);
    for (size_t j = lo; j <= hi; j += stride) {
      m[j - lo] = arc_cdf_value(l_gamma, l, grid[j], Quadrature::GaussLegendre);
      rm += residual[j] * m[j - lo];
      mm += m[j - lo] * m[j - lo];
    }
    double a = fixed_amplitude > 0 ? fixed_amplitude : mm > 0 ? rm / mm : 0.0;
    double sse = 0;
    for (size_t j = lo; j <= hi; j += stride) {
      double e = residual[j] - a * m[j - lo];
      sse += e * e;
    }
    if (amp) *amp = a;
    return sse;
  };
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = std::max(l_min, 1e-9), b = l_max;
  double c = b - ratio * (b - a), d = a + ratio * (b - a);
  double fc = score(c, nullptr), fd = score(d, nullptr);
  for (int it = 0; it < 60 && b - a > 1e-12 * b; ++it) {
    if (fc < fd) {
      b = d, d = c, fd = fc;
      c = b - ratio * (b - a);
      fc = score(c, nullptr);
    } else {
      a = c, c = d, fc = fd;
      d = a + ratio * (b - a);
      fd = score(d, nullptr);
    }
  }
  OnsetFit out;
  out.length = 0.5 * (a + b);
  score(out.length, &out.amplitude);
  return out;
}

}  // namespace

OrthospectrumEstimate peel_orthospectrum(const EmpiricalCDF& cdf, double l_gamma, int k, const PeelOptions& opt) {
  if (cdf.grid.size() < 3 || cdf.grid.size() != cdf.values.size()) throw Error(Errc::Validation, "malformed cdf");
  if (!(l_gamma > 0)) throw Error(Errc::NonPositiveLength, "labelled length must be positive");
  OrthospectrumEstimate est;
  est.k = k;
  const auto& grid = cdf.grid;
  std::vector<double> residual = cdf.values;
  double window = opt.trusted_max > 0 ? opt.trusted_max : cdf.trusted_max;
  size_t end = 0;
  while (end + 1 < grid.size() && grid[end + 1] <= window) ++end;
  std::vector<double> noise(grid.size());
  for (size_t i = 0; i < grid.size(); ++i) noise[i] = noise_at(cdf.values[i], cdf.n);
  double step = grid[1] - grid[0];

  // A fit pinned at its detection point leaves that point uncleared; later
  // rounds then scan past it so every round makes progress.
  size_t scan_from = 1;
  for (int round = 0; round < 4 * opt.max_entries && static_cast<int>(est.entries.size()) < opt.max_entries;
       ++round) {
    size_t hit = 0;
    bool found = false;
    for (size_t i = scan_from; i <= end; ++i)
      if (residual[i] > opt.detect_threshold * noise[i] && residual[i] > 1e-12) {
        hit = i, found = true;
        break;
      }
    if (!found) break;
    size_t lo = hit - 1;
    while (lo > 0 && residual[lo] > noise[lo]) --lo;
    // Anchor the fit on the flat stretch before the onset and on a short run
    // after detection, well short of the next onset in typical spectra.
    size_t rise = hit - lo;
    size_t first = lo > rise + 5 ? lo - rise - 5 : 0;
    size_t hi = std::min(end, hit + std::max<size_t>(20, 3 * rise));
    OnsetFit fit = fit_onset(grid, residual, first, hi, grid[first], grid[hit], l_gamma);
    int mult = std::max(1, static_cast<int>(std::lround(fit.amplitude)));
    double amplitude = fit.amplitude;
    fit = fit_onset(grid, residual, first, hi, grid[first], grid[hit], l_gamma, mult);
    fit.amplitude = amplitude;
    bool merged = false;
    for (auto& e : est.entries)
      if (std::abs(e.length - fit.length) <= step) {
        e.multiplicity += mult;
        merged = true;
      }
    if (!merged) est.entries.push_back({fit.length, mult, fit.amplitude / mult});
    for (size_t i = 0; i < grid.size(); ++i)
      if (grid[i] > fit.length) residual[i] -= mult * arc_cdf_value(l_gamma, fit.length, grid[i], Quadrature::GaussLegendre);
    if (residual[hit] > opt.detect_threshold * noise[hit]) scan_from = hit + 1;
  }
  if (est.entries.empty()) throw Error(Errc::NoDetection, "no arc detected in the trusted window");
  std::sort(est.entries.begin(), est.entries.end(),
            [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.length < b.length; });
  double worst = 0.0;
  for (size_t i = 0; i <= end; ++i) {
    est.max_abs_residual = std::max(est.max_abs_residual, std::abs(residual[i]));
    worst = std::min(worst, residual[i] / noise[i]);
  }
  est.min_scaled_residual = worst;
  return est;
}

SeparationReport classify_separating(const Melody& m, double threshold) {
  for (const auto& n : m.notes)
    if (n.label != m.notes.front().label) throw Error(Errc::MultiLabel, "melody uses more than one note");
  if (m.notes.size() < 3) throw Error(Errc::TooFewNotes, "need at least three notes");
  SeparationReport rep{SeparationVerdict::NonseparatingOrNongeneric, INFINITY, INFINITY};
  for (size_t i = 0; i + 1 < m.notes.size(); ++i) {
    double gap = m.notes[i + 1].t - m.notes[i].t;
    double& slot = i % 2 == 0 ? rep.min_even : rep.min_odd;
    slot = std::min(slot, gap);
  }
  if (std::abs(rep.min_even - rep.min_odd) > threshold) rep.verdict = SeparationVerdict::Separating;
  return rep;
}

SidesReport single_note_sides(const Melody& m, int chi, double area_total, double l_gamma, int max_entries) {
  for (const auto& n : m.notes)
    if (n.label != m.notes.front().label) throw Error(Errc::MultiLabel, "melody uses more than one note");
  if (m.notes.size() < 3) throw Error(Errc::TooFewNotes, "need at least three notes");
  if (chi >= 0) throw Error(Errc::NonNegativeChi, "Euler characteristic must be negative");
  SidesReport rep;
  double even = 0, odd = 0;
  for (size_t i = 0; i + 1 < m.notes.size(); ++i) {
    double gap = m.notes[i + 1].t - m.notes[i].t;
    if (i % 2 == 0) even += gap, rep.even.gaps.push_back(gap);
    else odd += gap, rep.odd.gaps.push_back(gap);
  }
  rep.even.fraction = even / (even + odd);
  rep.odd.fraction = odd / (even + odd);
  rep.even.area = area_total * rep.even.fraction;
  rep.odd.area = area_total * rep.odd.fraction;
  for (SideReport* side : {&rep.even, &rep.odd}) {
    auto cdf = cdf_from_samples(side->gaps, default_grid(*std::min_element(side->gaps.begin(), side->gaps.end())));
    PeelOptions opt;
    opt.max_entries = max_entries;
    side->spectrum = peel_orthospectrum(cdf, 0.5 * l_gamma, 1, opt);
  }
  return rep;
}

}  // namespace marimba
