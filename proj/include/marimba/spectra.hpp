#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "marimba/melody.hpp"

namespace marimba {

struct EmpiricalCDF {
  std::vector<double> grid;
  std::vector<double> values;
  long long n = 0;
  double trusted_max = 0.0;  // 90th percentile of the sampled gaps
  double min_gap = 0.0;
};

enum class Quadrature { Midpoint, GaussLegendre };

struct ArcCDFModel {
  double l_gamma = 0.0;
  double l_arc = 0.0;
  std::vector<double> grid;
  std::vector<double> values;
  int resolution = 0;
};

struct SpectrumEntry {
  double length;
  int multiplicity;
  double confidence;  // fitted amplitude over its rounded value, 1 is a perfect fit
};

struct OrthospectrumEstimate {
  int k = 1;
  std::vector<SpectrumEntry> entries;
  double max_abs_residual = 0.0;
  double min_scaled_residual = 0.0;  // most negative residual in noise units
};

std::vector<double> uniform_grid(double lo, double hi, int points);
std::vector<double> default_grid(double first);

std::vector<double> k_step_gaps(const Melody& m, int k);
EmpiricalCDF cdf_from_samples(std::vector<double> samples, const std::vector<double>& grid);
EmpiricalCDF gap_cdf(const Melody& m, int k, const std::vector<double>& grid);

// Probability, for a cross-section vector, that it is based on one fixed lift
// of the labelled multicurve and hits a second lift at distance l_arc within time T.
double arc_cdf_value(double l_gamma, double l_arc, double T, Quadrature scheme = Quadrature::Midpoint,
                     int resolution = 0);
ArcCDFModel arc_cdf_model(double l_gamma, double l_arc, const std::vector<double>& grid,
                          Quadrature scheme = Quadrature::Midpoint);

struct PeelOptions {
  int max_entries = 10;
  double detect_threshold = 5.0;  // in units of the pointwise noise
  double trusted_max = -1.0;      // < 0: use the cdf's own window
};

OrthospectrumEstimate peel_orthospectrum(const EmpiricalCDF& cdf, double l_gamma, int k, const PeelOptions& opt = {});

enum class SeparationVerdict { Separating, NonseparatingOrNongeneric };

struct SeparationReport {
  SeparationVerdict verdict;
  double min_even;
  double min_odd;
};

SeparationReport classify_separating(const Melody& m, double threshold = 1e-2);

struct SideReport {
  double fraction;
  double area;
  std::vector<double> gaps;
  OrthospectrumEstimate spectrum;
};

struct SidesReport {
  SideReport even;
  SideReport odd;
};

SidesReport single_note_sides(const Melody& m, int chi, double area_total, double l_gamma, int max_entries = 3);

void write_cdf_csv(std::ostream& out, const std::vector<double>& grid, const std::vector<double>& values);

}  // namespace marimba
