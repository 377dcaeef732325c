#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "satgibbs/contours.hpp"
#include "satgibbs/energy.hpp"
#include "satgibbs/potential.hpp"

namespace satgibbs {

enum class GapVariant { full, minus_inner_boundary };

struct GapValue {
  double value = 0.0;
  double error = 0.0;  // accumulated quadrature error
};

// Contours of the configuration's spin field, with empty space outside the configuration.
ContourExtraction configuration_contours(const TileEnergyModel& model, const Configuration& config);

// Sum over the support (or the support minus its inner boundary layer) of E_i - Ebar_i.
// Throws ValidationError("contour not achieved") when the configuration does not produce the contour.
GapValue peierls_gap(const TileEnergyModel& model, const Configuration& config, const Contour& g, GapVariant variant);

struct GapRecord {
  std::size_t config = 0;
  std::size_t size = 0;
  double gap = 0.0;
  double error = 0.0;
  double ratio = 0.0;
};

struct PeierlsReport {
  std::string model;
  GapVariant variant = GapVariant::minus_inner_boundary;
  std::vector<GapRecord> records;
  double b_plus = 0.0;            // min ratio
  double b_plus_certified = 0.0;  // min of (gap - error) / size
  std::size_t witness = 0;        // index into records
  std::size_t configs = 0;
  bool pass = false;
};

PeierlsReport estimate_b_plus(const TileEnergyModel& model, const std::vector<Configuration>& corpus,
                              GapVariant variant = GapVariant::minus_inner_boundary);

// Random tile patterns that produce at least one contour, preceded by hand-built extremes
// (single island, hole, slab, checkerboard patch). Points are drawn inside occupied tiles.
std::vector<Configuration> peierls_corpus(const TileEnergyModel& model, std::size_t count, int side_tiles,
                                          std::uint64_t seed);

// |D(gamma)| / |support|.
double domino_ratio(const Contour& g);

// Minimum domino ratio over the contours of random side^d spin fields.
double min_domino_ratio(int dim, int side, std::size_t fields, double L, const Tiling& tiling, std::uint64_t seed);

double cd_constant(int dim);

// y lies in the sector of radius R around z with axis x - z and half-angle pi/3.
bool sector_contains(const Vec& z, const Vec& x, double R, const Vec& y, int dim);

struct ConditionCheck {
  bool pass = false;
  double margin = 0.0;
  double core_term = 0.0;      // C_d * integral of phi+ over B(0,R)
  double shell_term = 0.0;     // ((R1/R)^d - 1) * integral of phi+ over B(0,R1) minus B(0,R)
  double negative_term = 0.0;  // integral of phi- over R^d
};

ConditionCheck diluted_condition_check(const PotentialProfile& profile);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct ConditionMc {
  McEstimate core;
  McEstimate shell;
  McEstimate negative;
  McEstimate margin;
};

// Each term integrated by uniform sampling of a cube around the origin.
ConditionMc diluted_condition_mc(const PotentialProfile& profile, std::size_t samples, std::uint64_t seed);

double theta_epsilon(double eps, double R1, int dim);

// Distance from y to the complement of the union of radius-R balls (0 outside the union). d = 2 only.
double halo_depth(const std::vector<Vec>& centers, double R, const Vec& y);

struct ThetaMc {
  double ratio = 0.0;
  double std_error = 0.0;
  std::size_t hits_eps = 0;
  std::size_t hits_r1 = 0;
  std::size_t samples = 0;
};

ThetaMc mc_check_theta(const Configuration& config, const Contour& g, const Tiling& tiling, double eps, double R,
                       double R1, std::size_t samples, std::uint64_t seed);

struct TruncationSearch {
  double eps = 0.0;
  double margin = 0.0;
  double boundary = 0.0;  // largest passing eps found by bisection
  PotentialProfile profile;  // profile with the truncated table
  std::vector<std::pair<double, double>> trials;  // (eps, margin)
};

// Bisection from min(R1, R) downward for the largest passing cut; the returned eps is that cut times
// `safety` (when still above the table's first radius), so the margin does not sit at zero.
TruncationSearch find_truncation_epsilon(const PotentialProfile& profile, double tol = 1e-6, double safety = 0.5);

struct ActivityWindow {
  double lo = 0.0;
  double hi = 0.0;
};

ActivityWindow critical_window(double beta, double b, double b0, double delta, int dim);
// Window with a(beta) = min(2, e^{-beta c}) in place of 2, b0 = delta^d C_phi and b = 0.
ActivityWindow refined_window(double beta, double c_phi, double delta, int dim, double rate);
double refined_half_width(double beta, double rate);

std::string to_string(GapVariant v);

}  // namespace satgibbs
