#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "satgibbs/enumeration.hpp"
#include "satgibbs/models.hpp"

namespace satgibbs {

// Compensated sum of exponentials kept relative to the running maximum.
class LogSumExp {
 public:
  void add(double log_term);
  double value() const;  // -inf when empty
  bool empty() const { return !std::isfinite(max_); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double zbar(int sharp, double z, double beta, double b0, double delta, int dim);
double log_zbar(int sharp, double z, double beta, double b0, double delta, int dim);

// Surrogate model at fixed activity and inverse temperature.
class SurrogateSystem {
 public:
  SurrogateSystem(std::shared_ptr<const Surrogate> model, double z, double beta);

  const Surrogate& model() const { return *model_; }
  std::shared_ptr<const Surrogate> model_ptr() const { return model_; }
  const Tiling& tiling() const { return model_->tiling(); }
  double L() const { return model_->saturation().L; }
  double b0() const { return model_->b0(); }
  double z() const { return z_; }
  double beta() const { return beta_; }
  double tile_volume() const { return tiling().tile_volume(); }
  double zbar(int sharp) const;
  double log_zbar(int sharp) const;
  // Log of the Poisson probability that a tile is empty (s = 0) or occupied (s = 1).
  double log_occupancy(int s) const { return log_mu_[s]; }
  SurrogateSystem with_activity(double z) const { return SurrogateSystem(model_, z, beta_); }

 private:
  std::shared_ptr<const Surrogate> model_;
  double z_;
  double beta_;
  double log_mu_[2];
};

// Gap of a contour over its support minus the inner boundary layer, read on the contour's witness.
double surrogate_contour_gap(const Surrogate& model, const Contour& g);
// log I_gamma: the contour's spins fixed on the support, witness spins around it.
double log_contour_integral(const SurrogateSystem& sys, const Contour& g);

struct PolymerComparison {
  double phi_direct = 0.0;
  double phi_contour = 0.0;
  double log_phi_direct = 0.0;
  double log_phi_contour = 0.0;
  double rel_err = 0.0;
  std::size_t contours = 0;
  std::size_t sets = 0;
  std::size_t free_sites = 0;
};

// Enumerations and partition functions cached across activities.
class PolymerEngine {
 public:
  explicit PolymerEngine(EnumerationLimits limits = {}) : limits_(limits) {}

  const EnumerationLimits& limits() const { return limits_; }
  const ContourCatalog& catalog(const Volume& vol, int sharp);
  // log Z^sharp_Lambda by exhaustive pattern enumeration.
  double log_partition(const SurrogateSystem& sys, const Volume& vol, int sharp);
  double log_partition(const SurrogateSystem& sys, const IndexSet& sites, int sharp);
  // log w_gamma^sharp; `damping` multiplies the interior ratio (1 for the plain weight).
  double log_weight(const SurrogateSystem& sys, const Contour& g, int sharp, double damping = 1.0);
  double log_interior_ratio(const SurrogateSystem& sys, const Contour& g, int sharp);

 private:
  EnumerationLimits limits_;
  std::map<std::tuple<IndexSet, int, double, double>, ContourCatalog> catalogs_;
  // The model pointer is held so its address cannot be reused by another model.
  std::map<std::tuple<IndexSet, int, double, double, std::shared_ptr<const Surrogate>>, double> partitions_;
};

double log_exact_partition(const SurrogateSystem& sys, const Volume& vol, int sharp,
                           const EnumerationLimits& limits = {});
double exact_partition(const SurrogateSystem& sys, const Volume& vol, int sharp,
                       const EnumerationLimits& limits = {});

PolymerComparison polymer_development(PolymerEngine& engine, const SurrogateSystem& sys, const Volume& vol,
                                      int sharp);

// Sum over the pattern contributions whose contour sets contain a wall (d = 1 only), relative to Zbar^|Lambda|.
double wall_contribution(const SurrogateSystem& sys, const Volume& vol, int sharp, const EnumerationLimits& limits = {});

struct TauReport {
  double tau = 0.0;
  double b_plus = 0.0;
  bool vacuous = false;
  std::string message;
  std::size_t contours = 0;
  std::size_t weight_violations = 0;
  std::size_t integral_violations = 0;
  double worst_weight_ratio = 0.0;    // max of w / e^{-tau |support|}
  double worst_integral_ratio = 0.0;  // max of I / bound
  double worst_derivative_ratio = 0.0;  // max of |dw/dz| / (|support|^{d/(d-1)} e^{-tau |support|}), d >= 2
};

// Minimum of gap / |support| over the given contours (the measured b_plus).
double measured_b_plus(const Surrogate& model, const std::vector<Contour>& contours);

TauReport tau_stability_scan(PolymerEngine& engine, const SurrogateSystem& sys, const std::vector<Contour>& contours,
                             int sharp, double tau, double b_plus);

// C^1 cubic cut-off: 1 below lo, 0 above hi.
struct CutOff {
  double lo = 0.0;
  double hi = 1.0;
  double operator()(double s) const;
  double max_slope() const { return 1.5 / (hi - lo); }
};

CutOff cutoff_from_b_plus(double beta, double b_plus);

struct RankPressure {
  double psi[2] = {0.0, 0.0};
  double spread[2] = {0.0, 0.0};
  std::vector<double> per_box[2];
  double a[2] = {0.0, 0.0};
};

struct TruncationState {
  int max_rank = 0;
  std::vector<RankPressure> ranks;  // index = rank
  double b_plus = 0.0;
  CutOff kappa;
  double kappa_slope = 0.0;
  std::size_t damped_weights = 0;  // weights where kappa < 1 was applied
};

// b_plus_override > 0 skips measuring b_plus on the ladder catalogs.
TruncationState truncated_pressures(PolymerEngine& engine, const SurrogateSystem& sys, int max_rank,
                                    const std::vector<Volume>& ladder, double b_plus_override = 0.0);

struct CriticalBracket {
  double lo = 0.0;
  double hi = 0.0;
  double g_lo = 0.0;
  double g_hi = 0.0;
  int rank = 0;
  std::vector<std::pair<double, double>> evaluations;  // (z, G)
  double mid() const { return 0.5 * (lo + hi); }
};

using SystemBuilder = std::function<SurrogateSystem(double z)>;

double truncated_g(PolymerEngine& engine, const SurrogateSystem& sys, int rank, const std::vector<Volume>& ladder,
                   double b_plus_override = 0.0);

CriticalBracket bracket_critical_activity(PolymerEngine& engine, const SystemBuilder& build, double z_lo, double z_hi,
                                          int rank, double tol, const std::vector<Volume>& ladder,
                                          double b_plus_override = 0.0);

struct DensityEstimate {
  double rho = 0.0;
  double rho_half_step = 0.0;
  double richardson_gap = 0.0;
  std::size_t box = 0;
};

DensityEstimate density_from_pressure(PolymerEngine& engine, const SystemBuilder& build, int sharp, double z,
                                      double step, int rank, const std::vector<Volume>& ladder,
                                      double b_plus_override = 0.0);

std::vector<Volume> box_ladder(int dim, const std::vector<int>& sides, double L, const Tiling& tiling);

}  // namespace satgibbs
