#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "satgibbs/geometry.hpp"

namespace satgibbs {

struct SaturationData {
  double delta = 1.0;
  double L = 1.0;
  double b = 0.0;   // per-point saturated energy
  double b0 = 0.0;  // per-occupied-tile saturated energy
};

// Tile energy with a quadrature error estimate (zero for combinatorial models).
struct TileEnergy {
  double value = 0.0;
  double error = 0.0;

  TileEnergy& operator+=(const TileEnergy& o) {
    value += o.value;
    error += o.error;
    return *this;
  }
};

enum class ModelKind { knn_strauss, diluted_pairwise, area_interaction, surrogate };

std::string to_string(ModelKind kind);

class TileEnergyModel {
 public:
  virtual ~TileEnergyModel() = default;

  virtual ModelKind kind() const = 0;
  virtual TileEnergy tile_energy(const TileBins& bins, const Index& i) const = 0;
  // Whether tile energies are exact (no quadrature).
  virtual bool exact() const = 0;
  virtual MarkLaw mark_law() const { return MarkLaw::none(); }
  // Sufficient geometric conditions for saturation; empty when they hold.
  virtual std::string saturation_issue() const { return {}; }

  const Tiling& tiling() const { return tiling_; }
  int dim() const { return tiling_.dim(); }
  const SaturationData& saturation() const { return sat_; }
  double range() const { return range_; }
  double stability_constant() const { return c_s_; }
  double tameness_constant() const { return c_t_; }
  // Tiles within this l_inf distance can hold points that influence E_i.
  int reach() const;

  TileEnergy tile_energy(const Configuration& config, const Index& i) const;
  double saturated_tile_energy(const TileBins& bins, const Index& i) const;
  double saturated_tile_energy(const Configuration& config, const Index& i) const;
  void validate_point(const MarkedPoint& p) const;

 protected:
  TileEnergyModel(const Tiling& tiling, SaturationData sat, double range, double c_s, double c_t);

  Tiling tiling_;
  SaturationData sat_;
  double range_;
  double c_s_;
  double c_t_;
};

using ModelPtr = std::shared_ptr<const TileEnergyModel>;

// Tiles whose energy can be nonzero for the given configuration.
std::vector<Index> influenced_tiles(const TileEnergyModel& model, const TileBins& bins);

TileEnergy hamiltonian(const TileEnergyModel& model, const Configuration& config);
TileEnergy hamiltonian(const TileEnergyModel& model, const TileBins& bins);

// H_Delta for a closed box region Delta.
TileEnergy local_energy_region(const TileEnergyModel& model, const Configuration& config, const Window& region);
// h(x, omega) = H(omega + x) - H(omega); x must not belong to omega.
TileEnergy local_energy_point(const TileEnergyModel& model, const Configuration& config, const MarkedPoint& x);

struct AssumptionCheck {
  std::string name;
  bool passed = true;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst = 0.0;        // largest violation (or deviation) seen
  double max_error = 0.0;    // largest reported quadrature error seen
  std::string witness;       // description of the first failing trial
};

struct AssumptionReport {
  bool passed = true;
  std::vector<AssumptionCheck> checks;
  const AssumptionCheck* find(const std::string& name) const;
};

AssumptionReport check_assumptions(const TileEnergyModel& model, std::size_t trials, std::uint64_t seed);

}  // namespace satgibbs
