#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "satgibbs/energy.hpp"
#include "satgibbs/potential.hpp"

namespace satgibbs {

// E_0 = A * sum over x in T_0 of min(K, number of other points within R of x).
class KnnStrauss final : public TileEnergyModel {
 public:
  KnnStrauss(const Tiling& tiling, double L, int K, double R, double A);

  ModelKind kind() const override { return ModelKind::knn_strauss; }
  using TileEnergyModel::tile_energy;
  TileEnergy tile_energy(const TileBins& bins, const Index& i) const override;
  bool exact() const override { return true; }
  std::string saturation_issue() const override;

  int K() const { return K_; }
  double R() const { return R_; }
  double A() const { return A_; }

 private:
  int K_;
  double R_;
  double A_;
};

// Literal reading of the K-NN sum: sort the other points by distance with lexicographic tie-break
// and count the first K that lie within R. Used as a test oracle.
double knn_strauss_reference(const Configuration& config, const Tiling& tiling, const Index& i, int K, double R,
                             double A);

// E_0 = theta * |halo intersected with T_0| in d = 2, with radius marks in [R1, R2].
class AreaInteraction final : public TileEnergyModel {
 public:
  AreaInteraction(const Tiling& tiling, double L, double theta, double r_min, double r_max, double pitch);

  ModelKind kind() const override { return ModelKind::area_interaction; }
  using TileEnergyModel::tile_energy;
  TileEnergy tile_energy(const TileBins& bins, const Index& i) const override;
  bool exact() const override { return false; }
  MarkLaw mark_law() const override { return MarkLaw::uniform_radius(r_min_, r_max_); }
  std::string saturation_issue() const override;

  double theta() const { return theta_; }
  double pitch() const { return pitch_; }

 private:
  double theta_;
  double r_min_;
  double r_max_;
  double pitch_;
};

// E_0 = integral over x in halo cap T_0 and y in halo of phi(|x - y|), halo = union of B(x, R).
class DilutedPairwise final : public TileEnergyModel {
 public:
  DilutedPairwise(const Tiling& tiling, double L, const PotentialProfile& profile, double pitch);

  ModelKind kind() const override { return ModelKind::diluted_pairwise; }
  using TileEnergyModel::tile_energy;
  TileEnergy tile_energy(const TileBins& bins, const Index& i) const override;
  bool exact() const override { return false; }
  std::string saturation_issue() const override;

  const PotentialProfile& profile() const { return profile_; }
  double c_phi() const { return c_phi_; }
  double pitch() const { return pitch_; }
  // Grid evaluation with n cells per tile side (exposed for convergence tests).
  double tile_energy_at(const TileBins& bins, const Index& i, int cells) const;
  int cells_per_side() const { return cells_; }

 private:
  PotentialProfile profile_;
  double pitch_;
  double c_phi_;
  int cells_;
};

// Table of energies indexed by the occupancy pattern of the l_inf block of radius rho around a tile.
class SurrogateTable {
 public:
  SurrogateTable() = default;
  SurrogateTable(int dim, int rho, std::vector<double> values);

  int dim() const { return dim_; }
  int rho() const { return rho_; }
  int bits() const { return static_cast<int>(offsets_.size()); }
  const std::vector<Index>& offsets() const { return offsets_; }
  int center_bit() const { return center_bit_; }
  double operator[](std::uint32_t code) const { return values_[code]; }
  const std::vector<double>& values() const { return values_; }

  // Bit mask of the offsets inside the Euclidean ball of radius L/delta.
  std::uint32_t ball_mask(double radius) const;

  static SurrogateTable saturated(int dim, int rho, double ball_radius, double b0);
  static SurrogateTable penalized(int dim, int rho, double ball_radius, double b0, double penalty);
  static SurrogateTable random(int dim, int rho, double ball_radius, double b0, double amplitude,
                               std::uint64_t seed);
  static SurrogateTable symmetric(int dim, int rho, double ball_radius, double b0, double amplitude,
                                  std::uint64_t seed);

 private:
  int dim_ = 1;
  int rho_ = 1;
  int center_bit_ = 0;
  std::vector<Index> offsets_;
  std::vector<double> values_;
};

inline constexpr int kSurrogateMaxBits = 16;

SurrogateTable read_surrogate_table(std::istream& is, int dim, int rho);

class Surrogate final : public TileEnergyModel {
 public:
  Surrogate(const Tiling& tiling, double L, double b0, SurrogateTable table);

  ModelKind kind() const override { return ModelKind::surrogate; }
  using TileEnergyModel::tile_energy;
  TileEnergy tile_energy(const TileBins& bins, const Index& i) const override;
  bool exact() const override { return true; }

  const SurrogateTable& table() const { return table_; }
  int rho() const { return table_.rho(); }
  double b0() const { return sat_.b0; }

  // Energy at site i for an arbitrary spin accessor.
  template <class SpinFn>
  double site_energy(const Index& i, SpinFn&& spin) const {
    std::uint32_t code = 0;
    const auto& offs = table_.offsets();
    for (std::size_t k = 0; k < offs.size(); ++k)
      if (spin(add(i, offs[k]))) code |= (1u << k);
    return table_[code];
  }

  // Pattern is constant on the L-ball, so the energy equals b0 * center.
  bool saturated_pattern(std::uint32_t code) const;

 private:
  SurrogateTable table_;
  std::uint32_t ball_mask_;
};

}  // namespace satgibbs
