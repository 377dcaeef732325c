#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <unordered_map>
#include <vector>

#include "satgibbs/rng.hpp"

namespace satgibbs {

// Dimensions up to 3 are supported; unused coordinates are kept at zero.
inline constexpr int kMaxDim = 3;
using Vec = std::array<double, kMaxDim>;
using Index = std::array<int, kMaxDim>;

struct IndexHash {
  std::size_t operator()(const Index& i) const noexcept {
    std::uint64_t h = static_cast<std::uint32_t>(i[0]);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(i[1]);
    h = h * 0x9e3779b97f4a7c15ULL + static_cast<std::uint32_t>(i[2]);
    return static_cast<std::size_t>(splitmix64(h));
  }
};

void check_dimension(int dim);

Index add(const Index& a, const Index& b);
Index sub(const Index& a, const Index& b);
int linf_norm(const Index& a);
long sq_norm(const Index& a);
double sq_dist(const Vec& a, const Vec& b, int dim);

// Lattice offsets o with |o|_2 <= radius (in lattice units), lexicographic order.
// The comparison allows a relative slack of 1e-9 so thresholds hit exactly are included.
std::vector<Index> ball_offsets(int dim, double radius);
bool within_radius(long sq_len, double radius);

struct MarkedPoint {
  Vec x{};
  std::optional<double> radius;
};

struct Window {
  int dim = 1;
  Vec lo{};
  Vec hi{};

  double volume() const;
  bool contains(const Vec& x) const;
};

Window cube_window(int dim, double lo, double hi);

class Tiling {
 public:
  Tiling(int dim, double delta);

  int dim() const { return dim_; }
  double delta() const { return delta_; }
  double tile_volume() const;
  Index tile_of(const Vec& x) const;
  Vec center(const Index& i) const;

 private:
  int dim_;
  double delta_;
};

class Configuration {
 public:
  Configuration() = default;
  Configuration(Window window, std::vector<MarkedPoint> points);

  const Window& window() const { return window_; }
  const std::vector<MarkedPoint>& points() const { return points_; }
  int dim() const { return window_.dim; }
  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }

  // Shifts points and window together.
  Configuration translated(const Vec& shift) const;
  Configuration filtered(const std::function<bool(const MarkedPoint&)>& keep) const;

 private:
  Window window_;
  std::vector<MarkedPoint> points_;
};

// Points grouped by tile. Shared by energy evaluation and the sampler.
class TileBins {
 public:
  explicit TileBins(const Tiling& tiling) : tiling_(tiling) {}
  TileBins(const Tiling& tiling, const Configuration& config);

  const Tiling& tiling() const { return tiling_; }
  Index insert(const MarkedPoint& p);
  void erase(const Index& tile, std::size_t k);
  const std::vector<MarkedPoint>* points_in(const Index& tile) const;
  std::size_t count(const Index& tile) const;
  std::size_t total() const { return total_; }
  const std::unordered_map<Index, std::vector<MarkedPoint>, IndexHash>& bins() const { return bins_; }

  // Calls fn on every point of every tile j with |j - i|_inf <= reach.
  template <class Fn>
  void for_each_near(const Index& i, int reach, Fn&& fn) const {
    const int d = tiling_.dim();
    Index j{};
    for (int a = -reach; a <= reach; ++a) {
      for (int b = (d > 1 ? -reach : 0); b <= (d > 1 ? reach : 0); ++b) {
        for (int c = (d > 2 ? -reach : 0); c <= (d > 2 ? reach : 0); ++c) {
          j = {i[0] + a, i[1] + b, i[2] + c};
          auto it = bins_.find(j);
          if (it == bins_.end()) continue;
          for (const auto& p : it->second) fn(p);
        }
      }
    }
  }

 private:
  Tiling tiling_;
  std::unordered_map<Index, std::vector<MarkedPoint>, IndexHash> bins_;
  std::size_t total_ = 0;
};

int occupancy(const Configuration& config, const Index& i, const Tiling& tiling);

// Inclusive box of lattice sites.
struct IndexBox {
  int dim = 1;
  Index lo{};
  Index hi{};

  std::size_t size() const;
  bool contains(const Index& i) const;
  std::size_t flat(const Index& i) const;
  Index unflat(std::size_t k) const;
  IndexBox grown(int margin) const;
  std::vector<Index> sites() const;
};

IndexBox cube_box(int dim, int lo, int hi);
IndexBox bounding_box(int dim, const std::vector<Index>& sites);

class SpinField {
 public:
  SpinField() = default;
  // Every site of the box belongs to the domain and starts at the exterior spin.
  SpinField(const IndexBox& box, int exterior_spin);

  int dim() const { return box_.dim; }
  const IndexBox& box() const { return box_; }
  int exterior_spin() const { return exterior_; }
  bool in_domain(const Index& i) const;
  int get(const Index& i) const;
  void set(const Index& i, int spin);
  // Removes box sites that are not listed from the domain.
  void restrict_domain(const std::vector<Index>& domain);
  int at_flat(std::size_t k) const { return spins_[k]; }
  bool domain_flat(std::size_t k) const { return mask_.empty() || mask_[k] != 0; }

 private:
  IndexBox box_;
  int exterior_ = 0;
  std::vector<std::int8_t> spins_;
  std::vector<std::uint8_t> mask_;
};

SpinField spin_field(const Configuration& config, const std::vector<Index>& domain, int exterior_spin,
                     const Tiling& tiling);

bool is_homogeneous(const Configuration& config, const Index& i, double L, int sharp, const Tiling& tiling);

struct MarkLaw {
  enum class Kind { none, uniform_radius };
  Kind kind = Kind::none;
  double r_min = 0.0;
  double r_max = 0.0;

  static MarkLaw none() { return {}; }
  static MarkLaw uniform_radius(double r_min, double r_max);
  std::optional<double> draw(Rng& rng) const;
};

Configuration sample_poisson(const Window& window, double z, const MarkLaw& marks, std::uint64_t seed);
Configuration sample_poisson(const Window& window, double z, const MarkLaw& marks, Rng& rng);

}  // namespace satgibbs
