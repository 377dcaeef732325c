#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "satgibbs/energy.hpp"
#include "satgibbs/lattice.hpp"
#include "satgibbs/rng.hpp"

namespace satgibbs {

struct SamplerOptions {
  double p_birth = 0.4;
  double p_death = 0.4;           // translation takes the rest
  double jitter = -1.0;           // Gaussian translation scale; negative means delta / 2
  std::size_t check_every = 1000; // full energy recompute interval (0 disables)
  double cache_tol = 1e-8;
  std::size_t max_per_tile = 0;   // 0: unbounded; otherwise births into full tiles are rejected
  bool record_contours = false;
};

enum class MoveKind { birth = 0, death = 1, translate = 2 };

struct MoveStats {
  std::array<std::uint64_t, 3> proposed{};
  std::array<std::uint64_t, 3> accepted{};
  double rate(MoveKind k) const;
};

// Markov chain targeting P^sharp_Lambda: density exp(-beta (E_{Lambda \ dLambda} + Ebar_{dLambda})) times the
// boundary indicator, relative to the Poisson process of activity z on the tiles of Lambda.
class ChainState {
 public:
  ChainState(ModelPtr model, IndexSet lambda, int sharp, double z, double beta, std::uint64_t seed,
             SamplerOptions options = {}, std::optional<Configuration> initial = std::nullopt);

  const TileEnergyModel& model() const { return *model_; }
  const IndexSet& lambda() const { return lambda_; }
  const BoundarySets& boundary() const { return boundary_; }
  int sharp() const { return sharp_; }
  double z() const { return z_; }
  double beta() const { return beta_; }
  std::uint64_t steps() const { return steps_; }
  const MoveStats& stats() const { return stats_; }
  const SamplerOptions& options() const { return options_; }

  std::size_t count() const { return points_.size(); }
  const std::vector<MarkedPoint>& points() const { return points_; }
  std::size_t tile_count(const Index& i) const { return bins_.count(i); }
  Configuration configuration() const;
  Window window() const;

  // Cached E_{Lambda \ dLambda} + Ebar_{dLambda}.
  double energy() const { return energy_; }
  double log_density() const;
  bool boundary_holds() const;

  // One Metropolis-Hastings move.
  void step();
  // Recomputes every tile energy; throws NumericalError when the cache drifted.
  void check_cache();
  double tile_energy_at(const Index& i) const;

 private:
  double local_energy(const Index& i) const;
  std::vector<std::size_t> affected(const Index& tile) const;
  double delta_energy(const std::vector<std::size_t>& slots, std::vector<double>& fresh) const;
  void commit(const std::vector<std::size_t>& slots, const std::vector<double>& fresh);
  void insert_point(const MarkedPoint& p);
  void remove_point(std::size_t m);

  ModelPtr model_;
  IndexSet lambda_;
  BoundarySets boundary_;
  int sharp_;
  double z_;
  double beta_;
  SamplerOptions options_;
  Rng rng_;
  std::uint64_t steps_ = 0;
  MoveStats stats_;

  IndexBox box_;
  std::vector<int> slot_of_;       // box flat -> slot in lambda_, -1 outside
  std::vector<std::uint8_t> kind_; // per slot: 0 bulk, 1 boundary (Ebar), plus bit 2 for inner boundary
  std::vector<std::size_t> birth_slots_;
  std::vector<double> cache_;
  double energy_ = 0.0;
  TileBins bins_;
  std::vector<MarkedPoint> points_;
};

double target_logdensity(const ChainState& state, const Configuration& config);

struct TraceRow {
  std::uint64_t step = 0;
  std::size_t n = 0;
  double rho = 0.0;            // points per unit volume in the measured tiles
  double occupied_frac = 0.0;  // occupied fraction of the measured tiles
  long n_contours = -1;        // -1 when not recorded
};

struct Trace {
  std::vector<TraceRow> rows;
  MoveStats stats;
};

// Measured tiles default to lambda minus its inner boundary.
Trace run_chain(ChainState& state, std::uint64_t n_steps, std::uint64_t thin,
                const std::optional<IndexSet>& measured = std::nullopt);

struct BatchMeans {
  double mean = 0.0;
  double std_error = 0.0;
};

BatchMeans batch_means(const std::vector<double>& xs, std::size_t batches = 50);

struct ScanRow {
  double z = 0.0;
  int sharp = 0;
  double rho_mean = 0.0;
  double rho_se = 0.0;
  double occ_mean = 0.0;
};

struct ScanOptions {
  std::uint64_t steps = 100000;
  std::uint64_t thin = 10;
  std::size_t replicas = 1;
  double burn_in = 0.2;
  std::size_t batches = 50;
  SamplerOptions sampler;
};

std::vector<ScanRow> hysteresis_scan(ModelPtr model, const IndexSet& lambda, double beta,
                                     const std::vector<double>& z_grid, const ScanOptions& options,
                                     std::uint64_t seed, const std::optional<IndexSet>& measured = std::nullopt);

std::string scan_csv(const std::vector<ScanRow>& rows);
std::string trace_csv(const Trace& trace);

}  // namespace satgibbs
