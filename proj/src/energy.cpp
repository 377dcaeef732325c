#include "satgibbs/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "satgibbs/errors.hpp"

namespace satgibbs {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::knn_strauss: return "knn_strauss";
    case ModelKind::diluted_pairwise: return "diluted_pairwise";
    case ModelKind::area_interaction: return "area_interaction";
    case ModelKind::surrogate: return "surrogate";
  }
  return "unknown";
}

TileEnergyModel::TileEnergyModel(const Tiling& tiling, SaturationData sat, double range, double c_s, double c_t)
    : tiling_(tiling), sat_(sat), range_(range), c_s_(c_s), c_t_(c_t) {
  require(std::isfinite(sat.L) && sat.L > 0.0, "homogeneity radius L must be positive");
  require(std::isfinite(range) && range >= 0.0, "model range must be finite");
  require(c_s >= 0.0 && c_t >= 0.0 && std::isfinite(c_s) && std::isfinite(c_t),
          "stability and tameness constants must be finite and nonnegative");
  sat_.delta = tiling.delta();
}

int TileEnergyModel::reach() const { return static_cast<int>(std::floor(range_ / tiling_.delta())) + 1; }

TileEnergy TileEnergyModel::tile_energy(const Configuration& config, const Index& i) const {
  TileBins bins(tiling_, config);
  return tile_energy(bins, i);
}

double TileEnergyModel::saturated_tile_energy(const TileBins& bins, const Index& i) const {
  const std::size_t n = bins.count(i);
  return sat_.b * static_cast<double>(n) + (n > 0 ? sat_.b0 : 0.0);
}

double TileEnergyModel::saturated_tile_energy(const Configuration& config, const Index& i) const {
  TileBins bins(tiling_, config);
  return saturated_tile_energy(bins, i);
}

void TileEnergyModel::validate_point(const MarkedPoint& p) const {
  const MarkLaw law = mark_law();
  if (law.kind == MarkLaw::Kind::none) return;
  require(p.radius.has_value(), "model requires radius marks");
  require(*p.radius >= law.r_min && *p.radius <= law.r_max, "radius mark outside [R1, R2]");
}

std::vector<Index> influenced_tiles(const TileEnergyModel& model, const TileBins& bins) {
  std::unordered_set<Index, IndexHash> seen;
  const int r = model.reach();
  const int d = model.dim();
  for (const auto& [tile, pts] : bins.bins()) {
    (void)pts;
    for (int a = -r; a <= r; ++a)
      for (int b = (d > 1 ? -r : 0); b <= (d > 1 ? r : 0); ++b)
        for (int c = (d > 2 ? -r : 0); c <= (d > 2 ? r : 0); ++c) seen.insert({tile[0] + a, tile[1] + b, tile[2] + c});
  }
  std::vector<Index> out(seen.begin(), seen.end());
  std::sort(out.begin(), out.end());
  return out;
}

TileEnergy hamiltonian(const TileEnergyModel& model, const TileBins& bins) {
  TileEnergy total;
  for (const auto& i : influenced_tiles(model, bins)) total += model.tile_energy(bins, i);
  return total;
}

TileEnergy hamiltonian(const TileEnergyModel& model, const Configuration& config) {
  TileBins bins(model.tiling(), config);
  return hamiltonian(model, bins);
}

TileEnergy local_energy_region(const TileEnergyModel& model, const Configuration& config, const Window& region) {
  const Tiling& tiling = model.tiling();
  TileBins all(tiling, config);
  TileBins outside(tiling);
  TileBins inside(tiling);
  for (const auto& p : config.points()) {
    if (region.contains(p.x))
      inside.insert(p);
    else
      outside.insert(p);
  }
  TileEnergy out;
  for (const auto& i : influenced_tiles(model, inside)) {
    const TileEnergy a = model.tile_energy(all, i);
    const TileEnergy b = model.tile_energy(outside, i);
    out.value += a.value - b.value;
    out.error += a.error + b.error;
  }
  return out;
}

TileEnergy local_energy_point(const TileEnergyModel& model, const Configuration& config, const MarkedPoint& x) {
  for (const auto& p : config.points()) require(p.x != x.x, "local_energy_point: x already belongs to the configuration");
  const Tiling& tiling = model.tiling();
  TileBins without(tiling, config);
  TileBins with = without;
  with.insert(x);
  TileBins only(tiling);
  only.insert(x);
  TileEnergy out;
  for (const auto& i : influenced_tiles(model, only)) {
    const TileEnergy a = model.tile_energy(with, i);
    const TileEnergy b = model.tile_energy(without, i);
    out.value += a.value - b.value;
    out.error += a.error + b.error;
  }
  return out;
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

namespace {

// Distance from x to the closed tile T_0 (centered at the origin).
double distance_to_tile(const Vec& x, int d, double delta) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double e = std::max(0.0, std::abs(x[k]) - 0.5 * delta);
    s += e * e;
  }
  return std::sqrt(s);
}

std::string describe(const Configuration& c) {
  std::ostringstream os;
  os << c.size() << " points:";
  std::size_t shown = 0;
  for (const auto& p : c.points()) {
    if (shown++ == 6) {
      os << " ...";
      break;
    }
    os << " (";
    for (int k = 0; k < c.dim(); ++k) os << (k ? "," : "") << p.x[k];
    if (p.radius) os << ";r=" << *p.radius;
    os << ")";
  }
  return os.str();
}

struct TrialGen {
  const TileEnergyModel& model;
  Rng rng;
  int d;
  double delta;
  double half;  // half side of the trial window

  MarkedPoint random_point(const Window& w) {
    MarkedPoint p;
    for (int k = 0; k < d; ++k) p.x[k] = std::uniform_real_distribution<double>(w.lo[k], w.hi[k])(rng);
    p.radius = model.mark_law().draw(rng);
    return p;
  }

  Window window() const { return cube_window(d, -half, half); }

  std::vector<MarkedPoint> poisson(double mean_per_tile) {
    const Window w = window();
    const double z = mean_per_tile / model.tiling().tile_volume();
    std::poisson_distribution<long> n(z * w.volume());
    const long k = n(rng);
    std::vector<MarkedPoint> pts;
    for (long a = 0; a < k; ++a) pts.push_back(random_point(w));
    return pts;
  }

  double random_intensity() { return std::uniform_real_distribution<double>(0.0, 1.5)(rng); }
};

void record(AssumptionCheck& c, bool ok, double violation, const std::string& witness) {
  ++c.trials;
  if (!ok) {
    if (c.failures == 0) c.witness = witness;
    ++c.failures;
    c.passed = false;
  }
  c.worst = std::max(c.worst, violation);
}

}  // namespace

AssumptionReport check_assumptions(const TileEnergyModel& model, std::size_t trials, std::uint64_t seed) {
  require(trials >= 1, "check_assumptions needs at least one trial");
  const Tiling& tiling = model.tiling();
  const int d = tiling.dim();
  const double delta = tiling.delta();
  const double r = model.range();
  const SaturationData& sat = model.saturation();
  const double scale_tol = model.exact() ? 1e-12 : 1e-9;

  TrialGen gen{model, make_rng(seed, 0x5a7), d, delta,
               0.5 * delta + std::max(r, sat.L) + 3.0 * delta};
  const Index origin{0, 0, 0};

  AssumptionCheck nondeg;
  nondeg.name = "non_degenerate";
  AssumptionCheck locality;
  locality.name = "locality";
  AssumptionCheck stable;
  stable.name = "stability";
  AssumptionCheck tame;
  tame.name = "tameness";
  AssumptionCheck saturation;
  saturation.name = "saturation";
  AssumptionCheck translation;
  translation.name = "translation";
  AssumptionCheck heredity;
  heredity.name = "heredity";

  {
    TileBins empty(tiling);
    const TileEnergy e = model.tile_energy(empty, origin);
    record(nondeg, e.value == 0.0, std::abs(e.value), "empty configuration");
  }

  const auto homogeneous_offsets = ball_offsets(d, sat.L / delta);

  for (std::size_t t = 0; t < trials; ++t) {
    // Random configuration around T_0.
    const Window w = gen.window();
    auto pts = gen.poisson(gen.random_intensity());
    Configuration omega(w, pts);
    TileBins bins(tiling, omega);
    const TileEnergy e = model.tile_energy(bins, origin);
    std::size_t n_local = 0;
    for (const auto& p : pts)
      if (distance_to_tile(p.x, d, delta) <= r) ++n_local;

    // Locality: keep the r-neighbourhood of T_0, redraw everything else.
    std::vector<MarkedPoint> other;
    for (const auto& p : pts)
      if (distance_to_tile(p.x, d, delta) <= r) other.push_back(p);
    for (const auto& p : gen.poisson(gen.random_intensity()))
      if (distance_to_tile(p.x, d, delta) > r) other.push_back(p);
    Configuration omega2(w, other);
    TileBins bins2(tiling, omega2);
    const TileEnergy e2 = model.tile_energy(bins2, origin);
    const double dev = std::abs(e.value - e2.value);
    record(locality, dev <= e.error + e2.error + scale_tol * (1.0 + std::abs(e.value)), dev, describe(omega));
    locality.max_error = std::max({locality.max_error, e.error, e2.error});

    const double nl = static_cast<double>(n_local);
    const double lower = -model.stability_constant() * (1.0 + nl);
    const double upper = model.tameness_constant() * (1.0 + nl * nl);
    const double tol = e.error + scale_tol * (1.0 + std::abs(e.value));
    record(stable, e.value >= lower - tol, std::max(0.0, lower - e.value), describe(omega));
    record(tame, e.value <= upper + tol, std::max(0.0, e.value - upper), describe(omega));
    stable.max_error = tame.max_error = std::max(tame.max_error, e.error);

    // Heredity: no energy is infinite for the implemented models.
    record(heredity, std::isfinite(e.value), 0.0, describe(omega));

    // Saturation: homogeneous around T_0, arbitrary elsewhere.
    const int sharp = static_cast<int>(t % 2);
    std::vector<MarkedPoint> hp;
    std::unordered_set<Index, IndexHash> ball;
    for (const auto& o : homogeneous_offsets) ball.insert(o);
    for (const auto& p : gen.poisson(gen.random_intensity()))
      if (!ball.count(tiling.tile_of(p.x))) hp.push_back(p);
    if (sharp == 1) {
      for (const auto& o : homogeneous_offsets) {
        const int k = 1 + static_cast<int>(gen.rng() % 2);
        for (int a = 0; a < k; ++a) {
          MarkedPoint p;
          for (int c = 0; c < d; ++c)
            p.x[c] = o[c] * delta + std::uniform_real_distribution<double>(-0.5 * delta, 0.5 * delta)(gen.rng);
          p.radius = model.mark_law().draw(gen.rng);
          hp.push_back(p);
        }
      }
    }
    Window hw = w;
    for (const auto& p : hp)
      for (int c = 0; c < d; ++c) {
        hw.lo[c] = std::min(hw.lo[c], p.x[c]);
        hw.hi[c] = std::max(hw.hi[c], p.x[c]);
      }
    Configuration homog(hw, hp);
    TileBins hbins(tiling, homog);
    const TileEnergy he = model.tile_energy(hbins, origin);
    const double sat_value = model.saturated_tile_energy(hbins, origin);
    const double sdev = std::abs(he.value - sat_value);
    record(saturation, sdev <= he.error + scale_tol * (1.0 + std::abs(sat_value)), sdev,
           std::string(sharp ? "dense " : "empty ") + describe(homog));
    saturation.max_error = std::max(saturation.max_error, he.error);

    // Translation invariance of H on a sparse configuration.
    std::vector<MarkedPoint> sparse;
    const std::size_t keep = 1 + gen.rng() % 3;
    for (std::size_t a = 0; a < keep; ++a) sparse.push_back(gen.random_point(w));
    Configuration small(w, sparse);
    Vec shift{0.0, 0.0, 0.0};
    for (int c = 0; c < d; ++c) shift[c] = delta * static_cast<double>(static_cast<int>(gen.rng() % 7) - 3);
    const TileEnergy h1 = hamiltonian(model, small);
    const TileEnergy h2 = hamiltonian(model, small.translated(shift));
    const double tdev = std::abs(h1.value - h2.value);
    record(translation, tdev <= h1.error + h2.error + scale_tol * (1.0 + std::abs(h1.value)), tdev, describe(small));
    translation.max_error = std::max({translation.max_error, h1.error, h2.error});
  }

  AssumptionReport rep;
  rep.checks = {nondeg, locality, stable, tame, saturation, translation, heredity};
  for (const auto& c : rep.checks) rep.passed = rep.passed && c.passed;
  return rep;
}

}  // namespace satgibbs
