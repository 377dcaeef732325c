#include "satgibbs/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "satgibbs/contours.hpp"
#include "satgibbs/errors.hpp"
#include "satgibbs/parallel.hpp"

namespace satgibbs {

namespace {

constexpr std::uint8_t kBoundary = 1;
constexpr std::uint8_t kInner = 2;

}  // namespace

double MoveStats::rate(MoveKind k) const {
  const auto i = static_cast<std::size_t>(k);
  return proposed[i] ? static_cast<double>(accepted[i]) / static_cast<double>(proposed[i]) : 0.0;
}

ChainState::ChainState(ModelPtr model, IndexSet lambda, int sharp, double z, double beta, std::uint64_t seed,
                       SamplerOptions options, std::optional<Configuration> initial)
    : model_(std::move(model)),
      lambda_(make_set(std::move(lambda))),
      sharp_(sharp),
      z_(z),
      beta_(beta),
      options_(options),
      rng_(make_rng(seed, 0x5a3b)),
      bins_(model_ ? model_->tiling() : Tiling(1, 1.0)) {
  require(model_ != nullptr, "sampler needs a model");
  require(!lambda_.empty(), "sampler volume must be nonempty");
  require(sharp == 0 || sharp == 1, "boundary condition must be 0 or 1");
  require(z > 0.0 && std::isfinite(z), "activity must be positive");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be nonnegative");
  require(options_.p_birth >= 0.0 && options_.p_death >= 0.0 && options_.p_birth + options_.p_death <= 1.0,
          "move probabilities must be a sub-probability");
  const auto& tiling = model_->tiling();
  if (options_.jitter < 0.0) options_.jitter = 0.5 * tiling.delta();
  boundary_ = boundary_operators(lambda_, model_->saturation().L, tiling);

  box_ = bounding_box(tiling.dim(), lambda_);
  slot_of_.assign(box_.size(), -1);
  kind_.assign(lambda_.size(), 0);
  for (std::size_t s = 0; s < lambda_.size(); ++s) slot_of_[box_.flat(lambda_[s])] = static_cast<int>(s);
  for (const auto& i : boundary_.boundary) kind_[slot_of_[box_.flat(i)]] |= kBoundary;
  for (const auto& i : boundary_.inner) kind_[slot_of_[box_.flat(i)]] |= kInner;
  for (std::size_t s = 0; s < lambda_.size(); ++s)
    if (sharp_ == 1 || !(kind_[s] & kInner)) birth_slots_.push_back(s);

  if (initial) {
    for (const auto& p : initial->points()) {
      const auto t = tiling.tile_of(p.x);
      require(box_.contains(t) && slot_of_[box_.flat(t)] >= 0, "initial point lies outside the volume");
      model_->validate_point(p);
      insert_point(p);
    }
  } else if (sharp_ == 1) {
    for (const auto& i : lambda_) {
      MarkedPoint p;
      const auto c = tiling.center(i);
      for (int a = 0; a < tiling.dim(); ++a) p.x[a] = c[a] + tiling.delta() * (uniform01(rng_) - 0.5) * 0.999;
      p.radius = model_->mark_law().draw(rng_);
      insert_point(p);
    }
  }
  require(boundary_holds(), "initial configuration violates the boundary condition");
  cache_.assign(lambda_.size(), 0.0);
  energy_ = 0.0;
  for (std::size_t s = 0; s < lambda_.size(); ++s) {
    cache_[s] = local_energy(lambda_[s]);
    energy_ += cache_[s];
  }
}

Window ChainState::window() const {
  const double d = model_->tiling().delta();
  Window w;
  w.dim = model_->dim();
  for (int a = 0; a < w.dim; ++a) {
    w.lo[a] = (box_.lo[a] - 0.5) * d;
    w.hi[a] = (box_.hi[a] + 0.5) * d;
  }
  return w;
}

Configuration ChainState::configuration() const { return Configuration(window(), points_); }

double ChainState::local_energy(const Index& i) const {
  const int s = slot_of_[box_.flat(i)];
  if (kind_[s] & kBoundary) return model_->saturated_tile_energy(bins_, i);
  return model_->tile_energy(bins_, i).value;
}

double ChainState::tile_energy_at(const Index& i) const {
  require(box_.contains(i) && slot_of_[box_.flat(i)] >= 0, "tile outside the volume");
  return cache_[slot_of_[box_.flat(i)]];
}

bool ChainState::boundary_holds() const {
  for (const auto& i : boundary_.inner) {
    const bool occupied = bins_.count(i) > 0;
    if (occupied != (sharp_ == 1)) return false;
  }
  return true;
}

double ChainState::log_density() const {
  if (!boundary_holds()) return -std::numeric_limits<double>::infinity();
  return -beta_ * energy_;
}

std::vector<std::size_t> ChainState::affected(const Index& tile) const {
  const int reach = model_->reach();
  const int d = model_->dim();
  std::vector<std::size_t> out;
  for (int a = -reach; a <= reach; ++a)
    for (int b = (d > 1 ? -reach : 0); b <= (d > 1 ? reach : 0); ++b)
      for (int c = (d > 2 ? -reach : 0); c <= (d > 2 ? reach : 0); ++c) {
        const Index j{tile[0] + a, tile[1] + b, tile[2] + c};
        if (!box_.contains(j)) continue;
        const int s = slot_of_[box_.flat(j)];
        if (s >= 0) out.push_back(static_cast<std::size_t>(s));
      }
  return out;
}

double ChainState::delta_energy(const std::vector<std::size_t>& slots, std::vector<double>& fresh) const {
  fresh.resize(slots.size());
  double delta = 0.0;
  for (std::size_t k = 0; k < slots.size(); ++k) {
    fresh[k] = local_energy(lambda_[slots[k]]);
    delta += fresh[k] - cache_[slots[k]];
  }
  return delta;
}

void ChainState::commit(const std::vector<std::size_t>& slots, const std::vector<double>& fresh) {
  for (std::size_t k = 0; k < slots.size(); ++k) {
    energy_ += fresh[k] - cache_[slots[k]];
    cache_[slots[k]] = fresh[k];
  }
}

void ChainState::insert_point(const MarkedPoint& p) {
  bins_.insert(p);
  points_.push_back(p);
}

void ChainState::remove_point(std::size_t m) {
  const auto p = points_[m];
  const auto tile = model_->tiling().tile_of(p.x);
  const auto* in = bins_.points_in(tile);
  if (in == nullptr) throw NumericalError("sampler bins out of sync");
  std::size_t k = 0;
  while (k < in->size() && (*in)[k].x != p.x) ++k;
  if (k == in->size()) throw NumericalError("sampler bins out of sync");
  bins_.erase(tile, k);
  points_[m] = points_.back();
  points_.pop_back();
}

void ChainState::step() {
  ++steps_;
  const auto& tiling = model_->tiling();
  const double vol = tiling.tile_volume();
  const double birth_volume = static_cast<double>(birth_slots_.size()) * vol;
  const double u = uniform01(rng_);
  std::vector<double> fresh;

  if (u < options_.p_birth) {
    ++stats_.proposed[0];
    if (birth_slots_.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, birth_slots_.size() - 1);
    const auto& tile = lambda_[birth_slots_[pick(rng_)]];
    if (options_.max_per_tile && bins_.count(tile) >= options_.max_per_tile) return;
    MarkedPoint p;
    const auto c = tiling.center(tile);
    do {
      for (int a = 0; a < tiling.dim(); ++a) p.x[a] = c[a] + tiling.delta() * (uniform01(rng_) - 0.5);
    } while (!(tiling.tile_of(p.x) == tile));
    p.radius = model_->mark_law().draw(rng_);
    insert_point(p);
    const auto slots = affected(tile);
    const double dE = delta_energy(slots, fresh);
    const double log_acc = -beta_ * dE + std::log(z_ * birth_volume / static_cast<double>(points_.size()));
    if (std::log(uniform01(rng_)) < log_acc) {
      commit(slots, fresh);
      ++stats_.accepted[0];
    } else {
      remove_point(points_.size() - 1);
    }
    return;
  }

  if (u < options_.p_birth + options_.p_death) {
    ++stats_.proposed[1];
    if (points_.empty()) return;
    std::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
    const std::size_t m = pick(rng_);
    const auto p = points_[m];
    const auto tile = tiling.tile_of(p.x);
    const int s = slot_of_[box_.flat(tile)];
    if (sharp_ == 1 && (kind_[s] & kInner) && bins_.count(tile) == 1) return;
    const double n_before = static_cast<double>(points_.size());
    remove_point(m);
    const auto slots = affected(tile);
    const double dE = delta_energy(slots, fresh);
    const double log_acc = -beta_ * dE + std::log(n_before / (z_ * birth_volume));
    if (std::log(uniform01(rng_)) < log_acc) {
      commit(slots, fresh);
      ++stats_.accepted[1];
    } else {
      insert_point(p);
    }
    return;
  }

  ++stats_.proposed[2];
  if (points_.empty()) return;
  std::uniform_int_distribution<std::size_t> pick(0, points_.size() - 1);
  const std::size_t m = pick(rng_);
  const auto p = points_[m];
  std::normal_distribution<double> jitter(0.0, options_.jitter);
  MarkedPoint q = p;
  for (int a = 0; a < tiling.dim(); ++a) q.x[a] += jitter(rng_);
  const auto from = tiling.tile_of(p.x);
  const auto to = tiling.tile_of(q.x);
  if (!box_.contains(to) || slot_of_[box_.flat(to)] < 0) return;
  const int s_from = slot_of_[box_.flat(from)];
  const int s_to = slot_of_[box_.flat(to)];
  if (!(from == to)) {
    if (sharp_ == 0 && (kind_[s_to] & kInner)) return;
    if (sharp_ == 1 && (kind_[s_from] & kInner) && bins_.count(from) == 1) return;
    if (options_.max_per_tile && bins_.count(to) >= options_.max_per_tile) return;
  }
  remove_point(m);
  insert_point(q);
  auto slots = affected(from);
  if (!(from == to)) {
    for (auto s : affected(to)) slots.push_back(s);
    std::sort(slots.begin(), slots.end());
    slots.erase(std::unique(slots.begin(), slots.end()), slots.end());
  }
  const double dE = delta_energy(slots, fresh);
  if (std::log(uniform01(rng_)) < -beta_ * dE) {
    commit(slots, fresh);
    ++stats_.accepted[2];
  } else {
    remove_point(points_.size() - 1);
    insert_point(p);
  }
}

void ChainState::check_cache() {
  double total = 0.0;
  for (std::size_t s = 0; s < lambda_.size(); ++s) {
    const double e = local_energy(lambda_[s]);
    if (std::abs(e - cache_[s]) > options_.cache_tol * (1.0 + std::abs(e))) {
      char buf[256];
      std::snprintf(buf, sizeof buf, "energy cache diverged at step %llu: cached %.17g, recomputed %.17g",
                    static_cast<unsigned long long>(steps_), cache_[s], e);
      throw NumericalError(buf);
    }
    cache_[s] = e;
    total += e;
  }
  energy_ = total;
}

double target_logdensity(const ChainState& state, const Configuration& config) {
  const auto& model = state.model();
  const auto& tiling = model.tiling();
  const auto lookup = make_lookup(state.lambda());
  for (const auto& p : config.points())
    require(lookup.count(tiling.tile_of(p.x)) > 0, "configuration must lie in the volume's tiles");
  TileBins bins(tiling, config);
  for (const auto& i : state.boundary().inner)
    if ((bins.count(i) > 0) != (state.sharp() == 1)) return -std::numeric_limits<double>::infinity();
  const auto edge = make_lookup(state.boundary().boundary);
  double energy = 0.0;
  for (const auto& i : state.lambda())
    energy += edge.count(i) ? model.saturated_tile_energy(bins, i) : model.tile_energy(bins, i).value;
  return -state.beta() * energy;
}

Trace run_chain(ChainState& state, std::uint64_t n_steps, std::uint64_t thin, const std::optional<IndexSet>& measured) {
  require(thin >= 1, "thinning interval must be >= 1");
  IndexSet meas = measured ? make_set(*measured) : set_difference(state.lambda(), state.boundary().inner);
  if (meas.empty()) meas = state.lambda();
  const double meas_volume = static_cast<double>(meas.size()) * state.model().tiling().tile_volume();
  const auto& tiling = state.model().tiling();
  const double L = state.model().saturation().L;
  const IndexBox field_box = bounding_box(tiling.dim(), state.lambda()).grown(varying_margin(L, tiling));

  Trace trace;
  const auto start = state.stats();
  for (std::uint64_t k = 1; k <= n_steps; ++k) {
    state.step();
    const auto every = state.options().check_every;
    if (every && state.steps() % every == 0) state.check_cache();
    if (k % thin != 0) continue;
    if (!state.boundary_holds()) throw NumericalError("boundary condition violated during sampling");
    TraceRow row;
    row.step = state.steps();
    row.n = state.count();
    std::size_t n_meas = 0, occupied = 0;
    for (const auto& i : meas) {
      const auto c = state.tile_count(i);
      n_meas += c;
      occupied += c > 0;
    }
    row.rho = static_cast<double>(n_meas) / meas_volume;
    row.occupied_frac = static_cast<double>(occupied) / static_cast<double>(meas.size());
    if (state.options().record_contours) {
      SpinField field(field_box, state.sharp());
      for (const auto& i : state.lambda()) field.set(i, state.tile_count(i) > 0 ? 1 : 0);
      row.n_contours = static_cast<long>(extract_contours(field, L, tiling).contours.size());
    }
    trace.rows.push_back(row);
  }
  for (int m = 0; m < 3; ++m) {
    trace.stats.proposed[m] = state.stats().proposed[m] - start.proposed[m];
    trace.stats.accepted[m] = state.stats().accepted[m] - start.accepted[m];
  }
  return trace;
}

BatchMeans batch_means(const std::vector<double>& xs, std::size_t batches) {
  BatchMeans out;
  if (xs.empty()) return out;
  double s = 0.0;
  for (double x : xs) s += x;
  out.mean = s / static_cast<double>(xs.size());
  std::size_t b = std::min(batches, xs.size() / 2);
  if (b < 2) {
    out.std_error = std::numeric_limits<double>::infinity();
    return out;
  }
  const std::size_t size = xs.size() / b;
  std::vector<double> means(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    for (std::size_t j = 0; j < size; ++j) means[k] += xs[k * size + j];
    means[k] /= static_cast<double>(size);
  }
  double m = 0.0;
  for (double x : means) m += x;
  m /= static_cast<double>(b);
  double v = 0.0;
  for (double x : means) v += (x - m) * (x - m);
  v /= static_cast<double>(b - 1);
  out.std_error = std::sqrt(v / static_cast<double>(b));
  return out;
}

std::vector<ScanRow> hysteresis_scan(ModelPtr model, const IndexSet& lambda, double beta,
                                     const std::vector<double>& z_grid, const ScanOptions& options,
                                     std::uint64_t seed, const std::optional<IndexSet>& measured) {
  require(!z_grid.empty(), "z grid must be nonempty");
  require(options.replicas >= 1, "scan needs at least one replica");
  require(options.burn_in >= 0.0 && options.burn_in < 1.0, "burn-in fraction must lie in [0, 1)");
  const std::size_t tasks = z_grid.size() * 2 * options.replicas;
  struct Result {
    BatchMeans rho;
    double occ = 0.0;
  };
  std::vector<Result> results(tasks);
  parallel_for(tasks, [&](std::size_t t) {
    const std::size_t zi = t / (2 * options.replicas);
    const int sharp = static_cast<int>((t / options.replicas) % 2);
    ChainState state(model, lambda, sharp, z_grid[zi], beta, splitmix64(seed + 0x51ed27 * (t + 1)), options.sampler);
    const auto trace = run_chain(state, options.steps, options.thin, measured);
    const std::size_t skip = static_cast<std::size_t>(options.burn_in * static_cast<double>(trace.rows.size()));
    std::vector<double> rho;
    double occ = 0.0;
    for (std::size_t k = skip; k < trace.rows.size(); ++k) {
      rho.push_back(trace.rows[k].rho);
      occ += trace.rows[k].occupied_frac;
    }
    results[t].rho = batch_means(rho, options.batches);
    results[t].occ = rho.empty() ? 0.0 : occ / static_cast<double>(rho.size());
  });
  std::vector<ScanRow> rows;
  for (std::size_t zi = 0; zi < z_grid.size(); ++zi)
    for (int sharp = 0; sharp < 2; ++sharp) {
      ScanRow row;
      row.z = z_grid[zi];
      row.sharp = sharp;
      double var = 0.0;
      for (std::size_t r = 0; r < options.replicas; ++r) {
        const auto& res = results[(zi * 2 + sharp) * options.replicas + r];
        row.rho_mean += res.rho.mean;
        row.occ_mean += res.occ;
        var += res.rho.std_error * res.rho.std_error;
      }
      const double R = static_cast<double>(options.replicas);
      row.rho_mean /= R;
      row.occ_mean /= R;
      row.rho_se = std::sqrt(var) / R;
      rows.push_back(row);
    }
  std::sort(rows.begin(), rows.end(), [](const ScanRow& a, const ScanRow& b) {
    return a.z != b.z ? a.z < b.z : a.sharp < b.sharp;
  });
  return rows;
}

std::string scan_csv(const std::vector<ScanRow>& rows) {
  std::string out = "z,sharp,rho_mean,rho_se,occ_mean\n";
  char buf[160];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.12g,%d,%.12g,%.12g,%.12g\n", r.z, r.sharp, r.rho_mean, r.rho_se, r.occ_mean);
    out += buf;
  }
  return out;
}

std::string trace_csv(const Trace& trace) {
  std::string out = "step,N,rho,occupied_frac,n_contours\n";
  char buf[160];
  for (const auto& r : trace.rows) {
    std::snprintf(buf, sizeof buf, "%llu,%zu,%.12g,%.12g,%ld\n", static_cast<unsigned long long>(r.step), r.n, r.rho,
                  r.occupied_frac, r.n_contours);
    out += buf;
  }
  return out;
}

}  // namespace satgibbs
