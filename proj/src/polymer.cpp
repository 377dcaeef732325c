#include "satgibbs/polymer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "satgibbs/errors.hpp"

namespace satgibbs {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t contour_class(const Contour& g) { return g.interior_size(); }

}  // namespace

void LogSumExp::add(double log_term) {
  if (log_term == kNegInf) return;
  if (std::isnan(log_term)) throw NumericalError("NaN term in log-sum");
  if (log_term > max_) {
    const double scale = std::isfinite(max_) ? std::exp(max_ - log_term) : 0.0;
    sum_ *= scale;
    comp_ *= scale;
    max_ = log_term;
  }
  const double y = std::exp(log_term - max_) - comp_;
  const double t = sum_ + y;
  comp_ = (t - sum_) - y;
  sum_ = t;
}

double LogSumExp::value() const {
  if (!std::isfinite(max_)) return kNegInf;
  return max_ + std::log(sum_);
}

double log_zbar(int sharp, double z, double beta, double b0, double delta, int dim) {
  require(sharp == 0 || sharp == 1, "spin must be 0 or 1");
  require(z > 0.0 && std::isfinite(z), "activity must be positive");
  const double x = z * std::pow(delta, dim);
  if (sharp == 0) return -x;
  return -beta * b0 + std::log(-std::expm1(-x));
}

double zbar(int sharp, double z, double beta, double b0, double delta, int dim) {
  return std::exp(log_zbar(sharp, z, beta, b0, delta, dim));
}

SurrogateSystem::SurrogateSystem(std::shared_ptr<const Surrogate> model, double z, double beta)
    : model_(std::move(model)), z_(z), beta_(beta) {
  require(model_ != nullptr, "surrogate model missing");
  require(z > 0.0 && std::isfinite(z), "activity must be positive");
  require(beta >= 0.0 && std::isfinite(beta), "beta must be nonnegative");
  const double x = z * model_->tiling().tile_volume();
  log_mu_[0] = -x;
  log_mu_[1] = std::log(-std::expm1(-x));
}

double SurrogateSystem::log_zbar(int sharp) const {
  return satgibbs::log_zbar(sharp, z_, beta_, b0(), tiling().delta(), tiling().dim());
}

double SurrogateSystem::zbar(int sharp) const { return std::exp(log_zbar(sharp)); }

double surrogate_contour_gap(const Surrogate& model, const Contour& g) {
  const double L = model.saturation().L;
  const auto field = witness_field(g, L, model.tiling());
  const auto minus = boundary_operators(g.support, L, model.tiling()).minus;
  const auto spin = [&](const Index& j) { return field.get(j) != 0; };
  double gap = 0.0;
  for (std::size_t k = 0; k < g.support.size(); ++k) {
    const auto& i = g.support[k];
    if (set_contains(minus, i)) continue;
    gap += model.site_energy(i, spin) - model.b0() * g.spins[k];
  }
  return gap;
}

double log_contour_integral(const SurrogateSystem& sys, const Contour& g) {
  double log_measure = 0.0;
  double spin_sum = 0.0;
  for (std::size_t k = 0; k < g.support.size(); ++k) {
    log_measure += sys.log_occupancy(g.spins[k]);
    spin_sum += g.spins[k];
  }
  const double gap = surrogate_contour_gap(sys.model(), g);
  return log_measure - sys.beta() * (sys.b0() * spin_sum + gap);
}

double log_exact_partition(const SurrogateSystem& sys, const Volume& vol, int sharp, const EnumerationLimits& limits) {
  require(sharp == 0 || sharp == 1, "boundary condition must be 0 or 1");
  const std::size_t n = vol.free.size();
  if (n > limits.max_free_sites)
    throw ValidationError("enumeration cap exceeded: " + std::to_string(n) + " free sites (cap " +
                          std::to_string(limits.max_free_sites) + ")");
  const auto& model = sys.model();
  const auto& box = vol.box;
  const auto& offs = model.table().offsets();

  std::vector<std::int8_t> spins(box.size(), static_cast<std::int8_t>(sharp));
  std::vector<std::size_t> free_flat;
  for (const auto& i : vol.free) free_flat.push_back(box.flat(i));
  std::vector<std::size_t> site_flat;
  for (const auto& i : vol.sites) site_flat.push_back(box.flat(i));

  // Sites with pattern energy and the flat indices of their blocks.
  const auto bulk = set_difference(vol.sites, vol.boundary.boundary);
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& i : bulk) {
    std::vector<std::size_t> b;
    for (const auto& o : offs) {
      const auto j = add(i, o);
      if (!box.contains(j)) throw NumericalError("energy block leaves the enumeration box");
      b.push_back(box.flat(j));
    }
    blocks.push_back(std::move(b));
  }
  std::vector<std::size_t> edge_flat;
  for (const auto& i : vol.boundary.boundary) edge_flat.push_back(box.flat(i));

  const double beta = sys.beta();
  const double b0 = model.b0();
  const double lm0 = sys.log_occupancy(0);
  const double lm1 = sys.log_occupancy(1);
  LogSumExp acc;
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    for (std::size_t k = 0; k < n; ++k) spins[free_flat[k]] = static_cast<std::int8_t>((bits >> k) & 1u);
    std::size_t ones = 0;
    for (auto f : site_flat) ones += spins[f];
    double energy = 0.0;
    for (const auto& b : blocks) {
      std::uint32_t code = 0;
      for (std::size_t k = 0; k < b.size(); ++k)
        if (spins[b[k]]) code |= (1u << k);
      energy += model.table()[code];
    }
    for (auto f : edge_flat) energy += b0 * spins[f];
    const double log_measure =
        static_cast<double>(ones) * lm1 + static_cast<double>(site_flat.size() - ones) * lm0;
    acc.add(log_measure - beta * energy);
  }
  const double result = acc.value();

  // Lower bound from the constant pattern: Z >= exp(-(beta b0 sharp + z delta^d)|Lambda|) ((1 - sharp) + z delta^d sharp)^|Lambda|.
  const double x = sys.z() * sys.tile_volume();
  const double m = static_cast<double>(vol.sites.size());
  const double bound = -(beta * b0 * sharp + x) * m + m * std::log((1.0 - sharp) + x * sharp);
  if (!(result >= bound - 1e-9 * (1.0 + std::abs(bound))))
    throw NumericalError("partition function below its constant-pattern lower bound");
  return result;
}

double exact_partition(const SurrogateSystem& sys, const Volume& vol, int sharp, const EnumerationLimits& limits) {
  return std::exp(log_exact_partition(sys, vol, sharp, limits));
}

const ContourCatalog& PolymerEngine::catalog(const Volume& vol, int sharp) {
  auto key = std::make_tuple(vol.sites, sharp, vol.L, vol.tiling.delta());
  auto it = catalogs_.find(key);
  if (it != catalogs_.end()) return it->second;
  auto cat = enumerate_compatible_sets(vol, sharp, std::numeric_limits<std::size_t>::max(), limits_);
  return catalogs_.emplace(std::move(key), std::move(cat)).first->second;
}

double PolymerEngine::log_partition(const SurrogateSystem& sys, const IndexSet& sites, int sharp) {
  if (sites.empty()) return 0.0;
  auto key = std::make_tuple(sites, sharp, sys.z(), sys.beta(), sys.model_ptr());
  auto it = partitions_.find(key);
  if (it != partitions_.end()) return it->second;
  const auto vol = make_volume(sites, sys.L(), sys.tiling());
  const double value = log_exact_partition(sys, vol, sharp, limits_);
  partitions_.emplace(std::move(key), value);
  return value;
}

double PolymerEngine::log_partition(const SurrogateSystem& sys, const Volume& vol, int sharp) {
  return log_partition(sys, vol.sites, sharp);
}

double PolymerEngine::log_interior_ratio(const SurrogateSystem& sys, const Contour& g, int sharp) {
  const int star = 1 - sharp;
  const auto& inner = g.interior[star];
  if (inner.empty()) return 0.0;
  return log_partition(sys, inner, star) - log_partition(sys, inner, sharp);
}

double PolymerEngine::log_weight(const SurrogateSystem& sys, const Contour& g, int sharp, double damping) {
  require(damping >= 0.0, "damping must be nonnegative");
  if (damping == 0.0) return kNegInf;
  return -static_cast<double>(g.size()) * sys.log_zbar(sharp) + log_contour_integral(sys, g) + std::log(damping) +
         log_interior_ratio(sys, g, sharp);
}

PolymerComparison polymer_development(PolymerEngine& engine, const SurrogateSystem& sys, const Volume& vol,
                                      int sharp) {
  const auto& cat = engine.catalog(vol, sharp);
  std::vector<double> lw;
  lw.reserve(cat.contours.size());
  for (const auto& g : cat.contours) lw.push_back(engine.log_weight(sys, g, sharp));
  LogSumExp acc;
  for (const auto& s : cat.sets) {
    double t = 0.0;
    for (auto k : s) t += lw[k];
    acc.add(t);
  }
  PolymerComparison out;
  out.contours = cat.contours.size();
  out.sets = cat.sets.size();
  out.free_sites = vol.free.size();
  out.log_phi_contour = acc.value();
  out.log_phi_direct =
      engine.log_partition(sys, vol, sharp) - static_cast<double>(vol.sites.size()) * sys.log_zbar(sharp);
  out.phi_contour = std::exp(out.log_phi_contour);
  out.phi_direct = std::exp(out.log_phi_direct);
  out.rel_err = std::abs(std::expm1(out.log_phi_contour - out.log_phi_direct));
  return out;
}

double wall_contribution(const SurrogateSystem& sys, const Volume& vol, int sharp, const EnumerationLimits& limits) {
  const auto& model = sys.model();
  const auto bulk = make_lookup(set_difference(vol.sites, vol.boundary.boundary));
  const double beta = sys.beta();
  LogSumExp acc;
  for_each_pattern(vol, sharp, limits, [&](const SpinField& field, std::uint64_t) {
    const auto ex = extract_contours(field, vol.L, vol.tiling);
    const bool walled = std::any_of(ex.contours.begin(), ex.contours.end(), [](const Contour& g) { return g.wall; });
    if (!walled) return;
    const auto spin = [&](const Index& j) { return field.get(j) != 0; };
    double log_measure = 0.0;
    double energy = 0.0;
    for (const auto& i : vol.sites) {
      const int s = field.get(i);
      log_measure += sys.log_occupancy(s);
      energy += bulk.count(i) ? model.site_energy(i, spin) : model.b0() * s;
    }
    acc.add(log_measure - beta * energy);
  });
  if (acc.empty()) return 0.0;
  return std::exp(acc.value() - static_cast<double>(vol.sites.size()) * sys.log_zbar(sharp));
}

double measured_b_plus(const Surrogate& model, const std::vector<Contour>& contours) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& g : contours) best = std::min(best, surrogate_contour_gap(model, g) / static_cast<double>(g.size()));
  return best;
}

TauReport tau_stability_scan(PolymerEngine& engine, const SurrogateSystem& sys, const std::vector<Contour>& contours,
                             int sharp, double tau, double b_plus) {
  TauReport rep;
  rep.tau = tau;
  rep.b_plus = b_plus;
  rep.contours = contours.size();
  if (tau <= 0.0) {
    rep.vacuous = true;
    rep.message = "tau nonpositive; stability bound vacuous";
  }
  const int dim = sys.tiling().dim();
  const double h = 1e-5 * sys.z();
  const auto up = sys.with_activity(sys.z() + h);
  const auto down = sys.with_activity(sys.z() - h);
  for (const auto& g : contours) {
    const double size = static_cast<double>(g.size());
    const double lw = engine.log_weight(sys, g, sharp);
    const double wr = std::exp(lw + tau * size);
    rep.worst_weight_ratio = std::max(rep.worst_weight_ratio, wr);
    if (!rep.vacuous && wr > 1.0 + 1e-12) ++rep.weight_violations;

    double log_bound = -sys.beta() * b_plus * size;
    for (int s : g.spins) log_bound += sys.log_zbar(s);
    const double ir = std::exp(log_contour_integral(sys, g) - log_bound);
    rep.worst_integral_ratio = std::max(rep.worst_integral_ratio, ir);
    if (ir > 1.0 + 1e-12) ++rep.integral_violations;

    if (dim >= 2) {
      const double dw = (std::exp(engine.log_weight(up, g, sharp)) - std::exp(engine.log_weight(down, g, sharp))) / (2 * h);
      const double shape = std::pow(size, static_cast<double>(dim) / (dim - 1)) * std::exp(-tau * size);
      rep.worst_derivative_ratio = std::max(rep.worst_derivative_ratio, std::abs(dw) / shape);
    }
  }
  if (rep.message.empty())
    rep.message = (rep.weight_violations + rep.integral_violations) == 0 ? "ok" : "bound violated";
  return rep;
}

double CutOff::operator()(double s) const {
  if (s <= lo) return 1.0;
  if (s >= hi) return 0.0;
  const double t = (s - lo) / (hi - lo);
  return 1.0 - t * t * (3.0 - 2.0 * t);
}

CutOff cutoff_from_b_plus(double beta, double b_plus) {
  if (!(beta * b_plus > 0.0)) throw NumericalError("cut-off needs beta * b_plus > 0");
  return CutOff{beta * b_plus / 8.0, beta * b_plus / 4.0};
}

TruncationState truncated_pressures(PolymerEngine& engine, const SurrogateSystem& sys, int max_rank,
                                    const std::vector<Volume>& ladder, double b_plus_override) {
  require(max_rank >= 0, "rank must be nonnegative");
  require(!ladder.empty(), "box ladder must be nonempty");
  const int dim = sys.tiling().dim();
  const double vol_tile = sys.tile_volume();

  TruncationState st;
  st.max_rank = max_rank;
  RankPressure r0;
  for (int s = 0; s < 2; ++s) {
    r0.psi[s] = sys.log_zbar(s) / vol_tile;
    r0.per_box[s].assign(ladder.size(), r0.psi[s]);
  }
  st.ranks.push_back(r0);

  bool nested = false;
  std::vector<Contour> all;
  if (max_rank >= 1)
    for (const auto& v : ladder)
      for (int s = 0; s < 2; ++s)
        for (const auto& g : engine.catalog(v, s).contours) {
          all.push_back(g);
          if (contour_class(g) > 0) nested = true;
        }
  st.b_plus = b_plus_override > 0.0 ? b_plus_override : (all.empty() ? 0.0 : measured_b_plus(sys.model(), all));
  if (nested) {
    st.kappa = cutoff_from_b_plus(sys.beta(), st.b_plus);
    st.kappa_slope = st.kappa.max_slope();
  }

  for (int k = 1; k <= max_rank; ++k) {
    RankPressure cur;
    for (int s = 0; s < 2; ++s) {
      const int star = 1 - s;
      cur.per_box[s].resize(ladder.size());
      for (std::size_t b = 0; b < ladder.size(); ++b) {
        const auto& v = ladder[b];
        const auto& cat = engine.catalog(v, s);
        std::vector<double> lw(cat.contours.size(), kNegInf);
        std::vector<std::uint8_t> allowed(cat.contours.size(), 0);
        for (std::size_t c = 0; c < cat.contours.size(); ++c) {
          const auto& g = cat.contours[c];
          const std::size_t cls = contour_class(g);
          if (cls > static_cast<std::size_t>(k)) continue;
          allowed[c] = 1;
          double damping = 1.0;
          if (cls > 0) {
            const auto& p = st.ranks[cls - 1];
            const double arg = (p.psi[star] - p.psi[s]) * vol_tile *
                               std::pow(static_cast<double>(g.interior[star].size()), 1.0 / dim);
            damping = st.kappa(arg);
            if (damping < 1.0) ++st.damped_weights;
          }
          lw[c] = engine.log_weight(sys, g, s, damping);
        }
        LogSumExp acc;
        for (const auto& set : cat.sets) {
          double t = 0.0;
          bool ok = true;
          for (auto c : set) {
            if (!allowed[c]) {
              ok = false;
              break;
            }
            t += lw[c];
          }
          if (ok) acc.add(t);
        }
        const double m = static_cast<double>(v.sites.size());
        cur.per_box[s][b] = (m * sys.log_zbar(s) + acc.value()) / (vol_tile * m);
      }
      const auto [lo, hi] = std::minmax_element(cur.per_box[s].begin(), cur.per_box[s].end());
      cur.psi[s] = *hi;
      cur.spread[s] = *hi - *lo;
    }
    st.ranks.push_back(std::move(cur));
  }
  for (auto& r : st.ranks) {
    const double top = std::max(r.psi[0], r.psi[1]);
    for (int s = 0; s < 2; ++s) r.a[s] = top - r.psi[s];
  }
  return st;
}

double truncated_g(PolymerEngine& engine, const SurrogateSystem& sys, int rank, const std::vector<Volume>& ladder,
                   double b_plus_override) {
  const auto st = truncated_pressures(engine, sys, rank, ladder, b_plus_override);
  return st.ranks[rank].psi[1] - st.ranks[rank].psi[0];
}

CriticalBracket bracket_critical_activity(PolymerEngine& engine, const SystemBuilder& build, double z_lo, double z_hi,
                                          int rank, double tol, const std::vector<Volume>& ladder,
                                          double b_plus_override) {
  require(0.0 < z_lo && z_lo < z_hi, "activity window must satisfy 0 < lo < hi");
  require(tol > 0.0, "tolerance must be positive");
  CriticalBracket br;
  br.rank = rank;
  const auto eval = [&](double z) {
    const double g = truncated_g(engine, build(z), rank, ladder, b_plus_override);
    br.evaluations.emplace_back(z, g);
    return g;
  };
  br.lo = z_lo;
  br.hi = z_hi;
  br.g_lo = eval(z_lo);
  br.g_hi = eval(z_hi);
  if (!(br.g_lo < 0.0 && br.g_hi > 0.0))
    throw NumericalError("truncated pressure difference has no sign change on the activity window");
  while (br.hi - br.lo > tol) {
    const double mid = br.mid();
    const double g = eval(mid);
    if (g < 0.0) {
      br.lo = mid;
      br.g_lo = g;
    } else {
      br.hi = mid;
      br.g_hi = g;
    }
  }
  return br;
}

DensityEstimate density_from_pressure(PolymerEngine& engine, const SystemBuilder& build, int sharp, double z,
                                      double step, int rank, const std::vector<Volume>& ladder,
                                      double b_plus_override) {
  require(sharp == 0 || sharp == 1, "phase must be 0 or 1");
  require(step > 0.0 && step < z, "finite-difference step must lie in (0, z)");
  const auto at = [&](double zz) {
    return truncated_pressures(engine, build(zz), rank, ladder, b_plus_override).ranks[rank].per_box[sharp];
  };
  const auto centre = at(z);
  DensityEstimate out;
  out.box = static_cast<std::size_t>(std::max_element(centre.begin(), centre.end()) - centre.begin());
  const auto diff = [&](double h) { return (at(z + h)[out.box] - at(z - h)[out.box]) / (2.0 * h); };
  const double rho_h = z + z * diff(step);
  out.rho_half_step = z + z * diff(0.5 * step);
  out.richardson_gap = std::abs(out.rho_half_step - rho_h);
  out.rho = (4.0 * out.rho_half_step - rho_h) / 3.0;
  return out;
}

std::vector<Volume> box_ladder(int dim, const std::vector<int>& sides, double L, const Tiling& tiling) {
  std::vector<Volume> out;
  for (int s : sides) {
    require(s >= 1, "box side must be positive");
    out.push_back(make_volume(box_sites(dim, 0, s - 1), L, tiling));
  }
  return out;
}

}  // namespace satgibbs
