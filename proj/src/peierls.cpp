#include "satgibbs/peierls.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "satgibbs/errors.hpp"
#include "satgibbs/parallel.hpp"
#include "satgibbs/rng.hpp"

namespace satgibbs {

std::string to_string(GapVariant v) { return v == GapVariant::full ? "full" : "minus_inner_boundary"; }

ContourExtraction configuration_contours(const TileEnergyModel& model, const Configuration& config) {
  if (config.empty()) return {};
  const auto& tiling = model.tiling();
  std::vector<Index> occupied;
  occupied.reserve(config.size());
  for (const auto& p : config.points()) occupied.push_back(tiling.tile_of(p.x));
  const auto box = bounding_box(tiling.dim(), occupied).grown(varying_margin(model.saturation().L, tiling));
  SpinField field(box, 0);
  for (const auto& i : occupied) field.set(i, 1);
  return extract_contours(field, model.saturation().L, tiling);
}

namespace {

GapValue gap_on(const TileEnergyModel& model, const TileBins& bins, const Contour& g, GapVariant variant) {
  IndexSet sites = g.support;
  if (variant == GapVariant::minus_inner_boundary)
    sites = set_difference(sites, boundary_operators(g.support, model.saturation().L, model.tiling()).minus);
  GapValue out;
  for (const auto& i : sites) {
    const auto e = model.tile_energy(bins, i);
    out.value += e.value - model.saturated_tile_energy(bins, i);
    out.error += e.error;
  }
  return out;
}

}  // namespace

GapValue peierls_gap(const TileEnergyModel& model, const Configuration& config, const Contour& g, GapVariant variant) {
  const auto ex = configuration_contours(model, config);
  if (std::find(ex.contours.begin(), ex.contours.end(), g) == ex.contours.end())
    throw ValidationError("contour not achieved");
  TileBins bins(model.tiling(), config);
  return gap_on(model, bins, g, variant);
}

PeierlsReport estimate_b_plus(const TileEnergyModel& model, const std::vector<Configuration>& corpus,
                              GapVariant variant) {
  require(!corpus.empty(), "Peierls corpus must be nonempty");
  std::vector<std::vector<GapRecord>> per(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t c) {
    const auto ex = configuration_contours(model, corpus[c]);
    TileBins bins(model.tiling(), corpus[c]);
    for (const auto& g : ex.contours) {
      const auto gap = gap_on(model, bins, g, variant);
      per[c].push_back({c, g.size(), gap.value, gap.error, gap.value / static_cast<double>(g.size())});
    }
  });
  PeierlsReport rep;
  rep.model = to_string(model.kind());
  rep.variant = variant;
  rep.configs = corpus.size();
  for (auto& v : per) rep.records.insert(rep.records.end(), v.begin(), v.end());
  if (rep.records.empty()) throw ValidationError("Peierls corpus produced no contours");
  rep.b_plus = std::numeric_limits<double>::infinity();
  rep.b_plus_certified = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < rep.records.size(); ++k) {
    const auto& r = rep.records[k];
    if (r.ratio < rep.b_plus) {
      rep.b_plus = r.ratio;
      rep.witness = k;
    }
    rep.b_plus_certified = std::min(rep.b_plus_certified, (r.gap - r.error) / static_cast<double>(r.size));
  }
  rep.pass = rep.b_plus > 0.0;
  return rep;
}

namespace {

Window tile_window(const Tiling& tiling, int side) {
  const double d = tiling.delta();
  return cube_window(tiling.dim(), -0.5 * d, (side - 0.5) * d);
}

void fill_tile(const TileEnergyModel& model, const Index& i, int points, Rng& rng, std::vector<MarkedPoint>& out) {
  const auto c = model.tiling().center(i);
  const double d = model.tiling().delta();
  for (int k = 0; k < points; ++k) {
    MarkedPoint p;
    for (int a = 0; a < model.dim(); ++a) p.x[a] = c[a] + d * (uniform01(rng) - 0.5) * 0.999;
    p.radius = model.mark_law().draw(rng);
    out.push_back(p);
  }
}

}  // namespace

std::vector<Configuration> peierls_corpus(const TileEnergyModel& model, std::size_t count, int side_tiles,
                                          std::uint64_t seed) {
  require(side_tiles >= 4, "corpus window needs at least 4 tiles per side");
  const auto& tiling = model.tiling();
  const auto window = tile_window(tiling, side_tiles);
  const auto sites = cube_box(tiling.dim(), 0, side_tiles - 1).sites();
  const int mid = side_tiles / 2;
  const int dim = tiling.dim();
  const Index centre{mid, dim > 1 ? mid : 0, dim > 2 ? mid : 0};
  Rng rng = make_rng(seed, 0xc0a9);

  std::vector<std::function<bool(const Index&)>> shapes;
  shapes.push_back([=](const Index& i) { return i == centre; });
  shapes.push_back([=](const Index& i) { return !(i == centre); });
  shapes.push_back([=](const Index& i) { return i[0] < mid; });
  shapes.push_back([=](const Index& i) {
    int parity = 0;
    bool inside = true;
    for (int a = 0; a < dim; ++a) {
      parity += i[a];
      inside = inside && std::abs(i[a] - mid) <= side_tiles / 4;
    }
    return inside && parity % 2 == 0;
  });

  std::vector<Configuration> out;
  for (const auto& shape : shapes) {
    if (out.size() >= count) break;
    std::vector<MarkedPoint> pts;
    for (const auto& i : sites)
      if (shape(i)) fill_tile(model, i, 1, rng, pts);
    out.emplace_back(window, std::move(pts));
  }
  while (out.size() < count) {
    const double p = 0.15 + 0.7 * uniform01(rng);
    std::vector<MarkedPoint> pts;
    for (const auto& i : sites)
      if (uniform01(rng) < p) fill_tile(model, i, 1 + (uniform01(rng) < 0.3 ? 1 : 0), rng, pts);
    if (pts.empty()) continue;
    out.emplace_back(window, std::move(pts));
  }
  return out;
}

double domino_ratio(const Contour& g) { return static_cast<double>(dominoes(g).size()) / static_cast<double>(g.size()); }

double min_domino_ratio(int dim, int side, std::size_t fields, double L, const Tiling& tiling, std::uint64_t seed) {
  require(side >= 1 && fields >= 1, "domino scan needs fields");
  const int margin = varying_margin(L, tiling);
  const auto box = cube_box(dim, -margin, side - 1 + margin);
  const auto inner = cube_box(dim, 0, side - 1).sites();
  std::vector<double> best(fields, std::numeric_limits<double>::infinity());
  parallel_for(fields, [&](std::size_t f) {
    Rng rng = make_rng(seed, f);
    const double p = 0.2 + 0.6 * uniform01(rng);
    SpinField field(box, 0);
    for (const auto& i : inner) field.set(i, uniform01(rng) < p ? 1 : 0);
    for (const auto& g : extract_contours(field, L, tiling).contours) best[f] = std::min(best[f], domino_ratio(g));
  });
  return *std::min_element(best.begin(), best.end());
}

double cd_constant(int dim) {
  require(dim >= 2, "C_d is defined for d >= 2 only");
  using boost::math::quadrature::gauss_kronrod;
  const auto f = [dim](double t) { return std::pow(std::sin(t), dim - 2); };
  double err = 0.0;
  const double top = gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi / 3.0, 15, 1e-14, &err);
  const double bottom = gauss_kronrod<double, 61>::integrate(f, 0.0, std::numbers::pi, 15, 1e-14, &err);
  return top / bottom;
}

bool sector_contains(const Vec& z, const Vec& x, double R, const Vec& y, int dim) {
  double dy = 0.0, dx = 0.0, dot = 0.0;
  for (int a = 0; a < dim; ++a) {
    const double u = y[a] - z[a];
    const double v = x[a] - z[a];
    dy += u * u;
    dx += v * v;
    dot += u * v;
  }
  require(dx > 0.0, "sector axis needs x != z");
  if (dy > R * R) return false;
  if (dy == 0.0) return true;
  return dot >= 0.5 * std::sqrt(dy * dx);
}

ConditionCheck diluted_condition_check(const PotentialProfile& profile) {
  profile.validate(false);
  const int d = profile.dim;
  ConditionCheck c;
  c.core_term = cd_constant(d) * profile.positive_inside_R();
  const double r1 = profile.R1();
  c.shell_term = r1 > profile.R ? (std::pow(r1 / profile.R, d) - 1.0) * profile.positive_shell() : 0.0;
  c.negative_term = profile.negative_total();
  c.margin = c.core_term - c.shell_term - c.negative_term;
  c.pass = c.margin > 0.0;
  return c;
}

namespace {

McEstimate cube_integral(const std::function<double(double)>& radial, int d, double half, std::size_t n, Rng& rng) {
  const double vol = std::pow(2.0 * half, d);
  double s = 0.0, s2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double u = (2.0 * uniform01(rng) - 1.0) * half;
      r2 += u * u;
    }
    const double v = vol * radial(std::sqrt(r2));
    s += v;
    s2 += v * v;
  }
  const double mean = s / static_cast<double>(n);
  const double var = std::max(0.0, s2 / static_cast<double>(n) - mean * mean);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

}  // namespace

ConditionMc diluted_condition_mc(const PotentialProfile& profile, std::size_t samples, std::uint64_t seed) {
  profile.validate(false);
  require(samples >= 2, "MC check needs samples");
  const int d = profile.dim;
  const auto& phi = profile.phi;
  const double R = profile.R;
  const double r1 = profile.R1();
  const double r2 = profile.R2();
  Rng rng = make_rng(seed, 0xd11);
  ConditionMc mc;
  mc.core = cube_integral([&](double r) { return r <= R ? std::max(phi(r), 0.0) : 0.0; }, d, std::min(R, r2), samples, rng);
  const double factor = r1 > R ? std::pow(r1 / R, d) - 1.0 : 0.0;
  if (factor > 0.0)
    mc.shell = cube_integral([&](double r) { return (r > R && r <= r1) ? std::max(phi(r), 0.0) : 0.0; }, d, r1,
                             samples, rng);
  mc.negative = cube_integral([&](double r) { return r <= r2 ? std::max(-phi(r), 0.0) : 0.0; }, d, r2, samples, rng);
  const double cd = cd_constant(d);
  mc.margin.mean = cd * mc.core.mean - factor * mc.shell.mean - mc.negative.mean;
  mc.margin.std_error = std::sqrt(cd * cd * mc.core.std_error * mc.core.std_error +
                               factor * factor * mc.shell.std_error * mc.shell.std_error +
                               mc.negative.std_error * mc.negative.std_error);
  return mc;
}

double theta_epsilon(double eps, double R1, int dim) {
  require(eps > 0.0 && eps < R1, "theta_epsilon needs 0 < eps < R1");
  const double e = std::pow(eps, dim);
  return e / (std::pow(R1, dim) - e);
}

double halo_depth(const std::vector<Vec>& centers, double R, const Vec& y) {
  std::vector<const Vec*> near;
  bool inside = false;
  for (const auto& c : centers) {
    const double d2 = sq_dist(c, y, 2);
    if (d2 <= 16.0 * R * R) near.push_back(&c);
    if (d2 <= R * R) inside = true;
  }
  if (!inside) return 0.0;
  const double cover = R * (1.0 - 1e-12);
  const auto uncovered = [&](const Vec& q) {
    for (const auto* c : near)
      if (sq_dist(*c, q, 2) < cover * cover) return false;
    return true;
  };
  double best = std::numeric_limits<double>::infinity();
  const auto consider = [&](const Vec& q) {
    const double d = std::sqrt(sq_dist(q, y, 2));
    if (d < best && uncovered(q)) best = d;
  };
  for (const auto* c : near) {
    const double dx = y[0] - (*c)[0], dy = y[1] - (*c)[1];
    const double r = std::hypot(dx, dy);
    if (r > 2.0 * R || r == 0.0) continue;
    consider(Vec{(*c)[0] + R * dx / r, (*c)[1] + R * dy / r, 0.0});
    consider(Vec{(*c)[0] - R * dx / r, (*c)[1] - R * dy / r, 0.0});
  }
  for (std::size_t a = 0; a < near.size(); ++a) {
    for (std::size_t b = a + 1; b < near.size(); ++b) {
      const auto& p = *near[a];
      const auto& q = *near[b];
      const double dx = q[0] - p[0], dy = q[1] - p[1];
      const double dist = std::hypot(dx, dy);
      if (dist == 0.0 || dist >= 2.0 * R) continue;
      const double h = std::sqrt(R * R - 0.25 * dist * dist);
      const double mx = p[0] + 0.5 * dx, my = p[1] + 0.5 * dy;
      consider(Vec{mx - h * dy / dist, my + h * dx / dist, 0.0});
      consider(Vec{mx + h * dy / dist, my - h * dx / dist, 0.0});
    }
  }
  if (!std::isfinite(best)) throw NumericalError("halo boundary not found");
  return best;
}

ThetaMc mc_check_theta(const Configuration& config, const Contour& g, const Tiling& tiling, double eps, double R,
                       double R1, std::size_t samples, std::uint64_t seed) {
  require(tiling.dim() == 2, "theta MC check is implemented for d = 2");
  require(0.0 < eps && eps < R && R <= R1, "theta MC check needs 0 < eps < R <= R1");
  require(!g.support.empty() && samples > 0, "theta MC check needs a contour and samples");
  std::vector<Vec> centers;
  for (const auto& p : config.points()) centers.push_back(p.x);
  Rng rng = make_rng(seed, 0x7e7a);
  std::uniform_int_distribution<std::size_t> pick(0, g.support.size() - 1);
  const double d = tiling.delta();
  ThetaMc out;
  out.samples = samples;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto c = tiling.center(g.support[pick(rng)]);
    const Vec y{c[0] + d * (uniform01(rng) - 0.5), c[1] + d * (uniform01(rng) - 0.5), 0.0};
    const double depth = halo_depth(centers, R, y);
    if (depth <= 0.0) continue;
    if (depth <= eps) ++out.hits_eps;
    if (depth <= R1) ++out.hits_r1;
  }
  const double n = static_cast<double>(samples);
  const double a = static_cast<double>(out.hits_eps);
  const double b = static_cast<double>(out.hits_r1 - out.hits_eps);
  if (b == 0.0) {
    out.ratio = std::numeric_limits<double>::infinity();
    return out;
  }
  out.ratio = a / b;
  if (a > 0.0) {
    const double pa = a / n, pb = b / n;
    const double var_log = (1.0 - pa) / (n * pa) + (1.0 - pb) / (n * pb) + 2.0 / n;
    out.std_error = out.ratio * std::sqrt(var_log);
  }
  return out;
}

TruncationSearch find_truncation_epsilon(const PotentialProfile& profile, double tol, double safety) {
  profile.validate();
  require(tol > 0.0, "tolerance must be positive");
  require(safety > 0.0 && safety <= 1.0, "safety factor must lie in (0, 1]");
  TruncationSearch out;
  const auto margin_at = [&](double eps) {
    PotentialProfile p = profile;
    p.phi = profile.phi.truncated(eps);
    const double m = diluted_condition_check(p).margin;
    out.trials.emplace_back(eps, m);
    return m;
  };
  const double floor_r = profile.phi.min_radius();
  const auto accept = [&](double eps, double m) {
    out.boundary = eps;
    if (safety < 1.0 && safety * eps > floor_r) {
      const double safe = safety * eps;
      const double ms = margin_at(safe);
      if (ms > m) {
        eps = safe;
        m = ms;
      }
    }
    out.eps = eps;
    out.margin = m;
    out.profile = profile;
    out.profile.phi = profile.phi.truncated(eps);
    return out;
  };
  double fail = std::min(profile.R1(), profile.R);
  if (fail >= profile.R2()) fail = std::nextafter(profile.R2(), 0.0);
  const double m0 = margin_at(fail);
  if (m0 > 0.0) return accept(fail, m0);
  for (double eps = 0.5 * fail; eps > floor_r; eps *= 0.5) {
    const double m = margin_at(eps);
    if (m <= 0.0) {
      fail = eps;
      continue;
    }
    double pass = eps, pass_margin = m;
    while (fail - pass > tol) {
      const double mid = 0.5 * (pass + fail);
      const double mm = margin_at(mid);
      if (mm > 0.0) {
        pass = mid;
        pass_margin = mm;
      } else {
        fail = mid;
      }
    }
    return accept(pass, pass_margin);
  }
  throw NumericalError("truncation epsilon not found");
}

ActivityWindow critical_window(double beta, double b, double b0, double delta, int dim) {
  require(beta > 0.0 && delta > 0.0, "critical window needs beta > 0 and delta > 0");
  const double scale = std::exp(beta * b) / std::pow(delta, dim);
  return {scale * std::log1p(std::exp(beta * b0 - 2.0)), scale * std::log1p(std::exp(beta * b0 + 2.0))};
}

double refined_half_width(double beta, double rate) { return std::min(2.0, std::exp(-beta * rate)); }

ActivityWindow refined_window(double beta, double c_phi, double delta, int dim, double rate) {
  require(beta > 0.0 && delta > 0.0, "refined window needs beta > 0 and delta > 0");
  const double vol = std::pow(delta, dim);
  const double a = refined_half_width(beta, rate);
  const double b0 = vol * c_phi;
  return {std::log1p(std::exp(beta * b0 - a)) / vol, std::log1p(std::exp(beta * b0 + a)) / vol};
}

}  // namespace satgibbs
