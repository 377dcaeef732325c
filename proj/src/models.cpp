#include "satgibbs/models.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <sstream>

#include "satgibbs/errors.hpp"

namespace satgibbs {

namespace {

double box_distance(const Vec& x, const Vec& center, int d, double half) {
  double s = 0.0;
  for (int k = 0; k < d; ++k) {
    const double e = std::max(0.0, std::abs(x[k] - center[k]) - half);
    s += e * e;
  }
  return std::sqrt(s);
}

struct Ball {
  Vec c;
  double r;
};

// Regular grid of cells of side h whose first cell starts at `origin`, with `ext` cells per axis.
struct CellGrid {
  int d;
  Vec origin;
  double h;
  std::array<int, 3> ext{1, 1, 1};

  std::size_t size() const { return static_cast<std::size_t>(ext[0]) * ext[1] * ext[2]; }
  std::size_t flat(int a, int b, int c) const {
    return (static_cast<std::size_t>(a) * ext[1] + b) * ext[2] + c;
  }
  double coord(int axis, int k) const { return origin[axis] + (k + 0.5) * h; }
};

// P(w_1 U_1 + ... + w_n U_n <= t) for independent uniforms on [0, 1].
double uniform_sum_cdf(double t, const double* w, int n) {
  if (t <= 0.0) return 0.0;
  double total_w = 0.0, prod = 1.0;
  for (int k = 0; k < n; ++k) {
    total_w += w[k];
    prod *= w[k];
  }
  if (t >= total_w) return 1.0;
  double fact = 1.0;
  for (int k = 2; k <= n; ++k) fact *= k;
  double sum = 0.0;
  for (int mask = 0; mask < (1 << n); ++mask) {
    double shift = 0.0;
    int bits = 0;
    for (int k = 0; k < n; ++k)
      if (mask & (1 << k)) {
        shift += w[k];
        ++bits;
      }
    const double u = t - shift;
    if (u <= 0.0) continue;
    sum += ((bits % 2) ? -1.0 : 1.0) * std::pow(u, n);
  }
  return std::clamp(sum / (fact * prod), 0.0, 1.0);
}

// Fraction of the cube of side h centred at y lying in the half-space {p : n.(p - y) <= s}, |n| = 1.
double half_space_fraction(const double* n, int d, double h, double s) {
  double w[3];
  int m = 0;
  double half = 0.0;
  for (int k = 0; k < d; ++k) {
    const double wk = std::abs(n[k]) * h;
    half += 0.5 * wk;
    if (wk > 1e-9 * h) w[m++] = wk;
  }
  if (m == 0) return s >= 0.0 ? 1.0 : 0.0;
  return uniform_sum_cdf(s + half, w, m);
}

// Fraction of the cube of side h centred at y covered by the ball, from the tangent plane at the
// nearest boundary point; exact for cubes entirely inside or outside.
double ball_fraction(const Vec& y, int d, double h, const Ball& ball) {
  const double half_diag = 0.5 * h * std::sqrt(static_cast<double>(d));
  double dv[3] = {0.0, 0.0, 0.0};
  double dist2 = 0.0;
  for (int k = 0; k < d; ++k) {
    dv[k] = y[k] - ball.c[k];
    dist2 += dv[k] * dv[k];
  }
  const double dist = std::sqrt(dist2);
  if (dist >= ball.r + half_diag) return 0.0;
  if (dist <= ball.r - half_diag || dist == 0.0) return 1.0;
  const double n[3] = {dv[0] / dist, dv[1] / dist, dv[2] / dist};
  return half_space_fraction(n, d, h, ball.r - dist);
}

// Covered fraction of every cell by a union of balls. A cell crossed by one ball boundary gets the
// fraction cut off by the tangent plane at the nearest boundary point. Cells crossed by several
// boundaries are split into subcells treated the same way.
void cover_cells(const CellGrid& g, const std::vector<Ball>& balls, std::vector<double>& cover) {
  cover.assign(g.size(), 0.0);
  std::vector<std::uint8_t> crossings(g.size(), 0);
  const double half_diag = 0.5 * g.h * std::sqrt(static_cast<double>(g.d));
  for (const auto& ball : balls) {
    std::array<int, 3> lo{0, 0, 0}, hi{0, 0, 0};
    bool empty = false;
    for (int k = 0; k < g.d; ++k) {
      const double reach = ball.r + half_diag;
      lo[k] = std::max(0, static_cast<int>(std::floor((ball.c[k] - reach - g.origin[k]) / g.h)));
      hi[k] = std::min(g.ext[k] - 1, static_cast<int>(std::floor((ball.c[k] + reach - g.origin[k]) / g.h)));
      if (hi[k] < lo[k]) empty = true;
    }
    if (empty) continue;
    for (int a = lo[0]; a <= hi[0]; ++a)
      for (int b = lo[1]; b <= hi[1]; ++b)
        for (int c = lo[2]; c <= hi[2]; ++c) {
          const std::size_t k = g.flat(a, b, c);
          if (cover[k] >= 1.0) continue;
          const Vec y{g.coord(0, a), g.d > 1 ? g.coord(1, b) : 0.0, g.d > 2 ? g.coord(2, c) : 0.0};
          const double f = ball_fraction(y, g.d, g.h, ball);
          if (f <= 0.0) continue;
          if (f >= 1.0) {
            cover[k] = 1.0;
            continue;
          }
          if (crossings[k] < 2) ++crossings[k];
          cover[k] = std::max(cover[k], f);
        }
  }
  const int split = g.d == 3 ? 4 : 8;
  const double sub = g.h / split;
  for (int a = 0; a < g.ext[0]; ++a)
    for (int b = 0; b < g.ext[1]; ++b)
      for (int c = 0; c < g.ext[2]; ++c) {
        const std::size_t k = g.flat(a, b, c);
        if (crossings[k] < 2 || cover[k] >= 1.0) continue;
        const Vec corner{g.origin[0] + a * g.h, g.origin[1] + b * g.h, g.origin[2] + c * g.h};
        double sum = 0.0;
        int count = 0;
        for (int u = 0; u < split; ++u)
          for (int v = 0; v < (g.d > 1 ? split : 1); ++v)
            for (int w = 0; w < (g.d > 2 ? split : 1); ++w) {
              const Vec y{corner[0] + (u + 0.5) * sub, corner[1] + (v + 0.5) * sub, corner[2] + (w + 0.5) * sub};
              double f = 0.0;
              for (const auto& ball : balls) {
                f = std::max(f, ball_fraction(y, g.d, sub, ball));
                if (f >= 1.0) break;
              }
              sum += f;
              ++count;
            }
        cover[k] = sum / count;
      }
}

}  // namespace

// ---------------------------------------------------------------- K-NN Strauss

KnnStrauss::KnnStrauss(const Tiling& tiling, double L, int K, double R, double A)
    : TileEnergyModel(tiling, SaturationData{tiling.delta(), L, A * K, 0.0}, R, 0.0, A * K), K_(K), R_(R), A_(A) {
  require(K >= 1, "K-NN Strauss needs K >= 1");
  require(std::isfinite(R) && R > 0.0, "K-NN Strauss needs R > 0");
  require(std::isfinite(A) && A >= 0.0, "K-NN Strauss needs A >= 0");
}

TileEnergy KnnStrauss::tile_energy(const TileBins& bins, const Index& i) const {
  const auto* own = bins.points_in(i);
  if (!own) return {};
  const int d = dim();
  const double r2 = R_ * R_;
  double total = 0.0;
  for (const auto& x : *own) {
    int count = 0;
    bins.for_each_near(i, reach(), [&](const MarkedPoint& y) {
      if (y.x != x.x && sq_dist(x.x, y.x, d) <= r2) ++count;
    });
    total += static_cast<double>(std::min(count, K_));
  }
  return {A_ * total, 0.0};
}

std::string KnnStrauss::saturation_issue() const {
  const double delta = tiling_.delta();
  const double diag = std::sqrt(static_cast<double>(dim())) * delta;
  int covered = 0;
  for (const auto& o : ball_offsets(dim(), sat_.L / delta)) {
    if (o == Index{0, 0, 0}) continue;
    if (delta * std::sqrt(static_cast<double>(sq_norm(o))) + diag <= R_) ++covered;
  }
  if (covered < K_)
    return "only " + std::to_string(covered) + " occupied tiles are guaranteed within R of every point of T_0; need K";
  return {};
}

double knn_strauss_reference(const Configuration& config, const Tiling& tiling, const Index& i, int K, double R,
                             double A) {
  const int d = tiling.dim();
  double total = 0.0;
  for (const auto& x : config.points()) {
    if (tiling.tile_of(x.x) != i) continue;
    std::vector<std::pair<double, Vec>> others;
    for (const auto& y : config.points())
      if (y.x != x.x) others.push_back({std::sqrt(sq_dist(x.x, y.x, d)), y.x});
    std::sort(others.begin(), others.end());
    for (int k = 0; k < K && k < static_cast<int>(others.size()); ++k)
      if (others[static_cast<std::size_t>(k)].first <= R) total += A;
  }
  return total;
}

// ---------------------------------------------------------------- area interaction

AreaInteraction::AreaInteraction(const Tiling& tiling, double L, double theta, double r_min, double r_max,
                                 double pitch)
    : TileEnergyModel(tiling, SaturationData{tiling.delta(), L, 0.0, theta * tiling.delta() * tiling.delta()}, r_max,
                      std::abs(theta) * tiling.delta() * tiling.delta(),
                      std::abs(theta) * tiling.delta() * tiling.delta()),
      theta_(theta),
      r_min_(r_min),
      r_max_(r_max),
      pitch_(pitch) {
  require(tiling.dim() == 2, "area_interaction is only supported in dimension 2");
  require(std::isfinite(theta), "theta must be finite");
  require(r_min > 0.0 && r_min <= r_max && std::isfinite(r_max), "radius marks need 0 < R1 <= R2");
  require(pitch > 0.0 && pitch <= tiling.delta(), "quadrature pitch must lie in (0, delta]");
}

namespace {

// Area of the union of the radius-marked discs inside the tile, on an n x n grid of coverage cells.
double covered_area(const std::vector<Ball>& balls, const Vec& c0, double delta, int n) {
  CellGrid g{2, {c0[0] - 0.5 * delta, c0[1] - 0.5 * delta, 0.0}, delta / n};
  g.ext = {n, n, 1};
  std::vector<double> cover;
  cover_cells(g, balls, cover);
  double sum = 0.0;
  for (double f : cover) sum += f;
  return g.h * g.h * sum;
}

}  // namespace

TileEnergy AreaInteraction::tile_energy(const TileBins& bins, const Index& i) const {
  const double delta = tiling_.delta();
  const Vec c0 = tiling_.center(i);
  std::vector<Ball> balls;
  bins.for_each_near(i, reach(), [&](const MarkedPoint& p) {
    const double r = p.radius.value_or(r_min_);
    if (box_distance(p.x, c0, 2, 0.5 * delta) <= r) balls.push_back({p.x, r});
  });
  if (balls.empty()) return {};
  const int n = 2 * std::max(1, static_cast<int>(std::ceil(delta / (2.0 * pitch_) - 1e-9)));
  const double fine = covered_area(balls, c0, delta, n);
  const double coarse = covered_area(balls, c0, delta, n / 2);
  return {theta_ * fine, std::abs(theta_) * std::abs(fine - coarse)};
}

std::string AreaInteraction::saturation_issue() const {
  const double delta = tiling_.delta();
  if (delta > r_min_ / std::sqrt(2.0) * (1.0 + 1e-12)) return "need delta <= R1 / sqrt(d)";
  if (sat_.L < r_max_ + std::sqrt(2.0) * delta) return "need L >= R2 + sqrt(d) * delta";
  return {};
}

// ---------------------------------------------------------------- diluted pairwise

DilutedPairwise::DilutedPairwise(const Tiling& tiling, double L, const PotentialProfile& profile, double pitch)
    : TileEnergyModel(tiling,
                      SaturationData{tiling.delta(), L, 0.0, std::pow(tiling.delta(), tiling.dim()) * profile.c_phi()},
                      profile.R + profile.R2(), std::pow(tiling.delta(), tiling.dim()) * profile.abs_integral(),
                      std::pow(tiling.delta(), tiling.dim()) * profile.abs_integral()),
      profile_(profile),
      pitch_(pitch),
      c_phi_(profile.c_phi()) {
  profile_.validate();
  require(profile.dim == tiling.dim(), "potential profile dimension differs from the tiling");
  require(pitch > 0.0 && pitch <= tiling.delta(), "quadrature pitch must lie in (0, delta]");
  cells_ = 2 * std::max(1, static_cast<int>(std::ceil(tiling.delta() / (2.0 * pitch) - 1e-9)));
}

std::string DilutedPairwise::saturation_issue() const {
  const double delta = tiling_.delta();
  const double sd = std::sqrt(static_cast<double>(dim()));
  if (delta > profile_.R / sd * (1.0 + 1e-12)) return "need delta <= R / sqrt(d)";
  if (sat_.L < profile_.R2() + 2.0 * sd * delta) return "need L >= R2 + 2 sqrt(d) delta";
  if (sat_.L < profile_.R + sd * delta) return "need L >= R + sqrt(d) delta";
  return {};
}

double DilutedPairwise::tile_energy_at(const TileBins& bins, const Index& i, int cells) const {
  const int d = dim();
  const double delta = tiling_.delta();
  const double R = profile_.R;
  const double R2 = profile_.R2();
  const Vec c0 = tiling_.center(i);
  std::vector<Ball> balls;
  bool touches = false;
  bins.for_each_near(i, reach(), [&](const MarkedPoint& p) {
    const double dist = box_distance(p.x, c0, d, 0.5 * delta);
    if (dist <= R + R2) balls.push_back({p.x, R});
    if (dist <= R) touches = true;
  });
  if (!touches) return 0.0;

  const double h = delta / cells;
  const int m = static_cast<int>(std::ceil(R2 / h - 1e-12));
  CellGrid g{d, {0.0, 0.0, 0.0}, h};
  for (int k = 0; k < d; ++k) {
    g.origin[k] = c0[k] - 0.5 * delta - m * h;
    g.ext[k] = cells + 2 * m;
  }
  std::vector<double> cover;
  cover_cells(g, balls, cover);

  // Kernel h^d * phi(|o| h) on the l_inf block of radius m.
  const int kw = 2 * m + 1;
  const double hd = std::pow(h, d);
  std::array<int, 3> kext{kw, d > 1 ? kw : 1, d > 2 ? kw : 1};
  std::vector<double> kernel(static_cast<std::size_t>(kext[0]) * kext[1] * kext[2], 0.0);
  for (int a = 0; a < kext[0]; ++a)
    for (int b = 0; b < kext[1]; ++b)
      for (int c = 0; c < kext[2]; ++c) {
        const int oa = a - m, ob = d > 1 ? b - m : 0, oc = d > 2 ? c - m : 0;
        const double r = h * std::sqrt(static_cast<double>(oa * oa + ob * ob + oc * oc));
        if (r > R2) continue;
        const double w = hd * profile_.phi(r);
        if (w == 0.0) continue;
        kernel[(static_cast<std::size_t>(a) * kext[1] + b) * kext[2] + c] = w;
      }

  // Per grid line (along the last axis): maximal runs of uncovered cells with weight 1, and
  // partially covered cells as single-cell segments weighted by their uncovered fraction.
  struct Segment {
    int lo, hi;
    double weight;
  };
  const int la = d - 1;
  std::array<int, 3> line_ext = g.ext;
  line_ext[la] = 1;
  auto line_id = [&](std::array<int, 3> p) {
    p[la] = 0;
    return (static_cast<std::size_t>(p[0]) * line_ext[1] + p[1]) * line_ext[2] + p[2];
  };
  std::vector<std::vector<Segment>> segments(static_cast<std::size_t>(line_ext[0]) * line_ext[1] * line_ext[2]);
  for (int a = 0; a < line_ext[0]; ++a)
    for (int b = 0; b < line_ext[1]; ++b)
      for (int c = 0; c < line_ext[2]; ++c) {
        std::array<int, 3> p{a, b, c};
        auto& seg = segments[line_id(p)];
        int start = -1;
        for (int t = 0; t < g.ext[la]; ++t) {
          p[la] = t;
          const double f = cover[g.flat(p[0], p[1], p[2])];
          if (f == 0.0) {
            if (start < 0) start = t;
            continue;
          }
          if (start >= 0) {
            seg.push_back({start, t - 1, 1.0});
            start = -1;
          }
          if (f < 1.0) seg.push_back({t, t, 1.0 - f});
        }
        if (start >= 0) seg.push_back({start, g.ext[la] - 1, 1.0});
      }

  // Prefix sums of the kernel along the last axis, one per kernel line.
  std::array<int, 3> kline_ext = kext;
  kline_ext[la] = 1;
  std::vector<std::pair<std::array<int, 3>, std::vector<double>>> kernel_lines;
  for (int a = 0; a < kline_ext[0]; ++a)
    for (int b = 0; b < kline_ext[1]; ++b)
      for (int c = 0; c < kline_ext[2]; ++c) {
        std::array<int, 3> q{a, b, c};
        std::vector<double> pre(static_cast<std::size_t>(kw) + 1, 0.0);
        bool any = false;
        for (int t = 0; t < kw; ++t) {
          q[la] = t;
          const double w = kernel[(static_cast<std::size_t>(q[0]) * kext[1] + q[1]) * kext[2] + q[2]];
          any = any || w != 0.0;
          pre[static_cast<std::size_t>(t) + 1] = pre[static_cast<std::size_t>(t)] + w;
        }
        if (!any) continue;
        std::array<int, 3> offset{0, 0, 0};
        for (int k = 0; k < d; ++k)
          if (k != la) offset[k] = (k == 0 ? a : k == 1 ? b : c) - m;
        kernel_lines.push_back({offset, std::move(pre)});
      }

  const std::array<int, 3> outer_hi{cells, d > 1 ? cells : 1, d > 2 ? cells : 1};
  const int mb = d > 1 ? m : 0, mc = d > 2 ? m : 0;
  double total = 0.0;
  for (int a = 0; a < outer_hi[0]; ++a)
    for (int b = 0; b < outer_hi[1]; ++b)
      for (int c = 0; c < outer_hi[2]; ++c) {
        const std::array<int, 3> x{a + m, b + mb, c + mc};
        const double fx = cover[g.flat(x[0], x[1], x[2])];
        if (fx == 0.0) continue;
        const int xt = x[la];
        double missing = 0.0;
        for (const auto& [offset, pre] : kernel_lines) {
          const auto& seg = segments[line_id({x[0] + offset[0], x[1] + offset[1], x[2] + offset[2]})];
          auto it = std::lower_bound(seg.begin(), seg.end(), xt - m,
                                     [](const Segment& sg, int v) { return sg.hi < v; });
          for (; it != seg.end() && it->lo <= xt + m; ++it) {
            const int s0 = std::max(it->lo - xt, -m);
            const int s1 = std::min(it->hi - xt, m);
            missing += it->weight *
                       (pre[static_cast<std::size_t>(s1 + m + 1)] - pre[static_cast<std::size_t>(s0 + m)]);
          }
        }
        total += fx * (c_phi_ - missing);
      }
  return hd * total;
}

TileEnergy DilutedPairwise::tile_energy(const TileBins& bins, const Index& i) const {
  const double fine = tile_energy_at(bins, i, cells_);
  if (fine == 0.0) return {};
  const double coarse = tile_energy_at(bins, i, cells_ / 2);
  return {fine, std::abs(fine - coarse)};
}

// ---------------------------------------------------------------- surrogate

SurrogateTable::SurrogateTable(int dim, int rho, std::vector<double> values)
    : dim_(dim), rho_(rho), values_(std::move(values)) {
  check_dimension(dim);
  require(rho >= 1, "surrogate block radius rho must be >= 1");
  const int rb = dim > 1 ? rho : 0, rc = dim > 2 ? rho : 0;
  for (int a = -rho; a <= rho; ++a)
    for (int b = -rb; b <= rb; ++b)
      for (int c = -rc; c <= rc; ++c) {
        if (a == 0 && b == 0 && c == 0) center_bit_ = static_cast<int>(offsets_.size());
        offsets_.push_back({a, b, c});
      }
  require(static_cast<int>(offsets_.size()) <= kSurrogateMaxBits,
          "surrogate block has " + std::to_string(offsets_.size()) + " sites; at most " +
              std::to_string(kSurrogateMaxBits) + " are supported");
  require(values_.size() == (std::size_t{1} << offsets_.size()),
          "surrogate table must have 2^" + std::to_string(offsets_.size()) + " entries");
  for (double v : values_) require(std::isfinite(v), "surrogate table entries must be finite");
}

std::uint32_t SurrogateTable::ball_mask(double radius) const {
  std::uint32_t mask = 0;
  for (std::size_t k = 0; k < offsets_.size(); ++k)
    if (within_radius(sq_norm(offsets_[k]), radius)) mask |= 1u << k;
  return mask;
}

namespace {

std::size_t block_bits(int dim, int rho) {
  check_dimension(dim);
  require(rho >= 1, "surrogate block radius rho must be >= 1");
  std::size_t side = static_cast<std::size_t>(2 * rho + 1), n = 1;
  for (int k = 0; k < dim; ++k) n *= side;
  require(n <= static_cast<std::size_t>(kSurrogateMaxBits), "surrogate block too large for a table");
  return n;
}

template <class Fn>
SurrogateTable build_table(int dim, int rho, double ball_radius, double b0, Fn&& mixed_value) {
  const std::size_t bits = block_bits(dim, rho);
  SurrogateTable probe(dim, rho, std::vector<double>(std::size_t{1} << bits, 0.0));
  const std::uint32_t ball = probe.ball_mask(ball_radius);
  const int cb = probe.center_bit();
  std::vector<double> values(std::size_t{1} << bits);
  for (std::uint32_t code = 0; code < values.size(); ++code) {
    const double base = b0 * static_cast<double>((code >> cb) & 1u);
    const std::uint32_t part = code & ball;
    const bool constant = part == 0 || part == ball;
    values[code] = constant ? base : base + mixed_value(code);
  }
  return SurrogateTable(dim, rho, std::move(values));
}

}  // namespace

SurrogateTable SurrogateTable::saturated(int dim, int rho, double ball_radius, double b0) {
  return build_table(dim, rho, ball_radius, b0, [](std::uint32_t) { return 0.0; });
}

SurrogateTable SurrogateTable::penalized(int dim, int rho, double ball_radius, double b0, double penalty) {
  return build_table(dim, rho, ball_radius, b0, [&](std::uint32_t) { return penalty; });
}

SurrogateTable SurrogateTable::random(int dim, int rho, double ball_radius, double b0, double amplitude,
                                      std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x7ab1e);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  const std::size_t bits = block_bits(dim, rho);
  std::vector<double> draws(std::size_t{1} << bits);
  for (auto& v : draws) v = u(rng);
  return build_table(dim, rho, ball_radius, b0, [&](std::uint32_t code) { return draws[code]; });
}

SurrogateTable SurrogateTable::symmetric(int dim, int rho, double ball_radius, double b0, double amplitude,
                                         std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x5e11);
  std::uniform_real_distribution<double> u(0.0, amplitude);
  const std::size_t bits = block_bits(dim, rho);
  const std::uint32_t all = static_cast<std::uint32_t>((std::size_t{1} << bits) - 1);
  std::vector<double> draws(std::size_t{1} << bits);
  for (std::uint32_t code = 0; code < draws.size(); ++code) {
    const std::uint32_t flipped = all & ~code;
    draws[code] = flipped < code ? draws[flipped] : u(rng);
  }
  return build_table(dim, rho, ball_radius, b0, [&](std::uint32_t code) { return draws[code]; });
}

SurrogateTable read_surrogate_table(std::istream& is, int dim, int rho) {
  const std::size_t bits = block_bits(dim, rho);
  std::vector<double> values;
  std::string token;
  while (is >> token) {
    if (token[0] == '#') {
      std::string rest;
      std::getline(is, rest);
      continue;
    }
    try {
      values.push_back(std::stod(token));
    } catch (const std::exception&) {
      throw ValidationError("surrogate table: bad value '" + token + "'");
    }
  }
  require(values.size() == (std::size_t{1} << bits),
          "surrogate table needs " + std::to_string(std::size_t{1} << bits) + " values, got " +
              std::to_string(values.size()));
  return SurrogateTable(dim, rho, std::move(values));
}

Surrogate::Surrogate(const Tiling& tiling, double L, double b0, SurrogateTable table)
    : TileEnergyModel(tiling, SaturationData{tiling.delta(), L, 0.0, b0},
                      table.rho() * std::sqrt(static_cast<double>(tiling.dim())) * tiling.delta(), 0.0, 0.0),
      table_(std::move(table)) {
  require(table_.dim() == tiling.dim(), "surrogate table dimension differs from the tiling");
  require(std::isfinite(b0), "b0 must be finite");
  const double delta = tiling.delta();
  require(range_ <= L + delta + 1e-12,
          "surrogate block must fit within distance L + delta (rho * sqrt(d) * delta <= L + delta)");
  ball_mask_ = table_.ball_mask(L / delta);
  double lo = 0.0, hi = 0.0;
  const int cb = table_.center_bit();
  for (std::uint32_t code = 0; code < table_.values().size(); ++code) {
    const double v = table_[code];
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    if (saturated_pattern(code)) {
      const double want = b0 * static_cast<double>((code >> cb) & 1u);
      require(std::abs(v - want) <= 1e-12 * (1.0 + std::abs(want)),
              "surrogate table violates saturation: patterns constant on the L-ball must have energy b0 * center");
    }
  }
  c_s_ = std::max(0.0, -lo);
  c_t_ = std::max(0.0, hi);
}

bool Surrogate::saturated_pattern(std::uint32_t code) const {
  const std::uint32_t part = code & ball_mask_;
  return part == 0 || part == ball_mask_;
}

TileEnergy Surrogate::tile_energy(const TileBins& bins, const Index& i) const {
  return {site_energy(i, [&](const Index& j) { return bins.count(j) > 0; }), 0.0};
}

}  // namespace satgibbs
