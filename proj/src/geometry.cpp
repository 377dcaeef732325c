#include "satgibbs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "satgibbs/errors.hpp"

namespace satgibbs {

void check_dimension(int dim) {
  require(dim >= 1 && dim <= kMaxDim, "dimension must be 1, 2 or 3 (got " + std::to_string(dim) + ")");
}

Index add(const Index& a, const Index& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Index sub(const Index& a, const Index& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

int linf_norm(const Index& a) { return std::max({std::abs(a[0]), std::abs(a[1]), std::abs(a[2])}); }

long sq_norm(const Index& a) {
  return static_cast<long>(a[0]) * a[0] + static_cast<long>(a[1]) * a[1] + static_cast<long>(a[2]) * a[2];
}

double sq_dist(const Vec& a, const Vec& b, int dim) {
  double s = 0.0;
  for (int k = 0; k < dim; ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return s;
}

bool within_radius(long sq_len, double radius) {
  if (radius < 0.0) return false;
  return static_cast<double>(sq_len) <= radius * radius * (1.0 + 1e-9) + 1e-12;
}

std::vector<Index> ball_offsets(int dim, double radius) {
  check_dimension(dim);
  std::vector<Index> out;
  if (radius < 0.0) return out;
  const int r = static_cast<int>(std::floor(radius * (1.0 + 1e-9) + 1e-9));
  const int rb = dim > 1 ? r : 0;
  const int rc = dim > 2 ? r : 0;
  for (int a = -r; a <= r; ++a)
    for (int b = -rb; b <= rb; ++b)
      for (int c = -rc; c <= rc; ++c) {
        Index o{a, b, c};
        if (within_radius(sq_norm(o), radius)) out.push_back(o);
      }
  return out;
}

double Window::volume() const {
  double v = 1.0;
  for (int k = 0; k < dim; ++k) v *= hi[k] - lo[k];
  return v;
}

bool Window::contains(const Vec& x) const {
  for (int k = 0; k < dim; ++k)
    if (!(x[k] >= lo[k] && x[k] <= hi[k])) return false;
  for (int k = dim; k < kMaxDim; ++k)
    if (x[k] != 0.0) return false;
  return true;
}

Window cube_window(int dim, double lo, double hi) {
  check_dimension(dim);
  Window w;
  w.dim = dim;
  for (int k = 0; k < dim; ++k) {
    w.lo[k] = lo;
    w.hi[k] = hi;
  }
  return w;
}

Tiling::Tiling(int dim, double delta) : dim_(dim), delta_(delta) {
  check_dimension(dim);
  require(std::isfinite(delta) && delta > 0.0, "tile side delta must be positive");
}

double Tiling::tile_volume() const { return std::pow(delta_, dim_); }

Index Tiling::tile_of(const Vec& x) const {
  Index i{0, 0, 0};
  for (int k = 0; k < dim_; ++k) i[k] = static_cast<int>(std::floor(x[k] / delta_ + 0.5));
  return i;
}

Vec Tiling::center(const Index& i) const {
  Vec c{0.0, 0.0, 0.0};
  for (int k = 0; k < dim_; ++k) c[k] = i[k] * delta_;
  return c;
}

Configuration::Configuration(Window window, std::vector<MarkedPoint> points)
    : window_(window), points_(std::move(points)) {
  check_dimension(window_.dim);
  for (int k = 0; k < window_.dim; ++k)
    require(std::isfinite(window_.lo[k]) && std::isfinite(window_.hi[k]) && window_.lo[k] <= window_.hi[k],
            "window bounds must be finite and ordered");
  for (const auto& p : points_) {
    for (int k = 0; k < kMaxDim; ++k) require(std::isfinite(p.x[k]), "point coordinates must be finite");
    require(window_.contains(p.x), "point lies outside the window");
    if (p.radius) require(std::isfinite(*p.radius) && *p.radius > 0.0, "radius mark must be positive");
  }
  std::vector<Vec> pos;
  pos.reserve(points_.size());
  for (const auto& p : points_) pos.push_back(p.x);
  std::sort(pos.begin(), pos.end());
  require(std::adjacent_find(pos.begin(), pos.end()) == pos.end(), "duplicate point positions");
}

Configuration Configuration::translated(const Vec& shift) const {
  Window w = window_;
  std::vector<MarkedPoint> pts = points_;
  for (int k = 0; k < w.dim; ++k) {
    w.lo[k] += shift[k];
    w.hi[k] += shift[k];
    for (auto& p : pts) p.x[k] += shift[k];
  }
  return Configuration(w, std::move(pts));
}

Configuration Configuration::filtered(const std::function<bool(const MarkedPoint&)>& keep) const {
  std::vector<MarkedPoint> pts;
  for (const auto& p : points_)
    if (keep(p)) pts.push_back(p);
  return Configuration(window_, std::move(pts));
}

TileBins::TileBins(const Tiling& tiling, const Configuration& config) : tiling_(tiling) {
  for (const auto& p : config.points()) insert(p);
}

Index TileBins::insert(const MarkedPoint& p) {
  Index i = tiling_.tile_of(p.x);
  bins_[i].push_back(p);
  ++total_;
  return i;
}

void TileBins::erase(const Index& tile, std::size_t k) {
  auto it = bins_.find(tile);
  require(it != bins_.end() && k < it->second.size(), "TileBins::erase: no such point");
  auto& v = it->second;
  v[k] = v.back();
  v.pop_back();
  if (v.empty()) bins_.erase(it);
  --total_;
}

const std::vector<MarkedPoint>* TileBins::points_in(const Index& tile) const {
  auto it = bins_.find(tile);
  return it == bins_.end() ? nullptr : &it->second;
}

std::size_t TileBins::count(const Index& tile) const {
  auto it = bins_.find(tile);
  return it == bins_.end() ? 0 : it->second.size();
}

int occupancy(const Configuration& config, const Index& i, const Tiling& tiling) {
  for (const auto& p : config.points())
    if (tiling.tile_of(p.x) == i) return 1;
  return 0;
}

std::size_t IndexBox::size() const {
  std::size_t n = 1;
  for (int k = 0; k < dim; ++k) n *= static_cast<std::size_t>(std::max(0, hi[k] - lo[k] + 1));
  return n;
}

bool IndexBox::contains(const Index& i) const {
  for (int k = 0; k < dim; ++k)
    if (i[k] < lo[k] || i[k] > hi[k]) return false;
  for (int k = dim; k < kMaxDim; ++k)
    if (i[k] != 0) return false;
  return true;
}

std::size_t IndexBox::flat(const Index& i) const {
  std::size_t k = 0;
  for (int a = 0; a < dim; ++a) k = k * static_cast<std::size_t>(hi[a] - lo[a] + 1) + (i[a] - lo[a]);
  return k;
}

Index IndexBox::unflat(std::size_t k) const {
  Index i{0, 0, 0};
  for (int a = dim - 1; a >= 0; --a) {
    const auto w = static_cast<std::size_t>(hi[a] - lo[a] + 1);
    i[a] = lo[a] + static_cast<int>(k % w);
    k /= w;
  }
  return i;
}

IndexBox IndexBox::grown(int margin) const {
  IndexBox b = *this;
  for (int k = 0; k < dim; ++k) {
    b.lo[k] -= margin;
    b.hi[k] += margin;
  }
  return b;
}

std::vector<Index> IndexBox::sites() const {
  std::vector<Index> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = unflat(k);
  return out;
}

IndexBox cube_box(int dim, int lo, int hi) {
  check_dimension(dim);
  IndexBox b;
  b.dim = dim;
  for (int k = 0; k < dim; ++k) {
    b.lo[k] = lo;
    b.hi[k] = hi;
  }
  return b;
}

IndexBox bounding_box(int dim, const std::vector<Index>& sites) {
  check_dimension(dim);
  require(!sites.empty(), "bounding box of an empty site set");
  IndexBox b;
  b.dim = dim;
  b.lo = b.hi = sites.front();
  for (const auto& s : sites)
    for (int k = 0; k < dim; ++k) {
      b.lo[k] = std::min(b.lo[k], s[k]);
      b.hi[k] = std::max(b.hi[k], s[k]);
    }
  return b;
}

SpinField::SpinField(const IndexBox& box, int exterior_spin)
    : box_(box), exterior_(exterior_spin), spins_(box.size(), static_cast<std::int8_t>(exterior_spin)) {
  check_dimension(box.dim);
  require(exterior_spin == 0 || exterior_spin == 1, "spins are 0 or 1");
}

bool SpinField::in_domain(const Index& i) const {
  if (!box_.contains(i)) return false;
  return mask_.empty() || mask_[box_.flat(i)] != 0;
}

int SpinField::get(const Index& i) const {
  if (!box_.contains(i)) return exterior_;
  const std::size_t k = box_.flat(i);
  if (!mask_.empty() && mask_[k] == 0) return exterior_;
  return spins_[k];
}

void SpinField::set(const Index& i, int spin) {
  require(spin == 0 || spin == 1, "spins are 0 or 1");
  require(in_domain(i), "SpinField::set outside the domain");
  spins_[box_.flat(i)] = static_cast<std::int8_t>(spin);
}

void SpinField::restrict_domain(const std::vector<Index>& domain) {
  std::vector<std::uint8_t> m(box_.size(), 0);
  for (const auto& i : domain)
    if (box_.contains(i)) m[box_.flat(i)] = 1;
  for (std::size_t k = 0; k < m.size(); ++k)
    if (!m[k]) spins_[k] = static_cast<std::int8_t>(exterior_);
  mask_ = std::move(m);
}

SpinField spin_field(const Configuration& config, const std::vector<Index>& domain, int exterior_spin,
                     const Tiling& tiling) {
  if (domain.empty()) return SpinField(cube_box(tiling.dim(), 0, -1), exterior_spin);
  SpinField f(bounding_box(tiling.dim(), domain), exterior_spin);
  f.restrict_domain(domain);
  for (const auto& i : domain) f.set(i, 0);
  for (const auto& p : config.points()) {
    Index i = tiling.tile_of(p.x);
    if (f.in_domain(i)) f.set(i, 1);
  }
  return f;
}

bool is_homogeneous(const Configuration& config, const Index& i, double L, int sharp, const Tiling& tiling) {
  require(L > 0.0, "homogeneity radius L must be positive");
  TileBins bins(tiling, config);
  for (const auto& o : ball_offsets(tiling.dim(), L / tiling.delta())) {
    const int occ = bins.count(add(i, o)) > 0 ? 1 : 0;
    if (occ != sharp) return false;
  }
  return true;
}

MarkLaw MarkLaw::uniform_radius(double r_min, double r_max) {
  require(r_min > 0.0 && r_min <= r_max, "radius marks need 0 < R1 <= R2");
  MarkLaw m;
  m.kind = Kind::uniform_radius;
  m.r_min = r_min;
  m.r_max = r_max;
  return m;
}

std::optional<double> MarkLaw::draw(Rng& rng) const {
  if (kind == Kind::none) return std::nullopt;
  if (r_min == r_max) return r_min;
  return std::uniform_real_distribution<double>(r_min, r_max)(rng);
}

Configuration sample_poisson(const Window& window, double z, const MarkLaw& marks, Rng& rng) {
  require(std::isfinite(z) && z > 0.0, "activity z must be positive");
  check_dimension(window.dim);
  require(window.volume() > 0.0, "window must have positive volume");
  std::poisson_distribution<long> count(z * window.volume());
  const long n = count(rng);
  std::vector<MarkedPoint> pts;
  pts.reserve(static_cast<std::size_t>(n));
  for (long k = 0; k < n; ++k) {
    MarkedPoint p;
    for (int a = 0; a < window.dim; ++a)
      p.x[a] = std::uniform_real_distribution<double>(window.lo[a], window.hi[a])(rng);
    p.radius = marks.draw(rng);
    pts.push_back(p);
  }
  return Configuration(window, std::move(pts));
}

Configuration sample_poisson(const Window& window, double z, const MarkLaw& marks, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_poisson(window, z, marks, rng);
}

}  // namespace satgibbs
