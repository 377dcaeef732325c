#include <cmath>
#include <sstream>

#include "doctest.h"
#include "satgibbs/config_io.hpp"
#include "satgibbs/errors.hpp"
#include "satgibbs/geometry.hpp"
#include "satgibbs/lattice.hpp"

using namespace satgibbs;

namespace {

Vec v1(double x) { return {x, 0.0, 0.0}; }
Vec v2(double x, double y) { return {x, y, 0.0}; }
Index i1(int a) { return {a, 0, 0}; }
Index i2(int a, int b) { return {a, b, 0}; }

Configuration line_config(const std::vector<double>& xs, double lo = -20, double hi = 20) {
  std::vector<MarkedPoint> pts;
  for (double x : xs) pts.push_back({v1(x), std::nullopt});
  return Configuration(cube_window(1, lo, hi), pts);
}

}  // namespace

TEST_CASE("tile_of follows the half-open convention") {
  Tiling t1(1, 1.0);
  CHECK(t1.tile_of(v1(0.49)) == i1(0));
  CHECK(t1.tile_of(v1(0.5)) == i1(1));
  CHECK(t1.tile_of(v1(-0.5)) == i1(0));
  CHECK(t1.tile_of(v1(-0.51)) == i1(-1));
  Tiling t2(2, 0.5);
  CHECK(t2.tile_of(v2(0.74, -0.26)) == i2(1, -1));
}

TEST_CASE("tile_of partitions space and is translation covariant") {
  Rng rng = make_rng(11);
  for (int dim = 1; dim <= 3; ++dim) {
    Tiling t(dim, 0.37);
    for (int trial = 0; trial < 2000; ++trial) {
      Vec x{};
      Index u{};
      for (int k = 0; k < dim; ++k) {
        x[k] = 10.0 * (uniform01(rng) - 0.5);
        u[k] = static_cast<int>(std::floor(20 * uniform01(rng))) - 10;
      }
      const Index i = t.tile_of(x);
      const Vec c = t.center(i);
      for (int k = 0; k < dim; ++k) {
        CHECK(x[k] >= c[k] - t.delta() / 2 - 1e-12);
        CHECK(x[k] < c[k] + t.delta() / 2 + 1e-12);
      }
      Vec shifted = x;
      for (int k = 0; k < dim; ++k) shifted[k] += t.delta() * u[k];
      CHECK(t.tile_of(shifted) == add(i, u));
    }
  }
}

TEST_CASE("occupancy and spin fields") {
  Tiling t(1, 1.0);
  const auto empty = line_config({});
  const auto one = line_config({0.1});
  CHECK(occupancy(empty, i1(0), t) == 0);
  CHECK(occupancy(one, i1(0), t) == 1);
  CHECK(occupancy(one, i1(1), t) == 0);

  IndexSet lam;
  for (int k = 0; k <= 4; ++k) lam.push_back(i1(k));
  const auto zero_field = spin_field(empty, lam, 0, t);
  for (const auto& i : lam) CHECK(zero_field.get(i) == 0);

  const auto full = line_config({0.0, 1.1, 2.2, 2.9, 4.0});
  const auto ones = spin_field(full, lam, 0, t);
  for (const auto& i : lam) CHECK(ones.get(i) == 1);

  const auto two = line_config({0.2, 0.7});
  const auto f = spin_field(two, lam, 0, t);
  const int expected[] = {1, 1, 0, 0, 0};
  for (int k = 0; k <= 4; ++k) CHECK(f.get(i1(k)) == expected[k]);
  CHECK(f.get(i1(-3)) == 0);
  CHECK(spin_field(two, lam, 1, t).get(i1(9)) == 1);
}

TEST_CASE("tile bins count points per tile") {
  Tiling t(2, 0.5);
  auto cfg = sample_poisson(cube_window(2, 0, 4), 6.0, MarkLaw::none(), 3);
  TileBins bins(t, cfg);
  CHECK(bins.total() == cfg.size());
  std::size_t sum = 0;
  for (const auto& [i, pts] : bins.bins()) {
    sum += pts.size();
    CHECK(occupancy(cfg, i, t) == 1);
    for (const auto& p : pts) CHECK(t.tile_of(p.x) == i);
  }
  CHECK(sum == cfg.size());
}

TEST_CASE("is_homogeneous") {
  Tiling t(1, 1.0);
  CHECK(is_homogeneous(line_config({}), i1(3), 2.0, 0, t));
  const auto dense = line_config({-2.0, -1.0, 0.0, 1.0, 2.0});
  CHECK(is_homogeneous(dense, i1(0), 2.0, 1, t));
  const auto holed = line_config({-2.0, -1.0, 0.0, 1.0});
  CHECK_FALSE(is_homogeneous(holed, i1(0), 2.0, 1, t));
  CHECK_FALSE(is_homogeneous(dense, i1(0), 2.0, 0, t));
  CHECK_THROWS_AS(is_homogeneous(dense, i1(0), 0.0, 1, t), ValidationError);
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(line_config({0.1, 0.1}), ValidationError);
  CHECK_THROWS_AS(line_config({30.0}), ValidationError);
  CHECK_THROWS_AS(line_config({std::nan("")}), ValidationError);
  CHECK_THROWS_AS(Tiling(1, 0.0), ValidationError);
  CHECK_THROWS_AS(Tiling(4, 1.0), ValidationError);
}

TEST_CASE("Poisson sampling") {
  const auto w = cube_window(2, 0, 1);
  SUBCASE("fixed seed is deterministic") {
    const auto a = sample_poisson(w, 10.0, MarkLaw::uniform_radius(0.5, 1.0), 42);
    const auto b = sample_poisson(w, 10.0, MarkLaw::uniform_radius(0.5, 1.0), 42);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) {
      CHECK(a.points()[k].x == b.points()[k].x);
      CHECK(*a.points()[k].radius == *b.points()[k].radius);
      CHECK(*a.points()[k].radius >= 0.5);
      CHECK(*a.points()[k].radius <= 1.0);
    }
  }
  SUBCASE("mean count and thinning") {
    const int reps = 10000;
    double sum = 0.0, sub = 0.0;
    const Window part = cube_window(2, 0, 0.5);
    for (int r = 0; r < reps; ++r) {
      const auto c = sample_poisson(w, 10.0, MarkLaw::none(), 1000 + r);
      sum += c.size();
      for (const auto& p : c.points()) sub += part.contains(p.x) ? 1 : 0;
    }
    CHECK(std::abs(sum / reps - 10.0) <= 3.0 * std::sqrt(10.0 / reps));
    CHECK(std::abs(sub / reps - 2.5) <= 5.0 * std::sqrt(2.5 / reps));
  }
  SUBCASE("tiny activity gives empty configurations") {
    int nonempty = 0;
    for (int r = 0; r < 200; ++r) nonempty += sample_poisson(w, 1e-9, MarkLaw::none(), r).empty() ? 0 : 1;
    CHECK(nonempty == 0);
  }
  CHECK_THROWS_AS(sample_poisson(w, 0.0, MarkLaw::none(), 1), ValidationError);
  CHECK_THROWS_AS(sample_poisson(cube_window(2, 0, 0), 1.0, MarkLaw::none(), 1), ValidationError);
}

TEST_CASE("configuration CSV and JSON round trip") {
  const auto w = cube_window(2, -1, 3);
  const auto c = sample_poisson(w, 3.0, MarkLaw::uniform_radius(0.2, 0.4), 5);
  std::stringstream ss;
  write_configuration_csv(ss, c);
  const auto back = read_configuration_csv(ss, w);
  REQUIRE(back.size() == c.size());
  for (std::size_t k = 0; k < c.size(); ++k) {
    CHECK(back.points()[k].x == c.points()[k].x);
    CHECK(*back.points()[k].radius == *c.points()[k].radius);
  }
  double delta = 0.0;
  const auto j = configuration_from_json(configuration_to_json(c, 0.25), &delta);
  CHECK(delta == 0.25);
  REQUIRE(j.size() == c.size());
  for (std::size_t k = 0; k < c.size(); ++k) CHECK(j.points()[k].x == c.points()[k].x);

  std::stringstream bad("x,y,mark\n");
  CHECK_THROWS_AS(read_configuration_csv(bad, w), ValidationError);
  CHECK_THROWS_AS(configuration_from_json("{not json"), ValidationError);
}

TEST_CASE("lattice set helpers") {
  const IndexSet a = make_set({i1(3), i1(1), i1(2), i1(1)});
  CHECK(a.size() == 3);
  const IndexSet b = make_set({i1(2), i1(5)});
  CHECK(set_union(a, b).size() == 4);
  CHECK(set_intersection(a, b) == IndexSet{i1(2)});
  CHECK(set_difference(a, b) == make_set({i1(1), i1(3)}));
  CHECK(ball_offsets(2, 1.0).size() == 5);
  CHECK(ball_offsets(2, std::sqrt(2.0)).size() == 9);
  CHECK(moore_offsets(2).size() == 8);
  CHECK(moore_offsets(3).size() == 26);
}
