#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "doctest.h"
#include "satgibbs/errors.hpp"
#include "satgibbs/kv_config.hpp"
#include "satgibbs/model_config.hpp"
#include "satgibbs/models.hpp"

using namespace satgibbs;

namespace {

constexpr double kPi = 3.14159265358979323846;

MarkedPoint pt(double x, double y = 0.0) { return {{x, y, 0.0}, std::nullopt}; }

Configuration config(int dim, std::vector<MarkedPoint> pts, double half = 30.0) {
  return Configuration(cube_window(dim, -half, half), std::move(pts));
}

// Positive core up to 0.5, small negative tail up to 0.8.
PotentialProfile core_tail_profile(int dim) {
  PotentialProfile p;
  p.phi = RadialTable({0.0, 0.3, 0.5, 0.65, 0.8}, {2.0, 1.0, 0.0, -0.1, 0.0});
  p.R = 1.0;
  p.dim = dim;
  return p;
}

DilutedPairwise diluted_2d(double pitch_div = 16) {
  return DilutedPairwise(Tiling(2, 0.35), 1.8, core_tail_profile(2), 0.35 / pitch_div);
}

// Independent radial oracle: S_d * integral of r^{d-1} phi(r) by adaptive Gauss-Kronrod.
double radial_oracle(const RadialTable& phi, int d, double a, double b) {
  auto f = [&](double r) { return std::pow(r, d - 1) * phi(r); };
  double total = 0.0;
  std::vector<double> knots{a};
  for (double r : phi.radii())
    if (r > a && r < b) knots.push_back(r);
  knots.push_back(b);
  for (std::size_t k = 0; k + 1 < knots.size(); ++k)
    total += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, knots[k], knots[k + 1], 15, 1e-14);
  return unit_sphere_area(d) * total;
}

std::vector<MarkedPoint> dense_block(const Tiling& t, int half_tiles, Rng& rng) {
  std::vector<MarkedPoint> pts;
  const int d = t.dim();
  for (int a = -half_tiles; a <= half_tiles; ++a)
    for (int b = (d > 1 ? -half_tiles : 0); b <= (d > 1 ? half_tiles : 0); ++b) {
      const Vec c = t.center({a, b, 0});
      MarkedPoint p;
      p.x = c;
      p.x[0] += t.delta() * (uniform01(rng) - 0.5) * 0.9;
      if (d > 1) p.x[1] += t.delta() * (uniform01(rng) - 0.5) * 0.9;
      pts.push_back(p);
    }
  return pts;
}

}  // namespace

TEST_CASE("empty configurations have zero energy") {
  const Tiling t2(2, 0.3);
  AreaInteraction area(t2, 1.0, 1.0, 0.4, 0.5, 0.3 / 32);
  KnnStrauss knn(Tiling(1, 0.25), 1.0, 2, 1.0, 1.0);
  Surrogate surr(Tiling(1, 1.0), 1.0, 0.5, SurrogateTable::random(1, 1, 1.0, 0.5, 0.3, 2));
  const auto diluted = diluted_2d();
  const Configuration e1 = config(1, {});
  const Configuration e2 = config(2, {});
  CHECK(knn.tile_energy(e1, {0, 0, 0}).value == 0.0);
  CHECK(surr.tile_energy(e1, {0, 0, 0}).value == 0.0);
  CHECK(area.tile_energy(e2, {0, 0, 0}).value == 0.0);
  CHECK(diluted.tile_energy(e2, {0, 0, 0}).value == 0.0);
  CHECK(hamiltonian(knn, e1).value == 0.0);
}

TEST_CASE("K-NN Strauss tile energy") {
  const Tiling t(1, 1.0);
  KnnStrauss knn(t, 1.0, 1, 1.0, 1.0);
  CHECK(knn.tile_energy(config(1, {pt(0.1), pt(0.4)}), {0, 0, 0}).value == doctest::Approx(2.0));
  CHECK(hamiltonian(knn, config(1, {pt(0.1)})).value == 0.0);
  CHECK(knn.saturated_tile_energy(config(1, {pt(0.1), pt(0.2), pt(0.3)}), {0, 0, 0}) == doctest::Approx(3.0));
  KnnStrauss knn3(Tiling(2, 0.25), 1.0, 3, 1.0, 0.7);
  CHECK(knn3.saturated_tile_energy(config(2, {pt(0.01, 0.01), pt(0.02, 0.05), pt(-0.1, 0.1)}), {0, 0, 0}) ==
        doctest::Approx(3 * 0.7 * 3));

  SUBCASE("matches the literal neighbour-sort reading") {
    Rng rng = make_rng(4);
    for (int trial = 0; trial < 300; ++trial) {
      const int K = 1 + trial % 4;
      const double R = 0.3 + 0.4 * uniform01(rng);
      const Tiling tt(2, 0.5);
      KnnStrauss m(tt, 1.0, K, R, 1.3);
      const auto c = sample_poisson(cube_window(2, -1.5, 1.5), 6.0, MarkLaw::none(), rng);
      const Index i{trial % 3 - 1, trial % 2, 0};
      CHECK(m.tile_energy(c, i).value == doctest::Approx(knn_strauss_reference(c, tt, i, K, R, 1.3)).epsilon(1e-12));
    }
  }
}

TEST_CASE("local energy of a point") {
  const Tiling t(1, 1.0);
  KnnStrauss knn(t, 1.0, 1, 1.0, 1.0);
  CHECK(local_energy_point(knn, config(1, {pt(0.5)}), pt(0.0)).value == doctest::Approx(2.0));
  CHECK(local_energy_point(knn, config(1, {}), pt(0.0)).value == hamiltonian(knn, config(1, {pt(0.0)})).value);
  const auto far = config(1, {pt(10.0), pt(10.2)});
  CHECK(local_energy_point(knn, far, pt(0.0)).value == doctest::Approx(hamiltonian(knn, config(1, {pt(0.0)})).value));
  CHECK_THROWS_AS(local_energy_point(knn, far, pt(10.0)), ValidationError);
}

TEST_CASE("local energy of a region agrees with its finite-range definition") {
  Rng rng = make_rng(8);
  const Tiling t(2, 0.5);
  KnnStrauss knn(t, 1.0, 2, 0.8, 1.0);
  Surrogate surr(t, 1.0, 0.4, SurrogateTable::random(2, 1, 2.0, 0.4, 1.0, 9));
  for (const TileEnergyModel* m : {static_cast<const TileEnergyModel*>(&knn), static_cast<const TileEnergyModel*>(&surr)}) {
    const double rho = m->range() + 2.0 * std::sqrt(2.0) * t.delta();
    for (int trial = 0; trial < 50; ++trial) {
      const auto c = sample_poisson(cube_window(2, -4, 4), 1.5, MarkLaw::none(), rng);
      const Window region = cube_window(2, -1.0, 1.0);
      const double value = local_energy_region(*m, c, region).value;
      for (double r : {rho, 2.0 * rho}) {
        const Window grown = cube_window(2, -1.0 - r, 1.0 + r);
        const auto near = c.filtered([&](const MarkedPoint& p) { return grown.contains(p.x); });
        const auto shell = near.filtered([&](const MarkedPoint& p) { return !region.contains(p.x); });
        CHECK(value == doctest::Approx(hamiltonian(*m, near).value - hamiltonian(*m, shell).value).epsilon(1e-12));
      }
      const auto outside = c.filtered([&](const MarkedPoint& p) { return !region.contains(p.x); });
      CHECK(local_energy_region(*m, outside, region).value == 0.0);
    }
    const auto c = sample_poisson(cube_window(2, -1, 1), 2.0, MarkLaw::none(), 3);
    CHECK(local_energy_region(*m, c, cube_window(2, -1, 1)).value ==
          doctest::Approx(hamiltonian(*m, c).value).epsilon(1e-12));
  }
}

TEST_CASE("radial potential tables") {
  const auto p = core_tail_profile(2);
  CHECK(p.R1() == doctest::Approx(0.5));
  CHECK(p.R2() == doctest::Approx(0.8));
  CHECK(p.phi(0.15) == doctest::Approx(1.5));
  CHECK(p.phi(0.9) == 0.0);
  for (int d = 1; d <= 3; ++d) {
    const auto q = core_tail_profile(d);
    CHECK(q.c_phi() == doctest::Approx(radial_oracle(q.phi, d, 0.0, 0.8)).epsilon(1e-12));
    CHECK(radial_integral(q.phi, d, 0.2, 0.6, RadialPart::signed_value) ==
          doctest::Approx(radial_oracle(q.phi, d, 0.2, 0.6)).epsilon(1e-12));
    CHECK(q.positive_inside_R() - q.negative_total() == doctest::Approx(q.c_phi()).epsilon(1e-12));
    CHECK(q.abs_integral() == doctest::Approx(q.positive_inside_R() + q.negative_total()).epsilon(1e-12));
  }
  CHECK(unit_sphere_area(2) == doctest::Approx(2 * kPi));
  CHECK(unit_ball_volume(3) == doctest::Approx(4.0 * kPi / 3.0));

  const auto tr = p.phi.truncated(0.2);
  CHECK(tr(0.0) == doctest::Approx(p.phi(0.2)));
  CHECK(tr(0.1) == doctest::Approx(p.phi(0.2)));
  CHECK(tr(0.6) == doctest::Approx(p.phi(0.6)));

  std::stringstream csv("radius,value\n0,1\n0.5,0\n");
  const auto t = read_radial_csv(csv);
  CHECK(t.support_radius() == 0.5);
  std::stringstream bad("0,1\n0.5\n");
  CHECK_THROWS_AS(read_radial_csv(bad), ValidationError);
  CHECK_THROWS_AS(RadialTable({0.5, 0.2}, {1.0, 0.0}), ValidationError);
}

TEST_CASE("diluted pairwise saturation and bounds") {
  const auto m = diluted_2d();
  const Tiling& t = m.tiling();
  const double sat = t.tile_volume() * m.c_phi();
  CHECK(m.saturation().b0 == doctest::Approx(sat));
  CHECK(m.saturation_issue().empty());
  Rng rng = make_rng(21);

  SUBCASE("homogeneous dense neighbourhood gives delta^d C_phi") {
    const auto c = config(2, dense_block(t, 9, rng));
    const auto e = m.tile_energy(c, {0, 0, 0});
    CHECK(std::abs(e.value - sat) <= e.error + 1e-12);
    CHECK(m.saturated_tile_energy(c, {0, 0, 0}) == doctest::Approx(sat));
  }
  SUBCASE("far-separated points are additive") {
    const double single = hamiltonian(m, config(2, {pt(0.1, 0.05)})).value;
    const double pair = hamiltonian(m, config(2, {pt(0.1, 0.05), pt(0.1 + 3 * t.delta() * 10, 0.05)})).value;
    CHECK(pair == doctest::Approx(2 * single).epsilon(1e-12));
    CHECK(single > 0.0);
  }
  SUBCASE("global bound and convergence") {
    const double bound = t.tile_volume() * m.profile().abs_integral();
    double worst_ratio = 0.0;
    for (int trial = 0; trial < 30; ++trial) {
      const auto c = sample_poisson(cube_window(2, -2, 2), 0.3 + 1.2 * uniform01(rng), MarkLaw::none(), rng);
      const auto bins = TileBins(t, c);
      const auto e = m.tile_energy(bins, {0, 0, 0});
      CHECK(std::abs(e.value) <= bound + e.error);
      // Halving the pitch changes the value by at most a constant times the pitch.
      const double coarse = m.tile_energy_at(bins, {0, 0, 0}, 8);
      const double fine = m.tile_energy_at(bins, {0, 0, 0}, 16);
      const double finer = m.tile_energy_at(bins, {0, 0, 0}, 32);
      if (std::abs(coarse - fine) > 1e-9) worst_ratio = std::max(worst_ratio, std::abs(fine - finer) / std::abs(coarse - fine));
      CHECK(std::abs(fine - finer) <= 0.5 * t.delta() / 16 * 0.05 + 1e-12);
    }
    CHECK(worst_ratio < 1.0);
  }
}

TEST_CASE("area interaction") {
  const Tiling t(2, 0.3);
  AreaInteraction m(t, 1.0, 2.0, 0.45, 0.55, 0.3 / 32);
  CHECK(m.saturation_issue().empty());
  SUBCASE("disc covering the tile") {
    MarkedPoint p = pt(0.02, -0.01);
    p.radius = 0.5;
    const auto e = m.tile_energy(config(2, {p}), {0, 0, 0});
    CHECK(e.value == doctest::Approx(2.0 * 0.09).epsilon(1e-12));
  }
  SUBCASE("half-plane cut gives the exact area") {
    // A disc of radius 0.5 centred 0.5 to the right of the tile centre cuts the tile along an arc.
    MarkedPoint p = pt(0.5, 0.0);
    p.radius = 0.5;
    const auto e = m.tile_energy(config(2, {p}), {0, 0, 0});
    // Area of {x in [-0.15, 0.15]^2 : (x - 0.5)^2 + y^2 <= 0.25}: x from 0.5 - sqrt(0.25 - y^2) to 0.15.
    auto width = [](double y) { return std::max(0.0, 0.15 - (0.5 - std::sqrt(0.25 - y * y))); };
    const double area =
        boost::math::quadrature::gauss_kronrod<double, 61>::integrate(width, -0.15, 0.15, 15, 1e-14);
    CHECK(std::abs(e.value - 2.0 * area) <= e.error + 1e-6);
    CHECK(e.error <= 1e-4);
  }
  CHECK_THROWS_AS(AreaInteraction(Tiling(1, 0.3), 1.0, 1.0, 0.4, 0.5, 0.01), ValidationError);
}

TEST_CASE("surrogate tables") {
  SUBCASE("saturation constraint enforced") {
    auto table = SurrogateTable::penalized(1, 1, 1.0, 0.5, 2.0);
    auto values = table.values();
    values[0] = 0.1;
    CHECK_THROWS_AS(Surrogate(Tiling(1, 1.0), 1.0, 0.5, SurrogateTable(1, 1, values)), ValidationError);
    CHECK_NOTHROW(Surrogate(Tiling(1, 1.0), 1.0, 0.5, table));
  }
  SUBCASE("energy depends on occupancy only") {
    Surrogate s(Tiling(1, 1.0), 1.0, 0.5, SurrogateTable::penalized(1, 1, 1.0, 0.5, 2.0));
    const auto a = config(1, {pt(0.0), pt(1.0)});
    const auto b = config(1, {pt(0.2), pt(-0.3), pt(0.9)});
    CHECK(s.tile_energy(a, {0, 0, 0}).value == s.tile_energy(b, {0, 0, 0}).value);
    CHECK(s.tile_energy(a, {0, 0, 0}).value == doctest::Approx(2.5));
    CHECK(s.tile_energy(a, {5, 0, 0}).value == 0.0);
    const auto dense = config(1, {pt(-1.0), pt(0.0), pt(1.0)});
    CHECK(s.tile_energy(dense, {0, 0, 0}).value == doctest::Approx(0.5));
  }
  SUBCASE("symmetric tables are invariant under spin flip on mixed patterns") {
    auto tab = SurrogateTable::symmetric(2, 1, 1.0, 0.0, 1.0, 4);
    const std::uint32_t all = (1u << tab.bits()) - 1;
    for (std::uint32_t code = 0; code <= all; ++code) CHECK(tab[code] == tab[all & ~code]);
  }
  SUBCASE("table file") {
    const auto tab = SurrogateTable::random(1, 1, 1.0, 0.3, 1.0, 5);
    std::stringstream ss;
    ss << "# header\n";
    for (double v : tab.values()) ss << std::setprecision(17) << v << "\n";
    const auto back = read_surrogate_table(ss, 1, 1);
    CHECK(back.values() == tab.values());
    std::stringstream short_table("0 1 2");
    CHECK_THROWS_AS(read_surrogate_table(short_table, 1, 1), ValidationError);
  }
  CHECK_THROWS_AS(SurrogateTable::saturated(3, 1, 1.0, 0.0), ValidationError);
}

TEST_CASE("assumption checks") {
  SUBCASE("surrogate passes exactly") {
    Surrogate s(Tiling(2, 1.0), 1.0, 0.7, SurrogateTable::random(2, 1, 1.0, 0.7, 0.5, 3));
    const auto rep = check_assumptions(s, 200, 1);
    CHECK(rep.passed);
    for (const auto& c : rep.checks) CHECK(c.worst == 0.0);
  }
  SUBCASE("K-NN Strauss with dense tile balls passes") {
    KnnStrauss knn(Tiling(2, 0.25), 1.0, 3, 1.0, 1.0);
    CHECK(knn.saturation_issue().empty());
    CHECK(check_assumptions(knn, 300, 2).passed);
  }
  SUBCASE("K-NN Strauss with sparse tile balls fails saturation") {
    KnnStrauss knn(Tiling(1, 1.0), 1.0, 3, 1.0, 1.0);
    CHECK_FALSE(knn.saturation_issue().empty());
    const auto rep = check_assumptions(knn, 300, 2);
    CHECK_FALSE(rep.find("saturation")->passed);
  }
  SUBCASE("diluted pairwise with coarse tiles fails saturation") {
    DilutedPairwise m(Tiling(2, 1.5), 3.0, core_tail_profile(2), 1.5 / 8);
    CHECK_FALSE(m.saturation_issue().empty());
    const auto rep = check_assumptions(m, 60, 3);
    const auto* sat = rep.find("saturation");
    REQUIRE(sat != nullptr);
    CHECK_FALSE(sat->passed);
    CHECK_FALSE(sat->witness.empty());
  }
  SUBCASE("area interaction passes") {
    AreaInteraction m(Tiling(2, 0.3), 1.0, 1.0, 0.45, 0.55, 0.3 / 32);
    const auto rep = check_assumptions(m, 100, 4);
    CHECK(rep.passed);
    CHECK(rep.find("locality")->max_error <= 1e-4);
  }
  CHECK_THROWS_AS(check_assumptions(KnnStrauss(Tiling(1, 1.0), 1.0, 1, 1.0, 1.0), 0, 1), ValidationError);
}

TEST_CASE("model configuration files") {
  const std::string dir = "/tmp/satgibbs_test_models";
  std::filesystem::create_directories(dir);
  {
    std::ofstream phi(dir + "/phi.csv");
    phi << "radius,value\n0,2\n0.3,1\n0.5,0\n0.65,-0.1\n0.8,0\n";
  }
  auto parse = [&](const std::string& text) {
    std::ofstream f(dir + "/model.cfg");
    f << text;
    f.close();
    return KvConfig::load(dir + "/model.cfg");
  };

  SUBCASE("each kind loads") {
    auto knn = parse("[model]\nkind = knn_strauss\ndim = 1\ndelta = 0.25\nL = 1\nK = 2\nR = 1\nA = 1.5\n");
    CHECK(load_model(knn)->kind() == ModelKind::knn_strauss);
    knn.reject_unknown();
    auto dil = parse("[model]\nkind = diluted_pairwise\ndim = 2\ndelta = 0.35\nL = 1.8\nphi_file = phi.csv\nR = 1\n");
    const auto dm = load_model(dil);
    CHECK(dm->kind() == ModelKind::diluted_pairwise);
    CHECK(dynamic_cast<const DilutedPairwise&>(*dm).pitch() == doctest::Approx(0.35 / 16));
    CHECK(dil.resolved().find("model.pitch") != std::string::npos);
    auto area = parse("[model]\nkind = area_interaction\ndim = 2\ndelta = 0.3\nL = 1\ntheta = 1\nr_min = 0.45\nr_max = 0.55\n");
    CHECK(load_model(area)->kind() == ModelKind::area_interaction);
    auto sur = parse("[model]\nkind = surrogate\ndim = 1\ndelta = 1\nL = 1\nb0 = 1\npenalty = 0.5\n");
    const auto sm = load_surrogate(sur);
    CHECK(sm->b0() == 1.0);
    CHECK(sm->rho() == 1);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(load_model(parse("[model]\nkind = nope\ndim = 1\ndelta = 1\nL = 1\n")), ValidationError);
    CHECK_THROWS_AS(parse("[model]\nkind = a\nkind = b\n"), ValidationError);
    auto extra = parse("[model]\nkind = knn_strauss\ndim = 1\ndelta = 1\nL = 1\nK = 1\nR = 1\nA = 1\ntypo = 3\n");
    load_model(extra);
    CHECK_THROWS_AS(extra.reject_unknown(), ValidationError);
    CHECK_THROWS_AS(load_model(parse("[model]\nkind = knn_strauss\ndim = 1\ndelta = -1\nL = 1\nK = 1\nR = 1\nA = 1\n")),
                    ValidationError);
    CHECK_THROWS_AS(load_model(parse("[model]\nkind = knn_strauss\ndim = 1\ndelta = 1\nL = 1\nK = 1\nR = 1\n")),
                    ValidationError);
  }
}
