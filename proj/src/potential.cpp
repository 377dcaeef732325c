#include "satgibbs/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include <boost/math/constants/constants.hpp>

#include "satgibbs/errors.hpp"

namespace satgibbs {

namespace {

const double kPi = boost::math::constants::pi<double>();

// Integral of r^(d-1) * (p + q r) over [a, b].
double linear_moment(int d, double p, double q, double a, double b) {
  const double da = static_cast<double>(d);
  return p * (std::pow(b, da) - std::pow(a, da)) / da + q * (std::pow(b, da + 1) - std::pow(a, da + 1)) / (da + 1);
}

}  // namespace

RadialTable::RadialTable(std::vector<double> radii, std::vector<double> values)
    : r_(std::move(radii)), v_(std::move(values)) {
  require(!r_.empty() && r_.size() == v_.size(), "radial table needs matching, nonempty columns");
  for (std::size_t k = 0; k < r_.size(); ++k) {
    require(std::isfinite(r_[k]) && std::isfinite(v_[k]), "radial table entries must be finite");
    require(r_[k] >= 0.0, "radial table radii must be nonnegative");
    if (k) require(r_[k] > r_[k - 1], "radial table radii must be strictly increasing");
  }
  require(r_.back() > 0.0, "radial table support radius must be positive");
}

double RadialTable::operator()(double r) const {
  if (r > r_.back()) return 0.0;
  if (r <= r_.front()) return v_.front();
  auto it = std::upper_bound(r_.begin(), r_.end(), r);
  const std::size_t k = static_cast<std::size_t>(it - r_.begin());
  const double t = (r - r_[k - 1]) / (r_[k] - r_[k - 1]);
  return v_[k - 1] + t * (v_[k] - v_[k - 1]);
}

double RadialTable::positive_radius() const {
  for (std::size_t k = r_.size(); k-- > 0;) {
    if (v_[k] > 0.0) {
      if (k + 1 == r_.size()) return r_[k];
      // v_[k] > 0 >= v_[k+1]: the positive part ends at the linear root.
      return r_[k] + (r_[k + 1] - r_[k]) * v_[k] / (v_[k] - v_[k + 1]);
    }
  }
  return 0.0;
}

RadialTable RadialTable::truncated(double eps) const {
  require(eps > 0.0 && eps < r_.back(), "truncation radius must lie inside the support");
  std::vector<double> r{0.0, eps};
  const double at = (*this)(eps);
  std::vector<double> v{at, at};
  for (std::size_t k = 0; k < r_.size(); ++k)
    if (r_[k] > eps) {
      r.push_back(r_[k]);
      v.push_back(v_[k]);
    }
  return RadialTable(std::move(r), std::move(v));
}

RadialTable read_radial_csv(std::istream& is) {
  std::vector<double> r, v;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a = 0.0, b = 0.0;
    if (!(ss >> a >> b)) {
      // A non-numeric first row is treated as a header.
      if (r.empty() && v.empty()) continue;
      throw ValidationError("radial CSV: malformed row '" + line + "'");
    }
    r.push_back(a);
    v.push_back(b);
  }
  return RadialTable(std::move(r), std::move(v));
}

RadialTable load_radial_csv(const std::string& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "cannot open potential table '" + path + "'");
  return read_radial_csv(in);
}

double unit_sphere_area(int d) {
  require(d >= 1, "dimension must be positive");
  return 2.0 * std::pow(kPi, d / 2.0) / std::tgamma(d / 2.0);
}

double unit_ball_volume(int d) { return unit_sphere_area(d) / d; }

double radial_integral(const RadialTable& phi, int d, double a, double b, RadialPart part) {
  require(a >= 0.0 && b >= a, "radial integral needs 0 <= a <= b");
  const auto& rs = phi.radii();
  const auto& vs = phi.values();
  // Pieces: [0, r0] constant, then linear segments; nothing beyond the last radius.
  std::vector<double> knots{0.0};
  std::vector<double> vals{vs.front()};
  if (rs.front() > 0.0) {
    knots.push_back(rs.front());
    vals.push_back(vs.front());
  }
  for (std::size_t k = 1; k < rs.size(); ++k) {
    knots.push_back(rs[k]);
    vals.push_back(vs[k]);
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    const double lo = std::max(a, knots[k]);
    const double hi = std::min(b, knots[k + 1]);
    if (hi <= lo) continue;
    const double q = (vals[k + 1] - vals[k]) / (knots[k + 1] - knots[k]);
    const double p = vals[k] - q * knots[k];
    // Split at the sign change of p + q r when the part is one-sided.
    std::vector<double> cuts{lo};
    if (q != 0.0) {
      const double root = -p / q;
      if (root > lo && root < hi) cuts.push_back(root);
    }
    cuts.push_back(hi);
    for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
      const double mid = 0.5 * (cuts[c] + cuts[c + 1]);
      const double sign = p + q * mid;
      double w = 0.0;
      switch (part) {
        case RadialPart::signed_value: w = 1.0; break;
        case RadialPart::positive: w = sign > 0.0 ? 1.0 : 0.0; break;
        case RadialPart::negative: w = sign < 0.0 ? -1.0 : 0.0; break;
        case RadialPart::absolute: w = sign < 0.0 ? -1.0 : 1.0; break;
      }
      if (w != 0.0) total += w * linear_moment(d, p, q, cuts[c], cuts[c + 1]);
    }
  }
  return unit_sphere_area(d) * total;
}

double PotentialProfile::c_phi() const { return radial_integral(phi, dim, 0.0, R2(), RadialPart::signed_value); }

double PotentialProfile::abs_integral() const { return radial_integral(phi, dim, 0.0, R2(), RadialPart::absolute); }

double PotentialProfile::positive_inside_R() const {
  return radial_integral(phi, dim, 0.0, std::min(R, R2()), RadialPart::positive);
}

double PotentialProfile::positive_shell() const {
  const double r1 = R1();
  if (r1 <= R) return 0.0;
  return radial_integral(phi, dim, R, r1, RadialPart::positive);
}

double PotentialProfile::negative_total() const { return radial_integral(phi, dim, 0.0, R2(), RadialPart::negative); }

void PotentialProfile::validate(bool require_positive_part) const {
  require(dim >= 1 && dim <= 3, "potential dimension must be 1, 2 or 3");
  require(std::isfinite(R) && R > 0.0, "dilution scale R must be positive");
  if (require_positive_part) require(R1() > 0.0, "potential must be positive somewhere (R1 > 0)");
}

}  // namespace satgibbs
