#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace satgibbs {

// Radial pair potential given by samples with linear interpolation.
// Below the first radius the first value is held; beyond the last radius the potential is 0.
class RadialTable {
 public:
  RadialTable() = default;
  RadialTable(std::vector<double> radii, std::vector<double> values);

  double operator()(double r) const;
  const std::vector<double>& radii() const { return r_; }
  const std::vector<double>& values() const { return v_; }
  double support_radius() const { return r_.back(); }     // R2
  double positive_radius() const;                          // R1 = sup{r : phi(r) > 0}, 0 if none
  double min_radius() const { return r_.front(); }

  // phi held constant at phi(eps) on [0, eps], unchanged elsewhere.
  RadialTable truncated(double eps) const;

 private:
  std::vector<double> r_;
  std::vector<double> v_;
};

RadialTable read_radial_csv(std::istream& is);
RadialTable load_radial_csv(const std::string& path);

// Surface measure of the unit sphere in R^d (2 for d = 1).
double unit_sphere_area(int d);
double unit_ball_volume(int d);

enum class RadialPart { signed_value, positive, negative, absolute };

// Integral over the shell a <= |x| <= b in R^d of part(phi(|x|)), exact for the piecewise-linear table.
double radial_integral(const RadialTable& phi, int d, double a, double b, RadialPart part);

struct PotentialProfile {
  RadialTable phi;
  double R = 1.0;  // dilution scale
  int dim = 2;

  double R1() const { return phi.positive_radius(); }
  double R2() const { return phi.support_radius(); }
  double c_phi() const;              // integral of phi over R^d
  double abs_integral() const;       // integral of |phi|
  double positive_inside_R() const;  // integral of phi+ over B(0,R)
  double positive_shell() const;     // integral of phi+ over B(0,R1) minus B(0,R); 0 when R1 <= R
  double negative_total() const;     // integral of phi- over R^d
  void validate(bool require_positive_part = true) const;
};

}  // namespace satgibbs
