#include "satgibbs/config_io.hpp"

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "satgibbs/errors.hpp"

namespace satgibbs {

void write_configuration_csv(std::ostream& os, const Configuration& config) {
  const int d = config.dim();
  for (int k = 0; k < d; ++k) os << 'x' << (k + 1) << ',';
  os << "mark\n";
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (const auto& p : config.points()) {
    for (int k = 0; k < d; ++k) os << p.x[k] << ',';
    if (p.radius) os << *p.radius;
    os << '\n';
  }
}

Configuration read_configuration_csv(std::istream& is, const Window& window) {
  const int d = window.dim;
  std::string line;
  require(static_cast<bool>(std::getline(is, line)), "configuration CSV: missing header");
  std::string expected;
  for (int k = 0; k < d; ++k) expected += "x" + std::to_string(k + 1) + ",";
  expected += "mark";
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == expected, "configuration CSV: header must be '" + expected + "'");
  std::vector<MarkedPoint> pts;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    MarkedPoint p;
    for (int k = 0; k <= d; ++k) {
      if (!std::getline(ss, cell, ',')) cell.clear();
      if (k < d) {
        require(!cell.empty(), "configuration CSV: missing coordinate");
        try {
          p.x[k] = std::stod(cell);
        } catch (const std::exception&) {
          throw ValidationError("configuration CSV: bad number '" + cell + "'");
        }
      } else if (!cell.empty()) {
        try {
          p.radius = std::stod(cell);
        } catch (const std::exception&) {
          throw ValidationError("configuration CSV: bad mark '" + cell + "'");
        }
      }
    }
    pts.push_back(p);
  }
  return Configuration(window, std::move(pts));
}

std::string configuration_to_json(const Configuration& config, double delta) {
  const int d = config.dim();
  nlohmann::json j;
  j["dimension"] = d;
  j["delta"] = delta;
  std::vector<double> lo(config.window().lo.begin(), config.window().lo.begin() + d);
  std::vector<double> hi(config.window().hi.begin(), config.window().hi.begin() + d);
  j["window"] = {{"lo", lo}, {"hi", hi}};
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : config.points()) {
    nlohmann::json row = nlohmann::json::array();
    for (int k = 0; k < d; ++k) row.push_back(p.x[k]);
    if (p.radius)
      row.push_back(*p.radius);
    else
      row.push_back(nullptr);
    pts.push_back(row);
  }
  j["points"] = pts;
  return j.dump();
}

Configuration configuration_from_json(const std::string& text, double* delta) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
    const int d = j.at("dimension").get<int>();
    check_dimension(d);
    if (delta) *delta = j.at("delta").get<double>();
    Window w;
    w.dim = d;
    const auto lo = j.at("window").at("lo").get<std::vector<double>>();
    const auto hi = j.at("window").at("hi").get<std::vector<double>>();
    require(static_cast<int>(lo.size()) == d && static_cast<int>(hi.size()) == d, "window has wrong dimension");
    for (int k = 0; k < d; ++k) {
      w.lo[k] = lo[k];
      w.hi[k] = hi[k];
    }
    std::vector<MarkedPoint> pts;
    for (const auto& row : j.at("points")) {
      require(row.is_array() && static_cast<int>(row.size()) == d + 1, "point row must have d+1 entries");
      MarkedPoint p;
      for (int k = 0; k < d; ++k) p.x[k] = row[k].get<double>();
      if (!row[d].is_null()) p.radius = row[d].get<double>();
      pts.push_back(p);
    }
    return Configuration(w, std::move(pts));
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("configuration JSON: ") + e.what());
  }
}

}  // namespace satgibbs
