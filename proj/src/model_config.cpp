#include "satgibbs/model_config.hpp"

#include <fstream>

#include "satgibbs/errors.hpp"

namespace satgibbs {

namespace {

const char* kSection = "model";

Tiling tiling_of(const KvConfig& cfg) {
  const int dim = cfg.get_int(kSection, "dim");
  check_dimension(dim);
  const double delta = cfg.get_double(kSection, "delta");
  require(delta > 0.0, "model.delta must be positive");
  return Tiling(dim, delta);
}

double saturation_length(const KvConfig& cfg) {
  const double L = cfg.get_double(kSection, "L");
  require(L > 0.0, "model.L must be positive");
  return L;
}

}  // namespace

double default_area_pitch(double delta) { return delta / 32.0; }
double default_diluted_pitch(double delta) { return delta / 16.0; }

PotentialProfile load_profile(const KvConfig& cfg) {
  PotentialProfile p;
  p.phi = load_radial_csv(cfg.get_path(kSection, "phi_file"));
  p.R = cfg.get_double(kSection, "R");
  p.dim = cfg.get_int(kSection, "dim");
  p.validate();
  return p;
}

std::shared_ptr<const Surrogate> load_surrogate(const KvConfig& cfg) {
  const auto kind = cfg.get_string(kSection, "kind");
  require(kind == "surrogate", "model.kind must be surrogate here, got " + kind);
  const auto tiling = tiling_of(cfg);
  const double L = saturation_length(cfg);
  const int rho = cfg.get_int(kSection, "rho", 1);
  const double b0 = cfg.get_double(kSection, "b0", 0.0);
  const double ball = L / tiling.delta();
  const auto table_kind = cfg.get_string(kSection, "table", std::string("penalized"));
  SurrogateTable table;
  if (table_kind == "saturated") {
    table = SurrogateTable::saturated(tiling.dim(), rho, ball, b0);
  } else if (table_kind == "penalized") {
    table = SurrogateTable::penalized(tiling.dim(), rho, ball, b0, cfg.get_double(kSection, "penalty"));
  } else if (table_kind == "random") {
    table = SurrogateTable::random(tiling.dim(), rho, ball, b0, cfg.get_double(kSection, "amplitude"),
                                   cfg.get_u64(kSection, "table_seed", 1));
  } else if (table_kind == "symmetric") {
    table = SurrogateTable::symmetric(tiling.dim(), rho, ball, b0, cfg.get_double(kSection, "amplitude"),
                                      cfg.get_u64(kSection, "table_seed", 1));
  } else if (table_kind == "file") {
    const auto path = cfg.get_path(kSection, "table_file");
    std::ifstream in(path);
    require(in.good(), "cannot open surrogate table " + path);
    table = read_surrogate_table(in, tiling.dim(), rho);
  } else {
    throw ValidationError("unknown surrogate table kind: " + table_kind);
  }
  return std::make_shared<const Surrogate>(tiling, L, b0, std::move(table));
}

ModelPtr load_model(const KvConfig& cfg) {
  const auto kind = cfg.get_string(kSection, "kind");
  if (kind == "surrogate") return load_surrogate(cfg);
  const auto tiling = tiling_of(cfg);
  const double L = saturation_length(cfg);
  if (kind == "knn_strauss")
    return std::make_shared<const KnnStrauss>(tiling, L, cfg.get_int(kSection, "K"), cfg.get_double(kSection, "R"),
                                              cfg.get_double(kSection, "A"));
  if (kind == "area_interaction")
    return std::make_shared<const AreaInteraction>(
        tiling, L, cfg.get_double(kSection, "theta"), cfg.get_double(kSection, "r_min"),
        cfg.get_double(kSection, "r_max"), cfg.get_double(kSection, "pitch", default_area_pitch(tiling.delta())));
  if (kind == "diluted_pairwise") {
    const auto profile = load_profile(cfg);
    return std::make_shared<const DilutedPairwise>(
        tiling, L, profile, cfg.get_double(kSection, "pitch", default_diluted_pitch(tiling.delta())));
  }
  throw ValidationError("unknown model kind: " + kind);
}

}  // namespace satgibbs
