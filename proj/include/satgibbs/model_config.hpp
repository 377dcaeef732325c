#pragma once

#include <memory>
#include <string>

#include "satgibbs/kv_config.hpp"
#include "satgibbs/models.hpp"

namespace satgibbs {

// Builds the model described by the [model] section:
//   kind = knn_strauss | area_interaction | diluted_pairwise | surrogate
//   dim, delta, L
//   knn_strauss:       K, R, A
//   area_interaction:  theta, r_min, r_max, pitch
//   diluted_pairwise:  phi_file, R, pitch
//   surrogate:         rho, b0, table (saturated | penalized | random | symmetric | file),
//                      penalty, amplitude, table_seed, table_file
ModelPtr load_model(const KvConfig& cfg);
std::shared_ptr<const Surrogate> load_surrogate(const KvConfig& cfg);
PotentialProfile load_profile(const KvConfig& cfg);

double default_area_pitch(double delta);
double default_diluted_pitch(double delta);

}  // namespace satgibbs
