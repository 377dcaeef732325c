#pragma once

#include <iosfwd>
#include <string>

#include "satgibbs/geometry.hpp"

namespace satgibbs {

// CSV: header `x1,...,xd,mark`, one point per row, empty mark when unmarked.
void write_configuration_csv(std::ostream& os, const Configuration& config);
Configuration read_configuration_csv(std::istream& is, const Window& window);

// JSON: {dimension, delta, window: {lo, hi}, points: [[coords..., mark-or-null], ...]}.
std::string configuration_to_json(const Configuration& config, double delta);
Configuration configuration_from_json(const std::string& text, double* delta = nullptr);

}  // namespace satgibbs
