#pragma once

#include <string>

#include "homoglab/torus_spectral.hpp"

namespace homoglab::torus {

/// Parses the coefficient file format: a JSON list of
/// {"freq": [k1, ...], "re": [[...], ...], "im": [[...], ...]}.
/// "im" may be omitted; scalar kinds also accept a bare number for "re"/"im".
/// A zero-frequency term is required. sampling_points = 0 picks a default
/// grid that resolves the polynomial.
CoefficientCell parse_coefficient(const std::string& json_text, CoefficientKind kind,
                                  int sampling_points = 0);
CoefficientCell load_coefficient(const std::string& path, CoefficientKind kind,
                                 int sampling_points = 0);

std::string coefficient_to_json(const CoefficientCell& c);

} // namespace homoglab::torus
