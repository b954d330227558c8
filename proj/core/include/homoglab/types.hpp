#pragma once

#include <array>
#include <complex>
#include <vector>

namespace homoglab {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Point of the dual cell [-pi, pi)^d, or any real d-vector (unused axes are 0).
using Wavevector = std::array<double, 2>;

/// Integer frequency / multi-index (unused axes are 0).
using Mode = std::array<int, 2>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

} // namespace homoglab
