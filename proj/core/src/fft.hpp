#pragma once

#include "homoglab/torus_spectral.hpp"

namespace homoglab::detail {

// Nodal values -> expansion coefficients in exp(2 pi i m.y), y on the
// [-1/2, 1/2) grid: c_m = (-1)^{|m|} DFT(x)_m / n^d.
void nodes_to_coefficients(const torus::CellGrid& grid, const Complex* in, Complex* out);
// Inverse of nodes_to_coefficients.
void coefficients_to_nodes(const torus::CellGrid& grid, const Complex* in, Complex* out);

// Unnormalised length-n DFT, out_k = sum_j in_j exp(sign 2 pi i j k / n), sign = -1 or +1.
void dft_1d(int n, int sign, const Complex* in, Complex* out);

} // namespace homoglab::detail
