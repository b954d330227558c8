#pragma once

// The periodic box [-1/2, 1/2)^d holding M^d copies of the unit cell scaled by eps = 1/M.

#include "homoglab/torus_spectral.hpp"

namespace homoglab {

class BoxGrid {
public:
    /// M cells per axis, n grid points per cell and axis; the box grid has M n points per axis.
    BoxGrid(int dimension, int cells_per_axis, int cell_points);

    int dimension() const noexcept { return dimension_; }
    int cells_per_axis() const noexcept { return m_; }
    int cell_points() const noexcept { return n_; }
    double eps() const noexcept { return 1.0 / m_; }

    torus::CellGrid grid() const { return torus::CellGrid(dimension_, m_ * n_); }
    torus::CellGrid cell_grid() const { return torus::CellGrid(dimension_, n_); }
    /// Same box with factor times as many points per cell.
    BoxGrid refined(int factor) const { return BoxGrid(dimension_, m_, n_ * factor); }

    friend bool operator==(const BoxGrid&, const BoxGrid&) = default;

private:
    int dimension_;
    int m_;
    int n_;
};

/// Nodal values of y -> f(M x) at the nodes x of `nodes`, for a frequency-domain
/// cell field f (one component). `nodes` must have a multiple of M points per
/// axis, and at least as many points per cell as the grid of f.
ComplexVector replicate_to_box(const torus::SpectralField& cell_field, int component, int M,
                               const torus::CellGrid& nodes);

/// Parses "1/M" or a decimal reciprocal of an integer; throws DomainError otherwise.
int cells_for_eps(double eps);

} // namespace homoglab
