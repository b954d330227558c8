#include "homoglab/box_grid.hpp"

#include <cmath>
#include <string>

namespace homoglab {

BoxGrid::BoxGrid(int dimension, int cells_per_axis, int cell_points)
    : dimension_(dimension), m_(cells_per_axis), n_(cell_points) {
    if (cells_per_axis < 1) throw DomainError("BoxGrid: need at least one cell per axis");
    torus::CellGrid(dimension, cell_points);  // validates d and n
}

ComplexVector replicate_to_box(const torus::SpectralField& cell_field, int component, int M,
                               const torus::CellGrid& nodes) {
    if (cell_field.domain() != torus::Domain::frequency)
        throw DomainError("replicate_to_box: frequency-domain cell field required");
    const int points = nodes.points_per_axis();
    if (points % M != 0) throw DomainError("replicate_to_box: box points not a multiple of M");
    const int nc = points / M;
    if (nc < cell_field.grid().points_per_axis())
        throw DomainError("replicate_to_box: box grid coarser than the cell field");
    const torus::CellGrid fine(nodes.dimension(), nc);
    torus::SpectralField single(cell_field.grid(), 1, torus::Domain::frequency);
    const auto src = cell_field.component(component);
    std::copy(src.begin(), src.end(), single.component(0).begin());
    const torus::SpectralField nodal = torus::to_physical(torus::resample(single, fine));
    const auto values = nodal.component(0);

    // Box node l sits at -1/2 + l/(M nc); scaled by M this is -M/2 + l/nc,
    // which is the cell node with index l + nc (1 - M)/2 modulo nc.
    const int shift = nc * (1 - M) / 2;
    auto cell_index = [&](int l) { return ((l + shift) % nc + nc) % nc; };
    ComplexVector out(nodes.size());
    for (std::size_t p = 0; p < nodes.size(); ++p) {
        const Mode l = nodes.node_index(p);
        const std::size_t i = nodes.dimension() == 1
                                  ? std::size_t(cell_index(l[0]))
                                  : std::size_t(cell_index(l[0])) * std::size_t(nc) +
                                        std::size_t(cell_index(l[1]));
        out[p] = values[i];
    }
    return out;
}

int cells_for_eps(double eps) {
    if (!(eps > 0.0) || eps > 1.0) throw DomainError("eps must lie in (0, 1]");
    const double m = 1.0 / eps;
    const long rounded = std::lround(m);
    if (std::abs(m - double(rounded)) > 1e-9 * m)
        throw DomainError("eps = " + std::to_string(eps) + " is not the reciprocal of an integer");
    return int(rounded);
}

} // namespace homoglab
