#include "homoglab/rates.hpp"

#include <cmath>
#include <limits>

#include "homoglab/errors.hpp"

namespace homoglab::rates {

SlopeFit fit_slope(std::span<const std::pair<double, double>> points) {
    if (points.size() < 2) throw DomainError("fit_slope: at least two points required");
    SlopeFit fit;
    for (const auto& [x, v] : points) {
        if (!(x > 0.0)) throw DomainError("fit_slope: abscissae must be positive");
        if (v < 0.0 || std::isnan(v)) throw DomainError("fit_slope: values must be nonnegative");
        if (v == 0.0) fit.exact_zero = true;
    }
    if (fit.exact_zero) {
        fit.slope = fit.intercept = std::numeric_limits<double>::quiet_NaN();
        return fit;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = double(points.size());
    for (const auto& [x, v] : points) {
        const double lx = std::log(x), ly = std::log(v);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double det = n * sxx - sx * sx;
    if (std::abs(det) <= 1e-14 * std::max(1.0, n * sxx))
        throw DomainError("fit_slope: abscissae must not all coincide");
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

} // namespace homoglab::rates
