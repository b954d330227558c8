#pragma once

#include <span>
#include <utility>

namespace homoglab::rates {

struct SlopeFit {
    double slope = 0.0;
    double intercept = 0.0;
    /// Some value was exactly zero: nothing was fitted and slope/intercept are NaN.
    bool exact_zero = false;
};

/// Least-squares line through (log x, log value). Needs at least two
/// points with distinct positive x; negative values are rejected.
SlopeFit fit_slope(std::span<const std::pair<double, double>> points);

} // namespace homoglab::rates
