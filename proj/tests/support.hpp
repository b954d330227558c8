#pragma once

// Shared generators and oracles for the unit tests.

#include <cmath>
#include <random>

#include "homoglab/torus_spectral.hpp"

namespace testing {

using namespace homoglab;

inline torus::SpectralField random_field(const torus::CellGrid& grid, int components,
                                         torus::Domain domain, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    torus::SpectralField f(grid, components, domain);
    for (auto& v : f.values()) v = Complex(gauss(rng), gauss(rng));
    return f;
}

/// Random frequency-domain field supported on |m_i| <= band.
inline torus::SpectralField band_limited(const torus::CellGrid& grid, int components, int band,
                                         std::mt19937_64& rng) {
    torus::SpectralField f = random_field(grid, components, torus::Domain::frequency, rng);
    for (int c = 0; c < components; ++c) {
        auto v = f.component(c);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Mode m = grid.mode(i);
            if (std::abs(m[0]) > band || std::abs(m[1]) > band) v[i] = 0.0;
        }
    }
    return f;
}

/// Evaluates sum_m c_m exp(2 pi i m.y) by direct summation.
inline Complex evaluate(const torus::SpectralField& f, int component, const Wavevector& y) {
    const auto v = f.component(component);
    Complex s{};
    for (std::size_t i = 0; i < f.grid().size(); ++i) {
        const Mode m = f.grid().mode(i);
        s += v[i] * std::polar(1.0, two_pi * (m[0] * y[0] + m[1] * y[1]));
    }
    return s;
}

inline double max_abs_diff(std::span<const Complex> a, std::span<const Complex> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst;
}

inline double max_abs(std::span<const Complex> a) {
    double worst = 0.0;
    for (const auto& x : a) worst = std::max(worst, std::abs(x));
    return worst;
}

inline torus::CoefficientCell scalar_coefficient(int d, std::vector<torus::CoefficientTerm> terms,
                                                 int n = 64) {
    return torus::CoefficientCell(torus::CoefficientKind::scalar, d, std::move(terms),
                                  torus::CellGrid(d, n));
}

inline Eigen::MatrixXcd scalar(Complex v) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = v;
    return m;
}

/// 2 + sin(2 pi y_1), scalar.
inline torus::CoefficientCell two_plus_sine(int d = 1, int n = 64) {
    return scalar_coefficient(d, {{{0, 0}, scalar(2.0)},
                                  {{1, 0}, scalar(Complex(0.0, -0.5))},
                                  {{-1, 0}, scalar(Complex(0.0, 0.5))}},
                              n);
}

} // namespace testing
