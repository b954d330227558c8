#include "homoglab/transforms_norms.hpp"

#include <cmath>

#include "fft.hpp"

namespace homoglab::norms {

namespace {

const double root_two_pi = std::sqrt(two_pi);

void require_length(const TimeGrid& time, std::size_t n, const char* what) {
    if (n != std::size_t(time.size())) throw DomainError(std::string(what) + ": length must be 2J");
}

} // namespace

// k_j t_i = 2 pi (s - J) i / S, so exp(-i k_j t_i) = (-1)^i exp(-2 pi i s i / S).
ComplexVector laplace_forward(const TimeGrid& time, std::span<const Complex> samples) {
    require_length(time, samples.size(), "laplace_forward");
    const int S = time.size();
    ComplexVector g(std::size_t(S), Complex{}), out(std::size_t(S), Complex{});
    for (int i = 0; i < S; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        g[std::size_t(i)] = sign * std::exp(-time.nu() * time.time(i)) * samples[std::size_t(i)];
    }
    detail::dft_1d(S, -1, g.data(), out.data());
    for (auto& v : out) v *= time.dt() / root_two_pi;
    return out;
}

ComplexVector laplace_inverse(const TimeGrid& time, std::span<const Complex> spectrum) {
    require_length(time, spectrum.size(), "laplace_inverse");
    const int S = time.size();
    ComplexVector out(std::size_t(S), Complex{});
    detail::dft_1d(S, +1, spectrum.data(), out.data());
    for (int i = 0; i < S; ++i) {
        const double sign = (i % 2 == 0) ? 1.0 : -1.0;
        out[std::size_t(i)] *= sign * std::exp(time.nu() * time.time(i)) * root_two_pi / time.horizon();
    }
    return out;
}

SpaceTimeField from_time_samples(const BoxGrid& box, const TimeGrid& time,
                                 const std::vector<torus::SpectralField>& samples) {
    require_length(time, samples.size(), "from_time_samples");
    const int components = samples.front().components();
    std::vector<torus::SpectralField> spatial;
    for (const auto& f : samples) {
        if (!(f.grid() == box.grid()) || f.components() != components)
            throw DomainError("from_time_samples: samples must share the box grid and shape");
        spatial.push_back(f.domain() == torus::Domain::frequency ? f : torus::to_frequency(f));
    }
    SpaceTimeField out(box, time, components);
    const std::size_t count = spatial.front().values().size();
    ComplexVector series(std::size_t(time.size()));
    for (std::size_t p = 0; p < count; ++p) {
        for (int i = 0; i < time.size(); ++i) series[std::size_t(i)] = spatial[std::size_t(i)].values()[p];
        const ComplexVector F = laplace_forward(time, series);
        for (int s = 0; s < time.size(); ++s) out.slice(s).values()[p] = F[std::size_t(s)];
    }
    return out;
}

std::vector<torus::SpectralField> to_time_samples(const SpaceTimeField& field) {
    const TimeGrid& time = field.time();
    std::vector<torus::SpectralField> out(std::size_t(time.size()),
                                          torus::SpectralField(field.grid(), field.components(),
                                                               torus::Domain::frequency));
    const std::size_t count = field.slice(0).values().size();
    ComplexVector spectrum(std::size_t(time.size()));
    for (std::size_t p = 0; p < count; ++p) {
        for (int s = 0; s < time.size(); ++s) spectrum[std::size_t(s)] = field.slice(s).values()[p];
        const ComplexVector f = laplace_inverse(time, spectrum);
        for (int i = 0; i < time.size(); ++i) out[std::size_t(i)].values()[p] = f[std::size_t(i)];
    }
    for (auto& f : out) f = torus::to_physical(f);
    return out;
}

double sobolev_norm(const torus::SpectralField& f, double s) {
    if (f.domain() != torus::Domain::frequency) throw DomainError("sobolev_norm: frequency domain required");
    const torus::CellGrid& g = f.grid();
    double total = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Wavevector xi = g.shifted_wavevector(i, {0.0, 0.0});
        const double weight = std::pow(1.0 + xi[0] * xi[0] + xi[1] * xi[1], s);
        for (int c = 0; c < f.components(); ++c) total += weight * std::norm(f.component(c)[i]);
    }
    return std::sqrt(total);
}

double norm_L2nu(const SpaceTimeField& field, double spatial_order) {
    double total = 0.0;
    for (int s = 0; s < field.time().size(); ++s) {
        if (field.slice_is_zero(s)) continue;
        const double v = sobolev_norm(field.slice(s), spatial_order);
        total += v * v;
    }
    return std::sqrt(field.time().dk() * total);
}

double norm_L2nu_samples(const TimeGrid& time, const std::vector<torus::SpectralField>& samples) {
    require_length(time, samples.size(), "norm_L2nu_samples");
    double total = 0.0;
    for (int i = 0; i < time.size(); ++i) {
        const double v = torus::norm(samples[std::size_t(i)]);
        total += time.dt() * std::exp(-2.0 * time.nu() * time.time(i)) * v * v;
    }
    return std::sqrt(total);
}

SpaceTimeField dt_multiplier(double s, const SpaceTimeField& field) {
    SpaceTimeField out = field;
    for (int slot = 0; slot < field.time().size(); ++slot)
        out.slice(slot) *= std::pow(field.time().lambda(slot), s);
    return out;
}

} // namespace homoglab::norms
