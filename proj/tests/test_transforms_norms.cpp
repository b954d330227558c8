#include <doctest.h>

#include <random>

#include "homoglab/transforms_norms.hpp"
#include "support.hpp"

using namespace homoglab;
using namespace homoglab::torus;

namespace {

std::vector<SpectralField> random_samples(const BoxGrid& box, const TimeGrid& time, std::mt19937_64& rng) {
    std::vector<SpectralField> out;
    for (int i = 0; i < time.size(); ++i) out.push_back(testing::band_limited(box.grid(), 1, 3, rng));
    return out;
}

} // namespace

TEST_SUITE("transforms_norms") {

TEST_CASE("time grid layout") {
    const TimeGrid t(0.5);
    CHECK(t.horizon() == doctest::Approx(32.0));
    CHECK(t.size() == 128);
    CHECK(t.dt() * t.size() == doctest::Approx(t.horizon()));
    CHECK(t.k(t.half_window()) == 0.0);
    CHECK(t.k(0) == doctest::Approx(-64 * two_pi / 32.0));
    CHECK(t.lambda(3).real() == 0.5);
    CHECK_THROWS_AS(TimeGrid(0.0), DomainError);
    CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 0), DomainError);
}

TEST_CASE("weighted delta has a flat spectrum") {
    const TimeGrid t(1.0, 8.0, 16);
    ComplexVector f(std::size_t(t.size()), Complex{});
    f[0] = 1.0;
    const ComplexVector F = norms::laplace_forward(t, f);
    for (const auto& v : F) CHECK(std::abs(v - t.dt() / std::sqrt(two_pi)) < 1e-15);
}

TEST_CASE("on-grid weighted exponential transforms to a single slot") {
    const TimeGrid t(0.7, 10.0, 16);
    const int slot = 20;
    ComplexVector f(std::size_t(t.size()));
    for (int i = 0; i < t.size(); ++i) f[std::size_t(i)] = std::exp(t.lambda(slot) * t.time(i));
    const ComplexVector F = norms::laplace_forward(t, f);
    for (int s = 0; s < t.size(); ++s) {
        const Complex expect = s == slot ? Complex(t.horizon() / std::sqrt(two_pi)) : Complex{};
        CHECK(std::abs(F[std::size_t(s)] - expect) < 1e-12);
    }
    // d/dt of the exponential is lambda times it; the transform picks up the same factor.
    ComplexVector df(f);
    for (auto& v : df) v *= t.lambda(slot);
    const ComplexVector dF = norms::laplace_forward(t, df);
    CHECK(std::abs(dF[std::size_t(slot)] - t.lambda(slot) * F[std::size_t(slot)]) < 1e-11);
}

TEST_CASE("Laplace pair roundtrip on random signals") {
    std::mt19937_64 rng(21);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        const TimeGrid t(0.5 + trial, 0.0, 8 + 4 * trial);
        ComplexVector F(std::size_t(t.size()));
        for (auto& v : F) v = Complex(gauss(rng), gauss(rng));
        const ComplexVector back = norms::laplace_forward(t, norms::laplace_inverse(t, F));
        CHECK(testing::max_abs_diff(back, F) <= 1e-12 * testing::max_abs(F));
    }
    CHECK_THROWS_AS(norms::laplace_forward(TimeGrid(1.0, 0.0, 4), ComplexVector(7)), DomainError);
}

TEST_CASE("weighted Parseval for a single sample at one node") {
    const BoxGrid box(1, 2, 8);
    const TimeGrid t(1.0, 4.0, 8);
    std::vector<SpectralField> samples(std::size_t(t.size()), SpectralField(box.grid(), 1, Domain::physical));
    const int i0 = 5;
    samples[std::size_t(i0)].component(0)[3] = 1.0;
    const SpaceTimeField f = norms::from_time_samples(box, t, samples);
    const double expect = t.dt() * std::exp(-2.0 * t.nu() * t.time(i0)) / double(box.grid().size());
    CHECK(std::pow(norms::norm_L2nu(f), 2) == doctest::Approx(expect).epsilon(1e-12));
    CHECK(norms::norm_L2nu(SpaceTimeField(box, t, 1)) == 0.0);
}

TEST_CASE("time and frequency representations agree") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 3; ++trial) {
        const BoxGrid box(1, 2, 8);
        const TimeGrid t(1.0, 0.0, 16);
        const auto samples = random_samples(box, t, rng);
        const SpaceTimeField f = norms::from_time_samples(box, t, samples);
        const double a = norms::norm_L2nu(f), b = norms::norm_L2nu_samples(t, samples);
        CHECK(std::abs(a - b) <= 1e-10 * b);
        const auto back = norms::to_time_samples(f);
        CHECK(back.front().domain() == Domain::physical);
        CHECK(std::abs(norms::norm_L2nu_samples(t, back) - b) <= 1e-10 * b);
    }
}

TEST_CASE("H^-1 norm of single modes and its bound") {
    const CellGrid g(1, 16);
    SpectralField e(g, 1, Domain::frequency);
    e.component(0)[g.index_of_mode({1, 0})] = 1.0;
    CHECK(norms::norm_Hminus1(e) == doctest::Approx(1.0 / std::sqrt(1.0 + 4.0 * pi * pi)).epsilon(1e-14));
    CHECK(norms::norm_Hminus1(e) == doctest::Approx(0.157185).epsilon(1e-5));
    SpectralField c(g, 1, Domain::frequency);
    c.component(0)[0] = 1.0;
    CHECK(norms::norm_Hminus1(c) == 1.0);
    CHECK(norms::norm_H1(e) == doctest::Approx(std::sqrt(1.0 + 4.0 * pi * pi)));
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const SpectralField h = testing::random_field(CellGrid(2, 8), 2, Domain::frequency, rng);
        CHECK(norms::norm_Hminus1(h) <= norm(h));
    }
    CHECK_THROWS_AS(norms::norm_Hminus1(SpectralField(g, 1, Domain::physical)), DomainError);
}

TEST_CASE("time multipliers compose on the principal branch") {
    std::mt19937_64 rng(24);
    const BoxGrid box(1, 2, 8);
    const TimeGrid t(0.5, 0.0, 16);
    const SpaceTimeField f = norms::from_time_samples(box, t, random_samples(box, t, rng));
    auto gap = [](const SpaceTimeField& x, const SpaceTimeField& y) {
        return norms::norm_L2nu(x - y) / norms::norm_L2nu(y);
    };
    CHECK(gap(norms::dt_multiplier(1.0, norms::dt_multiplier(1.0, f)), norms::dt_multiplier(2.0, f)) <= 1e-12);
    CHECK(gap(norms::dt_multiplier(0.5, norms::dt_multiplier(0.5, f)), norms::dt_multiplier(1.0, f)) <= 1e-12);
    CHECK(gap(norms::dt_multiplier(-1.0, norms::dt_multiplier(1.0, f)), f) <= 1e-12);
    CHECK(norms::norm_L2nu(norms::dt_multiplier(-1.0, f)) <= norms::norm_L2nu(f) / t.nu());
}

}
