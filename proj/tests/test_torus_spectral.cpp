#include <doctest.h>

#include "homoglab/coefficient_io.hpp"
#include "homoglab/torus_spectral.hpp"
#include "support.hpp"

using namespace homoglab;
using namespace homoglab::torus;
using testing::max_abs_diff;

TEST_SUITE("torus_spectral") {

TEST_CASE("grid layout and validation") {
    const CellGrid g(2, 8);
    CHECK(g.size() == 64);
    CHECK(g.coordinate(0) == -0.5);
    CHECK(g.mode(g.index_of_mode({-4, 3})) == Mode{-4, 3});
    CHECK_FALSE(g.contains_mode({4, 0}));
    CHECK_THROWS_AS(CellGrid(3, 8), DomainError);
    CHECK_THROWS_AS(CellGrid(1, 9), DomainError);
    CHECK_THROWS_AS(CellGrid(1, 6), DomainError);
}

TEST_CASE("constant field maps to a unit delta at m = 0") {
    const CellGrid g(2, 8);
    SpectralField f(g, 1, Domain::physical);
    for (auto& v : f.values()) v = 1.0;
    const SpectralField c = to_frequency(f);
    CHECK(std::abs(c.component(0)[0] - 1.0) < 1e-15);
    CHECK(testing::max_abs(c.component(0).subspan(1)) < 1e-15);
}

TEST_CASE("single exponential maps to its own mode") {
    const CellGrid g(1, 16);
    SpectralField f(g, 1, Domain::physical);
    for (std::size_t i = 0; i < g.size(); ++i) f.component(0)[i] = std::polar(1.0, two_pi * g.node(i)[0]);
    const SpectralField c = to_frequency(f);
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(c.component(0)[i] - (g.mode(i)[0] == 1 ? 1.0 : 0.0)) < 1e-14);
}

TEST_CASE("forward transform matches a direct summation DFT at n = 8") {
    std::mt19937_64 rng(7);
    for (int d = 1; d <= 2; ++d) {
        const CellGrid g(d, 8);
        const SpectralField f = testing::random_field(g, 1, Domain::physical, rng);
        const SpectralField c = to_frequency(f);
        ComplexVector oracle(g.size());
        for (std::size_t k = 0; k < g.size(); ++k) {
            const Mode m = g.mode(k);
            for (std::size_t i = 0; i < g.size(); ++i) {
                const Wavevector y = g.node(i);
                oracle[k] += f.component(0)[i] * std::polar(1.0, -two_pi * (m[0] * y[0] + m[1] * y[1]));
            }
            oracle[k] /= double(g.size());
        }
        CHECK(max_abs_diff(c.component(0), oracle) < 1e-13);
        CHECK(max_abs_diff(to_physical(c).component(0), f.component(0)) < 1e-13);
    }
}

TEST_CASE("Parseval holds on random fields") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 2;
        const CellGrid g(d, 8 << (trial % 3));
        const SpectralField f = testing::random_field(g, 1 + trial % 3, Domain::physical, rng);
        const double np = norm(f), nf = norm(to_frequency(f));
        CHECK(std::abs(np - nf) <= 1e-12 * np);
        CHECK(std::abs(cell_mean(f, 0) - cell_mean(to_frequency(f), 0)) < 1e-12);
    }
}

TEST_CASE("transforms reject the wrong domain") {
    const CellGrid g(1, 8);
    CHECK_THROWS_AS(to_physical(SpectralField(g, 1, Domain::physical)), DomainError);
    CHECK_THROWS_AS(to_frequency(SpectralField(g, 1, Domain::frequency)), DomainError);
}

TEST_CASE("shifted gradient of constants and eigenfunctions") {
    const CellGrid g(1, 16);
    SpectralField one(g, 1, Domain::physical);
    for (auto& v : one.values()) v = 1.0;
    const SpectralField grad = shifted_gradient(one, {pi / 2, 0.0});
    for (const auto& v : grad.values()) CHECK(std::abs(v - Complex(0.0, pi / 2)) < 1e-14);

    SpectralField e(g, 1, Domain::physical);
    for (std::size_t i = 0; i < g.size(); ++i) e.component(0)[i] = std::polar(1.0, two_pi * g.node(i)[0]);
    const SpectralField de = shifted_gradient(e, {0.0, 0.0});
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(std::abs(de.component(0)[i] - Complex(0.0, two_pi) * e.component(0)[i]) < 1e-12);

    CHECK_THROWS_AS(shifted_gradient(e, {pi, 0.0}), DomainError);
    CHECK_THROWS_AS(shifted_gradient(e, {0.0, 0.5}), DomainError);
}

TEST_CASE("shifted gradient agrees with central differences of the Bloch wave") {
    // (grad + i theta) f = exp(-i theta.y) grad(exp(i theta.y) f); second-order
    // differences of the right side must close the gap at rate h^2.
    std::mt19937_64 rng(3);
    const Wavevector theta{1.0, -2.0};
    const CellGrid g(2, 16);
    const SpectralField f = testing::band_limited(g, 1, 2, rng);
    const SpectralField grad = to_physical(shifted_gradient(f, theta));
    auto bloch = [&](const Wavevector& y) {
        return std::polar(1.0, theta[0] * y[0] + theta[1] * y[1]) * testing::evaluate(f, 0, y);
    };
    auto fd_error = [&](double h) {
        double worst = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Wavevector y = g.node(i);
            for (int j = 0; j < 2; ++j) {
                Wavevector yp = y, ym = y;
                yp[std::size_t(j)] += h;
                ym[std::size_t(j)] -= h;
                const Complex fd = (bloch(yp) - bloch(ym)) / (2 * h) *
                                   std::polar(1.0, -(theta[0] * y[0] + theta[1] * y[1]));
                worst = std::max(worst, std::abs(fd - grad.component(j)[i]));
            }
        }
        return worst;
    };
    const double e1 = fd_error(1.0 / 64), e2 = fd_error(1.0 / 128);
    CHECK(e2 < e1);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("divergence of a shifted gradient on a single mode") {
    const CellGrid g(1, 16);
    SpectralField p(g, 1, Domain::frequency);
    p.component(0)[g.index_of_mode({1, 0})] = 1.0;
    const SpectralField lap = shifted_divergence(shifted_gradient(p, {1.0, 0.0}), {1.0, 0.0});
    const double expected = -(two_pi + 1.0) * (two_pi + 1.0);
    CHECK(std::abs(lap.component(0)[g.index_of_mode({1, 0})] - expected) < 1e-12);

    SpectralField v(g, 1, Domain::physical);
    for (auto& x : v.values()) x = 3.0;
    CHECK(testing::max_abs(shifted_divergence(v, {0.0, 0.0}).values()) < 1e-13);
    CHECK_THROWS_AS(shifted_divergence(SpectralField(CellGrid(2, 8), 1, Domain::frequency), {0.0, 0.0}),
                    DomainError);
}

TEST_CASE("shifted gradient and minus shifted divergence are adjoint") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> unit(-pi, pi);
    for (int trial = 0; trial < 20; ++trial) {
        const int d = 1 + trial % 2;
        const CellGrid g(d, 8 + 8 * (trial % 2));
        const Wavevector theta{unit(rng), d == 2 ? unit(rng) : 0.0};
        const Domain dom = trial % 3 == 0 ? Domain::physical : Domain::frequency;
        const SpectralField p = testing::random_field(g, 1, dom, rng);
        const SpectralField v = testing::random_field(g, d, dom, rng);
        const Complex lhs = inner(shifted_gradient(p, theta), v);
        const Complex rhs = -inner(p, shifted_divergence(v, theta));
        CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    }
}

TEST_CASE("plain gradient of a mean-zero field has no mean") {
    std::mt19937_64 rng(9);
    const CellGrid g(2, 8);
    SpectralField f = testing::random_field(g, 1, Domain::frequency, rng);
    f.component(0)[0] = 0.0;
    const SpectralField grad = shifted_gradient(f, {0.0, 0.0});
    CHECK(std::abs(grad.component(0)[0]) == 0.0);
    CHECK(std::abs(grad.component(1)[0]) == 0.0);
}

TEST_CASE("ellipticity constants") {
    const CellGrid g(1, 64);
    CHECK(ellipticity_check(CoefficientCell::constant(CoefficientKind::matrix,
                                                      Eigen::MatrixXcd::Identity(1, 1), g)) == 1.0);
    CHECK(ellipticity_check(testing::two_plus_sine()) == doctest::Approx(1.0).epsilon(1e-14));
    const auto sine = testing::scalar_coefficient(
        1, {{{0, 0}, testing::scalar(0.0)}, {{1, 0}, testing::scalar(Complex(0, -0.5))},
            {{-1, 0}, testing::scalar(Complex(0, 0.5))}});
    CHECK_THROWS_AS(ellipticity_check(sine), NonElliptic);

    // Symmetric part of a non-symmetric real matrix decides.
    Eigen::MatrixXcd m(2, 2);
    m << 2.0, 3.0, -3.0, 1.0;
    CHECK(ellipticity_check(CoefficientCell::constant(CoefficientKind::matrix, m, CellGrid(2, 8))) ==
          doctest::Approx(1.0));
}

TEST_CASE("coefficient construction checks") {
    CHECK_THROWS_AS(testing::scalar_coefficient(1, {{{1, 0}, testing::scalar(1.0)}}), ConfigError);
    CHECK_THROWS_AS(testing::scalar_coefficient(1, {{{0, 0}, testing::scalar(1.0)},
                                                    {{5, 0}, testing::scalar(1.0)}},
                                                8),
                    ConfigError);
    CHECK(testing::two_plus_sine().hermitian());
    const auto skew = testing::scalar_coefficient(1, {{{0, 0}, testing::scalar(2.0)},
                                                      {{1, 0}, testing::scalar(0.5)}});
    CHECK_FALSE(skew.hermitian());
    CHECK(std::abs(testing::two_plus_sine().evaluate({0.25, 0.0})(0, 0) - 3.0) < 1e-14);
    CHECK(std::abs(testing::two_plus_sine().evaluate({0.125, 0.0}, 2)(0, 0) - 3.0) < 1e-14);
}

TEST_CASE("coefficient action is the exact Galerkin product") {
    // Coefficients of c u for trigonometric polynomials follow from the
    // convolution of the coefficient lists.
    std::mt19937_64 rng(13);
    const CellGrid g(2, 16);
    const auto c = testing::scalar_coefficient(
        2, {{{0, 0}, testing::scalar(2.0)}, {{1, -2}, testing::scalar(Complex(0.3, 0.1))},
            {{-1, 2}, testing::scalar(Complex(0.3, -0.1))}, {{0, 1}, testing::scalar(0.25)}},
        16);
    const SpectralField u = testing::random_field(g, 1, Domain::frequency, rng);
    const SpectralField cu = CoefficientAction::multiply(c, g).apply(u);
    ComplexVector oracle(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& t : c.terms()) {
            const Mode m{g.mode(i)[0] + t.frequency[0], g.mode(i)[1] + t.frequency[1]};
            if (g.contains_mode(m)) oracle[g.index_of_mode(m)] += t.amplitude(0, 0) * u.component(0)[i];
        }
    CHECK(max_abs_diff(cu.component(0), oracle) < 1e-13);

    // Scale 2: frequencies double.
    const SpectralField c2u = CoefficientAction::multiply(c, CellGrid(2, 16), 2).apply(u);
    std::fill(oracle.begin(), oracle.end(), Complex{});
    for (std::size_t i = 0; i < g.size(); ++i)
        for (const auto& t : c.terms()) {
            const Mode m{g.mode(i)[0] + 2 * t.frequency[0], g.mode(i)[1] + 2 * t.frequency[1]};
            if (g.contains_mode(m)) oracle[g.index_of_mode(m)] += t.amplitude(0, 0) * u.component(0)[i];
        }
    CHECK(max_abs_diff(c2u.component(0), oracle) < 1e-13);
    CHECK_THROWS_AS(CoefficientAction::multiply(c, g, 8), DomainError);
}

TEST_CASE("coefficient JSON round trip and errors") {
    const std::string text = R"([
        {"freq": [0], "re": [[2.0]]},
        {"freq": [1], "re": [[0.0]], "im": [[-0.5]]},
        {"freq": [-1], "re": 0.0, "im": 0.5}
    ])";
    const CoefficientCell c = parse_coefficient(text, CoefficientKind::scalar);
    CHECK(c.dimension() == 1);
    CHECK(c.hermitian());
    CHECK(ellipticity_check(c) == doctest::Approx(1.0));
    const CoefficientCell again = parse_coefficient(coefficient_to_json(c), CoefficientKind::scalar);
    CHECK((again.evaluate({0.1, 0.0}) - c.evaluate({0.1, 0.0})).norm() < 1e-15);

    const CoefficientCell m = parse_coefficient(
        R"([{"freq": [0, 0], "re": [[2, 0], [0, 2]]}, {"freq": [1, 0], "re": [[0.5, 0], [0, 0]]},
            {"freq": [-1, 0], "re": [[0.5, 0], [0, 0]]}])",
        CoefficientKind::matrix);
    CHECK(m.rows() == 2);
    CHECK(m.hermitian());

    CHECK_THROWS_AS(parse_coefficient("[]", CoefficientKind::scalar), ConfigError);
    CHECK_THROWS_AS(parse_coefficient("not json", CoefficientKind::scalar), ConfigError);
    CHECK_THROWS_AS(parse_coefficient(R"([{"freq": [1], "re": 1.0}])", CoefficientKind::scalar),
                    ConfigError);
    CHECK_THROWS_AS(parse_coefficient(R"([{"freq": [0, 0], "re": [[1]]}])", CoefficientKind::matrix),
                    ConfigError);
    CHECK_THROWS_AS(load_coefficient("/nonexistent/coeff.json", CoefficientKind::scalar), ConfigError);
}

TEST_CASE("resampling pads and truncates") {
    std::mt19937_64 rng(17);
    const CellGrid g(1, 8), fine(1, 32);
    const SpectralField f = testing::random_field(g, 1, Domain::frequency, rng);
    const SpectralField back = resample(resample(f, fine), g);
    CHECK(max_abs_diff(back.component(0), f.component(0)) == 0.0);
    CHECK(norm(resample(f, fine)) == doctest::Approx(norm(f)));
}

}
