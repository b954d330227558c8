#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "homoglab/cell_problems.hpp"
#include "support.hpp"

using namespace homoglab;
using namespace homoglab::torus;
using namespace homoglab::cell;

namespace {

double harmonic_mean_oracle() {
    using boost::math::quadrature::gauss_kronrod;
    const double inv = gauss_kronrod<double, 61>::integrate(
        [](double y) { return 1.0 / (2.0 + std::sin(two_pi * y)); }, -0.5, 0.5, 15, 1e-15);
    return 1.0 / inv;
}

CoefficientCell laminate() {
    auto amp = [](Complex x) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2, 2);
        m(0, 0) = x;
        return m;
    };
    Eigen::MatrixXcd c0(2, 2);
    c0 << 2.0, 0.0, 0.0, 2.0;
    return CoefficientCell(CoefficientKind::matrix, 2,
                           {{{0, 0}, c0}, {{1, 0}, amp(Complex(0, -0.5))}, {{-1, 0}, amp(Complex(0, 0.5))}},
                           CellGrid(2, 16));
}

} // namespace

TEST_SUITE("cell_problems") {

TEST_CASE("constant coefficient has zero corrector at every theta") {
    const auto id = CoefficientCell::constant(CoefficientKind::matrix, Eigen::MatrixXcd::Identity(2, 2),
                                              CellGrid(2, 8));
    for (const Wavevector theta : {Wavevector{0, 0}, Wavevector{1.0, -0.5}, Wavevector{-pi, 2.0}}) {
        const Corrector n = solve_corrector(id, theta, CellGrid(2, 16));
        for (const auto& c : n.components) CHECK(testing::max_abs(c.values()) == 0.0);
        const HomogenisedTensor t = homogenised_tensor(id, n);
        CHECK((t.value - Eigen::MatrixXcd::Identity(2, 2)).norm() < 1e-15);
    }
}

TEST_CASE("one-dimensional corrector matches the closed form") {
    // N_0' = a_0 / a - 1 with a_0 the harmonic mean.
    const auto a = testing::two_plus_sine();
    const CellGrid g(1, 64);
    const Corrector n0 = solve_corrector(a, {0, 0}, g);
    CHECK(n0.residual <= 1e-10);
    const double a0 = harmonic_mean_oracle();
    CHECK(a0 == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));

    // Oracle derivative sampled on a fine grid, transformed; compare H1
    // seminorm distance (the oracle has the same zero mean).
    const CellGrid fine(1, 512);
    SpectralField oracle(fine, 1, Domain::physical);
    for (std::size_t i = 0; i < fine.size(); ++i)
        oracle.component(0)[i] = a0 / (2.0 + std::sin(two_pi * fine.node(i)[0])) - 1.0;
    const SpectralField numeric = resample(gradient(n0.components[0]), fine);
    CHECK(norm(numeric - to_frequency(oracle)) < 1e-8);
    CHECK(std::abs(n0.components[0].component(0)[0]) <= 1e-12);
}

TEST_CASE("harmonic mean golden value") {
    const auto a = testing::two_plus_sine();
    const HomogenisedTensor t = homogenised_tensor(a, solve_corrector(a, {0, 0}, CellGrid(1, 64)));
    CHECK(std::abs(t.value(0, 0) - harmonic_mean_oracle()) < 1e-8);
}

TEST_CASE("laminate reduces to harmonic and arithmetic means") {
    const auto a = laminate();
    const HomogenisedTensor t = homogenised_tensor(a, solve_corrector(a, {0, 0}, CellGrid(2, 32)));
    CHECK(std::abs(t.value(0, 0) - std::sqrt(3.0)) < 1e-8);
    CHECK(std::abs(t.value(1, 1) - 2.0) < 1e-8);
    CHECK(std::abs(t.value(0, 1)) < 1e-10);
    CHECK(std::abs(t.value(1, 0)) < 1e-10);
}

TEST_CASE("tensor is spectrally converged in n") {
    const auto a = testing::two_plus_sine();
    const auto t32 = homogenised_tensor(a, solve_corrector(a, {0, 0}, CellGrid(1, 32)));
    const auto t64 = homogenised_tensor(a, solve_corrector(a, {0, 0}, CellGrid(1, 64)));
    CHECK(std::abs(t32.value(0, 0) - t64.value(0, 0)) < 1e-10);
}

TEST_CASE("corrector invariants on a 2D coefficient") {
    Eigen::MatrixXcd c0(2, 2), c1(2, 2);
    c0 << 3.0, 0.5, 0.5, 2.0;
    c1 << 0.4, 0.1, 0.1, 0.3;
    const CoefficientCell a(CoefficientKind::matrix, 2,
                            {{{0, 0}, c0}, {{1, 1}, c1}, {{-1, -1}, c1.adjoint()}, {{0, 2}, 0.2 * c1},
                             {{0, -2}, 0.2 * c1.adjoint()}},
                            CellGrid(2, 16));
    REQUIRE(a.hermitian());
    for (const Wavevector theta : {Wavevector{0, 0}, Wavevector{0.3, -1.1}}) {
        const Corrector n = solve_corrector(a, theta, CellGrid(2, 16));
        for (int j = 0; j < 2; ++j) {
            CHECK(std::abs(cell_mean(n.components[std::size_t(j)])) <= 1e-12);
            CHECK(galerkin_residual(a, n, j) <= 1e-10);
        }
        if (theta == Wavevector{0, 0}) {
            const Eigen::MatrixXcd t = homogenised_tensor(a, n).value;
            CHECK((t - t.adjoint()).norm() < 1e-10);
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(t);
            CHECK(eig.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("scalar coefficient tensor lies between harmonic and arithmetic means") {
    const auto a = testing::scalar_coefficient(
        2, {{{0, 0}, testing::scalar(3.0)}, {{1, 1}, testing::scalar(0.8)}, {{-1, -1}, testing::scalar(0.8)},
            {{2, 0}, testing::scalar(Complex(0, 0.4))}, {{-2, 0}, testing::scalar(Complex(0, -0.4))}},
        16);
    const auto t = homogenised_tensor(a, solve_corrector(a, {0, 0}, CellGrid(2, 32))).value;
    double inv_mean = 0.0;
    for (const auto& s : a.resampled(CellGrid(2, 64)).samples()) inv_mean += 1.0 / s(0, 0).real();
    const double harmonic = 1.0 / (inv_mean / (64.0 * 64.0));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(t);
    CHECK(eig.eigenvalues().minCoeff() >= harmonic - 1e-10);
    CHECK(eig.eigenvalues().maxCoeff() <= 3.0 + 1e-10);
}

TEST_CASE("non-Hermitian coefficient goes through GMRES") {
    const auto b = testing::scalar_coefficient(
        1, {{{0, 0}, testing::scalar(Complex(2.0, 1.0))}, {{1, 0}, testing::scalar(0.5)},
            {{-1, 0}, testing::scalar(Complex(0.0, 0.3))}});
    REQUIRE_FALSE(b.hermitian());
    const Corrector n = solve_corrector(b, {0.5, 0}, CellGrid(1, 32));
    CHECK(galerkin_residual(b, n, 0) <= 1e-10);
}

TEST_CASE("non-elliptic coefficient is rejected") {
    const auto bad = testing::scalar_coefficient(
        1, {{{0, 0}, testing::scalar(0.5)}, {{1, 0}, testing::scalar(0.5)}, {{-1, 0}, testing::scalar(0.5)}});
    CHECK_THROWS_AS(solve_corrector(bad, {0, 0}, CellGrid(1, 16)), NonElliptic);
}

TEST_CASE("iteration cap surfaces as NoConvergence") {
    SolverOptions opt;
    opt.max_iterations = 1;
    CHECK_THROWS_AS(solve_corrector(testing::two_plus_sine(), {0, 0}, CellGrid(1, 64), opt), NoConvergence);
}

TEST_CASE("one-dimensional corrector is Lipschitz in theta and the tensor does not move") {
    // In d = 1 the flux a((d/dy + i theta) N + 1) is a constant fixed by the
    // mean-zero constraint, so a_theta equals the harmonic mean for every theta.
    std::vector<Wavevector> thetas;
    for (int k = 1; k <= 6; ++k) thetas.push_back({std::ldexp(1.0, -k), 0.0});
    const DeviationTable table = tensor_theta_deviation(testing::two_plus_sine(), thetas, CellGrid(1, 64));
    CHECK(table.corrector_fit.slope >= 0.95);
    CHECK(table.tensor_fit.exact_zero);
    for (std::size_t i = 0; i < thetas.size(); ++i) CHECK(table.tensor_deviation[i] <= 1e-13);
    for (std::size_t i = 1; i < thetas.size(); ++i)
        CHECK(table.corrector_deviation[i] / table.corrector_deviation[i - 1] ==
              doctest::Approx(0.5).epsilon(0.1));
}

TEST_CASE("two-dimensional tensor deviation decays at least linearly in theta") {
    Eigen::MatrixXcd c0(2, 2), c1(2, 2);
    c0 << 3.0, 0.5, 0.5, 2.0;
    c1 << 0.4, 0.1, 0.1, 0.3;
    const CoefficientCell a(CoefficientKind::matrix, 2,
                            {{{0, 0}, c0}, {{1, 1}, c1}, {{-1, -1}, c1}, {{0, 2}, 0.2 * c1},
                             {{0, -2}, 0.2 * c1}, {{1, 0}, 0.5 * c1}, {{-1, 0}, 0.5 * c1}},
                            CellGrid(2, 16));
    std::vector<Wavevector> thetas;
    for (int k = 1; k <= 6; ++k) thetas.push_back({std::ldexp(1.0, -k), 0.7 * std::ldexp(1.0, -k)});
    const DeviationTable table = tensor_theta_deviation(a, thetas, CellGrid(2, 32));
    CHECK(table.tensor_fit.slope >= 0.95);
    CHECK(table.corrector_fit.slope >= 0.95);
    for (std::size_t i = 1; i < thetas.size(); ++i)
        CHECK(table.tensor_deviation[i] <= 1.05 * table.tensor_deviation[i - 1]);
}

TEST_CASE("constant coefficient deviation table is exact zero") {
    const auto id = CoefficientCell::constant(CoefficientKind::scalar, testing::scalar(1.5), CellGrid(1, 8));
    const DeviationTable table = tensor_theta_deviation(id, {{0.5, 0}, {0.25, 0}, {0.125, 0}}, CellGrid(1, 16));
    CHECK(table.tensor_fit.exact_zero);
    CHECK(table.corrector_fit.exact_zero);
    CHECK(table.tensor_constant == 0.0);
}

TEST_CASE("multiplier bound reduces to a cell integral for constant test fields") {
    const auto a = testing::two_plus_sine();
    const Corrector n0 = solve_corrector(a, {0, 0}, CellGrid(1, 32));
    for (int M : {2, 4}) {
        SpectralField one(CellGrid(1, 32 * M), 1, Domain::frequency);
        one.component(0)[0] = 1.0;
        const double grad_sq = std::pow(norm(gradient(n0.components[0])), 2);
        CHECK(multiplier_check(n0, M, {one}).constant == doctest::Approx(grad_sq).epsilon(1e-12));
    }
    const auto id = CoefficientCell::constant(CoefficientKind::scalar, testing::scalar(1.0), CellGrid(1, 8));
    SpectralField one(CellGrid(1, 64), 1, Domain::frequency);
    one.component(0)[0] = 1.0;
    CHECK(multiplier_check(solve_corrector(id, {0, 0}, CellGrid(1, 16)), 4, {one}).constant == 0.0);
}

TEST_CASE("multiplier ratio for a mode at half the dual-cell radius is stable in eps") {
    const auto a = testing::two_plus_sine();
    const Corrector n0 = solve_corrector(a, {0, 0}, CellGrid(1, 32));
    std::vector<double> ratios;
    for (int M : {4, 8, 16}) {
        const CellGrid box(1, 32 * M);
        SpectralField phi(box, 1, Domain::frequency);
        phi.component(0)[box.index_of_mode({M / 4, 0})] = 1.0;  // |xi| = 2 pi M / 4 = pi / (2 eps)
        ratios.push_back(multiplier_check(n0, M, {phi}).constant);
    }
    const auto [lo, hi] = std::minmax_element(ratios.begin(), ratios.end());
    CHECK(std::isfinite(*hi));
    CHECK(*hi <= 2.0 * *lo);
}

TEST_CASE("gamma multiplier ratio") {
    const auto gamma = testing::scalar_coefficient(
        1, {{{0, 0}, testing::scalar(1.0)}, {{1, 0}, testing::scalar(0.25)}, {{-1, 0}, testing::scalar(0.25)}});
    SpectralField one(CellGrid(1, 64), 1, Domain::frequency);
    one.component(0)[0] = 1.0;
    // |(grad gamma)(x/eps)|^2 averages to 2 (2 pi 0.25)^2 = pi^2 / 2.
    CHECK(gamma_multiplier_check(gamma, 4, {one}).constant == doctest::Approx(pi * pi / 2).epsilon(1e-12));
}

}
