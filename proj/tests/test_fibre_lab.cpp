#include <doctest.h>

#include <random>

#include "homoglab/fibre_lab.hpp"
#include "support.hpp"

using namespace homoglab;
using namespace homoglab::torus;
using namespace homoglab::fibre;

namespace {

/// Dense projector onto the complement of E_theta built from an explicit
/// spanning set: mean-zero scalar modes and kappa_m e_m vectors (m != 0).
Eigen::MatrixXcd perp_projector(const CellGrid& g, const Wavevector& theta) {
    const int d = g.dimension();
    const std::size_t N = g.size(), dim = std::size_t(1 + d) * N;
    std::vector<Eigen::VectorXcd> basis;
    for (std::size_t i = 1; i < N; ++i) {
        Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(dim));
        v(Eigen::Index(i)) = 1.0;
        basis.push_back(v);
        const Mode m = g.mode(i);
        Eigen::VectorXcd w = Eigen::VectorXcd::Zero(Eigen::Index(dim));
        for (int j = 0; j < d; ++j)
            w(Eigen::Index(std::size_t(1 + j) * N + i)) = two_pi * m[std::size_t(j)] + theta[std::size_t(j)];
        basis.push_back(w);
    }
    Eigen::MatrixXcd B(Eigen::Index(dim), Eigen::Index(basis.size()));
    for (std::size_t c = 0; c < basis.size(); ++c) B.col(Eigen::Index(c)) = basis[c];
    const Eigen::MatrixXcd gram = B.adjoint() * B;
    return B * gram.ldlt().solve(B.adjoint());
}

Eigen::VectorXcd as_vector(const SpectralField& f) {
    Eigen::VectorXcd v(Eigen::Index(f.values().size()));
    for (std::size_t i = 0; i < f.values().size(); ++i) v(Eigen::Index(i)) = f.values()[i];
    return v;
}

SpectralField nonconstant_source(const CellGrid& g) {
    SpectralField F(g, 1, Domain::frequency);
    F.component(0)[0] = 1.0;
    F.component(0)[g.index_of_mode({1, 0})] = 0.5;
    return F;
}

CoefficientCell unit(int d, int n = 16) {
    return testing::scalar_coefficient(d, {{{0, 0}, testing::scalar(1.0)}}, n);
}

CoefficientCell aniso2d(int n = 16) {
    auto mat = [](Complex a, Complex b, Complex c) {
        Eigen::MatrixXcd m(2, 2);
        m << a, b, b, c;
        return m;
    };
    return CoefficientCell(CoefficientKind::matrix, 2,
                           {{{0, 0}, mat(2.0, 0.3, 1.5)},
                            {{1, 0}, mat(0.25, 0.0, 0.1)},
                            {{-1, 0}, mat(0.25, 0.0, 0.1)},
                            {{0, 1}, mat(0.0, Complex(0, 0.1), 0.2)},
                            {{0, -1}, mat(0.0, Complex(0, -0.1), 0.2)}},
                           CellGrid(2, n));
}

} // namespace

TEST_SUITE("fibre_lab") {

TEST_CASE("E_theta projection matches a dense Gram oracle") {
    std::mt19937_64 rng(11);
    for (int d : {1, 2}) {
        const CellGrid g(d, 8);
        for (const Wavevector theta : {Wavevector{0.0, 0.0}, Wavevector{0.7, d == 2 ? -1.3 : 0.0},
                                       Wavevector{-pi, d == 2 ? -pi : 0.0}}) {
            const Eigen::MatrixXcd P = perp_projector(g, theta);
            for (int trial = 0; trial < 3; ++trial) {
                const SpectralField w = testing::random_field(g, 1 + d, Domain::frequency, rng);
                const Decomposition s = project_E(theta, w);
                const Eigen::VectorXcd x = as_vector(w);
                CHECK((as_vector(s.eperp_part) - P * x).norm() <= 1e-12 * x.norm());
                CHECK((as_vector(s.e_part) - (x - P * x)).norm() <= 1e-12 * x.norm());
            }
        }
    }
}

TEST_CASE("E_theta projection is an orthogonal idempotent split in either domain") {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 8; ++trial) {
        const int d = 1 + trial % 2;
        const CellGrid g(d, 8 + 2 * (trial % 3));
        std::uniform_real_distribution<double> th(-pi, pi);
        const Wavevector theta{th(rng), d == 2 ? th(rng) : 0.0};
        const SpectralField w = testing::random_field(g, 1 + d, Domain::frequency, rng);
        const Decomposition s = project_E(theta, w);
        CHECK(norm(s.e_part + s.eperp_part - w) <= 1e-13 * norm(w));
        CHECK(std::abs(inner(s.e_part, s.eperp_part)) <= 1e-13 * norm(w) * norm(w));
        CHECK(norm(project_E(theta, s.e_part).eperp_part) <= 1e-13 * norm(w));
        CHECK(norm(project_E(theta, s.eperp_part).e_part) <= 1e-13 * norm(w));
        const Decomposition p = project_E(theta, to_physical(w));
        CHECK(p.e_part.domain() == Domain::physical);
        CHECK(norm(to_frequency(p.e_part) - s.e_part) <= 1e-12 * norm(w));
    }
    CHECK_THROWS_AS(project_E({0, 0}, SpectralField(CellGrid(2, 8), 2, Domain::frequency)), DomainError);
}

TEST_CASE("constant coefficient fibre solution equals both reference states") {
    // With a = 1 and constant F the solution lives on mode 0:
    // U_1 = lambda F / (lambda^2 + xi^2), U_2 = i xi U_1 / lambda.
    const CellGrid g(1, 16);
    const auto a = unit(1);
    SpectralField F(g, 1, Domain::frequency);
    F.component(0)[0] = 1.0;
    const FibreParams p{0.5, {0.5, 0.0}, 1.0};
    const FibreState U = solve_fibre(Equation::wave, a, p, F);
    CHECK(std::abs(U.U.component(0)[0] - 0.5) < 1e-12);
    CHECK(std::abs(U.U.component(1)[0] - Complex(0.0, 0.5)) < 1e-12);

    const auto cor0 = cell::solve_corrector(a, {0, 0}, g);
    const auto T0 = cell::homogenised_tensor(a, cor0);
    const auto cor = cell::solve_corrector(a, p.theta, g);
    const auto T = cell::homogenised_tensor(a, cor);
    const FibreState V = reference_V(Equation::wave, a, cor, T, p, 1.0);
    const FibreState W = reference_W(Equation::wave, a, cor0, T0, p, 1.0);
    CHECK(norm(V.U - U.U) < 1e-12);
    CHECK(norm(W.U - U.U) < 1e-12);

    const FibreState H = solve_fibre(Equation::heat, a, p, F);
    const FibreState HV = reference_V(Equation::heat, a, cor, T, p, 1.0);
    CHECK(norm(HV.U - H.U) < 1e-12);
    CHECK(std::abs(H.U.component(0)[0] - 0.5) < 1e-12);
}

TEST_CASE("fibre solves satisfy the discrete system") {
    std::mt19937_64 rng(13);
    for (const auto eq : {Equation::wave, Equation::heat}) {
        for (int d : {1, 2}) {
            const CellGrid g(d, d == 1 ? 32 : 16);
            const CoefficientCell a = d == 1 ? testing::two_plus_sine(1, 32) : aniso2d();
            const FibreSolver solver(eq, a, g);
            for (const FibreParams p : {FibreParams{1.0 / 8, {0.3, d == 2 ? -0.4 : 0.0}, {1.0, 3.0}},
                                        FibreParams{1.0 / 32, {-pi, 0.0}, {0.5, -8.0}},
                                        FibreParams{1.0 / 16, {1e-3, d == 2 ? 1e-3 : 0.0}, {2.0, 0.0}}}) {
                const SpectralField rhs = testing::band_limited(g, 1 + d, 3, rng);
                const SpectralField U = solver.solve_general(p, rhs);
                CHECK(solver.residual(p, U, rhs) <= 1e-9);
            }
        }
    }
}

TEST_CASE("fibre operator is coercive with the stated energy floor") {
    std::mt19937_64 rng(14);
    std::uniform_real_distribution<double> th(-pi, pi), kk(-20.0, 20.0), nn(0.1, 3.0), ee(0.01, 1.0);
    for (const auto eq : {Equation::wave, Equation::heat}) {
        const CellGrid g(2, 8);
        const FibreSolver solver(eq, aniso2d(8), g);
        for (int trial = 0; trial < 20; ++trial) {
            const FibreParams p{ee(rng), {th(rng), th(rng)}, {nn(rng), kk(rng)}};
            const SpectralField U = testing::random_field(g, 3, Domain::frequency, rng);
            const double energy = inner(solver.apply(p, U), U).real();
            CHECK(energy >= solver.energy_floor(p.nu()) * norm(U) * norm(U) * (1.0 - 1e-12));
        }
    }
}

TEST_CASE("reference state V lies in E_theta and solves the projected system") {
    const CellGrid g(2, 16);
    const auto a = aniso2d();
    const SpectralField F = nonconstant_source(g);
    for (const auto eq : {Equation::wave, Equation::heat}) {
        const FibreSolver solver(eq, a, g);
        for (const FibreParams p : {FibreParams{0.25, {0.8, -0.3}, {1.0, 2.0}}, FibreParams{0.1, {-pi, 0.5}, {0.5, -5.0}}}) {
            const auto cor = cell::solve_corrector(a, p.theta, g);
            const auto T = cell::homogenised_tensor(a, cor);
            const FibreState V = reference_V(eq, a, cor, T, p, F.component(0)[0]);
            CHECK(norm(project_E(p.theta, V.U).eperp_part) <= 1e-9 * norm(V.U));
            SpectralField rhs(g, 3, Domain::frequency);
            for (std::size_t i = 0; i < g.size(); ++i) rhs.component(0)[i] = F.component(0)[i];
            const SpectralField defect = project_E(p.theta, solver.apply(p, V.U) - rhs).e_part;
            CHECK(norm(defect) <= 1e-8 * norm(rhs));
        }
    }
}

TEST_CASE("reference state W carries the homogenised flux mean") {
    const CellGrid g(2, 16);
    const auto a = aniso2d();
    const auto cor0 = cell::solve_corrector(a, {0, 0}, g);
    const auto T0 = cell::homogenised_tensor(a, cor0);
    const Complex lambda(1.0, 2.0);
    const Wavevector xi{3.0, -2.0};
    const SpectralField W = reference_W(Equation::wave, a, cor0, T0, lambda, xi, 2.0);
    Complex q{};
    for (int p = 0; p < 2; ++p)
        for (int r = 0; r < 2; ++r) q += xi[std::size_t(p)] * T0.value(p, r) * xi[std::size_t(r)];
    const Complex c = 2.0 / (lambda * lambda + q);
    CHECK(std::abs(W.component(0)[0] - c * lambda) < 1e-13);
    for (int j = 0; j < 2; ++j) {
        Complex flux{};
        for (int r = 0; r < 2; ++r) flux += T0.value(j, r) * xi[std::size_t(r)];
        CHECK(std::abs(W.component(1 + j)[0] - Complex(0.0, 1.0) * c * flux) < 1e-12);
    }
    CHECK_THROWS_AS(reference_W(Equation::wave, a, cell::solve_corrector(a, {0.1, 0}, g), T0, lambda, xi, 1.0),
                    DomainError);
}

TEST_CASE("uniform invertibility equals the smallest shifted frequency") {
    const CellGrid g1(1, 16);
    const auto thetas = dyadic_theta_grid(1, 5);
    for (const auto& e : uniform_invertibility(thetas, g1)) {
        double expect = 1e300;
        for (int m = -8; m < 8; ++m)
            if (m != 0) expect = std::min(expect, std::abs(two_pi * m + e.theta[0]));
        CHECK(std::abs(e.min_singular_value - expect) <= 1e-12);
    }
    const auto at = uniform_invertibility({Wavevector{0, 0}, Wavevector{-pi, 0}}, g1);
    CHECK(std::abs(at[0].min_singular_value - two_pi) <= 1e-12);
    CHECK(std::abs(at[1].min_singular_value - pi) <= 1e-12);

    const CellGrid g2(2, 8);
    for (const auto& e : uniform_invertibility(dyadic_theta_grid(2, 3), g2)) {
        double expect = 1e300;
        for (std::size_t i = 1; i < g2.size(); ++i) {
            const Wavevector k = g2.shifted_wavevector(i, e.theta);
            expect = std::min(expect, std::hypot(k[0], k[1]));
        }
        CHECK(std::abs(e.min_singular_value - expect) <= 1e-12);
        CHECK(e.min_singular_value >= pi - 1e-12);
    }
}

TEST_CASE("dyadic theta grid") {
    const auto g = dyadic_theta_grid(1, 2);
    REQUIRE(g.size() == 5);
    CHECK(g.front()[0] == -pi);
    CHECK(g.back()[0] == doctest::Approx(pi / 2));
    CHECK(dyadic_theta_grid(2, 2).size() == 15);
    CHECK_THROWS_AS(dyadic_theta_grid(3, 1), DomainError);
}

TEST_CASE("fibre error is first order in eps uniformly in theta and k") {
    const CellGrid g(1, 32);
    const auto a = testing::two_plus_sine(1, 32);
    const SpectralField F = nonconstant_source(g);
    for (const auto eq : {Equation::wave, Equation::heat}) {
        SweepConfig c;
        c.equation = eq;
        c.eps = {1.0 / 8, 1.0 / 16, 1.0 / 32};
        for (int k = -8; k <= 8; k += 2) c.k_values.push_back(k);
        c.thetas = dyadic_theta_grid(1, 4);
        const SweepResult r = fibre_error_sweep(a, c, F);
        CHECK(r.variation < 2.0);
        for (double s : r.sup_ratio) CHECK(s > 0.0);
        // Halving eps halves the raw error at fixed (theta, k). For the wave
        // fibre the pointwise rate is only clean away from k^2 = a_0 |theta / eps|^2.
        const std::size_t stride = c.thetas.size() * c.k_values.size();
        for (std::size_t i = 0; i < stride; ++i) {
            if (eq == Equation::wave && std::abs(r.entries[i].theta[0]) < pi / 4) continue;
            const double e0 = r.entries[i].raw_error, e2 = r.entries[2 * stride + i].raw_error;
            CHECK(std::log2(e0 / e2) / 2.0 >= 0.9);
        }
    }
}

TEST_CASE("heat fibre resolvent has k-uniform maximal regularity") {
    std::mt19937_64 rng(15);
    const CellGrid g(1, 16);
    const auto b = testing::two_plus_sine(1, 16);
    std::vector<RegularitySample> samples;
    for (int s = 0; s < 3; ++s)
        samples.push_back({testing::band_limited(g, 1, 4, rng), testing::band_limited(g, 1, 4, rng)});
    std::vector<Complex> lambdas;
    for (double k : {0.0, 4.0, 16.0, 64.0, 256.0}) lambdas.push_back({1.0, k});
    const RegularityResult r =
        maximal_regularity_ratio(b, 0.1, dyadic_theta_grid(1, 3), lambdas, samples);
    CHECK(std::isfinite(r.constant));
    CHECK(r.variation < 4.0);
}

TEST_CASE("parameter validation") {
    const CellGrid g(1, 8);
    const auto a = unit(1, 8);
    SpectralField F(g, 1, Domain::frequency);
    CHECK_THROWS_AS(solve_fibre(Equation::wave, a, {0.0, {0, 0}, 1.0}, F), DomainError);
    CHECK_THROWS_AS(solve_fibre(Equation::wave, a, {0.1, {0, 0}, {0.0, 1.0}}, F), DomainError);
    CHECK_THROWS_AS(solve_fibre(Equation::heat, a, {0.1, {4.0, 0}, 1.0}, F), DomainError);
    CHECK_THROWS_AS(solve_fibre(Equation::heat, a, {0.1, {0, 0}, 1.0}, SpectralField(g, 2, Domain::frequency)),
                    DomainError);
}

}
