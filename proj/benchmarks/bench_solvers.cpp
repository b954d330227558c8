#include <benchmark/benchmark.h>

#include "homoglab/cell_problems.hpp"
#include "homoglab/fibre_lab.hpp"
#include "homoglab/study.hpp"

using namespace homoglab;

namespace {

torus::CoefficientCell two_plus_sine(int d, int n) {
    std::vector<torus::CoefficientTerm> terms{
        {{0, 0}, Eigen::MatrixXcd::Constant(1, 1, 2.0)},
        {{1, 0}, Eigen::MatrixXcd::Constant(1, 1, Complex(0.0, -0.5))},
        {{-1, 0}, Eigen::MatrixXcd::Constant(1, 1, Complex(0.0, 0.5))}};
    if (d == 2) {
        terms.push_back({{0, 1}, Eigen::MatrixXcd::Constant(1, 1, 0.25)});
        terms.push_back({{0, -1}, Eigen::MatrixXcd::Constant(1, 1, 0.25)});
    }
    return torus::CoefficientCell(torus::CoefficientKind::scalar, d, std::move(terms), torus::CellGrid(d, n));
}

} // namespace

static void BM_CellCorrector(benchmark::State& state) {
    const int d = int(state.range(0));
    const int n = int(state.range(1));
    const auto a = two_plus_sine(d, n);
    const torus::CellGrid grid(d, n);
    for (auto _ : state) {
        const auto cor = cell::solve_corrector(a, {0.3, 0.0}, grid);
        benchmark::DoNotOptimize(cor.residual);
    }
    state.SetComplexityN(std::int64_t(grid.size()));
}
BENCHMARK(BM_CellCorrector)->Args({1, 64})->Args({1, 256})->Args({2, 16})->Args({2, 32})->Args({2, 64});

static void BM_FibreSolve(benchmark::State& state) {
    const int d = int(state.range(0));
    const int n = int(state.range(1));
    const auto eq = state.range(2) == 0 ? fibre::Equation::wave : fibre::Equation::heat;
    const auto a = two_plus_sine(d, n);
    const torus::CellGrid grid(d, n);
    torus::SpectralField F(grid, 1, torus::Domain::frequency);
    F.component(0)[grid.index_of_mode({0, 0})] = 1.0;
    F.component(0)[grid.index_of_mode({1, 0})] = 0.5;
    const fibre::FibreSolver solver(eq, a, grid);
    const fibre::FibreParams p{1.0 / 16, {1.0, 0.5 * d - 0.5}, {1.0, 3.0}};
    for (auto _ : state) {
        const auto s = solver.solve(p, F);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_FibreSolve)->Args({1, 32, 0})->Args({1, 32, 1})->Args({2, 16, 0})->Args({2, 16, 1});

static void BM_BoxMeasure(benchmark::State& state) {
    study::StudyConfig cfg;
    cfg.kind = state.range(0) == 0 ? evolution::Kind::wave : evolution::Kind::thermoelastic;
    cfg.a = two_plus_sine(1, 64);
    cfg.b = two_plus_sine(1, 64);
    cfg.gamma = two_plus_sine(1, 64);
    cfg.cell_points = 16;
    cfg.half_window = 32;
    const double eps = 1.0 / double(state.range(1));
    for (auto _ : state) {
        const auto m = study::measure(cfg, eps, {}, {});
        benchmark::DoNotOptimize(m.max_residual);
    }
}
BENCHMARK(BM_BoxMeasure)->Args({0, 8})->Args({0, 16})->Args({1, 8})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
