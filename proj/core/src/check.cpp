#include "homoglab/check.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <ostream>
#include <random>

#include "homoglab/cell_problems.hpp"
#include "homoglab/evolution_solvers.hpp"
#include "homoglab/fibre_lab.hpp"
#include "homoglab/transforms_norms.hpp"

namespace homoglab::check {

using torus::CellGrid;
using torus::CoefficientCell;
using torus::Domain;
using torus::SpectralField;

Suite parse_suite(const std::string& name) {
    if (name == "cell") return Suite::cell;
    if (name == "fibre") return Suite::fibre;
    if (name == "evolution") return Suite::evolution;
    if (name == "norms") return Suite::norms;
    if (name == "all") return Suite::all;
    throw ConfigError("unknown check suite '" + name + "'");
}

const char* to_string(Suite suite) {
    switch (suite) {
    case Suite::cell: return "cell";
    case Suite::fibre: return "fibre";
    case Suite::evolution: return "evolution";
    case Suite::norms: return "norms";
    case Suite::all: return "all";
    }
    return "?";
}

namespace {

std::string fmt(const char* label, double value) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%s = %.3e", label, value);
    return buf;
}

class Runner {
public:
    Runner(std::vector<Entry>& out, std::string suite) : out_(out), suite_(std::move(suite)) {}

    /// body returns (passed, detail).
    void operator()(const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
        try {
            auto [ok, detail] = body();
            out_.push_back({suite_, name, ok, detail});
        } catch (const NonElliptic& e) {
            out_.push_back({suite_, name, false, std::string("NonElliptic: ") + e.what()});
        } catch (const std::exception& e) {
            out_.push_back({suite_, name, false, e.what()});
        }
    }

private:
    std::vector<Entry>& out_;
    std::string suite_;
};

Eigen::MatrixXcd one(Complex v) {
    Eigen::MatrixXcd m(1, 1);
    m(0, 0) = v;
    return m;
}

CoefficientCell two_plus_sine(int d, int n) {
    return CoefficientCell(torus::CoefficientKind::scalar, d,
                           {{{0, 0}, one(2.0)}, {{1, 0}, one(Complex(0, -0.5))}, {{-1, 0}, one(Complex(0, 0.5))}},
                           CellGrid(d, n));
}

CoefficientCell constant_scalar(int d, double v, int n) {
    return CoefficientCell::constant(torus::CoefficientKind::scalar, one(v), CellGrid(d, n));
}

SpectralField random_field(const CellGrid& g, int components, int band, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    SpectralField f(g, components, Domain::frequency);
    for (int c = 0; c < components; ++c)
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Mode m = g.mode(i);
            if (std::abs(m[0]) <= band && std::abs(m[1]) <= band)
                f.component(c)[i] = Complex(gauss(rng), gauss(rng));
        }
    return f;
}

void cell_suite(std::vector<Entry>& out, const Options& opt) {
    Runner run(out, "cell");
    const CoefficientCell a = opt.coefficient ? *opt.coefficient : two_plus_sine(1, 64);
    const CellGrid g(a.dimension(), 64);
    run("homogenised coefficient of 2 + sin is sqrt(3)", [&] {
        const auto t = cell::homogenised_tensor(a, cell::solve_corrector(a, {0, 0}, g));
        const double err = std::abs(t.value(0, 0) - std::sqrt(3.0));
        return std::pair{err <= 1e-8, fmt("error", err)};
    });
    run("corrector Galerkin residual", [&] {
        const auto cor = cell::solve_corrector(a, {0.5, 0.0}, g);
        double worst = 0.0;
        for (int j = 0; j < a.dimension(); ++j) worst = std::max(worst, cell::galerkin_residual(a, cor, j));
        return std::pair{worst <= 1e-9, fmt("residual", worst)};
    });
    run("corrector is Lipschitz in theta", [&] {
        std::vector<Wavevector> thetas;
        for (int k = 1; k <= 6; ++k) thetas.push_back({std::ldexp(1.0, -k), 0.0});
        const auto table = cell::tensor_theta_deviation(a, thetas, CellGrid(a.dimension(), 32));
        return std::pair{table.corrector_fit.slope >= 0.95, fmt("slope", table.corrector_fit.slope)};
    });
    run("constant coefficient has zero corrector", [&] {
        const auto c = constant_scalar(2, 1.5, 16);
        const auto cor = cell::solve_corrector(c, {0.3, -0.2}, CellGrid(2, 16));
        double worst = 0.0;
        for (const auto& f : cor.components) worst = std::max(worst, torus::norm(f));
        return std::pair{worst == 0.0, fmt("norm", worst)};
    });
}

void fibre_suite(std::vector<Entry>& out, const Options& opt) {
    Runner run(out, "fibre");
    std::mt19937_64 rng(opt.seed);
    run("E_theta projection idempotent and orthogonal", [&] {
        double worst = 0.0;
        for (int d : {1, 2}) {
            const CellGrid g(d, 8);
            const Wavevector theta{0.7, d == 2 ? -1.1 : 0.0};
            const SpectralField w = random_field(g, 1 + d, 4, rng);
            const auto s = fibre::project_E(theta, w);
            const double scale = torus::norm(w);
            worst = std::max(worst, torus::norm(fibre::project_E(theta, s.e_part).eperp_part) / scale);
            worst = std::max(worst, std::abs(torus::inner(s.e_part, s.eperp_part)) / (scale * scale));
            worst = std::max(worst, torus::norm(s.e_part + s.eperp_part - w) / scale);
        }
        return std::pair{worst <= 1e-12, fmt("defect", worst)};
    });
    run("constant coefficient U = V = W", [&] {
        const CellGrid g(1, 16);
        const auto a = constant_scalar(1, 1.0, 16);
        SpectralField F(g, 1, Domain::frequency);
        F.component(0)[0] = 1.0;
        const auto cor0 = cell::solve_corrector(a, {0, 0}, g);
        const auto T0 = cell::homogenised_tensor(a, cor0);
        double worst = 0.0;
        for (const auto eq : {fibre::Equation::wave, fibre::Equation::heat}) {
            const fibre::FibreParams p{0.25, {-1.0, 0.0}, {1.0, 2.0}};
            const auto cor = cell::solve_corrector(a, p.theta, g);
            const auto T = cell::homogenised_tensor(a, cor);
            const auto U = fibre::solve_fibre(eq, a, p, F);
            worst = std::max(worst, torus::norm(U.U - fibre::reference_V(eq, a, cor, T, p, 1.0).U));
            worst = std::max(worst, torus::norm(U.U - fibre::reference_W(eq, a, cor0, T0, p, 1.0).U));
        }
        return std::pair{worst <= 1e-12, fmt("difference", worst)};
    });
    run("uniform invertibility on E_theta complement", [&] {
        const auto entries = fibre::uniform_invertibility({{0, 0}, {-pi, 0}}, CellGrid(1, 16));
        const double err = std::max(std::abs(entries[0].min_singular_value - two_pi),
                                    std::abs(entries[1].min_singular_value - pi));
        return std::pair{err <= 1e-12, fmt("error", err)};
    });
    run("fibre operator coercivity", [&] {
        const CellGrid g(1, 16);
        double worst = 1e300;
        for (const auto eq : {fibre::Equation::wave, fibre::Equation::heat}) {
            const fibre::FibreSolver solver(eq, two_plus_sine(1, 16), g);
            for (int t = 0; t < 5; ++t) {
                const fibre::FibreParams p{0.1, {0.3 * t - 0.6, 0.0}, {0.5, 4.0 * t - 8.0}};
                const SpectralField U = random_field(g, 2, 8, rng);
                const double e = torus::inner(solver.apply(p, U), U).real() /
                                 (solver.energy_floor(p.nu()) * std::pow(torus::norm(U), 2));
                worst = std::min(worst, e);
            }
        }
        return std::pair{worst >= 1.0 - 1e-12, fmt("min energy / floor", worst)};
    });
    run("heat maximal regularity ratio stable in k", [&] {
        const CellGrid g(1, 16);
        std::vector<fibre::RegularitySample> samples;
        for (int s = 0; s < 2; ++s) samples.push_back({random_field(g, 1, 4, rng), random_field(g, 1, 4, rng)});
        std::vector<Complex> lambdas;
        for (double k : {0.0, 8.0, 64.0, 512.0}) lambdas.push_back({1.0, k});
        const auto r = fibre::maximal_regularity_ratio(two_plus_sine(1, 16), 0.1,
                                                       fibre::dyadic_theta_grid(1, 3), lambdas, samples);
        return std::pair{r.variation < 4.0, fmt("variation", r.variation)};
    });
}

evolution::EquationSpec spec_for(evolution::Kind kind, const BoxGrid& box, const TimeGrid& time,
                                 const CoefficientCell& a, const CoefficientCell& b, unsigned long long seed) {
    evolution::EquationSpec s{kind, std::nullopt, std::nullopt, std::nullopt,
                              evolution::make_source(box, time, {evolution::TemporalProfile::smooth, 1, 4.0, 1.0, seed})};
    if (kind != evolution::Kind::heat) s.a = a;
    if (kind != evolution::Kind::wave) s.b = b;
    if (kind == evolution::Kind::thermoelastic) {
        s.gamma = CoefficientCell(torus::CoefficientKind::scalar, box.dimension(),
                                  {{{0, 0}, one(1.0)}, {{1, 0}, one(0.25)}, {{-1, 0}, one(0.25)}},
                                  box.cell_grid());
        s.g = evolution::make_source(box, time, {evolution::TemporalProfile::smooth, 1, 4.0, 1.0, seed + 1});
    }
    return s;
}

void evolution_suite(std::vector<Entry>& out, const Options& opt) {
    Runner run(out, "evolution");
    std::mt19937_64 rng(opt.seed);
    const BoxGrid box(1, 4, 16);
    const TimeGrid time(1.0, 0.0, 8);
    const CoefficientCell a = two_plus_sine(1, 16);
    run("solvers are linear in the sources", [&] {
        double worst = 0.0;
        for (const auto kind : {evolution::Kind::wave, evolution::Kind::heat, evolution::Kind::thermoelastic}) {
            auto s1 = spec_for(kind, box, time, a, a, 3), s2 = spec_for(kind, box, time, a, a, 5);
            auto s3 = s1;
            s3.f = s1.f + Complex(2.0, -1.0) * s2.f;
            if (s3.g) s3.g = *s1.g + Complex(2.0, -1.0) * *s2.g;
            const auto u1 = evolution::solve_heterogeneous(s1), u2 = evolution::solve_heterogeneous(s2);
            const auto u3 = evolution::solve_heterogeneous(s3);
            const SpaceTimeField combo = u1.u + Complex(2.0, -1.0) * u2.u;
            worst = std::max(worst, norms::norm_L2nu(u3.u - combo) / norms::norm_L2nu(u3.u));
        }
        return std::pair{worst <= 1e-10, fmt("defect", worst)};
    });
    run("constant coefficients give u_eps = u_0", [&] {
        const auto c = constant_scalar(1, 1.7, 16);
        double worst = 0.0;
        for (const auto kind : {evolution::Kind::wave, evolution::Kind::heat, evolution::Kind::thermoelastic}) {
            auto s = spec_for(kind, box, time, c, c, 2);
            if (s.gamma) s.gamma = constant_scalar(1, 0.8, 16);
            const auto het = evolution::solve_heterogeneous(s);
            const auto hom = evolution::solve_homogenised(s, evolution::cell_data(s).effective);
            worst = std::max(worst, norms::norm_L2nu(het.u - hom.u) / norms::norm_L2nu(hom.u));
        }
        return std::pair{worst <= 1e-10, fmt("relative difference", worst)};
    });
    run("thermoelastic with gamma = 0 decouples", [&] {
        auto s = spec_for(evolution::Kind::thermoelastic, box, time, a, a, 4);
        s.gamma = constant_scalar(1, 0.0, 16);
        const auto coupled = evolution::solve_heterogeneous(s);
        auto w = s;
        w.kind = evolution::Kind::wave;
        auto h = s;
        h.kind = evolution::Kind::heat;
        h.f = *s.g;
        const double du = norms::norm_L2nu(coupled.u - evolution::solve_heterogeneous(w).u);
        const double dv = norms::norm_L2nu(*coupled.v - evolution::solve_heterogeneous(h).u);
        return std::pair{std::max(du, dv) <= 1e-10, fmt("difference", std::max(du, dv))};
    });
    run("smoothing is idempotent and self-adjoint", [&] {
        const CellGrid g = box.grid();
        const SpectralField u = random_field(g, 1, 20, rng), v = random_field(g, 1, 20, rng);
        const int M = box.cells_per_axis();
        const SpectralField pu = evolution::smoothing_apply(M, u);
        const double idem = torus::norm(evolution::smoothing_apply(M, pu) - pu);
        const double adj = std::abs(torus::inner(pu, v) - torus::inner(u, evolution::smoothing_apply(M, v)));
        return std::pair{idem == 0.0 && adj <= 1e-12 * torus::norm(u) * torus::norm(v), fmt("adjointness", adj)};
    });
    run("smoothing error bound per mode", [&] {
        const SpectralField h = random_field(box.grid(), 1, 20, rng);
        const auto bound = evolution::smoothing_bound(box.cells_per_axis(), h);
        return std::pair{bound.max_mode_ratio <= 1.0 / pi + 1e-15 && bound.field_ratio <= 1.0 / pi + 1e-15,
                         fmt("max mode ratio", bound.max_mode_ratio)};
    });
    run("mean value property of P_eps", [&] {
        const CoefficientCell gamma(torus::CoefficientKind::scalar, 1,
                                    {{{0, 0}, one(3.0)}, {{1, 0}, one(0.5)}, {{-1, 0}, one(0.5)}}, CellGrid(1, 16));
        const SpectralField phi = random_field(box.grid(), 1, 6, rng);
        const double dev = evolution::mean_value_check(gamma, box.cells_per_axis(), phi);
        return std::pair{dev <= 1e-12 * torus::norm(phi), fmt("deviation", dev)};
    });
    run("Gelfand fibre means are Fourier coefficients", [&] {
        const BoxGrid b2(2, 3, 8);
        const SpectralField h = random_field(b2.grid(), 1, 11, rng);
        double worst = 0.0;
        for (const auto& fibre : evolution::gelfand_fibres(b2, h)) {
            const Complex mean = fibre.field.component(0)[0];
            worst = std::max(worst, std::abs(mean - h.component(0)[b2.grid().index_of_mode(fibre.r)]));
        }
        return std::pair{worst <= 1e-12, fmt("difference", worst)};
    });
}

void norms_suite(std::vector<Entry>& out, const Options& opt) {
    Runner run(out, "norms");
    std::mt19937_64 rng(opt.seed);
    const TimeGrid time(1.0, 0.0, 16);
    const BoxGrid box(1, 2, 8);
    std::vector<SpectralField> samples;
    for (int i = 0; i < time.size(); ++i) samples.push_back(random_field(box.grid(), 1, 3, rng));
    const SpaceTimeField field = norms::from_time_samples(box, time, samples);
    run("weighted Parseval", [&] {
        const double a = norms::norm_L2nu(field), b = norms::norm_L2nu_samples(time, samples);
        return std::pair{std::abs(a - b) <= 1e-12 * b, fmt("relative gap", std::abs(a - b) / b)};
    });
    run("Laplace roundtrip", [&] {
        // Measured in L2_nu: the inverse carries exp(nu t), up to exp(16) at the horizon.
        const auto back = norms::to_time_samples(field);
        std::vector<SpectralField> diff;
        for (int i = 0; i < time.size(); ++i)
            diff.push_back(torus::to_frequency(back[std::size_t(i)]) - samples[std::size_t(i)]);
        const double err = norms::norm_L2nu_samples(time, diff) / norms::norm_L2nu_samples(time, samples);
        return std::pair{err <= 1e-12, fmt("error", err)};
    });
    run("H^-1 norm below L2 norm", [&] {
        bool ok = true;
        for (int t = 0; t < 10; ++t) {
            const SpectralField h = random_field(box.grid(), 2, 7, rng);
            ok = ok && norms::norm_Hminus1(h) <= torus::norm(h);
        }
        return std::pair{ok, std::string(ok ? "holds" : "violated")};
    });
    run("time multiplier branch identities", [&] {
        const double one_twice = norms::norm_L2nu(norms::dt_multiplier(1.0, norms::dt_multiplier(1.0, field)) -
                                                  norms::dt_multiplier(2.0, field));
        const double half_twice = norms::norm_L2nu(norms::dt_multiplier(0.5, norms::dt_multiplier(0.5, field)) -
                                                   norms::dt_multiplier(1.0, field));
        const double inverse = norms::norm_L2nu(norms::dt_multiplier(-1.0, field));
        const double scale = norms::norm_L2nu(field);
        const double worst = std::max(one_twice / norms::norm_L2nu(norms::dt_multiplier(2.0, field)),
                                      half_twice / norms::norm_L2nu(norms::dt_multiplier(1.0, field)));
        return std::pair{worst <= 1e-12 && inverse <= scale / time.nu(), fmt("defect", worst)};
    });
}

} // namespace

std::vector<Entry> run(Suite suite, const Options& options) {
    std::vector<Entry> out;
    if (suite == Suite::cell || suite == Suite::all) cell_suite(out, options);
    if (suite == Suite::fibre || suite == Suite::all) fibre_suite(out, options);
    if (suite == Suite::evolution || suite == Suite::all) evolution_suite(out, options);
    if (suite == Suite::norms || suite == Suite::all) norms_suite(out, options);
    return out;
}

bool print(const std::vector<Entry>& entries, std::ostream& out) {
    bool all = true;
    for (const auto& e : entries) {
        out << (e.passed ? "PASS " : "FAIL ") << e.suite << ": " << e.name << " (" << e.detail << ")\n";
        all = all && e.passed;
    }
    return all;
}

} // namespace homoglab::check
