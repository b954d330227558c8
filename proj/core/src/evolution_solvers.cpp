#include "homoglab/evolution_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "homoglab/krylov.hpp"
#include "homoglab/parallel.hpp"
#include "homoglab/transforms_norms.hpp"

namespace homoglab::evolution {

using torus::CellGrid;
using torus::CoefficientAction;
using torus::CoefficientCell;
using torus::Domain;
using torus::SpectralField;

const char* to_string(Kind kind) {
    switch (kind) {
    case Kind::wave: return "wave";
    case Kind::heat: return "heat";
    case Kind::thermoelastic: return "thermoelastic";
    }
    return "?";
}

Kind parse_kind(const std::string& name) {
    if (name == "wave") return Kind::wave;
    if (name == "heat") return Kind::heat;
    if (name == "thermoelastic") return Kind::thermoelastic;
    throw DomainError("unknown equation kind '" + name + "'");
}

const char* to_string(TemporalProfile profile) {
    return profile == TemporalProfile::smooth ? "smooth" : "rough";
}

TemporalProfile parse_profile(const std::string& name) {
    if (name == "smooth") return TemporalProfile::smooth;
    if (name == "rough") return TemporalProfile::rough;
    throw DomainError("unknown temporal profile '" + name + "'");
}

namespace {

void require_coefficient(const std::optional<CoefficientCell>& c, const char* name, int d) {
    if (!c) throw DomainError(std::string("equation needs coefficient ") + name);
    if (c->dimension() != d) throw DomainError(std::string("coefficient ") + name + ": dimension mismatch");
    torus::ellipticity_check(*c);
}

Eigen::MatrixXcd matrix_mean(const CoefficientCell& c) {
    const Eigen::MatrixXcd m = c.mean();
    if (c.kind() == torus::CoefficientKind::scalar)
        return m(0, 0) * Eigen::MatrixXcd::Identity(c.dimension(), c.dimension());
    return m;
}

Complex quadratic(const Eigen::MatrixXcd& A, const Wavevector& xi, int d) {
    Complex q{};
    for (int p = 0; p < d; ++p)
        for (int r = 0; r < d; ++r) q += xi[std::size_t(p)] * A(p, r) * xi[std::size_t(r)];
    return q;
}

Wavevector box_wavevector(const CellGrid& g, std::size_t i) { return g.shifted_wavevector(i, {0.0, 0.0}); }

SpectralField scalar_from(const CellGrid& g, std::span<const Complex> x) {
    SpectralField f(g, 1, Domain::frequency);
    std::copy(x.begin(), x.end(), f.values().begin());
    return f;
}

/// -div(c grad u) on the box by Galerkin products.
SpectralField elliptic(const CoefficientAction& c, const SpectralField& u) {
    SpectralField out = torus::divergence(c.apply(torus::gradient(u)));
    out *= -1.0;
    return out;
}

struct SlotResult {
    double residual = 0.0;
    int iterations = 0;
};

} // namespace

void EquationSpec::validate() const {
    const int d = f.box().dimension();
    if (f.components() != 1) throw DomainError("source f must be scalar");
    if (kind != Kind::heat) require_coefficient(a, "a", d);
    if (kind != Kind::wave) require_coefficient(b, "b", d);
    if (kind == Kind::thermoelastic) {
        if (!gamma) throw DomainError("thermoelastic equation needs gamma");
        if (gamma->kind() != torus::CoefficientKind::scalar || gamma->dimension() != d)
            throw DomainError("gamma must be a scalar coefficient of matching dimension");
        if (!g) throw DomainError("thermoelastic equation needs source g");
        if (!(g->box() == f.box()) || !(g->time() == f.time()) || g->components() != 1)
            throw DomainError("source g must match f");
    }
    if (!(tolerance > 0.0)) throw DomainError("tolerance must be positive");
}

Solution solve_heterogeneous(const EquationSpec& spec) {
    spec.validate();
    const BoxGrid& box = spec.f.box();
    const TimeGrid& time = spec.f.time();
    const CellGrid g = box.grid();
    const int d = g.dimension();
    const int M = box.cells_per_axis();
    const std::size_t N = g.size();

    std::optional<CoefficientAction> A, B, Gm, Gc;
    Eigen::MatrixXcd abar, bbar;
    Complex gbar{};
    if (spec.a) {
        A.emplace(CoefficientAction::multiply(torus::as_matrix(*spec.a), g, M));
        abar = matrix_mean(*spec.a);
    }
    if (spec.b) {
        B.emplace(CoefficientAction::multiply(torus::as_matrix(*spec.b), g, M));
        bbar = matrix_mean(*spec.b);
    }
    if (spec.kind == Kind::thermoelastic) {
        Gm.emplace(CoefficientAction::multiply(*spec.gamma, g, M));
        Gc.emplace(CoefficientAction::multiply_conjugate(*spec.gamma, g, M));
        gbar = spec.gamma->mean()(0, 0);
    }

    Solution sol{SpaceTimeField(box, time, 1), std::nullopt, 0.0, 0};
    if (spec.kind == Kind::thermoelastic) sol.v.emplace(box, time, 1);
    std::vector<SlotResult> results(std::size_t(time.size()));

    parallel::for_each_index(std::size_t(time.size()), [&](std::size_t slot) {
        const int s = int(slot);
        const bool coupled = spec.kind == Kind::thermoelastic;
        if (spec.f.slice_is_zero(s) && (!coupled || spec.g->slice_is_zero(s))) return;
        const Complex lambda = time.lambda(s);
        krylov::Options opt;
        opt.tolerance = spec.tolerance;
        opt.max_iterations = 4000;
        opt.label = std::string(to_string(spec.kind)) + " box solve at k = " + std::to_string(time.k(s));
        krylov::Result r;
        if (!coupled) {
            const bool wave = spec.kind == Kind::wave;
            const CoefficientAction& C = wave ? *A : *B;
            const Eigen::MatrixXcd& cbar = wave ? abar : bbar;
            const Complex shift = wave ? lambda * lambda : lambda;
            ComplexVector symbol(N);
            for (std::size_t i = 0; i < N; ++i) symbol[i] = 1.0 / (shift + quadratic(cbar, box_wavevector(g, i), d));
            const krylov::LinearMap op = [&](std::span<const Complex> x, std::span<Complex> y) {
                const SpectralField u = scalar_from(g, x);
                const SpectralField out = shift * u + elliptic(C, u);
                std::copy(out.values().begin(), out.values().end(), y.begin());
            };
            const krylov::LinearMap pre = [&](std::span<const Complex> x, std::span<Complex> y) {
                for (std::size_t i = 0; i < N; ++i) y[i] = symbol[i] * x[i];
            };
            r = krylov::gmres(op, pre, spec.f.slice(s).values(), sol.u.slice(s).values(), opt);
        } else {
            std::vector<Eigen::Matrix2cd> blocks(N);
            for (std::size_t i = 0; i < N; ++i) {
                const Wavevector xi = box_wavevector(g, i);
                Eigen::Matrix2cd m;
                m << lambda * lambda + quadratic(abar, xi, d), gbar, -std::conj(gbar) * lambda,
                    lambda + quadratic(bbar, xi, d);
                blocks[i] = m.inverse();
            }
            const krylov::LinearMap op = [&](std::span<const Complex> x, std::span<Complex> y) {
                const SpectralField u = scalar_from(g, x.first(N));
                const SpectralField v = scalar_from(g, x.subspan(N));
                const SpectralField top = lambda * lambda * u + elliptic(*A, u) + Gm->apply(v);
                const SpectralField bottom = lambda * v + elliptic(*B, v) - lambda * Gc->apply(u);
                std::copy(top.values().begin(), top.values().end(), y.begin());
                std::copy(bottom.values().begin(), bottom.values().end(), y.begin() + std::ptrdiff_t(N));
            };
            const krylov::LinearMap pre = [&](std::span<const Complex> x, std::span<Complex> y) {
                for (std::size_t i = 0; i < N; ++i) {
                    y[i] = blocks[i](0, 0) * x[i] + blocks[i](0, 1) * x[N + i];
                    y[N + i] = blocks[i](1, 0) * x[i] + blocks[i](1, 1) * x[N + i];
                }
            };
            ComplexVector rhs(2 * N, Complex{}), x(2 * N, Complex{});
            std::copy(spec.f.slice(s).values().begin(), spec.f.slice(s).values().end(), rhs.begin());
            std::copy(spec.g->slice(s).values().begin(), spec.g->slice(s).values().end(),
                      rhs.begin() + std::ptrdiff_t(N));
            r = krylov::gmres(op, pre, rhs, x, opt);
            std::copy(x.begin(), x.begin() + std::ptrdiff_t(N), sol.u.slice(s).values().begin());
            std::copy(x.begin() + std::ptrdiff_t(N), x.end(), sol.v->slice(s).values().begin());
        }
        results[slot] = {r.relative_residual, r.iterations};
    });
    for (const auto& r : results) {
        sol.max_residual = std::max(sol.max_residual, r.residual);
        sol.max_iterations = std::max(sol.max_iterations, r.iterations);
    }
    return sol;
}

SpaceTimeField flux(const CoefficientCell& c, const SpaceTimeField& u, int refine) {
    if (u.components() != 1) throw DomainError("flux: scalar field required");
    if (refine < 1) throw DomainError("flux: refinement factor must be positive");
    const BoxGrid fine = u.box().refined(refine);
    const CellGrid g = fine.grid();
    const CoefficientAction C = CoefficientAction::multiply(torus::as_matrix(c), g, fine.cells_per_axis());
    SpaceTimeField out(fine, u.time(), g.dimension());
    parallel::for_each_index(std::size_t(u.time().size()), [&](std::size_t slot) {
        const int s = int(slot);
        if (u.slice_is_zero(s)) return;
        out.slice(s) = C.apply(torus::gradient(torus::resample(u.slice(s), g)));
    });
    return out;
}

CellData cell_data(const EquationSpec& spec, const cell::SolverOptions& options) {
    spec.validate();
    const CellGrid cg = spec.f.box().cell_grid();
    CellData out;
    out.effective.a0 = Eigen::MatrixXcd::Zero(cg.dimension(), cg.dimension());
    out.effective.b0 = out.effective.a0;
    if (spec.a) {
        out.a_corrector = cell::solve_corrector(*spec.a, {0.0, 0.0}, cg, options);
        out.effective.a0 = cell::homogenised_tensor(*spec.a, *out.a_corrector).value;
    }
    if (spec.b) {
        out.b_corrector = cell::solve_corrector(*spec.b, {0.0, 0.0}, cg, options);
        out.effective.b0 = cell::homogenised_tensor(*spec.b, *out.b_corrector).value;
    }
    if (spec.gamma) out.effective.gamma_mean = spec.gamma->mean()(0, 0);
    return out;
}

HomogenisedSolution solve_homogenised(const EquationSpec& spec, const Effective& eff) {
    spec.validate();
    const BoxGrid& box = spec.f.box();
    const TimeGrid& time = spec.f.time();
    const CellGrid g = box.grid();
    const int d = g.dimension();
    HomogenisedSolution out{SpaceTimeField(box, time, 1), std::nullopt};
    if (spec.kind == Kind::thermoelastic) out.v.emplace(box, time, 1);

    double h2 = 0.0, dtt = 0.0, gdt = 0.0;
    for (int s = 0; s < time.size(); ++s) {
        const Complex lambda = time.lambda(s);
        const auto f = spec.f.slice(s).component(0);
        auto u = out.u.slice(s).component(0);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Wavevector xi = box_wavevector(g, i);
            switch (spec.kind) {
            case Kind::wave: u[i] = f[i] / (lambda * lambda + quadratic(eff.a0, xi, d)); break;
            case Kind::heat: u[i] = f[i] / (lambda + quadratic(eff.b0, xi, d)); break;
            case Kind::thermoelastic: {
                Eigen::Matrix2cd m;
                m << lambda * lambda + quadratic(eff.a0, xi, d), eff.gamma_mean,
                    -std::conj(eff.gamma_mean) * lambda, lambda + quadratic(eff.b0, xi, d);
                const Eigen::Vector2cd x = m.partialPivLu().solve(
                    Eigen::Vector2cd(f[i], spec.g->slice(s).component(0)[i]));
                u[i] = x(0);
                out.v->slice(s).component(0)[i] = x(1);
                break;
            }
            }
            const double xx = xi[0] * xi[0] + xi[1] * xi[1];
            const double uu = std::norm(u[i]);
            h2 += (1.0 + xx) * (1.0 + xx) * uu;
            dtt += std::norm(lambda * lambda) * uu;
            gdt += xx * std::norm(lambda) * uu;
        }
    }
    out.u_H2 = std::sqrt(time.dk() * h2);
    out.dtt_u = std::sqrt(time.dk() * dtt);
    out.grad_dt_u = std::sqrt(time.dk() * gdt);
    return out;
}

CorrectorField corrector_field(const SpaceTimeField& u0, const cell::Corrector& cor0,
                               const CoefficientCell& c, int refine) {
    if (u0.components() != 1) throw DomainError("corrector_field: scalar u_0 required");
    if (cor0.theta != Wavevector{0.0, 0.0}) throw DomainError("corrector_field: theta = 0 corrector required");
    const BoxGrid fine = u0.box().refined(refine);
    const CellGrid g = fine.grid();
    const int d = g.dimension();
    const int M = fine.cells_per_axis();
    if (cor0.dimension() != d || c.dimension() != d) throw DomainError("corrector_field: dimension mismatch");
    if (cor0.grid().points_per_axis() > fine.cell_points())
        throw DomainError("corrector_field: corrector grid finer than the box cells");

    const CellGrid padded = CoefficientAction::padded_grid(g);
    const auto dd = static_cast<std::size_t>(d);
    std::vector<ComplexVector> N(dd);
    std::vector<std::vector<ComplexVector>> gradN(dd);
    for (int j = 0; j < d; ++j) {
        N[std::size_t(j)] = replicate_to_box(cor0.components[std::size_t(j)], 0, M, padded);
        const SpectralField grad = torus::gradient(cor0.components[std::size_t(j)]);
        for (int i = 0; i < d; ++i) gradN[std::size_t(j)].push_back(replicate_to_box(grad, i, M, padded));
    }
    const CoefficientCell cm = torus::as_matrix(c);
    std::vector<Eigen::MatrixXcd> row(padded.size()), block(padded.size());
    for (std::size_t p = 0; p < padded.size(); ++p) {
        Eigen::MatrixXcd r(1, d), id = Eigen::MatrixXcd::Identity(d, d);
        for (int j = 0; j < d; ++j) {
            r(0, j) = fine.eps() * N[std::size_t(j)][p];
            for (int i = 0; i < d; ++i) id(i, j) += gradN[std::size_t(j)][std::size_t(i)][p];
        }
        row[p] = r;
        block[p] = cm.evaluate(padded.node(p), M) * id;
    }
    const CoefficientAction shift(g, 1, d, row), flux_map(g, d, d, block);

    CorrectorField out{SpaceTimeField(fine, u0.time(), 1), SpaceTimeField(fine, u0.time(), d)};
    parallel::for_each_index(std::size_t(u0.time().size()), [&](std::size_t slot) {
        const int s = int(slot);
        if (u0.slice_is_zero(s)) return;
        const SpectralField u = torus::resample(u0.slice(s), g);
        const SpectralField grad = torus::gradient(u);
        out.first_order.slice(s) = u + shift.apply(grad);
        out.flux.slice(s) = flux_map.apply(grad);
    });
    return out;
}

SpectralField smoothing_apply(int M, const SpectralField& h) {
    if (M < 1) throw DomainError("smoothing: M must be positive");
    if (h.domain() != Domain::frequency) throw DomainError("smoothing: frequency-domain field required");
    SpectralField out = h;
    const CellGrid& g = h.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Mode q = g.mode(i);
        bool inside = true;
        for (int a = 0; a < g.dimension(); ++a) inside = inside && -M <= 2 * q[std::size_t(a)] && 2 * q[std::size_t(a)] < M;
        if (!inside)
            for (int c = 0; c < h.components(); ++c) out.component(c)[i] = 0.0;
    }
    return out;
}

SpaceTimeField smoothing_apply(const SpaceTimeField& h) {
    SpaceTimeField out = h;
    for (int s = 0; s < h.time().size(); ++s)
        out.slice(s) = smoothing_apply(h.box().cells_per_axis(), h.slice(s));
    return out;
}

SmoothingBound smoothing_bound(int M, const SpectralField& h) {
    const SpectralField removed = h - smoothing_apply(M, h);
    const double eps = 1.0 / M;
    SmoothingBound out;
    const CellGrid& g = h.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        bool nonzero = false;
        for (int c = 0; c < h.components(); ++c) nonzero = nonzero || removed.component(c)[i] != Complex{};
        if (!nonzero) continue;
        const Wavevector xi = box_wavevector(g, i);
        out.max_mode_ratio = std::max(out.max_mode_ratio, 1.0 / (eps * std::hypot(xi[0], xi[1])));
    }
    const double r = torus::norm(removed);
    if (r > 0.0) {
        double grad = 0.0;
        for (int c = 0; c < h.components(); ++c) {
            SpectralField one(g, 1, Domain::frequency);
            std::copy(h.component(c).begin(), h.component(c).end(), one.component(0).begin());
            const double v = torus::norm(torus::gradient(one));
            grad += v * v;
        }
        out.field_ratio = r / (eps * std::sqrt(grad));
    }
    return out;
}

double mean_value_check(const CoefficientCell& gamma, int M, const SpectralField& phi) {
    if (gamma.kind() != torus::CoefficientKind::scalar || phi.components() != 1)
        throw DomainError("mean_value_check: scalar gamma and phi required");
    const SpectralField p = smoothing_apply(M, phi.domain() == Domain::frequency ? phi : torus::to_frequency(phi));
    if (p.grid().points_per_axis() % M != 0) throw DomainError("mean_value_check: box grid not a multiple of M");
    if (2 * (M * gamma.max_frequency()) + M > p.grid().points_per_axis())
        throw DomainError("mean_value_check: box grid under-resolves gamma(x / eps) P phi (aliasing)");
    const SpectralField product = CoefficientAction::multiply(gamma, p.grid(), M).apply(p);
    return torus::norm(smoothing_apply(M, product) - gamma.mean()(0, 0) * p);
}

std::vector<GelfandFibre> gelfand_fibres(const BoxGrid& box, const SpectralField& h_in) {
    if (h_in.components() != 1 || !(h_in.grid() == box.grid()))
        throw DomainError("gelfand_fibres: scalar field on the box grid required");
    const SpectralField h = h_in.domain() == Domain::physical ? h_in : torus::to_physical(h_in);
    const int d = box.dimension(), M = box.cells_per_axis(), n = box.cell_points();
    const CellGrid cg = box.cell_grid(), bg = box.grid();
    const int rlo = -(M / 2), rhi = (M + 1) / 2;  // theta_r = 2 pi r / M in [-pi, pi)
    const int zcount = d == 1 ? M : M * M;
    const double weight = 1.0 / zcount;

    std::vector<GelfandFibre> out;
    for (int r0 = rlo; r0 < rhi; ++r0)
        for (int r1 = (d == 2 ? rlo : 0); r1 < (d == 2 ? rhi : 1); ++r1) {
            const Mode r{r0, r1};
            const Wavevector theta{two_pi * r0 / M, two_pi * r1 / M};
            SpectralField G(cg, 1, Domain::physical);
            for (std::size_t i = 0; i < cg.size(); ++i) {
                const Mode ic = cg.node_index(i);
                const Wavevector y = cg.node(i);
                Complex sum{};
                for (int zf = 0; zf < zcount; ++zf) {
                    const Mode z{d == 1 ? zf : zf / M, d == 1 ? 0 : zf % M};
                    // Box node of eps (y + z): index i + n (z + (M - 1) / 2) per axis.
                    std::size_t flat = 0;
                    for (int a = 0; a < d; ++a) {
                        const int l = (ic[std::size_t(a)] + n * z[std::size_t(a)] + n * (M - 1) / 2) % (M * n);
                        flat = flat * std::size_t(M * n) + std::size_t(l);
                    }
                    const double phase = theta[0] * (y[0] + z[0]) + theta[1] * (y[1] + z[1]);
                    sum += h.component(0)[flat] * std::polar(1.0, -phase);
                }
                G.component(0)[i] = weight * sum;
            }
            out.push_back({r, theta, torus::to_frequency(G)});
        }
    (void)bg;
    return out;
}

SpaceTimeField make_source(const BoxGrid& box, const TimeGrid& time, const SourceSpec& spec) {
    if (spec.spatial_band < 0) throw DomainError("source: spatial band must be nonnegative");
    const CellGrid g = box.grid();
    if (2 * spec.spatial_band >= g.points_per_axis()) throw DomainError("source: spatial band exceeds the box grid");
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> phase(0.0, two_pi), scale(0.5, 1.5);

    SpectralField spatial(g, 1, Domain::frequency);
    if (spec.seed == 0) {
        spatial.component(0)[g.index_of_mode({std::min(1, spec.spatial_band), 0})] = 1.0;
    } else {
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Mode q = g.mode(i);
            if (std::abs(q[0]) <= spec.spatial_band && std::abs(q[1]) <= spec.spatial_band)
                spatial.component(0)[i] = Complex(gauss(rng), gauss(rng));
        }
    }
    SpaceTimeField out(box, time, 1);
    for (int s = 0; s < time.size(); ++s) {
        const double k = time.k(s);
        double magnitude = spec.profile == TemporalProfile::smooth ? std::exp(-(k / spec.width) * (k / spec.width)) : 1.0;
        Complex value = magnitude;
        if (spec.seed != 0) value = magnitude * scale(rng) * std::polar(1.0, phase(rng));
        out.slice(s) = (spec.amplitude * value) * spatial;
    }
    return out;
}

} // namespace homoglab::evolution
