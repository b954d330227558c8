#include "homoglab/cell_problems.hpp"

#include <algorithm>
#include <cmath>

#include "homoglab/krylov.hpp"
#include "homoglab/parallel.hpp"

namespace homoglab::cell {

using torus::CellGrid;
using torus::CoefficientAction;
using torus::CoefficientCell;
using torus::Domain;
using torus::SpectralField;

namespace {

SpectralField constant_vector(const CellGrid& grid, int j) {
    SpectralField e(grid, grid.dimension(), Domain::frequency);
    e.component(j)[0] = 1.0;
    return e;
}

SpectralField scalar_from(const CellGrid& grid, std::span<const Complex> x) {
    SpectralField f(grid, 1, Domain::frequency);
    std::copy(x.begin(), x.end(), f.component(0).begin());
    f.component(0)[0] = 0.0;
    return f;
}

// x -> Q (-(div + i theta.)(a (grad + i theta) x)), Q dropping the mean.
struct CellOperator {
    const CoefficientAction& action;
    Wavevector theta;

    void operator()(std::span<const Complex> x, std::span<Complex> y) const {
        const SpectralField u = scalar_from(action.grid(), x);
        const SpectralField flux = action.apply(torus::shifted_gradient(u, theta));
        const SpectralField div = torus::shifted_divergence(flux, theta);
        const auto v = div.component(0);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = -v[i];
        y[0] = 0.0;
    }
};

SpectralField cell_rhs(const CoefficientAction& action, const Wavevector& theta, int j) {
    SpectralField rhs =
        torus::shifted_divergence(action.apply(constant_vector(action.grid(), j)), theta);
    rhs.component(0)[0] = 0.0;
    return rhs;
}

} // namespace

Corrector solve_corrector(const CoefficientCell& a_in, const Wavevector& theta,
                          const CellGrid& grid, const SolverOptions& options) {
    torus::require_dual_cell(theta, grid.dimension());
    if (a_in.dimension() != grid.dimension())
        throw DomainError("solve_corrector: coefficient and grid dimensions differ");
    const CoefficientCell a = torus::as_matrix(a_in);
    torus::ellipticity_check(a);

    const CoefficientAction action = CoefficientAction::multiply(a, grid);
    const CellOperator op{action, theta};
    const Eigen::MatrixXcd mean = a.mean();
    const Eigen::MatrixXd mean_sym = 0.5 * (mean.real() + mean.real().transpose());
    std::vector<double> inverse_symbol(grid.size(), 0.0);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const Wavevector k = grid.shifted_wavevector(i, theta);
        double s = 0.0;
        for (int p = 0; p < grid.dimension(); ++p)
            for (int q = 0; q < grid.dimension(); ++q) s += k[std::size_t(p)] * mean_sym(p, q) * k[std::size_t(q)];
        inverse_symbol[i] = s > 0.0 ? 1.0 / s : 0.0;
    }
    const krylov::LinearMap precondition = [&](std::span<const Complex> r, std::span<Complex> z) {
        for (std::size_t i = 0; i < r.size(); ++i) z[i] = inverse_symbol[i] * r[i];
    };

    krylov::Options kopt;
    kopt.tolerance = options.tolerance;
    kopt.max_iterations = options.max_iterations > 0 ? options.max_iterations : 10 * int(grid.size());
    kopt.label = "cell problem";

    Corrector out;
    out.theta = theta;
    for (int j = 0; j < grid.dimension(); ++j) {
        const SpectralField rhs = cell_rhs(action, theta, j);
        SpectralField sol(grid, 1, Domain::frequency);
        const krylov::LinearMap apply = std::cref(op);
        const krylov::Result result =
            a.hermitian() ? krylov::conjugate_gradient(apply, precondition, rhs.component(0),
                                                       sol.component(0), kopt)
                          : krylov::gmres(apply, precondition, rhs.component(0), sol.component(0), kopt);
        sol.component(0)[0] = 0.0;
        out.residual = std::max(out.residual, result.relative_residual);
        out.iterations += result.iterations;
        out.components.push_back(std::move(sol));
    }
    return out;
}

HomogenisedTensor homogenised_tensor(const CoefficientCell& a_in, const Corrector& corrector) {
    if (corrector.components.empty()) throw DomainError("homogenised_tensor: empty corrector");
    const CellGrid& grid = corrector.grid();
    if (a_in.dimension() != grid.dimension())
        throw DomainError("homogenised_tensor: coefficient and corrector dimensions differ");
    const CoefficientCell a = torus::as_matrix(a_in);
    const CoefficientAction action = CoefficientAction::multiply(a, grid);
    const int d = grid.dimension();
    HomogenisedTensor t{corrector.theta, Eigen::MatrixXcd::Zero(d, d)};
    for (int j = 0; j < d; ++j) {
        SpectralField field = constant_vector(grid, j);
        field += torus::shifted_gradient(corrector.components[std::size_t(j)], corrector.theta);
        const SpectralField flux = action.apply(field);
        for (int q = 0; q < d; ++q) t.value(q, j) = flux.component(q)[0];
    }
    return t;
}

double galerkin_residual(const CoefficientCell& a_in, const Corrector& corrector, int j) {
    const CellGrid& grid = corrector.grid();
    const CoefficientCell a = torus::as_matrix(a_in);
    const CoefficientAction action = CoefficientAction::multiply(a, grid);
    const SpectralField rhs = cell_rhs(action, corrector.theta, j);
    ComplexVector lhs(grid.size());
    CellOperator{action, corrector.theta}(corrector.components[std::size_t(j)].component(0), lhs);
    double worst = 0.0;
    const auto b = rhs.component(0);
    for (std::size_t i = 1; i < grid.size(); ++i) worst = std::max(worst, std::abs(b[i] - lhs[i]));
    const double scale = krylov::norm2(b);
    return scale > 0.0 ? worst / scale : worst;
}

double h1_norm(const SpectralField& f) {
    if (f.domain() != Domain::frequency) throw DomainError("h1_norm: frequency domain required");
    const CellGrid& g = f.grid();
    double s = 0.0;
    for (int c = 0; c < f.components(); ++c) {
        const auto v = f.component(c);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Wavevector k = g.shifted_wavevector(i, {0.0, 0.0});
            s += (1.0 + k[0] * k[0] + k[1] * k[1]) * std::norm(v[i]);
        }
    }
    return std::sqrt(s);
}

double corrector_distance(const Corrector& lhs, const Corrector& rhs) {
    if (lhs.components.size() != rhs.components.size())
        throw DomainError("corrector_distance: dimension mismatch");
    double s = 0.0;
    for (std::size_t j = 0; j < lhs.components.size(); ++j) {
        const double dj = h1_norm(lhs.components[j] - rhs.components[j]);
        s += dj * dj;
    }
    return std::sqrt(s);
}

DeviationTable tensor_theta_deviation(const CoefficientCell& a, const std::vector<Wavevector>& thetas,
                                      const CellGrid& grid, const SolverOptions& options) {
    if (thetas.empty()) throw DomainError("tensor_theta_deviation: empty theta list");
    const Corrector n0 = solve_corrector(a, {0.0, 0.0}, grid, options);
    DeviationTable table;
    table.a0 = homogenised_tensor(a, n0);
    table.thetas = thetas;
    const std::size_t count = thetas.size();
    table.theta_norms.resize(count);
    table.tensor_deviation.resize(count);
    table.corrector_deviation.resize(count);
    parallel::for_each_index(count, [&](std::size_t i) {
        const Corrector nt = solve_corrector(a, thetas[i], grid, options);
        const HomogenisedTensor at = homogenised_tensor(a, nt);
        table.theta_norms[i] = std::hypot(thetas[i][0], thetas[i][1]);
        table.tensor_deviation[i] =
            Eigen::JacobiSVD<Eigen::MatrixXcd>(at.value - table.a0.value).singularValues()(0);
        table.corrector_deviation[i] = corrector_distance(nt, n0);
    });

    std::vector<std::pair<double, double>> tensor_pts, corrector_pts;
    for (std::size_t i = 0; i < count; ++i) {
        if (table.theta_norms[i] == 0.0) continue;
        tensor_pts.emplace_back(table.theta_norms[i], table.tensor_deviation[i]);
        corrector_pts.emplace_back(table.theta_norms[i], table.corrector_deviation[i]);
        table.tensor_constant = std::max(table.tensor_constant, table.tensor_deviation[i] / table.theta_norms[i]);
        table.corrector_constant =
            std::max(table.corrector_constant, table.corrector_deviation[i] / table.theta_norms[i]);
    }
    // Deviations at round-off level count as exact zeros.
    const double scale = std::max(1.0, table.a0.value.norm());
    for (auto& p : tensor_pts)
        if (p.second <= 1e-13 * scale) p.second = 0.0;
    for (auto& p : corrector_pts)
        if (p.second <= 1e-13) p.second = 0.0;
    if (tensor_pts.size() >= 2) {
        table.tensor_fit = rates::fit_slope(tensor_pts);
        table.corrector_fit = rates::fit_slope(corrector_pts);
    }
    return table;
}

namespace {

struct BoxSamples {
    CellGrid padded;
    ComplexVector phi;  // nodal on padded
};

BoxSamples sample_phi(const SpectralField& phi, int M) {
    if (phi.domain() != Domain::frequency || phi.components() != 1)
        throw DomainError("multiplier_check: scalar frequency-domain test fields required");
    if (phi.grid().points_per_axis() % M != 0)
        throw DomainError("multiplier_check: box points per axis must be a multiple of M");
    const CellGrid padded = CoefficientAction::padded_grid(phi.grid());
    const SpectralField nodal = torus::to_physical(torus::resample(phi, padded));
    const auto v = nodal.component(0);
    return {padded, ComplexVector(v.begin(), v.end())};
}

double weighted_phi_norm(const SpectralField& phi, double gradient_weight) {
    const CellGrid& g = phi.grid();
    const auto v = phi.component(0);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Wavevector k = g.shifted_wavevector(i, {0.0, 0.0});
        s += (1.0 + gradient_weight * (k[0] * k[0] + k[1] * k[1])) * std::norm(v[i]);
    }
    return s;
}

} // namespace

MultiplierResult multiplier_check(const Corrector& corrector0, int M,
                                  const std::vector<SpectralField>& phis) {
    if (M < 1) throw DomainError("multiplier_check: eps must be 1/M with M a positive integer");
    if (corrector0.theta != Wavevector{0.0, 0.0})
        throw DomainError("multiplier_check: corrector at theta = 0 required");
    const int d = corrector0.dimension();
    const double eps = 1.0 / M;
    MultiplierResult out;
    for (const auto& phi : phis) {
        if (phi.grid().dimension() != d) throw DomainError("multiplier_check: dimension mismatch");
        const BoxSamples s = sample_phi(phi, M);
        const double rhs = weighted_phi_norm(phi, eps * eps);
        double worst = 0.0;
        for (int j = 0; j < d; ++j) {
            const SpectralField grad = torus::gradient(corrector0.components[std::size_t(j)]);
            double lhs = 0.0;
            for (int k = 0; k < d; ++k) {
                const ComplexVector g = replicate_to_box(grad, k, M, s.padded);
                for (std::size_t p = 0; p < g.size(); ++p) lhs += std::norm(g[p] * s.phi[p]);
            }
            lhs /= double(s.padded.size());
            worst = std::max(worst, rhs > 0.0 ? lhs / rhs : 0.0);
        }
        out.ratios.push_back(worst);
        out.constant = std::max(out.constant, worst);
    }
    return out;
}

MultiplierResult gamma_multiplier_check(const CoefficientCell& gamma, int M,
                                        const std::vector<SpectralField>& phis) {
    if (gamma.kind() != torus::CoefficientKind::scalar)
        throw DomainError("gamma_multiplier_check: scalar coefficient required");
    if (M < 1) throw DomainError("gamma_multiplier_check: eps must be 1/M with M a positive integer");
    const int d = gamma.dimension();
    MultiplierResult out;
    for (const auto& phi : phis) {
        if (phi.grid().dimension() != d) throw DomainError("gamma_multiplier_check: dimension mismatch");
        const BoxSamples s = sample_phi(phi, M);
        const double rhs = weighted_phi_norm(phi, 1.0);
        double lhs = 0.0;
        for (std::size_t p = 0; p < s.padded.size(); ++p) {
            const Wavevector x = s.padded.node(p);
            for (int k = 0; k < d; ++k) {
                Complex g{};
                for (const auto& t : gamma.terms()) {
                    const double phase = two_pi * M * (t.frequency[0] * x[0] + t.frequency[1] * x[1]);
                    g += Complex(0.0, two_pi * t.frequency[std::size_t(k)]) * t.amplitude(0, 0) *
                         std::polar(1.0, phase);
                }
                lhs += std::norm(g * s.phi[p]);
            }
        }
        lhs /= double(s.padded.size());
        const double ratio = rhs > 0.0 ? lhs / rhs : 0.0;
        out.ratios.push_back(ratio);
        out.constant = std::max(out.constant, ratio);
    }
    return out;
}

} // namespace homoglab::cell
