#include "homoglab/fibre_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "homoglab/parallel.hpp"

namespace homoglab::fibre {

using torus::CellGrid;
using torus::CoefficientAction;
using torus::CoefficientCell;
using torus::Domain;
using torus::SpectralField;

const char* to_string(Equation eq) { return eq == Equation::wave ? "wave" : "heat"; }

void FibreParams::validate(int dimension) const {
    if (!(eps > 0.0)) throw DomainError("fibre: eps must be positive");
    if (!(lambda.real() > 0.0)) throw DomainError("fibre: Re lambda = nu must be positive");
    torus::require_dual_cell(theta, dimension);
}

namespace {

SpectralField slice(const SpectralField& f, int first, int count) {
    SpectralField out(f.grid(), count, f.domain());
    for (int c = 0; c < count; ++c) {
        const auto src = f.component(first + c);
        std::copy(src.begin(), src.end(), out.component(c).begin());
    }
    return out;
}

void put(SpectralField& dst, int first, const SpectralField& src) {
    for (int c = 0; c < src.components(); ++c) {
        const auto v = src.component(c);
        std::copy(v.begin(), v.end(), dst.component(first + c).begin());
    }
}

SpectralField stack(const SpectralField& first, const SpectralField& rest) {
    SpectralField out(first.grid(), 1 + rest.components(), first.domain());
    put(out, 0, first);
    put(out, 1, rest);
    return out;
}

SpectralField from_span(const CellGrid& grid, int components, std::span<const Complex> x) {
    SpectralField f(grid, components, Domain::frequency);
    std::copy(x.begin(), x.end(), f.values().begin());
    return f;
}

double min_inverse_eigenvalue(const CoefficientCell& a) {
    double kappa = std::numeric_limits<double>::infinity();
    for (const auto& value : a.samples()) {
        const Eigen::MatrixXcd inv = value.inverse();
        const Eigen::MatrixXd re = inv.real();
        const Eigen::MatrixXd sym = 0.5 * (re + re.transpose());
        kappa = std::min(kappa, Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sym).eigenvalues().minCoeff());
    }
    return kappa;
}

double norm_of(const SpectralField& f) { return torus::norm(f); }

} // namespace

Decomposition project_E(const Wavevector& theta, const SpectralField& w_in) {
    const CellGrid& g = w_in.grid();
    const int d = g.dimension();
    if (w_in.components() != 1 + d)
        throw DomainError("project_E: expected a (1 + d)-component field");
    const bool physical = w_in.domain() == Domain::physical;
    const SpectralField w = physical ? torus::to_frequency(w_in) : w_in;
    SpectralField e(g, 1 + d, Domain::frequency), perp(g, 1 + d, Domain::frequency);

    e.component(0)[0] = w.component(0)[0];
    for (std::size_t i = 1; i < g.size(); ++i) perp.component(0)[i] = w.component(0)[i];

    for (int j = 0; j < d; ++j) e.component(1 + j)[0] = w.component(1 + j)[0];
    for (std::size_t i = 1; i < g.size(); ++i) {
        const Wavevector k = g.shifted_wavevector(i, theta);
        double kk = 0.0;
        Complex kv{};
        for (int j = 0; j < d; ++j) {
            kk += k[std::size_t(j)] * k[std::size_t(j)];
            kv += k[std::size_t(j)] * w.component(1 + j)[i];
        }
        for (int j = 0; j < d; ++j) {
            const Complex v = w.component(1 + j)[i];
            const Complex along = kk > 0.0 ? kv / kk * k[std::size_t(j)] : Complex{};
            perp.component(1 + j)[i] = along;
            e.component(1 + j)[i] = v - along;
        }
    }
    if (physical) return {torus::to_physical(e), torus::to_physical(perp)};
    return {std::move(e), std::move(perp)};
}

FibreSolver::FibreSolver(Equation eq, const CoefficientCell& a_in, const CellGrid& grid, double tolerance)
    : eq_(eq), grid_(grid),
      inverse_(CoefficientAction::multiply_inverse(torus::as_matrix(a_in), grid)),
      inverse_mean_(inverse_.mean()), inverse_kappa_(0.0), tolerance_(tolerance) {
    const CoefficientCell a = torus::as_matrix(a_in);
    if (a.dimension() != grid.dimension()) throw DomainError("FibreSolver: dimension mismatch");
    torus::ellipticity_check(a);
    inverse_kappa_ = min_inverse_eigenvalue(a);
}

double FibreSolver::energy_floor(double nu) const noexcept {
    return eq_ == Equation::wave ? nu * std::min(1.0, inverse_kappa_) : std::min(nu, inverse_kappa_);
}

SpectralField FibreSolver::apply(const FibreParams& p, const SpectralField& U) const {
    const int d = grid_.dimension();
    if (U.domain() != Domain::frequency || U.components() != 1 + d || !(U.grid() == grid_))
        throw DomainError("FibreSolver: expected a (1 + d)-component frequency field on the solver grid");
    const double inv_eps = 1.0 / p.eps;
    const Complex s = eq_ == Equation::wave ? p.lambda : Complex(1.0);
    const SpectralField u1 = slice(U, 0, 1), u2 = slice(U, 1, d);
    SpectralField first = p.lambda * u1;
    first -= inv_eps * torus::shifted_divergence(u2, p.theta);
    SpectralField second = s * inverse_.apply(u2);
    second -= inv_eps * torus::shifted_gradient(u1, p.theta);
    return stack(first, second);
}

SpectralField FibreSolver::solve_general(const FibreParams& p, const SpectralField& rhs) const {
    const int d = grid_.dimension();
    p.validate(d);
    if (rhs.domain() != Domain::frequency || rhs.components() != 1 + d || !(rhs.grid() == grid_))
        throw DomainError("FibreSolver: expected a (1 + d)-component frequency right-hand side");
    const std::size_t N = grid_.size();
    const Complex s = eq_ == Equation::wave ? p.lambda : Complex(1.0);

    std::vector<Eigen::MatrixXcd> blocks(N);
    for (std::size_t i = 0; i < N; ++i) {
        const Wavevector k = grid_.shifted_wavevector(i, p.theta);
        Eigen::MatrixXcd B = Eigen::MatrixXcd::Zero(1 + d, 1 + d);
        B(0, 0) = p.lambda;
        for (int j = 0; j < d; ++j) {
            const Complex off(0.0, -k[std::size_t(j)] / p.eps);
            B(0, 1 + j) = off;
            B(1 + j, 0) = off;
        }
        B.bottomRightCorner(d, d) = s * inverse_mean_;
        blocks[i] = B.inverse();
    }
    const krylov::LinearMap precondition = [&](std::span<const Complex> r, std::span<Complex> z) {
        for (std::size_t i = 0; i < N; ++i)
            for (int a = 0; a <= d; ++a) {
                Complex sum{};
                for (int b = 0; b <= d; ++b) sum += blocks[i](a, b) * r[std::size_t(b) * N + i];
                z[std::size_t(a) * N + i] = sum;
            }
    };
    const krylov::LinearMap op = [&](std::span<const Complex> x, std::span<Complex> y) {
        const SpectralField out = apply(p, from_span(grid_, 1 + d, x));
        std::copy(out.values().begin(), out.values().end(), y.begin());
    };
    krylov::Options opt;
    opt.tolerance = tolerance_;
    opt.max_iterations = 10 * int((1 + d) * N);
    opt.label = std::string("fibre ") + to_string(eq_);
    SpectralField U(grid_, 1 + d, Domain::frequency);
    krylov::gmres(op, precondition, rhs.values(), U.values(), opt);
    return U;
}

FibreState FibreSolver::solve(const FibreParams& p, const SpectralField& F) const {
    if (F.components() != 1 || !(F.grid() == grid_))
        throw DomainError("FibreSolver: scalar right-hand side on the solver grid required");
    const SpectralField f = F.domain() == Domain::frequency ? F : torus::to_frequency(F);
    SpectralField rhs(grid_, 1 + grid_.dimension(), Domain::frequency);
    put(rhs, 0, f);
    return {p, eq_, solve_general(p, rhs)};
}

double FibreSolver::residual(const FibreParams& p, const SpectralField& U, const SpectralField& rhs) const {
    const double scale = norm_of(rhs);
    const double r = norm_of(rhs - apply(p, U));
    return scale > 0.0 ? r / scale : r;
}

FibreState solve_fibre(Equation eq, const CoefficientCell& a, const FibreParams& p, const SpectralField& F) {
    return FibreSolver(eq, a, F.grid()).solve(p, F);
}

namespace {

SpectralField represent(Equation eq, const CoefficientCell& a_in, const cell::Corrector& cor,
                        const cell::HomogenisedTensor& T, Complex lambda, const Wavevector& xi,
                        Complex meanF) {
    const CellGrid& g = cor.grid();
    const int d = g.dimension();
    double q_re = 0.0;
    Complex q{};
    for (int p = 0; p < d; ++p)
        for (int r = 0; r < d; ++r) q += xi[std::size_t(p)] * T.value(p, r) * xi[std::size_t(r)];
    q_re = q.real();
    (void)q_re;
    const Complex denom = eq == Equation::wave ? lambda * lambda + q : lambda + q;
    const double nu = lambda.real();
    const double floor = eq == Equation::wave ? nu * nu : nu;
    if (std::abs(denom) < floor * (1.0 - 1e-12))
        throw DomainError("reference state: denominator below its theoretical floor");
    const Complex c = meanF / denom;

    // Gradient field e_xi + (grad + i theta)(N . xi), times i, then the flux.
    SpectralField grad(g, d, Domain::frequency);
    for (int j = 0; j < d; ++j) grad.component(j)[0] = xi[std::size_t(j)];
    for (int j = 0; j < d; ++j) {
        if (xi[std::size_t(j)] == 0.0) continue;
        grad += xi[std::size_t(j)] * torus::shifted_gradient(cor.components[std::size_t(j)], cor.theta);
    }
    const CoefficientCell a = torus::as_matrix(a_in);
    const SpectralField flux = CoefficientAction::multiply(a, g).apply(grad);

    SpectralField out(g, 1 + d, Domain::frequency);
    out.component(0)[0] = c * (eq == Equation::wave ? lambda : Complex(1.0));
    put(out, 1, Complex(0.0, 1.0) * c * flux);
    return out;
}

} // namespace

FibreState reference_V(Equation eq, const CoefficientCell& a, const cell::Corrector& cor,
                       const cell::HomogenisedTensor& T, const FibreParams& p, Complex meanF) {
    p.validate(cor.dimension());
    if (cor.theta != p.theta || T.theta != p.theta)
        throw DomainError("reference_V: corrector and tensor must be computed at the fibre theta");
    return {p, eq, represent(eq, a, cor, T, p.lambda, p.xi(), meanF)};
}

SpectralField reference_W(Equation eq, const CoefficientCell& a, const cell::Corrector& cor0,
                          const cell::HomogenisedTensor& T0, Complex lambda, const Wavevector& xi,
                          Complex meanF) {
    if (cor0.theta != Wavevector{0.0, 0.0} || T0.theta != Wavevector{0.0, 0.0})
        throw DomainError("reference_W: corrector and tensor at theta = 0 required");
    if (!(lambda.real() > 0.0)) throw DomainError("reference_W: Re lambda must be positive");
    return represent(eq, a, cor0, T0, lambda, xi, meanF);
}

FibreState reference_W(Equation eq, const CoefficientCell& a, const cell::Corrector& cor0,
                       const cell::HomogenisedTensor& T0, const FibreParams& p, Complex meanF) {
    p.validate(cor0.dimension());
    return {p, eq, reference_W(eq, a, cor0, T0, p.lambda, p.xi(), meanF)};
}

std::vector<Wavevector> dyadic_theta_grid(int dimension, int levels) {
    if (dimension != 1 && dimension != 2) throw DomainError("theta grid: dimension must be 1 or 2");
    if (levels < 0) throw DomainError("theta grid: levels must be nonnegative");
    std::vector<double> axis;
    for (int j = 0; j <= levels; ++j)
        for (double sign : {-1.0, 1.0}) {
            double t = sign * pi * std::ldexp(1.0, -j);
            if (t >= pi) t -= two_pi;
            if (std::find(axis.begin(), axis.end(), t) == axis.end()) axis.push_back(t);
        }
    std::sort(axis.begin(), axis.end());
    std::vector<Wavevector> out;
    for (double t : axis) {
        if (dimension == 1) {
            out.push_back({t, 0.0});
        } else {
            out.push_back({t, 0.0});
            out.push_back({0.0, t});
            out.push_back({t, t});
        }
    }
    return out;
}

SweepResult fibre_error_sweep(const CoefficientCell& a, const SweepConfig& config, const SpectralField& F_in) {
    if (config.eps.empty() || config.k_values.empty() || config.thetas.empty())
        throw DomainError("fibre_error_sweep: eps, k and theta grids must be nonempty");
    const CellGrid& g = F_in.grid();
    const int d = g.dimension();
    const SpectralField F = F_in.domain() == Domain::frequency ? F_in : torus::to_frequency(F_in);
    const double fnorm = torus::norm(F);
    const Complex meanF = F.component(0)[0];
    const cell::Corrector cor0 = cell::solve_corrector(a, {0.0, 0.0}, g);
    const cell::HomogenisedTensor T0 = cell::homogenised_tensor(a, cor0);
    const FibreSolver solver(config.equation, a, g);

    const std::size_t nt = config.thetas.size(), nk = config.k_values.size();
    SweepResult result;
    result.entries.resize(config.eps.size() * nt * nk);
    parallel::for_each_index(result.entries.size(), [&](std::size_t idx) {
        const std::size_t ie = idx / (nt * nk), it = (idx / nk) % nt, ik = idx % nk;
        FibreParams p{config.eps[ie], config.thetas[it], Complex(config.nu, config.k_values[ik])};
        const FibreState U = solver.solve(p, F);
        const SpectralField diff = U.U - reference_W(config.equation, a, cor0, T0, p, meanF).U;
        double raw = 0.0, normaliser = 0.0;
        if (config.equation == Equation::wave) {
            raw = torus::norm(diff);
            normaliser = p.eps * std::norm(p.lambda) * fnorm;
        } else {
            raw = std::abs(std::sqrt(p.lambda)) * torus::norm(slice(diff, 0, 1)) + torus::norm(slice(diff, 1, d));
            normaliser = p.eps * fnorm;
        }
        result.entries[idx] = {p.eps, p.theta, p.lambda.imag(), normaliser > 0.0 ? raw / normaliser : 0.0, raw};
    });
    result.sup_ratio.assign(config.eps.size(), 0.0);
    for (std::size_t idx = 0; idx < result.entries.size(); ++idx) {
        const std::size_t ie = idx / (nt * nk);
        result.sup_ratio[ie] = std::max(result.sup_ratio[ie], result.entries[idx].ratio);
    }
    const auto [lo, hi] = std::minmax_element(result.sup_ratio.begin(), result.sup_ratio.end());
    result.variation = *lo > 0.0 ? *hi / *lo : (*hi > 0.0 ? std::numeric_limits<double>::infinity() : 1.0);
    return result;
}

std::vector<InvertibilityEntry> uniform_invertibility(const std::vector<Wavevector>& thetas, const CellGrid& grid) {
    const int d = grid.dimension();
    std::vector<InvertibilityEntry> out;
    for (const auto& theta : thetas) {
        torus::require_dual_cell(theta, d);
        double smallest = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i < grid.size(); ++i) {
            const Wavevector k = grid.shifted_wavevector(i, theta);
            Eigen::VectorXd kv(d);
            for (int j = 0; j < d; ++j) kv(j) = k[std::size_t(j)];
            const double kn = kv.norm();
            Eigen::MatrixXcd symbol = Eigen::MatrixXcd::Zero(1 + d, 1 + d);
            for (int j = 0; j < d; ++j) {
                symbol(0, 1 + j) = Complex(0.0, -kv(j));
                symbol(1 + j, 0) = Complex(0.0, -kv(j));
            }
            Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(1 + d, 2);
            basis(0, 0) = 1.0;
            for (int j = 0; j < d; ++j) basis(1 + j, 1) = kv(j) / kn;
            const Eigen::MatrixXcd restricted = symbol * basis;
            smallest = std::min(smallest, Eigen::JacobiSVD<Eigen::MatrixXcd>(restricted).singularValues().minCoeff());
        }
        out.push_back({theta, smallest});
    }
    return out;
}

RegularityResult maximal_regularity_ratio(const CoefficientCell& b, double eps, const std::vector<Wavevector>& thetas,
                                          const std::vector<Complex>& lambdas,
                                          const std::vector<RegularitySample>& samples) {
    if (thetas.empty() || lambdas.empty() || samples.empty())
        throw DomainError("maximal_regularity_ratio: empty grid");
    const CellGrid& g = samples.front().f1.grid();
    const int d = g.dimension();
    const FibreSolver solver(Equation::heat, b, g);
    const std::size_t nt = thetas.size(), ns = samples.size();
    std::vector<double> ratios(lambdas.size() * nt * ns);
    parallel::for_each_index(ratios.size(), [&](std::size_t idx) {
        const std::size_t il = idx / (nt * ns), it = (idx / ns) % nt, is = idx % ns;
        const FibreParams p{eps, thetas[it], lambdas[il]};
        const RegularitySample& s = samples[is];
        if (s.f1.components() != 1 || s.f2.components() != d)
            throw DomainError("maximal_regularity_ratio: sample shapes must be (scalar, d-vector)");
        const SpectralField U = solver.solve_general(p, stack(s.f1, s.f2));
        const SpectralField u1 = slice(U, 0, 1), u2 = slice(U, 1, d);
        const double root = std::abs(std::sqrt(p.lambda));
        const double lhs = std::abs(p.lambda) * torus::norm(u1) + root * torus::norm(u2) +
                           root / eps * torus::norm(torus::shifted_gradient(u1, p.theta)) +
                           torus::norm(torus::shifted_divergence(u2, p.theta)) / eps;
        const double rhs = torus::norm(s.f1) + root * torus::norm(s.f2);
        ratios[idx] = rhs > 0.0 ? lhs / rhs : 0.0;
    });
    RegularityResult out;
    out.per_lambda.assign(lambdas.size(), 0.0);
    for (std::size_t idx = 0; idx < ratios.size(); ++idx) {
        const std::size_t il = idx / (nt * ns);
        out.per_lambda[il] = std::max(out.per_lambda[il], ratios[idx]);
    }
    const auto [lo, hi] = std::minmax_element(out.per_lambda.begin(), out.per_lambda.end());
    out.constant = *hi;
    out.variation = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    return out;
}

} // namespace homoglab::fibre
