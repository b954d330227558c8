#pragma once

// Single-fibre analysis at (lambda, theta, eps): the E_theta decomposition,
// fibre wave/heat solves, reference states and error sweeps.

#include <vector>

#include "homoglab/cell_problems.hpp"
#include "homoglab/krylov.hpp"
#include "homoglab/torus_spectral.hpp"

namespace homoglab::fibre {

enum class Equation { wave, heat };

const char* to_string(Equation eq);

struct FibreParams {
    double eps = 1.0;
    Wavevector theta{};
    Complex lambda{1.0, 0.0};  // nu + i k

    double nu() const noexcept { return lambda.real(); }
    /// theta / eps.
    Wavevector xi() const noexcept { return {theta[0] / eps, theta[1] / eps}; }
    /// Throws DomainError unless eps > 0, Re lambda > 0 and theta in the dual cell.
    void validate(int dimension) const;
};

/// (1 + d)-component frequency-domain cell field: U_1 scalar, U_2 a d-vector.
struct FibreState {
    FibreParams params;
    Equation equation = Equation::wave;
    torus::SpectralField U;
};

struct Decomposition {
    torus::SpectralField e_part;
    torus::SpectralField eperp_part;
};

/// Orthogonal split w = e_part + eperp_part with e_part in E_theta (constants
/// plus shifted-solenoidal second components) and eperp_part in its complement
/// (mean-zero first components, shifted gradients of mean-zero potentials).
/// Output is in the domain of the input.
Decomposition project_E(const Wavevector& theta, const torus::SpectralField& w);

/// Solves the fibre system with A_theta = [[0, -(div + i theta.)], [-(grad + i theta), 0]]:
///   wave: (lambda diag(1, a^{-1}) + eps^{-1} A_theta) U = rhs
///   heat: (diag(lambda, a^{-1}) + eps^{-1} A_theta) U = rhs
/// by right-preconditioned GMRES (per-mode block inverse with the mean of a^{-1}).
class FibreSolver {
public:
    FibreSolver(Equation eq, const torus::CoefficientCell& a, const torus::CellGrid& grid,
                double tolerance = 1e-10);

    Equation equation() const noexcept { return eq_; }
    const torus::CellGrid& grid() const noexcept { return grid_; }

    /// Right-hand side (F, 0) for a scalar frequency-domain F.
    FibreState solve(const FibreParams& p, const torus::SpectralField& F) const;
    /// General (1 + d)-component right-hand side.
    torus::SpectralField solve_general(const FibreParams& p, const torus::SpectralField& rhs) const;
    /// Applies the fibre operator.
    torus::SpectralField apply(const FibreParams& p, const torus::SpectralField& U) const;
    /// ||rhs - L U|| / ||rhs||.
    double residual(const FibreParams& p, const torus::SpectralField& U,
                    const torus::SpectralField& rhs) const;
    /// Coercivity floor c with ||U|| <= ||rhs|| / c: nu min(1, kappa(a^{-1})) for
    /// wave, min(nu, kappa(a^{-1})) for heat, kappa the ellipticity constant.
    double energy_floor(double nu) const noexcept;

private:
    Equation eq_;
    torus::CellGrid grid_;
    torus::CoefficientAction inverse_;
    Eigen::MatrixXcd inverse_mean_;
    double inverse_kappa_;
    double tolerance_;
};

FibreState solve_fibre(Equation eq, const torus::CoefficientCell& a, const FibreParams& p,
                       const torus::SpectralField& F);

/// c (lambda or 1, a (I + grad N_theta + i theta (x) N_theta) i theta/eps) with
/// c = meanF / (lambda^2 + a_theta xi.xi) (wave) or meanF / (lambda + a_theta xi.xi) (heat).
FibreState reference_V(Equation eq, const torus::CoefficientCell& a, const cell::Corrector& cor,
                       const cell::HomogenisedTensor& T, const FibreParams& p, Complex meanF);

/// c_0 (lambda or 1, a (I + grad N_0) i xi) with c_0 from a_0 at the given xi.
torus::SpectralField reference_W(Equation eq, const torus::CoefficientCell& a,
                                 const cell::Corrector& cor0, const cell::HomogenisedTensor& T0,
                                 Complex lambda, const Wavevector& xi, Complex meanF);
/// reference_W at xi = theta / eps.
FibreState reference_W(Equation eq, const torus::CoefficientCell& a, const cell::Corrector& cor0,
                       const cell::HomogenisedTensor& T0, const FibreParams& p, Complex meanF);

/// Dyadic points {+-pi 2^{-j}}, j = 0..levels, wrapped into [-pi, pi) and
/// deduplicated; d = 2 uses them along both axes and the diagonal.
std::vector<Wavevector> dyadic_theta_grid(int dimension, int levels);

struct SweepConfig {
    Equation equation = Equation::wave;
    std::vector<double> eps;
    std::vector<double> k_values;
    double nu = 1.0;
    std::vector<Wavevector> thetas;
};

struct SweepEntry {
    double eps;
    Wavevector theta;
    double k;
    double ratio;      // normalised error
    double raw_error;  // numerator of the ratio
};

struct SweepResult {
    std::vector<SweepEntry> entries;  // eps-major, then theta, then k
    std::vector<double> sup_ratio;    // per eps
    double variation = 0.0;           // max / min of sup_ratio over eps
};

/// Wave: ||U - W|| / (eps |lambda|^2 ||F||). Heat: (||lambda^{1/2}(U - W)_1|| +
/// ||(U - W)_2||) / (eps ||F||), principal branch.
SweepResult fibre_error_sweep(const torus::CoefficientCell& a, const SweepConfig& config,
                              const torus::SpectralField& F);

struct InvertibilityEntry {
    Wavevector theta;
    double min_singular_value;
};

/// Smallest singular value of A_theta on E_theta^perp, mode by mode.
std::vector<InvertibilityEntry> uniform_invertibility(const std::vector<Wavevector>& thetas,
                                                      const torus::CellGrid& grid);

struct RegularitySample {
    torus::SpectralField f1;  // scalar
    torus::SpectralField f2;  // d-vector
};

struct RegularityResult {
    std::vector<double> per_lambda;  // max over theta and samples, per lambda
    double constant = 0.0;           // max over everything
    double variation = 0.0;          // max / min of per_lambda
};

/// (||lambda u1|| + ||lambda^{1/2} u2|| + ||lambda^{1/2} C* u1|| + ||C u2||) /
/// (||f1|| + ||lambda^{1/2} f2||) for the heat fibre with C = -eps^{-1}(div + i theta.).
RegularityResult maximal_regularity_ratio(const torus::CoefficientCell& b, double eps,
                                          const std::vector<Wavevector>& thetas,
                                          const std::vector<Complex>& lambdas,
                                          const std::vector<RegularitySample>& samples);

} // namespace homoglab::fibre
