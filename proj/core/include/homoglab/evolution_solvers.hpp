#pragma once

// Space-time solves on the periodic box [-1/2, 1/2)^d with eps = 1/M:
// heterogeneous and homogenised wave, heat and thermoelastic problems,
// first-order corrector reconstructions, and the smoothing operator P_eps.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "homoglab/cell_problems.hpp"
#include "homoglab/space_time.hpp"

namespace homoglab::evolution {

enum class Kind { wave, heat, thermoelastic };

const char* to_string(Kind kind);
/// "wave", "heat" or "thermoelastic"; throws DomainError otherwise.
Kind parse_kind(const std::string& name);

/// wave:          lambda^2 u - div(a(x/eps) grad u) = f
/// heat:          lambda u - div(b(x/eps) grad u) = f
/// thermoelastic: lambda^2 u - div(a grad u) + gamma v = f,
///                lambda v - div(b grad v) - conj(gamma) lambda u = g
struct EquationSpec {
    Kind kind = Kind::wave;
    std::optional<torus::CoefficientCell> a;      // wave, thermoelastic
    std::optional<torus::CoefficientCell> b;      // heat, thermoelastic
    std::optional<torus::CoefficientCell> gamma;  // thermoelastic, scalar
    SpaceTimeField f;
    std::optional<SpaceTimeField> g;              // thermoelastic
    double tolerance = 1e-12;

    int cells() const noexcept { return f.box().cells_per_axis(); }
    /// Checks the coefficients and sources required by kind; throws DomainError / NonElliptic.
    void validate() const;
};

struct Solution {
    SpaceTimeField u;
    std::optional<SpaceTimeField> v;
    double max_residual = 0.0;
    int max_iterations = 0;
};

/// Per time-frequency slot, a Galerkin box solve by preconditioned GMRES
/// (constant-coefficient symbol with the coefficient means as preconditioner).
/// Slots where every source vanishes are left zero.
Solution solve_heterogeneous(const EquationSpec& spec);

/// c(x/eps) grad u on the refined box (M, factor n), exact for trigonometric c.
SpaceTimeField flux(const torus::CoefficientCell& c, const SpaceTimeField& u, int refine = 2);

struct Effective {
    Eigen::MatrixXcd a0;
    Eigen::MatrixXcd b0;
    Complex gamma_mean{};
};

/// Cell correctors at theta = 0 and the tensors / means required by spec.kind.
struct CellData {
    std::optional<cell::Corrector> a_corrector;
    std::optional<cell::Corrector> b_corrector;
    Effective effective;
};

CellData cell_data(const EquationSpec& spec, const cell::SolverOptions& options = {});

struct HomogenisedSolution {
    SpaceTimeField u;
    std::optional<SpaceTimeField> v;
    double u_H2 = 0.0;       // ||u_0||_{L2_nu(H^2)}
    double dtt_u = 0.0;      // ||dt^2 u_0||
    double grad_dt_u = 0.0;  // ||grad dt u_0||
};

/// Exact per-mode solve of the constant-coefficient system.
HomogenisedSolution solve_homogenised(const EquationSpec& spec, const Effective& effective);

struct CorrectorField {
    SpaceTimeField first_order;  // u_0 + eps N_0(x/eps) . grad u_0
    SpaceTimeField flux;         // c(x/eps) (I + grad N_0(x/eps)) grad u_0
};

/// Both fields live on the refined box (M, refine n); N_0 is the theta = 0
/// corrector of c on a cell grid no finer than that.
CorrectorField corrector_field(const SpaceTimeField& u0, const cell::Corrector& cor0,
                               const torus::CoefficientCell& c, int refine = 2);

/// P_eps: keeps box modes q with 2 pi q in [-pi / eps, pi / eps)^d, i.e. -M <= 2 q_i < M.
torus::SpectralField smoothing_apply(int M, const torus::SpectralField& h);
SpaceTimeField smoothing_apply(const SpaceTimeField& h);

struct SmoothingBound {
    double max_mode_ratio = 0.0;  // max over removed modes of 1 / (eps |2 pi q|)
    double field_ratio = 0.0;     // ||h - P h|| / (eps ||grad h||), 0 if nothing is removed
};

/// Per-mode witness of ||h - P_eps h|| <= C eps ||grad h|| with C = 1 / pi.
SmoothingBound smoothing_bound(int M, const torus::SpectralField& h);

/// ||P_eps(gamma(x/eps) P_eps phi) - <gamma> P_eps phi||. Throws DomainError
/// when the box grid cannot hold gamma(x/eps) P_eps phi without aliasing.
double mean_value_check(const torus::CoefficientCell& gamma, int M, const torus::SpectralField& phi);

/// Fibres G_r(y) = M^{-d} sum_z H(eps (y + z)) exp(-i theta_r . (y + z)) of a
/// scalar box field, theta_r = 2 pi r / M with theta_r in [-pi, pi)^d, on the
/// cell grid with box.cell_points() points. Returned in frequency domain,
/// ordered by r (axis 0 slowest).
struct GelfandFibre {
    Mode r;
    Wavevector theta;
    torus::SpectralField field;
};
std::vector<GelfandFibre> gelfand_fibres(const BoxGrid& box, const torus::SpectralField& h);

enum class TemporalProfile { smooth, rough };

const char* to_string(TemporalProfile profile);
TemporalProfile parse_profile(const std::string& name);

/// Separable source: temporal spectrum times a spatial box field built from
/// modes |q_i| <= spatial_band. seed 0 is the declared source (unit mode
/// q = (1, 0), deterministic spectrum); other seeds draw random amplitudes
/// and phases.
struct SourceSpec {
    TemporalProfile profile = TemporalProfile::smooth;
    int spatial_band = 1;
    double width = 4.0;  // smooth profile: exp(-(k / width)^2)
    double amplitude = 1.0;
    std::uint64_t seed = 0;
};

SpaceTimeField make_source(const BoxGrid& box, const TimeGrid& time, const SourceSpec& spec);

} // namespace homoglab::evolution
