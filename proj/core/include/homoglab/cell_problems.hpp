#pragma once

// Theta-shifted corrector cell problems and homogenised tensors.

#include <vector>

#include "homoglab/box_grid.hpp"
#include "homoglab/rates.hpp"
#include "homoglab/torus_spectral.hpp"

namespace homoglab::cell {

struct SolverOptions {
    double tolerance = 1e-10;
    int max_iterations = 0;  // 0 means 10 n^d
};

/// Mean-zero solutions N^j of the theta-shifted cell problem
///   -(div + i theta.)(a ((grad + i theta) N^j + e_j)) = 0,
/// one scalar frequency-domain field per direction j.
struct Corrector {
    Wavevector theta{};
    std::vector<torus::SpectralField> components;
    double residual = 0.0;  // largest relative Krylov residual over j
    int iterations = 0;     // summed over j

    const torus::CellGrid& grid() const { return components.front().grid(); }
    int dimension() const { return int(components.size()); }
};

/// a_theta with the convention that column j is the cell mean of
/// a (e_j + (grad + i theta) N^j); real xi gives xi . a_theta xi equal to
/// the quadratic form of the transposed convention.
struct HomogenisedTensor {
    Wavevector theta{};
    Eigen::MatrixXcd value;
};

/// Galerkin solve on the mean-zero trigonometric polynomials of `grid`.
/// Hermitian a uses preconditioned CG, anything else GMRES. Scalar a is read as a I.
Corrector solve_corrector(const torus::CoefficientCell& a, const Wavevector& theta,
                          const torus::CellGrid& grid, const SolverOptions& options = {});

HomogenisedTensor homogenised_tensor(const torus::CoefficientCell& a, const Corrector& corrector);

/// Largest modulus over retained modes of the cell-problem residual, relative
/// to the right-hand side norm, for direction j.
double galerkin_residual(const torus::CoefficientCell& a, const Corrector& corrector, int j);

/// sqrt(sum_m (1 + |2 pi m|^2) |f_m|^2) summed over components (frequency domain).
double h1_norm(const torus::SpectralField& f);
/// H1 distance between two correctors on the same grid, all directions together.
double corrector_distance(const Corrector& lhs, const Corrector& rhs);

struct DeviationTable {
    std::vector<Wavevector> thetas;
    std::vector<double> theta_norms;
    std::vector<double> tensor_deviation;     // operator norm |a_theta - a_0|
    std::vector<double> corrector_deviation;  // ||N_theta - N_0||_{H1}
    rates::SlopeFit tensor_fit;
    rates::SlopeFit corrector_fit;
    double tensor_constant = 0.0;     // max deviation / |theta|
    double corrector_constant = 0.0;
    HomogenisedTensor a0;
};

DeviationTable tensor_theta_deviation(const torus::CoefficientCell& a,
                                      const std::vector<Wavevector>& thetas,
                                      const torus::CellGrid& grid, const SolverOptions& options = {});

struct MultiplierResult {
    std::vector<double> ratios;  // per test field, max over directions j
    double constant = 0.0;       // max of ratios
};

/// int |grad N_0^j(x/eps) phi|^2 / int (|phi|^2 + eps^2 |grad phi|^2) over
/// the box, for frequency-domain fields phi on a box grid with a multiple of
/// M points per axis.
MultiplierResult multiplier_check(const Corrector& corrector0, int M,
                                  const std::vector<torus::SpectralField>& phis);

/// The same ratio for (grad gamma)(x/eps) against int (|phi|^2 + |grad phi|^2).
MultiplierResult gamma_multiplier_check(const torus::CoefficientCell& gamma, int M,
                                        const std::vector<torus::SpectralField>& phis);

} // namespace homoglab::cell
