#pragma once

// Spectral calculus on the periodic unit cell [-1/2, 1/2)^d, d in {1, 2}.
//
// Fields are stored either as nodal values (physical) or as coefficients of
// the expansion f(y) = sum_m c_m exp(2 pi i m.y) (frequency). The pair is
// unitary between L2 of the cell (node weight n^-d) and l2 of coefficients,
// so the m = 0 coefficient is the cell mean.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "homoglab/errors.hpp"
#include "homoglab/types.hpp"

namespace homoglab::torus {

/// Uniform periodic grid on [-1/2, 1/2)^d with n points per axis (n even, >= 8).
///
/// Node (i0, i1) sits at (-1/2 + i0/n, -1/2 + i1/n); flat index is
/// i0 * n + i1 (axis 0 slowest). Frequencies run over [-n/2, n/2)^d and are
/// stored in FFT order along each axis.
class CellGrid {
public:
    CellGrid(int dimension, int points_per_axis);

    int dimension() const noexcept { return dimension_; }
    int points_per_axis() const noexcept { return n_; }
    std::size_t size() const noexcept { return size_; }

    double coordinate(int i) const noexcept { return -0.5 + static_cast<double>(i) / n_; }
    Wavevector node(std::size_t flat) const noexcept;
    Mode node_index(std::size_t flat) const noexcept;

    /// Signed frequency of the coefficient stored at flat index.
    Mode mode(std::size_t flat) const noexcept;
    /// Flat index of a frequency in [-n/2, n/2)^d; throws DomainError otherwise.
    std::size_t index_of_mode(const Mode& m) const;
    bool contains_mode(const Mode& m) const noexcept;

    /// 2 pi m + theta for the coefficient at flat index.
    Wavevector shifted_wavevector(std::size_t flat, const Wavevector& theta) const noexcept;

    friend bool operator==(const CellGrid&, const CellGrid&) = default;

private:
    int dimension_;
    int n_;
    std::size_t size_;
};

enum class Domain { physical, frequency };

/// Complex multi-component field on a CellGrid.
class SpectralField {
public:
    SpectralField(CellGrid grid, int components, Domain domain);

    const CellGrid& grid() const noexcept { return grid_; }
    int components() const noexcept { return components_; }
    Domain domain() const noexcept { return domain_; }

    std::span<Complex> component(int c);
    std::span<const Complex> component(int c) const;
    std::span<Complex> values() noexcept { return values_; }
    std::span<const Complex> values() const noexcept { return values_; }

    SpectralField& operator+=(const SpectralField& other);
    SpectralField& operator-=(const SpectralField& other);
    SpectralField& operator*=(Complex s);

    /// Same grid, components and domain.
    bool compatible(const SpectralField& other) const noexcept;

private:
    CellGrid grid_;
    int components_;
    Domain domain_;
    ComplexVector values_;
};

SpectralField operator+(SpectralField a, const SpectralField& b);
SpectralField operator-(SpectralField a, const SpectralField& b);
SpectralField operator*(Complex s, SpectralField a);

SpectralField to_frequency(const SpectralField& f);
SpectralField to_physical(const SpectralField& f);

/// L2(cell) inner product <f, g> = int f conj(g); both fields in the same domain.
Complex inner(const SpectralField& f, const SpectralField& g);
double norm(const SpectralField& f);
/// Cell average of one component (either domain).
Complex cell_mean(const SpectralField& f, int component = 0);

/// Throws DomainError unless theta lies in [-pi, pi)^d (unused axes must be 0).
void require_dual_cell(const Wavevector& theta, int dimension);

/// (grad + i theta) f: frequency multiplier i (2 pi m + theta).
/// Output is in the same domain as the input.
SpectralField shifted_gradient(const SpectralField& f, const Wavevector& theta);
/// (div + i theta .) v for a d-component field.
SpectralField shifted_divergence(const SpectralField& v, const Wavevector& theta);

/// Gradient / divergence without the dual-cell range check (box grids use
/// the same calculus with theta = 0).
SpectralField gradient(const SpectralField& f);
SpectralField divergence(const SpectralField& v);

/// Zero-pad (or truncate) a frequency-domain field onto another grid of the same dimension.
SpectralField resample(const SpectralField& f, const CellGrid& target);

enum class CoefficientKind { matrix, scalar };

struct CoefficientTerm {
    Mode frequency;
    Eigen::MatrixXcd amplitude;
};

/// Periodic coefficient given as a trigonometric polynomial
/// c(y) = sum_k A_k exp(2 pi i k.y), sampled on a grid.
class CoefficientCell {
public:
    CoefficientCell(CoefficientKind kind, int dimension, std::vector<CoefficientTerm> terms,
                    CellGrid sampling_grid);

    static CoefficientCell constant(CoefficientKind kind, const Eigen::MatrixXcd& value,
                                    CellGrid sampling_grid);

    CoefficientKind kind() const noexcept { return kind_; }
    int dimension() const noexcept { return dimension_; }
    /// Rows (and columns) of the pointwise value: d for matrix kind, 1 for scalar.
    int rows() const noexcept { return rows_; }
    const std::vector<CoefficientTerm>& terms() const noexcept { return terms_; }
    const CellGrid& sampling_grid() const noexcept { return grid_; }

    /// Largest |k_i| over terms and axes.
    int max_frequency() const noexcept;
    /// Constant Fourier term (the cell mean).
    Eigen::MatrixXcd mean() const;
    /// True when A_{-k} = A_k^* for every term, i.e. c(y) is Hermitian everywhere.
    bool hermitian() const noexcept { return hermitian_; }
    bool is_constant() const noexcept;

    /// Direct evaluation at a point, optionally at scale * y (for c(x / eps), scale = 1/eps).
    Eigen::MatrixXcd evaluate(const Wavevector& y, int scale = 1) const;
    /// Cached samples at the nodes of the sampling grid.
    const std::vector<Eigen::MatrixXcd>& samples() const noexcept { return samples_; }

    /// Same polynomial sampled on another grid.
    CoefficientCell resampled(const CellGrid& grid) const;

private:
    CoefficientKind kind_;
    int dimension_;
    int rows_;
    std::vector<CoefficientTerm> terms_;
    CellGrid grid_;
    bool hermitian_;
    std::vector<Eigen::MatrixXcd> samples_;
};

/// Matrix-kind view of a coefficient: scalar c becomes c I (matrix kind is returned unchanged).
CoefficientCell as_matrix(const CoefficientCell& c);

/// Smallest eigenvalue of the symmetric part of Re c(y) over the sampling
/// nodes (Re c(y) for scalar kind). Throws NonElliptic if it is <= 1e-10.
double ellipticity_check(const CoefficientCell& c);

/// Galerkin action of a pointwise matrix multiplier on frequency-domain fields.
///
/// Values are sampled on a grid with twice the points per axis; the field is
/// zero-padded onto it, multiplied node by node and truncated back. For a
/// trigonometric-polynomial multiplier of degree below n this is the exact
/// L2 projection of the product onto the retained modes.
class CoefficientAction {
public:
    using Sampler = std::function<Eigen::MatrixXcd(const Wavevector&)>;

    CoefficientAction(const CellGrid& grid, int rows, int cols, const Sampler& sampler);
    /// Values given directly at the nodes of padded_grid(grid), node-major.
    CoefficientAction(const CellGrid& grid, int rows, int cols,
                      const std::vector<Eigen::MatrixXcd>& padded_samples);

    /// Grid with twice the points per axis on which products are formed.
    static CellGrid padded_grid(const CellGrid& grid) {
        return CellGrid(grid.dimension(), 2 * grid.points_per_axis());
    }

    /// y -> c(scale * y).
    static CoefficientAction multiply(const CoefficientCell& c, const CellGrid& grid, int scale = 1);
    /// y -> c(scale * y)^{-1}.
    static CoefficientAction multiply_inverse(const CoefficientCell& c, const CellGrid& grid,
                                              int scale = 1);
    /// y -> conj(c(scale * y)) (entrywise).
    static CoefficientAction multiply_conjugate(const CoefficientCell& c, const CellGrid& grid,
                                                int scale = 1);

    const CellGrid& grid() const noexcept { return grid_; }
    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    /// v has cols() components in frequency domain; result has rows().
    SpectralField apply(const SpectralField& v) const;
    /// Average of the sampled values.
    Eigen::MatrixXcd mean() const;

private:
    void store(const std::vector<Eigen::MatrixXcd>& values);

    CellGrid grid_;
    CellGrid padded_;
    int rows_;
    int cols_;
    std::vector<std::size_t> embed_;  // grid coefficient index -> padded index
    ComplexVector samples_;           // node-major, rows x cols row-major per node
};

} // namespace homoglab::torus
