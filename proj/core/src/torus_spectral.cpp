#include "homoglab/torus_spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "fft.hpp"

namespace homoglab::torus {

// ---------------------------------------------------------------- CellGrid

CellGrid::CellGrid(int dimension, int points_per_axis) : dimension_(dimension), n_(points_per_axis) {
    if (dimension != 1 && dimension != 2)
        throw DomainError("CellGrid: dimension must be 1 or 2, got " + std::to_string(dimension));
    if (points_per_axis < 8 || points_per_axis % 2 != 0)
        throw DomainError("CellGrid: points per axis must be even and >= 8, got " +
                          std::to_string(points_per_axis));
    size_ = dimension == 1 ? std::size_t(n_) : std::size_t(n_) * std::size_t(n_);
}

Mode CellGrid::node_index(std::size_t flat) const noexcept {
    if (dimension_ == 1) return {static_cast<int>(flat), 0};
    return {static_cast<int>(flat / n_), static_cast<int>(flat % n_)};
}

Wavevector CellGrid::node(std::size_t flat) const noexcept {
    const Mode i = node_index(flat);
    return {coordinate(i[0]), dimension_ == 1 ? 0.0 : coordinate(i[1])};
}

Mode CellGrid::mode(std::size_t flat) const noexcept {
    const Mode i = node_index(flat);
    auto signed_freq = [this](int k) { return k < n_ / 2 ? k : k - n_; };
    return {signed_freq(i[0]), dimension_ == 1 ? 0 : signed_freq(i[1])};
}

bool CellGrid::contains_mode(const Mode& m) const noexcept {
    auto in_range = [this](int k) { return k >= -n_ / 2 && k < n_ / 2; };
    if (!in_range(m[0])) return false;
    return dimension_ == 1 ? m[1] == 0 : in_range(m[1]);
}

std::size_t CellGrid::index_of_mode(const Mode& m) const {
    if (!contains_mode(m))
        throw DomainError("CellGrid: mode (" + std::to_string(m[0]) + ", " + std::to_string(m[1]) +
                          ") outside the grid");
    auto slot = [this](int k) { return std::size_t(k >= 0 ? k : k + n_); };
    if (dimension_ == 1) return slot(m[0]);
    return slot(m[0]) * std::size_t(n_) + slot(m[1]);
}

Wavevector CellGrid::shifted_wavevector(std::size_t flat, const Wavevector& theta) const noexcept {
    const Mode m = mode(flat);
    Wavevector k{two_pi * m[0] + theta[0], 0.0};
    if (dimension_ == 2) k[1] = two_pi * m[1] + theta[1];
    return k;
}

// ----------------------------------------------------------- SpectralField

SpectralField::SpectralField(CellGrid grid, int components, Domain domain)
    : grid_(grid), components_(components), domain_(domain) {
    if (components < 1) throw DomainError("SpectralField: at least one component required");
    values_.assign(grid_.size() * std::size_t(components), Complex{});
}

std::span<Complex> SpectralField::component(int c) {
    if (c < 0 || c >= components_) throw DomainError("SpectralField: component out of range");
    return std::span<Complex>(values_).subspan(std::size_t(c) * grid_.size(), grid_.size());
}

std::span<const Complex> SpectralField::component(int c) const {
    if (c < 0 || c >= components_) throw DomainError("SpectralField: component out of range");
    return std::span<const Complex>(values_).subspan(std::size_t(c) * grid_.size(), grid_.size());
}

bool SpectralField::compatible(const SpectralField& other) const noexcept {
    return grid_ == other.grid_ && components_ == other.components_ && domain_ == other.domain_;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
    if (!compatible(other)) throw DomainError("SpectralField: incompatible operands");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

SpectralField& SpectralField::operator-=(const SpectralField& other) {
    if (!compatible(other)) throw DomainError("SpectralField: incompatible operands");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

SpectralField& SpectralField::operator*=(Complex s) {
    for (auto& v : values_) v *= s;
    return *this;
}

SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
SpectralField operator*(Complex s, SpectralField a) { return a *= s; }

SpectralField to_frequency(const SpectralField& f) {
    if (f.domain() != Domain::physical)
        throw DomainError("to_frequency: field is already in the frequency domain");
    SpectralField out(f.grid(), f.components(), Domain::frequency);
    for (int c = 0; c < f.components(); ++c)
        detail::nodes_to_coefficients(f.grid(), f.component(c).data(), out.component(c).data());
    return out;
}

SpectralField to_physical(const SpectralField& f) {
    if (f.domain() != Domain::frequency)
        throw DomainError("to_physical: field is already in the physical domain");
    SpectralField out(f.grid(), f.components(), Domain::physical);
    for (int c = 0; c < f.components(); ++c)
        detail::coefficients_to_nodes(f.grid(), f.component(c).data(), out.component(c).data());
    return out;
}

Complex inner(const SpectralField& f, const SpectralField& g) {
    if (!f.compatible(g)) throw DomainError("inner: incompatible fields");
    Complex sum{};
    const auto a = f.values();
    const auto b = g.values();
    for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * std::conj(b[i]);
    if (f.domain() == Domain::physical) sum /= static_cast<double>(f.grid().size());
    return sum;
}

double norm(const SpectralField& f) { return std::sqrt(std::max(0.0, inner(f, f).real())); }

Complex cell_mean(const SpectralField& f, int component) {
    const auto v = f.component(component);
    if (f.domain() == Domain::frequency) return v[0];
    Complex sum{};
    for (const auto& x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

void require_dual_cell(const Wavevector& theta, int dimension) {
    for (int j = 0; j < 2; ++j) {
        if (j >= dimension) {
            if (theta[j] != 0.0) throw DomainError("theta: unused axis must be zero");
            continue;
        }
        if (!(theta[j] >= -pi && theta[j] < pi))
            throw DomainError("theta: component " + std::to_string(theta[j]) +
                              " outside [-pi, pi)");
    }
}

namespace {

template <class Op>
SpectralField in_frequency(const SpectralField& f, Op op) {
    if (f.domain() == Domain::frequency) return op(f);
    return to_physical(op(to_frequency(f)));
}

SpectralField gradient_impl(const SpectralField& f, const Wavevector& theta) {
    const CellGrid& g = f.grid();
    const int d = g.dimension();
    SpectralField out(g, d, Domain::frequency);
    const auto src = f.component(0);
    for (int j = 0; j < d; ++j) {
        auto dst = out.component(j);
        for (std::size_t i = 0; i < g.size(); ++i)
            dst[i] = Complex(0.0, g.shifted_wavevector(i, theta)[j]) * src[i];
    }
    return out;
}

SpectralField divergence_impl(const SpectralField& v, const Wavevector& theta) {
    const CellGrid& g = v.grid();
    const int d = g.dimension();
    SpectralField out(g, 1, Domain::frequency);
    auto dst = out.component(0);
    for (int j = 0; j < d; ++j) {
        const auto src = v.component(j);
        for (std::size_t i = 0; i < g.size(); ++i)
            dst[i] += Complex(0.0, g.shifted_wavevector(i, theta)[j]) * src[i];
    }
    return out;
}

} // namespace

SpectralField shifted_gradient(const SpectralField& f, const Wavevector& theta) {
    require_dual_cell(theta, f.grid().dimension());
    if (f.components() != 1) throw DomainError("shifted_gradient: scalar field required");
    return in_frequency(f, [&](const SpectralField& x) { return gradient_impl(x, theta); });
}

SpectralField shifted_divergence(const SpectralField& v, const Wavevector& theta) {
    require_dual_cell(theta, v.grid().dimension());
    if (v.components() != v.grid().dimension())
        throw DomainError("shifted_divergence: expected a " + std::to_string(v.grid().dimension()) +
                          "-component field, got " + std::to_string(v.components()));
    return in_frequency(v, [&](const SpectralField& x) { return divergence_impl(x, theta); });
}

SpectralField gradient(const SpectralField& f) {
    if (f.components() != 1) throw DomainError("gradient: scalar field required");
    return in_frequency(f, [](const SpectralField& x) { return gradient_impl(x, {0.0, 0.0}); });
}

SpectralField divergence(const SpectralField& v) {
    if (v.components() != v.grid().dimension())
        throw DomainError("divergence: component count must equal the dimension");
    return in_frequency(v, [](const SpectralField& x) { return divergence_impl(x, {0.0, 0.0}); });
}

SpectralField resample(const SpectralField& f, const CellGrid& target) {
    if (f.domain() != Domain::frequency) throw DomainError("resample: frequency domain required");
    if (target.dimension() != f.grid().dimension())
        throw DomainError("resample: dimension mismatch");
    SpectralField out(target, f.components(), Domain::frequency);
    for (int c = 0; c < f.components(); ++c) {
        const auto src = f.component(c);
        auto dst = out.component(c);
        for (std::size_t i = 0; i < target.size(); ++i) {
            const Mode m = target.mode(i);
            if (f.grid().contains_mode(m)) dst[i] = src[f.grid().index_of_mode(m)];
        }
    }
    return out;
}

// --------------------------------------------------------- CoefficientCell

namespace {

Mode negate(const Mode& m) { return {-m[0], -m[1]}; }

} // namespace

CoefficientCell::CoefficientCell(CoefficientKind kind, int dimension,
                                 std::vector<CoefficientTerm> terms, CellGrid sampling_grid)
    : kind_(kind), dimension_(dimension), rows_(kind == CoefficientKind::matrix ? dimension : 1),
      grid_(sampling_grid), hermitian_(true) {
    if (dimension != 1 && dimension != 2)
        throw ConfigError("coefficient: dimension must be 1 or 2");
    if (sampling_grid.dimension() != dimension)
        throw ConfigError("coefficient: sampling grid dimension mismatch");

    std::map<Mode, Eigen::MatrixXcd> merged;
    for (auto& t : terms) {
        if (t.amplitude.rows() != rows_ || t.amplitude.cols() != rows_)
            throw ConfigError("coefficient: amplitude must be " + std::to_string(rows_) + "x" +
                              std::to_string(rows_));
        if (dimension == 1 && t.frequency[1] != 0)
            throw ConfigError("coefficient: frequency has too many entries for d = 1");
        auto [it, fresh] = merged.try_emplace(t.frequency, t.amplitude);
        if (!fresh) it->second += t.amplitude;
    }
    if (merged.find(Mode{0, 0}) == merged.end())
        throw ConfigError("coefficient: constant term (zero frequency) is required");
    for (auto& [k, a] : merged) terms_.push_back({k, a});

    const double scale = std::max(1.0, merged.at(Mode{0, 0}).norm());
    for (const auto& [k, a] : merged) {
        const auto partner = merged.find(negate(k));
        const Eigen::MatrixXcd expected = a.adjoint();
        const double mismatch = partner == merged.end() ? expected.norm()
                                                        : (partner->second - expected).norm();
        if (mismatch > 1e-14 * scale) hermitian_ = false;
    }

    if (2 * max_frequency() >= grid_.points_per_axis())
        throw ConfigError("coefficient: sampling grid with " +
                          std::to_string(grid_.points_per_axis()) +
                          " points per axis under-resolves frequency " +
                          std::to_string(max_frequency()));

    samples_.reserve(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) samples_.push_back(evaluate(grid_.node(i)));
}

CoefficientCell CoefficientCell::constant(CoefficientKind kind, const Eigen::MatrixXcd& value,
                                          CellGrid sampling_grid) {
    return CoefficientCell(kind, sampling_grid.dimension(), {{Mode{0, 0}, value}}, sampling_grid);
}

int CoefficientCell::max_frequency() const noexcept {
    int k = 0;
    for (const auto& t : terms_) k = std::max({k, std::abs(t.frequency[0]), std::abs(t.frequency[1])});
    return k;
}

Eigen::MatrixXcd CoefficientCell::mean() const {
    for (const auto& t : terms_)
        if (t.frequency == Mode{0, 0}) return t.amplitude;
    return Eigen::MatrixXcd::Zero(rows_, rows_);
}

bool CoefficientCell::is_constant() const noexcept {
    for (const auto& t : terms_)
        if (t.frequency != Mode{0, 0} && t.amplitude.norm() != 0.0) return false;
    return true;
}

Eigen::MatrixXcd CoefficientCell::evaluate(const Wavevector& y, int scale) const {
    Eigen::MatrixXcd value = Eigen::MatrixXcd::Zero(rows_, rows_);
    for (const auto& t : terms_) {
        const double phase = two_pi * scale * (t.frequency[0] * y[0] + t.frequency[1] * y[1]);
        value += t.amplitude * std::polar(1.0, phase);
    }
    return value;
}

CoefficientCell CoefficientCell::resampled(const CellGrid& grid) const {
    return CoefficientCell(kind_, dimension_, terms_, grid);
}

CoefficientCell as_matrix(const CoefficientCell& c) {
    if (c.kind() == CoefficientKind::matrix) return c;
    const int d = c.dimension();
    std::vector<CoefficientTerm> terms;
    for (const auto& t : c.terms())
        terms.push_back({t.frequency, t.amplitude(0, 0) * Eigen::MatrixXcd::Identity(d, d)});
    return CoefficientCell(CoefficientKind::matrix, d, std::move(terms), c.sampling_grid());
}

double ellipticity_check(const CoefficientCell& c) {
    double kappa = std::numeric_limits<double>::infinity();
    for (const auto& value : c.samples()) {
        if (c.rows() == 1) {
            kappa = std::min(kappa, value(0, 0).real());
            continue;
        }
        const Eigen::MatrixXd re = value.real();
        const Eigen::MatrixXd sym = 0.5 * (re + re.transpose());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
        kappa = std::min(kappa, eig.eigenvalues().minCoeff());
    }
    if (!(kappa > 1e-10))
        throw NonElliptic("coefficient is not elliptic: min eigenvalue " + std::to_string(kappa),
                          kappa);
    return kappa;
}

// ------------------------------------------------------- CoefficientAction

CoefficientAction::CoefficientAction(const CellGrid& grid, int rows, int cols,
                                     const Sampler& sampler)
    : grid_(grid), padded_(padded_grid(grid)), rows_(rows), cols_(cols) {
    std::vector<Eigen::MatrixXcd> values;
    values.reserve(padded_.size());
    for (std::size_t p = 0; p < padded_.size(); ++p) values.push_back(sampler(padded_.node(p)));
    store(values);
}

CoefficientAction::CoefficientAction(const CellGrid& grid, int rows, int cols,
                                     const std::vector<Eigen::MatrixXcd>& padded_samples)
    : grid_(grid), padded_(padded_grid(grid)), rows_(rows), cols_(cols) {
    store(padded_samples);
}

void CoefficientAction::store(const std::vector<Eigen::MatrixXcd>& values) {
    if (values.size() != padded_.size())
        throw DomainError("CoefficientAction: expected one sample per padded node");
    embed_.resize(grid_.size());
    for (std::size_t i = 0; i < grid_.size(); ++i) embed_[i] = padded_.index_of_mode(grid_.mode(i));
    const std::size_t block = std::size_t(rows_ * cols_);
    samples_.resize(padded_.size() * block);
    for (std::size_t p = 0; p < padded_.size(); ++p) {
        const auto& value = values[p];
        if (value.rows() != rows_ || value.cols() != cols_)
            throw DomainError("CoefficientAction: sample has wrong shape");
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) samples_[p * block + std::size_t(r * cols_ + c)] = value(r, c);
    }
}

namespace {

void require_resolved(const CoefficientCell& c, const CellGrid& grid, int scale) {
    if (grid.dimension() != c.dimension())
        throw DomainError("CoefficientAction: dimension mismatch");
    if (2 * c.max_frequency() * scale >= grid.points_per_axis())
        throw DomainError("CoefficientAction: grid with " + std::to_string(grid.points_per_axis()) +
                          " points per axis under-resolves the coefficient at scale " +
                          std::to_string(scale));
}

} // namespace

CoefficientAction CoefficientAction::multiply(const CoefficientCell& c, const CellGrid& grid,
                                              int scale) {
    require_resolved(c, grid, scale);
    return CoefficientAction(grid, c.rows(), c.rows(),
                             [&](const Wavevector& y) { return c.evaluate(y, scale); });
}

CoefficientAction CoefficientAction::multiply_inverse(const CoefficientCell& c,
                                                      const CellGrid& grid, int scale) {
    require_resolved(c, grid, scale);
    return CoefficientAction(grid, c.rows(), c.rows(), [&](const Wavevector& y) {
        return Eigen::MatrixXcd(c.evaluate(y, scale).inverse());
    });
}

CoefficientAction CoefficientAction::multiply_conjugate(const CoefficientCell& c,
                                                        const CellGrid& grid, int scale) {
    require_resolved(c, grid, scale);
    return CoefficientAction(grid, c.rows(), c.rows(), [&](const Wavevector& y) {
        return Eigen::MatrixXcd(c.evaluate(y, scale).conjugate());
    });
}

SpectralField CoefficientAction::apply(const SpectralField& v) const {
    if (v.domain() != Domain::frequency)
        throw DomainError("CoefficientAction: frequency-domain input required");
    if (!(v.grid() == grid_) || v.components() != cols_)
        throw DomainError("CoefficientAction: input shape mismatch");

    const std::size_t np = padded_.size();
    std::vector<ComplexVector> nodal(std::size_t(cols_), ComplexVector(np, Complex{}));
    ComplexVector padded(np);
    for (int c = 0; c < cols_; ++c) {
        std::fill(padded.begin(), padded.end(), Complex{});
        const auto src = v.component(c);
        for (std::size_t i = 0; i < grid_.size(); ++i) padded[embed_[i]] = src[i];
        detail::coefficients_to_nodes(padded_, padded.data(), nodal[std::size_t(c)].data());
    }

    SpectralField out(grid_, rows_, Domain::frequency);
    ComplexVector product(np), coefficients(np);
    const std::size_t block = std::size_t(rows_ * cols_);
    for (int r = 0; r < rows_; ++r) {
        for (std::size_t p = 0; p < np; ++p) {
            Complex sum{};
            const Complex* row = &samples_[p * block + std::size_t(r * cols_)];
            for (int c = 0; c < cols_; ++c) sum += row[c] * nodal[std::size_t(c)][p];
            product[p] = sum;
        }
        detail::nodes_to_coefficients(padded_, product.data(), coefficients.data());
        auto dst = out.component(r);
        for (std::size_t i = 0; i < grid_.size(); ++i) dst[i] = coefficients[embed_[i]];
    }
    return out;
}

Eigen::MatrixXcd CoefficientAction::mean() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows_, cols_);
    const std::size_t block = std::size_t(rows_ * cols_);
    for (std::size_t p = 0; p < padded_.size(); ++p)
        for (int r = 0; r < rows_; ++r)
            for (int c = 0; c < cols_; ++c) m(r, c) += samples_[p * block + std::size_t(r * cols_ + c)];
    return m / static_cast<double>(padded_.size());
}

} // namespace homoglab::torus
