#include "homoglab/krylov.hpp"

#include <cmath>
#include <vector>

#include "homoglab/errors.hpp"

namespace homoglab::krylov {

double norm2(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

Complex dot(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s{};
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

namespace {

double residual_norm(const LinearMap& A, std::span<const Complex> b, std::span<const Complex> x,
                     ComplexVector& r) {
    A(x, r);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - r[i];
    return norm2(r);
}

} // namespace

Result conjugate_gradient(const LinearMap& A, const LinearMap& preconditioner,
                          std::span<const Complex> b, std::span<Complex> x, const Options& options) {
    const std::size_t n = b.size();
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), Complex{});
        return {0, 0.0};
    }
    ComplexVector r(n), z(n), p(n), Ap(n);
    double rnorm = residual_norm(A, b, x, r);
    if (rnorm <= options.tolerance * bnorm) return {0, rnorm / bnorm};
    preconditioner(r, z);
    p = z;
    Complex rz = dot(r, z);
    for (int it = 1; it <= options.max_iterations; ++it) {
        A(p, Ap);
        const Complex alpha = rz / dot(p, Ap);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * Ap[i];
        }
        rnorm = norm2(r);
        if (rnorm <= options.tolerance * bnorm) {
            // Guard against drift of the recursive residual.
            rnorm = residual_norm(A, b, x, r);
            if (rnorm <= options.tolerance * bnorm) return {it, rnorm / bnorm};
        }
        preconditioner(r, z);
        const Complex rz_next = dot(r, z);
        const Complex beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    }
    throw NoConvergence(options.label + ": conjugate gradients did not converge", options.max_iterations,
                        rnorm / bnorm);
}

Result gmres(const LinearMap& A, const LinearMap& preconditioner, std::span<const Complex> b,
             std::span<Complex> x, const Options& options) {
    const std::size_t n = b.size();
    const double bnorm = norm2(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), Complex{});
        return {0, 0.0};
    }
    const int m = std::max(1, options.restart);
    const auto mu = static_cast<std::size_t>(m);
    std::vector<ComplexVector> V(mu + 1, ComplexVector(n));
    std::vector<ComplexVector> Z(mu, ComplexVector(n));
    std::vector<Complex> H((mu + 1) * mu);
    auto h = [&](int i, int j) -> Complex& { return H[static_cast<std::size_t>(i * m + j)]; };
    std::vector<Complex> cs(mu), sn(mu), g(mu + 1);
    ComplexVector r(n), w(n);

    int total = 0;
    double rnorm = residual_norm(A, b, x, r);
    while (true) {
        if (rnorm <= options.tolerance * bnorm) return {total, rnorm / bnorm};
        if (total >= options.max_iterations) break;
        for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / rnorm;
        std::fill(g.begin(), g.end(), Complex{});
        g[0] = rnorm;
        int k = 0;
        for (; k < m && total < options.max_iterations; ++k, ++total) {
            preconditioner(V[std::size_t(k)], Z[std::size_t(k)]);
            A(Z[std::size_t(k)], w);
            for (int i = 0; i <= k; ++i) {
                h(i, k) = dot(V[std::size_t(i)], w);
                for (std::size_t l = 0; l < n; ++l) w[l] -= h(i, k) * V[std::size_t(i)][l];
            }
            const double wn = norm2(w);
            h(k + 1, k) = wn;
            if (wn > 0.0)
                for (std::size_t l = 0; l < n; ++l) V[std::size_t(k + 1)][l] = w[l] / wn;
            for (int i = 0; i < k; ++i) {
                const Complex t = std::conj(cs[std::size_t(i)]) * h(i, k) + std::conj(sn[std::size_t(i)]) * h(i + 1, k);
                h(i + 1, k) = -sn[std::size_t(i)] * h(i, k) + cs[std::size_t(i)] * h(i + 1, k);
                h(i, k) = t;
            }
            const double denom = std::hypot(std::abs(h(k, k)), wn);
            if (denom == 0.0) {
                cs[std::size_t(k)] = 1.0;
                sn[std::size_t(k)] = 0.0;
            } else {
                cs[std::size_t(k)] = h(k, k) / denom;
                sn[std::size_t(k)] = Complex(wn / denom);
            }
            h(k, k) = denom;
            h(k + 1, k) = 0.0;
            g[std::size_t(k + 1)] = -sn[std::size_t(k)] * g[std::size_t(k)];
            g[std::size_t(k)] = std::conj(cs[std::size_t(k)]) * g[std::size_t(k)];
            if (std::abs(g[std::size_t(k + 1)]) <= 0.5 * options.tolerance * bnorm || wn == 0.0) {
                ++k;
                ++total;
                break;
            }
        }
        std::vector<Complex> y(static_cast<std::size_t>(k));
        for (int i = k - 1; i >= 0; --i) {
            Complex s = g[std::size_t(i)];
            for (int j = i + 1; j < k; ++j) s -= h(i, j) * y[std::size_t(j)];
            y[std::size_t(i)] = s / h(i, i);
        }
        for (int j = 0; j < k; ++j)
            for (std::size_t l = 0; l < n; ++l) x[l] += y[std::size_t(j)] * Z[std::size_t(j)][l];
        rnorm = residual_norm(A, b, x, r);
    }
    throw NoConvergence(options.label + ": GMRES did not converge", total, rnorm / bnorm);
}

} // namespace homoglab::krylov
