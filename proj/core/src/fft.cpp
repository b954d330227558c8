#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <tuple>
#include <vector>

namespace homoglab::detail {
namespace {

struct PlanKey {
    int dimension;
    int n;
    int sign;
    auto operator<=>(const PlanKey&) const = default;
};

// FFTW planning is not thread-safe; execution through the new-array
// interface is. Plans live for the life of the process.
class PlanCache {
public:
    fftw_plan get(const PlanKey& key) {
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;
        const std::size_t size =
            key.dimension == 1 ? std::size_t(key.n) : std::size_t(key.n) * std::size_t(key.n);
        std::vector<fftw_complex> in(size), out(size);
        int dims[2] = {key.n, key.n};
        fftw_plan plan = fftw_plan_dft(key.dimension, dims, in.data(), out.data(), key.sign,
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans_.emplace(key, plan);
        return plan;
    }

private:
    std::mutex mutex_;
    std::map<PlanKey, fftw_plan> plans_;
};

PlanCache& cache() {
    static PlanCache instance;
    return instance;
}

double parity(const torus::CellGrid& grid, std::size_t flat) {
    const Mode m = grid.mode(flat);
    return ((m[0] + m[1]) % 2 == 0) ? 1.0 : -1.0;
}

void execute(const torus::CellGrid& grid, int sign, const Complex* in, Complex* out) {
    fftw_plan plan = cache().get({grid.dimension(), grid.points_per_axis(), sign});
    // fftw_execute_dft takes non-const input; FFTW does not modify it for out-of-place plans.
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace

void nodes_to_coefficients(const torus::CellGrid& grid, const Complex* in, Complex* out) {
    execute(grid, FFTW_FORWARD, in, out);
    const double scale = 1.0 / static_cast<double>(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) out[i] *= scale * parity(grid, i);
}

void coefficients_to_nodes(const torus::CellGrid& grid, const Complex* in, Complex* out) {
    std::vector<Complex> tmp(in, in + grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) tmp[i] *= parity(grid, i);
    execute(grid, FFTW_BACKWARD, tmp.data(), out);
}

void dft_1d(int n, int sign, const Complex* in, Complex* out) {
    fftw_plan plan = cache().get({1, n, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD});
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(const_cast<Complex*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

} // namespace homoglab::detail
