#pragma once

#include <cstddef>
#include <functional>

namespace homoglab::parallel {

/// Worker cap: HOMOGLAB_THREADS if set to a positive integer, else the
/// hardware concurrency. set_thread_limit overrides both (0 restores the default).
int thread_limit();
void set_thread_limit(int threads);

/// Runs body(i) for i in [0, count) on up to thread_limit() threads.
/// Callers write results into slot i, so output order never depends on
/// scheduling. The exception of the lowest failing index is rethrown.
void for_each_index(std::size_t count, const std::function<void(std::size_t)>& body);

} // namespace homoglab::parallel
