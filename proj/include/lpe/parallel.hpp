#pragma once

#include <cstddef>
#include <functional>

namespace lpe {

/// Worker count: LPE_THREADS if set and positive, else the hardware concurrency.
unsigned thread_count();

/// Runs fn(i) for i in [0, count) on up to thread_count() threads. Callers write results
/// into slot i so that aggregation order never depends on scheduling. The first exception
/// (lowest index) is rethrown after all workers finish.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace lpe
