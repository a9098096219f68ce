#pragma once

#include <cstddef>
#include <functional>

namespace twosided {

/// Worker cap: TWOSIDED_THREADS if set and positive, else hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Work is handed out by index, so results written to per-index slots are
/// independent of the number of workers. The first exception is rethrown.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace twosided
