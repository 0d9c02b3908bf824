#pragma once

#include <cstddef>
#include <functional>

namespace rocket {

// Worker count: explicit request > ROCKET_THREADS env var > hardware
// concurrency. `requested` = 0 means "not specified".
std::size_t resolve_thread_count(std::size_t requested);

// Runs fn(i) for i in [0, count) across `threads` workers. Indices are
// handed out in fixed contiguous blocks, so any fn that writes only to
// slot i produces the same result for every thread count. Exceptions from
// workers are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace rocket
