#pragma once

#include <cstddef>
#include <functional>

namespace entroscale {

// Worker count: ENTROSCALE_THREADS if set (clamped to [1, 256]), otherwise
// hardware concurrency.
std::size_t resolve_thread_count();

// Runs fn(i) for i in [0, n) across up to `workers` threads with a static
// contiguous partition. Every index is handed out exactly once, so writing
// result[i] from fn(i) and reducing afterwards in index order gives the same
// answer for any worker count.
void parallel_for(std::size_t n, std::size_t workers,
                  const std::function<void(std::size_t)>& fn);

} // namespace entroscale
