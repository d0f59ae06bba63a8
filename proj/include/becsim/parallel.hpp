#pragma once

#include <cstddef>
#include <functional>

namespace becsim {

// 0 -> hardware concurrency (at least 1).
int resolve_threads(int requested);

// Runs fn(i) for i in [0, n) on up to `threads` workers. Items are handed
// out through an atomic counter; every item must write only to its own
// output slot, so results are identical for any worker count. Exceptions
// from workers are rethrown on the calling thread.
void parallel_for(std::size_t n, int threads,
                  const std::function<void(std::size_t)>& fn);

}  // namespace becsim
