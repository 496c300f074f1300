#pragma once

#include <cstddef>
#include <functional>

namespace universals {

// Worker count used when a call does not pass one. Defaults to
// std::thread::hardware_concurrency(), overridable with UNIVERSALS_THREADS.
unsigned default_threads();
void set_default_threads(unsigned n);

// Runs body(i) for i in [0, n). Each index runs exactly once; callers write
// results into per-index slots so output never depends on scheduling. The
// exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  unsigned threads = 0);

}  // namespace universals
