#pragma once

#include <cstddef>
#include <functional>

namespace satgibbs {

// Worker cap for parallel loops. Defaults to SATGIBBS_THREADS, else the hardware concurrency.
void set_thread_limit(unsigned n);
unsigned thread_limit();

// Runs body(k) for k in [0, n). Each index runs exactly once; results must be written to
// per-index slots so the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace satgibbs
