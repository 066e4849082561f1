#pragma once

#include <cstddef>
#include <functional>

namespace invsq {

// Worker cap for sweeps: INVSQ_NLS_THREADS if set to a positive integer,
// otherwise the hardware concurrency (at least 1).
int sweep_threads();

// Runs body(0..n-1) on up to `threads` workers (0 means sweep_threads()).
// Indices are claimed in order; the first exception is rethrown after all
// workers stop. Results must be written to per-index slots for determinism.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, int threads = 0);

}  // namespace invsq
