#pragma once

#include <cstddef>
#include <functional>

namespace sgdphase {

// SGDPHASELAB_THREADS if set and positive, else the hardware concurrency.
std::size_t default_threads();

// Calls body(i) for i in [0, n) on up to `threads` workers (0: default).
// The first exception thrown by a body is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace sgdphase
