#pragma once

#include <functional>

namespace vortex {

// Worker cap: VORTEXPACKET_THREADS when set (>= 1), else machine parallelism.
int worker_cap();

// Run f(0..n-1) on up to worker_cap() threads. Jobs must write to disjoint
// state; the first exception is rethrown after all workers join.
void parallel_for(int n, const std::function<void(int)>& f);

}  // namespace vortex
