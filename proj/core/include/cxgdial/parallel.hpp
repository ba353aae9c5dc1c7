#ifndef CXGDIAL_PARALLEL_HPP
#define CXGDIAL_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace cxgdial {

// Worker count: hardware concurrency capped by the CXG_DIALECT_THREADS
// environment variable when set. Always >= 1.
size_t thread_budget();

// Runs fn(i) for i in [0, n). Work items must be independent; results written
// to disjoint slots stay deterministic regardless of the thread count.
void parallel_for(size_t n, const std::function<void(size_t)>& fn);

}  // namespace cxgdial

#endif  // CXGDIAL_PARALLEL_HPP
