#pragma once

#include <cstddef>
#include <functional>

namespace eqs {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, count), split into contiguous blocks across
/// threads. body must only write to disjoint locations. The first exception
/// thrown by any block is rethrown after all threads join.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace eqs
