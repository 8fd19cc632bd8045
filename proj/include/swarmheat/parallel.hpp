#pragma once

#include <cstddef>
#include <functional>

namespace swarmheat {

/// Splits [0, n) into `threads` contiguous ranges and runs body(begin, end) on
/// each, one std::jthread per range. The first exception thrown by any worker is
/// rethrown on the caller. Workers must write to disjoint outputs.
void parallel_for(std::size_t n, unsigned threads,
                  const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace swarmheat
