#pragma once

#include <cstddef>
#include <functional>

namespace bevrisk {

/// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
/// claimed dynamically; the first exception thrown by any body is rethrown
/// after all workers join.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& body);

}  // namespace bevrisk
