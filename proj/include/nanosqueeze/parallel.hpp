#pragma once

#include <cstddef>
#include <functional>

namespace nanosqueeze {

/// Worker count from NANOSQUEEZE_WORKERS, else hardware concurrency.
unsigned worker_count();

/// Calls body(i) for i in [0, n) on up to worker_count() threads. Rethrows
/// the first exception after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace nanosqueeze
