#pragma once

// Index-parallel map. Each task writes only its own slot, so the result never
// depends on scheduling or thread count.

#include <cstddef>
#include <functional>

namespace qecgrad {

/// 0 means std::thread::hardware_concurrency(), at least 1.
std::size_t resolve_threads(std::size_t requested) noexcept;

/// Calls task(i) for i in [0, count) on up to `threads` workers. The first
/// exception thrown by any task (lowest index) is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& task);

}  // namespace qecgrad
