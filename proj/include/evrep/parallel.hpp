#pragma once

#include <cstddef>
#include <functional>

namespace evrep {

/// Worker count used by internal parallel loops. Reads EVREP_THREADS
/// (0 or unset = hardware concurrency) unless overridden.
unsigned thread_count();

/// Overrides EVREP_THREADS for this process; 0 restores the environment default.
void set_thread_count(unsigned n);

/// Runs body(i) for i in [begin, end) split into contiguous chunks, one per
/// worker. Each index is visited exactly once; callers write only to slots
/// owned by i, so results do not depend on the worker count.
void parallel_for(std::size_t begin, std::size_t end, const std::function<void(std::size_t)>& body);

}  // namespace evrep
