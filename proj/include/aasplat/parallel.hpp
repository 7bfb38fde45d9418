#pragma once

#include <cstddef>
#include <functional>

namespace aasplat {

/// Runs fn(i) for i in [0, n) on up to `threads` workers (0 = hardware
/// concurrency). Work items are claimed dynamically; fn must only touch
/// state owned by its index. The first exception thrown is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

/// Hardware concurrency capped by the AASPLAT_THREADS environment variable.
int default_thread_count();

}  // namespace aasplat
