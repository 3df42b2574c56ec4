#pragma once

#include <cstddef>
#include <functional>

namespace mcsle {

/// Worker count used when a call does not specify one. Initialised from the
/// MCSLE_THREADS environment variable, falling back to hardware concurrency.
std::size_t default_threads();
void set_default_threads(std::size_t threads);

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Items are handed out in fixed-size chunks; body must only write to
/// per-item storage so that results do not depend on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace mcsle
