#pragma once

#include <functional>

#include "srecop/types.hpp"

namespace srecop {

/// Runs fn(i) for i in [0, n) over a static partition across `workers`
/// threads. Results must not depend on the partition: callers attach
/// per-index RNG streams, so output is identical for any worker count.
void parallel_for(Index n, int workers, const std::function<void(Index)>& fn);

}  // namespace srecop
