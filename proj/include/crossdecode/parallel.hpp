#pragma once

#include <cstddef>
#include <functional>

namespace crossdecode {

/// Upper bound on worker threads for parallel_for. 0 means hardware concurrency.
void set_max_threads(unsigned n);
unsigned max_threads();

/// Runs body(i) for i in [0, n). Each index writes only its own output slot,
/// so results never depend on the schedule. Calls nested inside a running
/// parallel_for execute serially on the calling thread. The first exception
/// thrown by any index is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace crossdecode
