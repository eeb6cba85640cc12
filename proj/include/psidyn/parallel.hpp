#pragma once

#include <cstddef>
#include <functional>

namespace psidyn {

// Worker threads for per-mode loops. Order of precedence: value set here
// (the CLI's --threads), else the PSIDYN_THREADS environment variable, else
// hardware concurrency. Always at least 1.
int thread_count();
void set_thread_count(int n);

// Split [0, count) into contiguous chunks, one worker per chunk. Each worker
// writes only its own index range, so results never depend on the thread
// count; any cross-mode reduction must run serially afterwards. Exceptions
// from workers are rethrown on the calling thread.
void parallel_for(std::size_t count,
                  const std::function<void(std::size_t, std::size_t)>& body);

} // namespace psidyn
