#ifndef KICKHO_PARALLEL_HPP
#define KICKHO_PARALLEL_HPP

#include <cstddef>
#include <functional>

namespace kickho {

/// Hardware concurrency, never zero.
unsigned default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers. Work items are
/// claimed dynamically; callers write results into pre-sized slots so output
/// order never depends on scheduling. The first exception is rethrown after
/// all workers have stopped.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace kickho

#endif
