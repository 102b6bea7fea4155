#pragma once

#include <cstddef>
#include <functional>

namespace casvm {

// Thread count for data-parallel loops: CASVM_THREADS when set, otherwise the
// hardware concurrency.
std::size_t worker_count();

// Runs fn(i) for i in [0, n), statically chunked across workers.  Each index
// must write only its own output slot; the caller then reduces in index order,
// which keeps parallel results identical to serial ones.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace casvm
