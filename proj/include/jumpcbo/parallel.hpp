#pragma once

#include <functional>

namespace cbo {

// Runs fn(0..n-1) on up to `workers` threads. Work items must be
// independent; callers store results by index so the fold is deterministic
// regardless of scheduling.
void parallel_for(int n, int workers, const std::function<void(int)>& fn);

int default_workers();

}  // namespace cbo
