#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace cbo {

// Exact 2-Wasserstein distance between two 1-d empirical measures with
// uniform weights (sorted quantile coupling; handles unequal sample counts
// by mass splitting).
double wasserstein2_1d(std::span<const double> a, std::span<const double> b);

// Sliced-W2 estimator for d > 1: root-mean-square of the 1-d distances of
// the projections onto `n_directions` fixed random unit vectors.
double sliced_wasserstein2(std::span<const double> a, std::span<const double> b,
                           int d, int n_directions = 64,
                           std::uint64_t direction_seed = 0x5173cbdf00d1ull);

}  // namespace cbo
