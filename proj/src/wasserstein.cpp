#include "jumpcbo/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "jumpcbo/stochastic.hpp"

namespace cbo {

double wasserstein2_1d(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein2_1d: empty sample");
  std::vector<double> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());

  // Quantile coupling with mass splitting for unequal sample counts.
  const double wa = 1.0 / static_cast<double>(sa.size());
  const double wb = 1.0 / static_cast<double>(sb.size());
  std::size_t i = 0, j = 0;
  double ra = wa, rb = wb, acc = 0.0;
  while (i < sa.size() && j < sb.size()) {
    const double delta = std::min(ra, rb);
    const double gap = sa[i] - sb[j];
    acc += delta * gap * gap;
    ra -= delta;
    rb -= delta;
    if (ra <= 1e-15) { ++i; ra = wa; }
    if (rb <= 1e-15) { ++j; rb = wb; }
  }
  return std::sqrt(acc);
}

double sliced_wasserstein2(std::span<const double> a, std::span<const double> b,
                           int d, int n_directions, std::uint64_t direction_seed) {
  if (d < 1) throw std::invalid_argument("sliced_wasserstein2: d must be >= 1");
  if (n_directions < 1) throw std::invalid_argument("sliced_wasserstein2: need >= 1 direction");
  if (a.size() % d != 0 || b.size() % d != 0)
    throw std::invalid_argument("sliced_wasserstein2: sample size not a multiple of d");
  const std::size_t na = a.size() / static_cast<std::size_t>(d);
  const std::size_t nb = b.size() / static_cast<std::size_t>(d);
  if (na == 0 || nb == 0) throw std::invalid_argument("sliced_wasserstein2: empty sample");

  std::vector<double> dir(static_cast<std::size_t>(d));
  std::vector<double> pa(na), pb(nb);
  double acc = 0.0;
  for (int k = 0; k < n_directions; ++k) {
    RngStream rng(direction_seed, static_cast<std::uint64_t>(k));
    double norm = 0.0;
    do {
      norm = 0.0;
      for (auto& v : dir) {
        v = rng.normal();
        norm += v * v;
      }
    } while (norm == 0.0);
    norm = std::sqrt(norm);
    for (auto& v : dir) v /= norm;

    for (std::size_t i = 0; i < na; ++i) {
      double s = 0.0;
      for (int l = 0; l < d; ++l) s += dir[static_cast<std::size_t>(l)] * a[i * d + static_cast<std::size_t>(l)];
      pa[i] = s;
    }
    for (std::size_t j = 0; j < nb; ++j) {
      double s = 0.0;
      for (int l = 0; l < d; ++l) s += dir[static_cast<std::size_t>(l)] * b[j * d + static_cast<std::size_t>(l)];
      pb[j] = s;
    }
    const double w = wasserstein2_1d(pa, pb);
    acc += w * w;
  }
  return std::sqrt(acc / n_directions);
}

}  // namespace cbo
