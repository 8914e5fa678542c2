#ifndef LRR_COMBINATORICS_HPP
#define LRR_COMBINATORICS_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "lrr/types.hpp"

namespace lrr {

// Binomial coefficient with the convention C(a,b) = 0 whenever a < b
// (in particular for negative a).
inline long long binom0(long long a, long long b) {
  if (b < 0) throw ConfigError("binom0: negative lower index");
  if (a < b) return 0;
  long long r = 1;
  for (long long i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

// Product of componentwise binomials; vanishes unless jp <= j componentwise.
inline long long multi_binom(const MultiIndex& j, const MultiIndex& jp) {
  long long r = 1;
  for (int i = 0; i < j.size(); ++i) r *= binom0(j[i], jp[i]);
  return r;
}

inline int multi_degree(const MultiIndex& j) { return j.sum(); }

// Largest integer strictly less than r.
inline long long strict_floor(double r) {
  long long f = static_cast<long long>(std::floor(r));
  return (static_cast<double>(f) < r) ? f : f - 1;
}

namespace detail {
inline void enumerate_exact(int d, int pos, int rem, MultiIndex& cur,
                            std::vector<MultiIndex>& out) {
  if (pos == d - 1) {
    cur[pos] = rem;
    out.push_back(cur);
    return;
  }
  for (int v = rem; v >= 0; --v) {
    cur[pos] = v;
    enumerate_exact(d, pos + 1, rem - v, cur, out);
  }
}
}  // namespace detail

// All multi-indices in d variables of exact degree deg.
inline std::vector<MultiIndex> multi_indices_exact(int d, int deg) {
  std::vector<MultiIndex> out;
  if (deg < 0) return out;
  MultiIndex cur = MultiIndex::Zero(d);
  detail::enumerate_exact(d, 0, deg, cur, out);
  return out;
}

// All multi-indices of degree <= N ordered by (degree, then as enumerated).
inline std::vector<MultiIndex> multi_indices_up_to(int d, int N) {
  std::vector<MultiIndex> out;
  for (int deg = 0; deg <= N; ++deg) {
    auto layer = multi_indices_exact(d, deg);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

}  // namespace lrr

#endif
