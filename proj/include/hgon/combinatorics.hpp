#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>

namespace hgon {

using Count = std::uint64_t;

/// Largest hyperedge order supported by the fixed-capacity tuple types.
inline constexpr std::size_t kMaxOrder = 8;

/// Exact binomial coefficient; 0 when k > n.
constexpr Count binomial(Count n, Count k) noexcept {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  Count r = 1;
  for (Count i = 1; i <= k; ++i) {
    // r * (n - k + i) is divisible by i at every step.
    r = r * (n - k + i) / i;
  }
  return r;
}

constexpr Count factorial(Count n) noexcept {
  Count r = 1;
  for (Count i = 2; i <= n; ++i) r *= i;
  return r;
}

/// Colexicographic rank of a strictly increasing tuple: sum_i C(v_i, i+1).
/// The ranks of all increasing m-tuples over [0, n) are exactly [0, C(n, m)).
template <class T>
constexpr Count colex_rank(std::span<const T> increasing) noexcept {
  Count r = 0;
  for (std::size_t i = 0; i < increasing.size(); ++i) {
    r += binomial(static_cast<Count>(increasing[i]), i + 1);
  }
  return r;
}

/// Inverse of colex_rank for m-tuples; writes into out[0..m).
template <class T>
constexpr void colex_unrank(Count rank, std::span<T> out) noexcept {
  for (std::size_t i = out.size(); i-- > 0;) {
    // Largest v with C(v, i+1) <= rank.
    Count v = i;
    while (binomial(v + 1, i + 1) <= rank) ++v;
    out[i] = static_cast<T>(v);
    rank -= binomial(v, i + 1);
  }
}

/// Advance an increasing tuple over [0, n) to its colex successor.
/// Returns false (leaving the tuple unspecified) after the last one.
template <class T>
constexpr bool next_colex(std::span<T> v, std::size_t n) noexcept {
  const std::size_t m = v.size();
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t limit = (i + 1 < m) ? static_cast<std::size_t>(v[i + 1]) : n;
    if (static_cast<std::size_t>(v[i]) + 1 < limit) {
      ++v[i];
      for (std::size_t j = 0; j < i; ++j) v[j] = static_cast<T>(j);
      return true;
    }
  }
  return false;
}

/// Number of multisets of size m over k symbols: C(k + m - 1, m).
constexpr Count multiset_count(Count k, Count m) noexcept {
  return k == 0 ? 0 : binomial(k + m - 1, m);
}

/// Rank of a non-decreasing tuple over [0, k) among all multisets of its size.
/// Uses the bijection a_i -> a_i + i onto increasing tuples over [0, k + m - 1).
template <class T>
constexpr Count multiset_rank(std::span<const T> nondecreasing) noexcept {
  Count r = 0;
  for (std::size_t i = 0; i < nondecreasing.size(); ++i) {
    r += binomial(static_cast<Count>(nondecreasing[i]) + i, i + 1);
  }
  return r;
}

template <class T>
constexpr void multiset_unrank(Count rank, std::span<T> out) noexcept {
  colex_unrank(rank, out);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<T>(out[i] - i);
}

}  // namespace hgon
