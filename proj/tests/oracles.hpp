#pragma once

// Brute-force reference computations over the full ordered-index symmetric
// extension. Deliberately independent of the library's increasing-hyperedge
// shortcuts; only the tensor's at() accessor is shared.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <vector>

#include "hgon/hgon.hpp"

namespace oracle {

using hgon::Count;
using hgon::Vertex;

/// Calls fn(tuple) for every ordered tuple in [0, n)^len.
inline void for_each_ordered(std::size_t n, std::size_t len,
                             const std::function<void(const std::vector<Vertex>&)>& fn) {
  std::vector<Vertex> t(len, 0);
  if (len == 0) {
    fn(t);
    return;
  }
  while (true) {
    fn(t);
    std::size_t i = 0;
    while (i < len && ++t[i] == n) t[i++] = 0;
    if (i == len) return;
  }
}

/// M[j1][j2] = sum over (j3..jm) in [n]^(m-2) of A_{j1 j2 j3 .. jm}.
inline std::vector<Count> collapse(const hgon::AdjacencyTensor& a) {
  const auto n = a.n();
  std::vector<Count> out(n * n, 0);
  for_each_ordered(n, a.m(), [&](const std::vector<Vertex>& j) {
    out[j[0] * n + j[1]] += static_cast<Count>(a.at(j));
  });
  return out;
}

/// E_ia = sum over j2 with z(j2) = a and (j3..jm) in [n]^(m-2) of A_{i j2 .. jm}.
inline std::vector<Count> e_counts(const hgon::AdjacencyTensor& a, const std::vector<std::uint32_t>& z,
                                   std::size_t k) {
  const auto n = a.n();
  std::vector<Count> out(n * k, 0);
  for_each_ordered(n, a.m(), [&](const std::vector<Vertex>& j) {
    out[j[0] * k + z[j[1]]] += static_cast<Count>(a.at(j));
  });
  return out;
}

/// Weighted count over all (m-1)-subsets of an n-element universe holding
/// eta members of community a: a subset with t >= 1 members counts t! times.
inline Count capacity(std::size_t eta, std::size_t n, std::size_t m) {
  Count total = 0;
  const std::size_t len = m - 1;
  if (len > n) return 0;
  std::vector<std::size_t> s(len);
  for (std::size_t i = 0; i < len; ++i) s[i] = i;
  while (true) {
    std::size_t t = 0;
    for (auto v : s) t += v < eta ? 1 : 0;  // universe members [0, eta) are in a
    if (t >= 1) {
      Count f = 1;
      for (std::size_t i = 2; i <= t; ++i) f *= i;
      total += f;
    }
    // next combination (lexicographic)
    std::size_t i = len;
    while (i > 0 && s[i - 1] == n - len + (i - 1)) --i;
    if (i == 0) break;
    ++s[i - 1];
    for (std::size_t j = i; j < len; ++j) s[j] = s[j - 1] + 1;
  }
  return total;
}

/// Loss summed directly over every increasing hyperedge.
inline double loss(const hgon::AdjacencyTensor& a, const std::vector<std::uint32_t>& z,
                   const std::function<double(std::vector<std::uint32_t>)>& q_of_labels) {
  double total = 0.0;
  for_each_ordered(a.n(), a.m(), [&](const std::vector<Vertex>& j) {
    if (!std::is_sorted(j.begin(), j.end()) || std::adjacent_find(j.begin(), j.end()) != j.end()) return;
    std::vector<std::uint32_t> labels;
    for (auto v : j) labels.push_back(z[v]);
    const double d = a.at(j) - q_of_labels(labels);
    total += d * d;
  });
  return total;
}

/// Squared Frobenius distance over every ordered index tuple.
inline double frobenius_sq(const hgon::ProbabilityTensor& p, const hgon::ProbabilityTensor& r) {
  double total = 0.0;
  for_each_ordered(p.n(), p.m(), [&](const std::vector<Vertex>& j) {
    const double d = p.at(j) - r.at(j);
    total += d * d;
  });
  return total;
}

/// Random adjacency tensor with independent edge probability `density`.
inline hgon::AdjacencyTensor random_adjacency(std::size_t n, std::size_t m, double density, hgon::Rng& rng) {
  std::vector<std::uint8_t> flags(hgon::binomial(n, m));
  for (auto& f : flags) f = rng.uniform() < density ? 1 : 0;
  return hgon::AdjacencyTensor::from_flags(n, m, std::move(flags));
}

inline std::vector<std::uint32_t> random_labels(std::size_t n, std::size_t k, hgon::Rng& rng) {
  std::vector<std::uint32_t> z(n);
  for (auto& l : z) l = static_cast<std::uint32_t>(rng.below(k));
  return z;
}

inline std::vector<Vertex> random_permutation(std::size_t n, hgon::Rng& rng) {
  std::vector<Vertex> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<Vertex>(i);
  for (std::size_t i = n; i > 1; --i) std::swap(p[i - 1], p[rng.below(i)]);
  return p;
}

/// Two disjoint complete m-uniform blocks on [0, half) and [half, 2 half).
inline hgon::AdjacencyTensor planted_two_blocks(std::size_t half, std::size_t m = 3) {
  const std::size_t n = 2 * half;
  std::vector<std::uint8_t> flags(hgon::binomial(n, m), 0);
  hgon::for_each_hyperedge(n, m, [&](const hgon::Hyperedge& e, Count r) {
    const bool low = e[m - 1] < half;
    const bool high = e[0] >= half;
    flags[r] = (low || high) ? 1 : 0;
  });
  return hgon::AdjacencyTensor::from_flags(n, m, std::move(flags));
}

inline hgon::ProbabilityTensor as_probability(const hgon::AdjacencyTensor& a) {
  std::vector<double> v(a.slots());
  for (Count r = 0; r < a.slots(); ++r) v[r] = a.present_at_rank(r) ? 1.0 : 0.0;
  return hgon::ProbabilityTensor(a.n(), a.m(), std::move(v));
}

}  // namespace oracle
