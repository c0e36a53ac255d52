#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgon/combinatorics.hpp"
#include "hgon/error.hpp"

namespace hgon {

using Vertex = std::uint32_t;

/// A strictly increasing tuple of m distinct vertex ids.
class Hyperedge {
 public:
  Hyperedge() = default;

  std::size_t order() const noexcept { return size_; }
  std::span<const Vertex> vertices() const noexcept { return {v_.data(), size_}; }
  Vertex operator[](std::size_t i) const noexcept { return v_[i]; }
  const Vertex* begin() const noexcept { return v_.data(); }
  const Vertex* end() const noexcept { return v_.data() + size_; }

  Count rank() const noexcept { return colex_rank(vertices()); }

  bool contains(Vertex x) const noexcept {
    return std::binary_search(begin(), end(), x);
  }

  friend bool operator==(const Hyperedge& a, const Hyperedge& b) noexcept {
    return std::ranges::equal(a.vertices(), b.vertices());
  }
  /// Colexicographic order, consistent with rank().
  friend std::strong_ordering operator<=>(const Hyperedge& a, const Hyperedge& b) noexcept {
    if (a.size_ != b.size_) return a.size_ <=> b.size_;
    for (std::size_t i = a.size_; i-- > 0;) {
      if (a.v_[i] != b.v_[i]) return a.v_[i] <=> b.v_[i];
    }
    return std::strong_ordering::equal;
  }

  /// Build from ids already known to be strictly increasing and in range.
  static Hyperedge from_sorted_unchecked(std::span<const Vertex> ids) noexcept {
    Hyperedge e;
    e.size_ = static_cast<std::uint8_t>(ids.size());
    std::ranges::copy(ids, e.v_.begin());
    return e;
  }

  static Hyperedge from_rank(Count rank, std::size_t m) noexcept {
    Hyperedge e;
    e.size_ = static_cast<std::uint8_t>(m);
    colex_unrank(rank, std::span<Vertex>(e.v_.data(), m));
    return e;
  }

 private:
  std::array<Vertex, kMaxOrder> v_{};
  std::uint8_t size_ = 0;
};

/// Canonicalize an unordered list of vertex ids into a hyperedge over [0, n).
inline Hyperedge make_hyperedge(std::span<const Vertex> ids, std::size_t n) {
  require(ids.size() >= 2, "hyperedge order must be at least 2");
  require(ids.size() <= kMaxOrder, "hyperedge order exceeds " + std::to_string(kMaxOrder));
  std::array<Vertex, kMaxOrder> buf{};
  std::ranges::copy(ids, buf.begin());
  std::span<Vertex> s(buf.data(), ids.size());
  std::ranges::sort(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    require(s[i] < n, "vertex id " + std::to_string(s[i]) + " out of range [0, " +
                          std::to_string(n) + ")");
    if (i > 0) require(s[i] != s[i - 1], "repeated vertex " + std::to_string(s[i]));
  }
  return Hyperedge::from_sorted_unchecked(s);
}

inline Hyperedge make_hyperedge(std::initializer_list<Vertex> ids, std::size_t n) {
  return make_hyperedge(std::span<const Vertex>(ids.begin(), ids.size()), n);
}

/// Visit every increasing m-tuple over [0, n) in colex (rank) order.
/// fn(const Hyperedge&, Count rank).
template <class Fn>
void for_each_hyperedge(std::size_t n, std::size_t m, Fn&& fn) {
  if (m == 0 || m > n || m > kMaxOrder) return;
  std::array<Vertex, kMaxOrder> buf{};
  std::span<Vertex> v(buf.data(), m);
  for (std::size_t i = 0; i < m; ++i) v[i] = static_cast<Vertex>(i);
  Count rank = 0;
  do {
    fn(Hyperedge::from_sorted_unchecked(v), rank++);
  } while (next_colex(v, n));
}

namespace detail {

inline void check_shape(std::size_t n, std::size_t m) {
  require(m >= 2, "uniformity m must be at least 2");
  require(m <= kMaxOrder, "uniformity m exceeds " + std::to_string(kMaxOrder));
  require(n >= m, "vertex count n must be at least m");
}

// Sort ids of an arbitrary index tuple; false if any index repeats.
inline bool canonical(std::span<const Vertex> ids, std::size_t n, Hyperedge& out) {
  std::array<Vertex, kMaxOrder> buf{};
  std::ranges::copy(ids, buf.begin());
  std::span<Vertex> s(buf.data(), ids.size());
  std::ranges::sort(s);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] >= n) throw Rejection("vertex id out of range");
    if (i > 0 && s[i] == s[i - 1]) return false;
  }
  out = Hyperedge::from_sorted_unchecked(s);
  return true;
}

}  // namespace detail

/// Symmetric binary m-uniform tensor, stored as its set of present
/// increasing hyperedges.
class AdjacencyTensor {
 public:
  AdjacencyTensor(std::size_t n, std::size_t m) : n_(n), m_(m) {
    detail::check_shape(n, m);
    present_.assign(binomial(n, m), 0);
  }

  /// Duplicates are collapsed; every edge must have order m and ids < n.
  AdjacencyTensor(std::size_t n, std::size_t m, std::span<const Hyperedge> edges)
      : AdjacencyTensor(n, m) {
    for (const auto& e : edges) {
      require(e.order() == m, "hyperedge order does not match m");
      require(e[m - 1] < n, "hyperedge vertex out of range");
      present_[e.rank()] = 1;
    }
    rebuild_edge_list();
  }

  AdjacencyTensor(std::size_t n, std::size_t m, std::initializer_list<Hyperedge> edges)
      : AdjacencyTensor(n, m, std::span<const Hyperedge>(edges.begin(), edges.size())) {}

  /// Build from one presence flag per increasing hyperedge, indexed by rank.
  static AdjacencyTensor from_flags(std::size_t n, std::size_t m,
                                    std::vector<std::uint8_t> flags) {
    AdjacencyTensor a(n, m);
    require(flags.size() == a.present_.size(), "flag vector size must equal C(n, m)");
    for (auto& f : flags) f = f ? 1 : 0;
    a.present_ = std::move(flags);
    a.rebuild_edge_list();
    return a;
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  /// |H| = C(n, m).
  Count slots() const noexcept { return present_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  /// Present hyperedges in rank order.
  const std::vector<Hyperedge>& edges() const noexcept { return edges_; }

  bool contains(const Hyperedge& e) const noexcept { return present_[e.rank()] != 0; }
  bool present_at_rank(Count r) const noexcept { return present_[r] != 0; }

  /// Entry of the symmetric extension at an arbitrary index tuple.
  int at(std::span<const Vertex> index) const {
    require(index.size() == m_, "index arity does not match m");
    Hyperedge e;
    if (!detail::canonical(index, n_, e)) return 0;
    return contains(e) ? 1 : 0;
  }
  int at(std::initializer_list<Vertex> index) const {
    return at(std::span<const Vertex>(index.begin(), index.size()));
  }

  const std::vector<std::uint8_t>& flags() const noexcept { return present_; }

  friend bool operator==(const AdjacencyTensor& a, const AdjacencyTensor& b) noexcept {
    return a.n_ == b.n_ && a.m_ == b.m_ && a.present_ == b.present_;
  }

 private:
  void rebuild_edge_list() {
    edges_.clear();
    for_each_hyperedge(n_, m_, [&](const Hyperedge& e, Count r) {
      if (present_[r]) edges_.push_back(e);
    });
  }

  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint8_t> present_;
  std::vector<Hyperedge> edges_;
};

/// Symmetric real m-uniform tensor with values in [0, 1], one per increasing
/// hyperedge, indexed by colex rank. Repeated-index entries are zero.
class ProbabilityTensor {
 public:
  ProbabilityTensor(std::size_t n, std::size_t m, double fill = 0.0) : n_(n), m_(m) {
    detail::check_shape(n, m);
    require(fill >= 0.0 && fill <= 1.0, "probability must lie in [0, 1]");
    values_.assign(binomial(n, m), fill);
  }

  ProbabilityTensor(std::size_t n, std::size_t m, std::vector<double> values)
      : n_(n), m_(m), values_(std::move(values)) {
    detail::check_shape(n, m);
    require(values_.size() == binomial(n, m), "value vector size must equal C(n, m)");
    for (double v : values_) {
      require(v >= 0.0 && v <= 1.0, "probability must lie in [0, 1]");
    }
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  Count slots() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  double operator[](const Hyperedge& e) const noexcept { return values_[e.rank()]; }
  double at_rank(Count r) const noexcept { return values_[r]; }

  double at(std::span<const Vertex> index) const {
    require(index.size() == m_, "index arity does not match m");
    Hyperedge e;
    if (!detail::canonical(index, n_, e)) return 0.0;
    return (*this)[e];
  }
  double at(std::initializer_list<Vertex> index) const {
    return at(std::span<const Vertex>(index.begin(), index.size()));
  }

  friend bool operator==(const ProbabilityTensor&, const ProbabilityTensor&) = default;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<double> values_;
};

/// n x n symmetric count matrix with zero diagonal, row-major.
class CollapsedMatrix {
 public:
  explicit CollapsedMatrix(std::size_t n) : n_(n), cells_(n * n, 0) {}

  std::size_t n() const noexcept { return n_; }
  Count operator()(std::size_t i, std::size_t j) const noexcept { return cells_[i * n_ + j]; }
  std::span<const Count> data() const noexcept { return cells_; }

  void add(std::size_t i, std::size_t j, Count w) noexcept { cells_[i * n_ + j] += w; }

 private:

  std::size_t n_;
  std::vector<Count> cells_;
};

/// Sum the symmetric extension over all but the first two indices.
/// Each present hyperedge contributes (m-2)! to every ordered pair of its
/// distinct vertices.
inline CollapsedMatrix collapse(const AdjacencyTensor& a) {
  CollapsedMatrix out(a.n());
  const Count weight = factorial(a.m() - 2);
  for (const auto& e : a.edges()) {
    for (Vertex u : e) {
      for (Vertex v : e) {
        if (u != v) out.add(u, v, weight);
      }
    }
  }
  return out;
}

/// Squared Frobenius distance over the full symmetric extension:
/// m! * sum over increasing hyperedges of (p - r)^2.
/// Terms are summed in sorted order, so the result depends only on the
/// multiset of entry pairs and is exactly invariant under vertex relabeling.
inline double frobenius_sq_diff(const ProbabilityTensor& p, const ProbabilityTensor& r) {
  require(p.n() == r.n() && p.m() == r.m(), "tensor dimension mismatch");
  const auto pv = p.values();
  const auto rv = r.values();
  std::vector<double> terms(pv.size());
  for (std::size_t i = 0; i < pv.size(); ++i) {
    const double d = pv[i] - rv[i];
    terms[i] = d * d;
  }
  std::ranges::sort(terms);
  double acc = 0.0;
  for (double t : terms) acc += t;
  return static_cast<double>(factorial(p.m())) * acc;
}

/// Tensor with vertex i renamed to perm[i].
inline AdjacencyTensor relabel(const AdjacencyTensor& a, std::span<const Vertex> perm) {
  require(perm.size() == a.n(), "permutation size must equal n");
  std::vector<Hyperedge> moved;
  moved.reserve(a.edge_count());
  std::array<Vertex, kMaxOrder> buf{};
  for (const auto& e : a.edges()) {
    for (std::size_t i = 0; i < e.order(); ++i) buf[i] = perm[e[i]];
    moved.push_back(make_hyperedge(std::span<const Vertex>(buf.data(), e.order()), a.n()));
  }
  return AdjacencyTensor(a.n(), a.m(), moved);
}

inline ProbabilityTensor relabel(const ProbabilityTensor& p, std::span<const Vertex> perm) {
  require(perm.size() == p.n(), "permutation size must equal n");
  std::vector<double> out(p.slots(), 0.0);
  std::array<Vertex, kMaxOrder> buf{};
  for_each_hyperedge(p.n(), p.m(), [&](const Hyperedge& e, Count r) {
    for (std::size_t i = 0; i < e.order(); ++i) buf[i] = perm[e[i]];
    out[make_hyperedge(std::span<const Vertex>(buf.data(), e.order()), p.n()).rank()] =
        p.at_rank(r);
  });
  return ProbabilityTensor(p.n(), p.m(), std::move(out));
}

}  // namespace hgon
