#pragma once

// Block-model least-squares estimation of the hyperedge probability tensor.
//
// For a community assignment z: [n] -> [k] and a symmetric block tensor Q over
// multisets of [k], the loss is
//     L(z, Q) = sum over increasing hyperedges j of (A_j - Q_{z(j)})^2.
// For fixed z the minimizing Q is the blockwise mean of A. The assignment is
// improved by alternating updates z(i) = argmax_a E_ia / kappa_a, where E_ia
// counts (ordered) hyperedges through i and a member of community a and kappa_a
// is the matching count of possible hyperedges.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hgon/combinatorics.hpp"
#include "hgon/error.hpp"
#include "hgon/kmeans.hpp"
#include "hgon/rng.hpp"
#include "hgon/tensor.hpp"

namespace hgon {

using Label = std::uint32_t;

/// Map z from vertices [n] to communities [k].
class CommunityAssignment {
 public:
  CommunityAssignment(std::vector<Label> labels, std::size_t k) : labels_(std::move(labels)), k_(k) {
    require(k >= 1, "community count k must be at least 1");
    for (Label l : labels_) require(l < k, "community label out of range");
  }

  std::size_t n() const noexcept { return labels_.size(); }
  std::size_t k() const noexcept { return k_; }
  Label operator[](std::size_t i) const noexcept { return labels_[i]; }
  const std::vector<Label>& labels() const noexcept { return labels_; }

  /// Community sizes |z^{-1}(a)|, summing to n.
  std::vector<Count> block_sizes() const {
    std::vector<Count> eta(k_, 0);
    for (Label l : labels_) ++eta[l];
    return eta;
  }

  friend bool operator==(const CommunityAssignment&, const CommunityAssignment&) = default;

 private:
  std::vector<Label> labels_;
  std::size_t k_;
};

/// Symmetric block tensor Q, one value per multiset of size m over [k].
class BlockProbabilities {
 public:
  BlockProbabilities(std::size_t k, std::size_t m, double fill = 0.0)
      : k_(k), m_(m), values_(multiset_count(k, m), fill) {
    require(k >= 1 && m >= 1 && m <= kMaxOrder, "invalid block tensor shape");
  }

  std::size_t k() const noexcept { return k_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }

  double& operator[](Count multiset) noexcept { return values_[multiset]; }
  double operator[](Count multiset) const noexcept { return values_[multiset]; }

  /// Value at any ordering of a community tuple.
  double at(std::span<const Label> communities) const {
    require(communities.size() == m_, "community tuple arity does not match m");
    std::array<Label, kMaxOrder> buf{};
    std::ranges::copy(communities, buf.begin());
    std::span<Label> s(buf.data(), m_);
    std::ranges::sort(s);
    require(s.back() < k_, "community label out of range");
    return values_[multiset_rank(std::span<const Label>(s))];
  }
  double at(std::initializer_list<Label> communities) const {
    return at(std::span<const Label>(communities.begin(), communities.size()));
  }

 private:
  std::size_t k_;
  std::size_t m_;
  std::vector<double> values_;
};

/// Dense row-major matrix of counts.
class CountMatrix {
 public:
  CountMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), cells_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  Count& operator()(std::size_t i, std::size_t j) noexcept { return cells_[i * cols_ + j]; }
  Count operator()(std::size_t i, std::size_t j) const noexcept { return cells_[i * cols_ + j]; }

  friend bool operator==(const CountMatrix&, const CountMatrix&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<Count> cells_;
};

/// Multiset rank of the community labels of a hyperedge.
inline Count community_multiset(const Hyperedge& e, const CommunityAssignment& z) noexcept {
  std::array<Label, kMaxOrder> buf{};
  const std::size_t m = e.order();
  for (std::size_t i = 0; i < m; ++i) buf[i] = z[e[i]];
  std::sort(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m));
  return multiset_rank(std::span<const Label>(buf.data(), m));
}

/// Number of increasing hyperedges whose community multiset equals each block:
/// prod over communities c of C(eta_c, multiplicity of c in the block).
inline std::vector<Count> block_edge_slots(const CommunityAssignment& z, std::size_t m) {
  const auto eta = z.block_sizes();
  std::vector<Count> slots(multiset_count(z.k(), m));
  std::array<Label, kMaxOrder> a{};
  for (Count r = 0; r < slots.size(); ++r) {
    multiset_unrank(r, std::span<Label>(a.data(), m));
    Count prod = 1;
    for (std::size_t i = 0; i < m;) {
      std::size_t j = i;
      while (j < m && a[j] == a[i]) ++j;
      prod *= binomial(eta[a[i]], j - i);
      i = j;
    }
    slots[r] = prod;
  }
  return slots;
}

/// Present hyperedges of `a` per community multiset.
inline std::vector<Count> block_present_counts(const AdjacencyTensor& a, const CommunityAssignment& z) {
  std::vector<Count> ones(multiset_count(z.k(), a.m()), 0);
  for (const auto& e : a.edges()) ++ones[community_multiset(e, z)];
  return ones;
}

namespace estimator_detail {

inline void check_assignment(const AdjacencyTensor& a, const CommunityAssignment& z) {
  require(z.n() == a.n(), "assignment length does not match n");
}

// sum over slots of (A - q)^2 given ones present among `slots` entries.
inline double block_loss(Count ones, Count slots, double q) noexcept {
  const double zeros = static_cast<double>(slots - ones);
  return static_cast<double>(ones) * (1.0 - q) * (1.0 - q) + zeros * q * q;
}

}  // namespace estimator_detail

/// Q_a = (present hyperedges in block a) / (increasing hyperedges in block a);
/// blocks with no eligible hyperedge get 0.
inline BlockProbabilities blockwise_means(const AdjacencyTensor& a, const CommunityAssignment& z) {
  estimator_detail::check_assignment(a, z);
  const auto ones = block_present_counts(a, z);
  const auto slots = block_edge_slots(z, a.m());
  BlockProbabilities q(z.k(), a.m());
  for (std::size_t r = 0; r < q.size(); ++r) {
    q[r] = slots[r] ? static_cast<double>(ones[r]) / static_cast<double>(slots[r]) : 0.0;
  }
  return q;
}

/// L(z, Q) over increasing hyperedges.
inline double loss(const AdjacencyTensor& a, const CommunityAssignment& z, const BlockProbabilities& q) {
  estimator_detail::check_assignment(a, z);
  require(q.k() == z.k() && q.m() == a.m(), "block tensor shape does not match");
  const auto ones = block_present_counts(a, z);
  const auto slots = block_edge_slots(z, a.m());
  std::vector<double> terms(q.size());
  for (std::size_t r = 0; r < q.size(); ++r) terms[r] = estimator_detail::block_loss(ones[r], slots[r], q[r]);
  // Summed in sorted order so relabeling communities gives the identical value.
  std::ranges::sort(terms);
  return std::accumulate(terms.begin(), terms.end(), 0.0);
}

/// E_ia = sum over j2 in community a and ordered (j3..jm) of A_{i j2 .. jm},
/// i.e. (m-2)! times the number of (present hyperedge through i, other member
/// in a) incidences.
inline CountMatrix e_counts(const AdjacencyTensor& a, const CommunityAssignment& z) {
  estimator_detail::check_assignment(a, z);
  CountMatrix e(a.n(), z.k());
  const Count weight = factorial(a.m() - 2);
  for (const auto& h : a.edges()) {
    for (Vertex i : h) {
      for (Vertex v : h) {
        if (v != i) e(i, z[v]) += weight;
      }
    }
  }
  return e;
}

/// kappa_a = sum_{t=1}^{m-1} t! C(eta_a, t) C(n - eta_a, m - 1 - t).
constexpr Count capacity(Count eta_a, Count n, Count m) noexcept {
  if (eta_a == 0 || eta_a > n || m < 2) return 0;
  Count total = 0;
  for (Count t = 1; t <= m - 1; ++t) {
    total += factorial(t) * binomial(eta_a, t) * binomial(n - eta_a, m - 1 - t);
  }
  return total;
}

/// z(i) = argmax_a E_ia / kappa_a with ties to the smallest a. Communities with
/// kappa_a = 0 are never chosen; a vertex with no eligible community keeps
/// its previous label. Ratios are compared exactly by cross-multiplication.
inline CommunityAssignment update_assignments(const CountMatrix& e, std::span<const Count> eta,
                                              std::size_t n, std::size_t m,
                                              const CommunityAssignment& previous) {
  const std::size_t k = eta.size();
  require(e.rows() == n && e.cols() == k, "E matrix shape does not match (n, k)");
  require(previous.n() == n && previous.k() == k, "previous assignment shape mismatch");
  std::vector<Count> kappa(k);
  for (std::size_t a = 0; a < k; ++a) kappa[a] = capacity(eta[a], n, m);

  std::vector<Label> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::optional<std::size_t> best;
    for (std::size_t a = 0; a < k; ++a) {
      if (kappa[a] == 0) continue;
      if (!best) {
        best = a;
        continue;
      }
      // e(i,a)/kappa[a] > e(i,b)/kappa[b]
      const auto lhs = static_cast<unsigned __int128>(e(i, a)) * kappa[*best];
      const auto rhs = static_cast<unsigned __int128>(e(i, *best)) * kappa[a];
      if (lhs > rhs) best = a;
    }
    next[i] = best ? static_cast<Label>(*best) : previous[i];
  }
  return CommunityAssignment(std::move(next), k);
}

/// Theta_j = Q at the community multiset of j, over increasing hyperedges.
inline ProbabilityTensor theta_from_blocks(const CommunityAssignment& z, const BlockProbabilities& q,
                                           std::size_t m) {
  std::vector<double> values(binomial(z.n(), m));
  for_each_hyperedge(z.n(), m, [&](const Hyperedge& e, Count r) {
    values[r] = q[community_multiset(e, z)];
  });
  return ProbabilityTensor(z.n(), m, std::move(values));
}

inline CommunityAssignment random_assignment(std::size_t n, std::size_t k, std::uint64_t seed) {
  require(k >= 1, "community count k must be at least 1");
  Rng rng(seed);
  std::vector<Label> labels(n);
  for (auto& l : labels) l = static_cast<Label>(rng.below(k));
  return CommunityAssignment(std::move(labels), k);
}

/// Spectral clustering of the collapsed matrix: rows of the k eigenvectors with
/// largest |eigenvalue|, clustered by k-means++ / Lloyd.
inline CommunityAssignment spectral_init(const AdjacencyTensor& a, std::size_t k, std::uint64_t seed) {
  const std::size_t n = a.n();
  require(k >= 1, "community count k must be at least 1");
  require(k <= n, "spectral initialization needs k <= n");
  const auto m = collapse(a);
  Eigen::MatrixXd dense(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) dense(i, j) = static_cast<double>(m(i, j));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  require(solver.info() == Eigen::Success, "eigendecomposition failed");
  const auto& values = solver.eigenvalues();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return std::abs(values(x)) > std::abs(values(y));
  });

  std::vector<double> rows(n * k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t c = 0; c < k; ++c) rows[i * k + c] = solver.eigenvectors()(i, order[c]);
  }
  auto km = kmeans(rows, k, k, seed);
  return CommunityAssignment(std::move(km.labels), k);
}

/// ceil((rho n^m)^(1/(m+2))), clamped to [1, n].
inline std::size_t theoretical_k(std::size_t n, std::size_t m, double rho) {
  require(n >= m, "theoretical_k needs n >= m");
  require(rho > 0.0 && rho <= 1.0, "rho must lie in (0, 1]");
  const double target = rho * std::pow(static_cast<double>(n), static_cast<double>(m));
  const double root = std::pow(target, 1.0 / static_cast<double>(m + 2));
  auto k = static_cast<std::size_t>(std::ceil(root));
  // pow may land a hair above an exact integer root.
  if (k > 1 && std::pow(static_cast<double>(k - 1), static_cast<double>(m + 2)) >= target * (1 - 1e-12)) {
    --k;
  }
  return std::clamp<std::size_t>(k, 1, n);
}

/// round(c * n^(m/(m+2))), clamped to [1, n].
inline std::size_t fraction_k(double c, std::size_t n, std::size_t m) {
  require(c > 0.0, "k fraction must be positive");
  const double scale = std::pow(static_cast<double>(n), static_cast<double>(m) / static_cast<double>(m + 2));
  const auto k = static_cast<std::size_t>(std::llround(c * scale));
  return std::clamp<std::size_t>(k, 1, n);
}

enum class InitKind { kRandom, kSpectral, kGiven };

struct FitOptions {
  std::size_t k = 1;
  InitKind init = InitKind::kSpectral;
  /// Initial labels for InitKind::kGiven.
  std::vector<Label> given;
  std::size_t restarts = 10;
  std::size_t max_iters = 100;
  std::uint64_t seed = 0;
  /// Called after every assignment update with (iteration, current loss).
  std::function<void(std::size_t, double)> progress;

  void validate(std::size_t n) const {
    require(restarts >= 1, "restarts must be at least 1");
    require(max_iters >= 1, "max_iters must be at least 1");
    require(k >= 1 && k <= n, "k must satisfy 1 <= k <= n");
    if (init == InitKind::kGiven) {
      require(given.size() == n, "given initial assignment must have length n");
    }
  }
};

struct FitResult {
  CommunityAssignment z_hat;
  BlockProbabilities q_hat;
  ProbabilityTensor theta_hat;
  double loss = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  std::size_t restart = 0;
};

namespace estimator_detail {

inline CommunityAssignment initial_assignment(const AdjacencyTensor& signal, const FitOptions& opts,
                                              std::size_t restart) {
  const auto seed = derive_seed(opts.seed, Stream::kRestart, restart);
  switch (opts.init) {
    case InitKind::kRandom:
      return random_assignment(signal.n(), opts.k, derive_seed(seed, Stream::kInit));
    case InitKind::kSpectral:
      return spectral_init(signal, opts.k, derive_seed(seed, Stream::kKMeans));
    case InitKind::kGiven:
      break;
  }
  return CommunityAssignment(opts.given, opts.k);
}

struct Trajectory {
  CommunityAssignment z;
  std::size_t iterations;
  bool converged;
};

// Alternate E/kappa assignment updates on `signal` until z is stable.
template <class LossAt>
Trajectory alternate(const AdjacencyTensor& signal, CommunityAssignment z, const FitOptions& opts,
                     LossAt&& loss_at) {
  const std::size_t n = signal.n();
  const std::size_t m = signal.m();
  for (std::size_t it = 1; it <= opts.max_iters; ++it) {
    const auto e = e_counts(signal, z);
    const auto eta = z.block_sizes();
    auto next = update_assignments(e, eta, n, m, z);
    const bool stable = next == z;
    z = std::move(next);
    if (opts.progress) opts.progress(it, loss_at(z));
    if (stable) return {std::move(z), it, true};
  }
  return {std::move(z), opts.max_iters, false};
}

// Shared restart loop. `signal` drives initialization and the z updates;
// q_step maps z to a block tensor and loss_of scores (z, Q).
template <class QStep, class LossOf>
FitResult fit_with(const AdjacencyTensor& signal, const FitOptions& opts, QStep&& q_step,
                   LossOf&& loss_of) {
  opts.validate(signal.n());
  const std::size_t runs = opts.init == InitKind::kGiven ? 1 : opts.restarts;
  std::optional<FitResult> best;
  for (std::size_t r = 0; r < runs; ++r) {
    auto traj = alternate(signal, initial_assignment(signal, opts, r), opts,
                          [&](const CommunityAssignment& z) { return loss_of(z, q_step(z)); });
    auto q = q_step(traj.z);
    const double l = loss_of(traj.z, q);
    if (!best || l < best->loss) {
      auto theta = theta_from_blocks(traj.z, q, signal.m());
      best.emplace(FitResult{std::move(traj.z), std::move(q), std::move(theta), l, traj.iterations,
                             traj.converged, r});
    }
  }
  return std::move(*best);
}

}  // namespace estimator_detail

/// Alternating minimization with restarts; returns the restart with the
/// smallest loss L(z_hat, Q_hat).
inline FitResult fit(const AdjacencyTensor& a, const FitOptions& opts) {
  return estimator_detail::fit_with(
      a, opts, [&](const CommunityAssignment& z) { return blockwise_means(a, z); },
      [&](const CommunityAssignment& z, const BlockProbabilities& q) { return loss(a, z, q); });
}

}  // namespace hgon
