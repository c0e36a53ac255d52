#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <numeric>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "hgon/estimator.hpp"
#include "hgon/rng.hpp"
#include "hgon/tensor.hpp"
#include "hgon/tensor_io.hpp"

namespace hgon {

/// Set of observed increasing hyperedges (Omega), stored as flags by rank.
class ObservationMask {
 public:
  ObservationMask(std::size_t n, std::size_t m, std::vector<std::uint8_t> flags)
      : n_(n), m_(m), flags_(std::move(flags)) {
    require(flags_.size() == binomial(n, m), "mask size must equal C(n, m)");
    for (auto& f : flags_) f = f ? 1 : 0;
    count_ = static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), 1));
  }

  static ObservationMask full(std::size_t n, std::size_t m) {
    return ObservationMask(n, m, std::vector<std::uint8_t>(binomial(n, m), 1));
  }

  std::size_t n() const noexcept { return n_; }
  std::size_t m() const noexcept { return m_; }
  std::size_t observed_count() const noexcept { return count_; }
  Count slots() const noexcept { return flags_.size(); }
  bool observed(Count rank) const noexcept { return flags_[rank] != 0; }
  bool observed(const Hyperedge& e) const noexcept { return observed(e.rank()); }
  bool is_full() const noexcept { return count_ == flags_.size(); }

  friend bool operator==(const ObservationMask&, const ObservationMask&) = default;

 private:
  std::size_t n_;
  std::size_t m_;
  std::vector<std::uint8_t> flags_;
  std::size_t count_ = 0;
};

/// floor(fraction * C(n, m)) hyperedges drawn uniformly without replacement.
inline ObservationMask sample_mask(std::size_t n, std::size_t m, double fraction, std::uint64_t seed) {
  require(fraction > 0.0 && fraction <= 1.0, "observation fraction must lie in (0, 1]");
  const Count total = binomial(n, m);
  const auto want = static_cast<Count>(std::floor(fraction * static_cast<double>(total) + 1e-9));
  require(want >= 1, "observation fraction yields no observed hyperedges");
  std::vector<Count> ranks(total);
  std::iota(ranks.begin(), ranks.end(), Count{0});
  Rng rng(derive_seed(seed, Stream::kMask));
  for (Count i = 0; i < want; ++i) {
    std::swap(ranks[i], ranks[i + rng.below(total - i)]);
  }
  std::vector<std::uint8_t> flags(total, 0);
  for (Count i = 0; i < want; ++i) flags[ranks[i]] = 1;
  return ObservationMask(n, m, std::move(flags));
}

/// Present hyperedges of `a` that fall inside the mask.
inline AdjacencyTensor observed_part(const AdjacencyTensor& a, const ObservationMask& omega) {
  require(a.n() == omega.n() && a.m() == omega.m(), "mask shape does not match tensor");
  std::vector<Hyperedge> kept;
  for (const auto& e : a.edges()) {
    if (omega.observed(e)) kept.push_back(e);
  }
  return AdjacencyTensor(a.n(), a.m(), kept);
}

namespace prediction_detail {

inline double missing_scale(std::size_t n, std::size_t m, std::size_t observed) {
  return std::pow(static_cast<double>(n), static_cast<double>(m)) /
         (static_cast<double>(factorial(m)) * static_cast<double>(observed));
}

}  // namespace prediction_detail

/// Blockwise stationary point of
///   ||Theta||_F^2 - (2 n^m / |Omega|) sum_{j in Omega} A_j Theta_j
/// over Theta in the block model for z, clipped to [0, 1].
inline BlockProbabilities missing_blockwise_q(const AdjacencyTensor& a, const ObservationMask& omega,
                                              const CommunityAssignment& z) {
  require(omega.observed_count() >= 1, "observation set is empty");
  require(z.n() == a.n(), "assignment length does not match n");
  const auto ones = block_present_counts(observed_part(a, omega), z);
  const auto slots = block_edge_slots(z, a.m());
  const double scale = prediction_detail::missing_scale(a.n(), a.m(), omega.observed_count());
  BlockProbabilities q(z.k(), a.m());
  for (std::size_t r = 0; r < q.size(); ++r) {
    if (slots[r] == 0) continue;
    const double raw = scale * static_cast<double>(ones[r]) / static_cast<double>(slots[r]);
    q[r] = std::clamp(raw, 0.0, 1.0);
  }
  return q;
}

/// The missing-entry objective evaluated at the block tensor Q, with the
/// Frobenius norm taken over the full symmetric extension.
inline double missing_objective(const AdjacencyTensor& a, const ObservationMask& omega,
                                const CommunityAssignment& z, const BlockProbabilities& q) {
  require(omega.observed_count() >= 1, "observation set is empty");
  const auto ones = block_present_counts(observed_part(a, omega), z);
  const auto slots = block_edge_slots(z, a.m());
  const double mfact = static_cast<double>(factorial(a.m()));
  const double scale = prediction_detail::missing_scale(a.n(), a.m(), omega.observed_count());
  double total = 0.0;
  for (std::size_t r = 0; r < q.size(); ++r) {
    total += mfact * (static_cast<double>(slots[r]) * q[r] * q[r] -
                      2.0 * scale * static_cast<double>(ones[r]) * q[r]);
  }
  return total;
}

/// Squared residuals of A against Q over observed hyperedges only.
inline double masked_loss(const AdjacencyTensor& a, const ObservationMask& omega,
                          const CommunityAssignment& z, const BlockProbabilities& q) {
  double total = 0.0;
  for_each_hyperedge(a.n(), a.m(), [&](const Hyperedge& e, Count r) {
    if (!omega.observed(r)) return;
    const double d = (a.present_at_rank(r) ? 1.0 : 0.0) - q[community_multiset(e, z)];
    total += d * d;
  });
  return total;
}

/// Alternating minimization on the observed entries: E counts only observed
/// present hyperedges, capacities are unchanged, and Q comes from
/// missing_blockwise_q. The reported loss is over Omega.
inline FitResult fit_missing(const AdjacencyTensor& a, const ObservationMask& omega,
                             const FitOptions& opts) {
  require(a.n() == omega.n() && a.m() == omega.m(), "mask shape does not match tensor");
  require(omega.observed_count() >= 1, "observation set is empty");
  const auto signal = observed_part(a, omega);
  return estimator_detail::fit_with(
      signal, opts, [&](const CommunityAssignment& z) { return missing_blockwise_q(a, omega, z); },
      [&](const CommunityAssignment& z, const BlockProbabilities& q) {
        return masked_loss(a, omega, z, q);
      });
}

struct PredictionResult {
  std::vector<Hyperedge> hyperedges;  // unobserved, rank order
  std::vector<double> scores;
  std::vector<std::uint8_t> labels;   // 1 iff score > 0.5
};

inline PredictionResult predict(const ProbabilityTensor& theta_hat, const ObservationMask& omega) {
  require(theta_hat.n() == omega.n() && theta_hat.m() == omega.m(),
          "mask shape does not match tensor");
  PredictionResult out;
  for_each_hyperedge(theta_hat.n(), theta_hat.m(), [&](const Hyperedge& e, Count r) {
    if (omega.observed(r)) return;
    const double s = theta_hat.at_rank(r);
    out.hyperedges.push_back(e);
    out.scores.push_back(s);
    out.labels.push_back(s > 0.5 ? 1 : 0);
  });
  return out;
}

/// Mann-Whitney AUC: P(score_pos > score_neg) + P(equal) / 2 over all
/// positive-negative pairs, computed from midranks.
inline double auc(std::span<const double> scores, std::span<const std::uint8_t> truth) {
  require(scores.size() == truth.size(), "scores and truth lengths differ");
  std::size_t pos = 0;
  for (auto t : truth) pos += t ? 1 : 0;
  const std::size_t neg = truth.size() - pos;
  require(pos > 0 && neg > 0, "degenerate labels: AUC needs both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return scores[x] < scores[y]; });
  // Sum of doubled midranks of positives keeps everything integral.
  unsigned __int128 twice_rank_sum = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    std::size_t pos_in_tie = 0;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) {
      pos_in_tie += truth[order[j]] ? 1 : 0;
      ++j;
    }
    // ranks i+1 .. j share midrank (i + 1 + j) / 2
    twice_rank_sum += static_cast<unsigned __int128>(pos_in_tie) * (i + 1 + j);
    i = j;
  }
  const auto twice_u = twice_rank_sum - static_cast<unsigned __int128>(pos) * (pos + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
}

struct LabeledHypergraph {
  AdjacencyTensor adjacency;
  ObservationMask observed;
};

/// Hyperedge list with optional unobserved markers:
///   n m
///   v1 .. vm        present, observed
///   v1 .. vm ?      unobserved
/// Hyperedges not listed are observed and absent.
inline LabeledHypergraph read_hyperedge_list(std::istream& in) {
  std::size_t n = 0, m = 0;
  io_detail::read_header(in, n, m);
  detail::check_shape(n, m);
  std::vector<Hyperedge> present;
  std::vector<std::uint8_t> flags(binomial(n, m), 1);
  std::vector<Vertex> ids(m);
  std::string line;
  while (io_detail::next_content_line(in, line)) {
    std::istringstream ls(line);
    for (auto& v : ids) require(static_cast<bool>(ls >> v), "malformed hyperedge line: " + line);
    const auto e = make_hyperedge(ids, n);
    std::string marker;
    if (ls >> marker) {
      require(marker == "?", "unexpected token '" + marker + "' on line: " + line);
      flags[e.rank()] = 0;
    } else {
      present.push_back(e);
    }
  }
  return {AdjacencyTensor(n, m, present), ObservationMask(n, m, std::move(flags))};
}

/// CSV with header "hyperedge,score,label"; hyperedge ids space-separated.
inline void write_predictions_csv(std::ostream& out, const PredictionResult& p) {
  out << "hyperedge,score,label\n";
  for (std::size_t i = 0; i < p.hyperedges.size(); ++i) {
    const auto& e = p.hyperedges[i];
    for (std::size_t j = 0; j < e.order(); ++j) out << (j ? " " : "") << e[j];
    out << ',' << io_detail::format_real(p.scores[i]) << ',' << int(p.labels[i]) << '\n';
  }
}

}  // namespace hgon
