#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <type_traits>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hgon/error.hpp"
#include "hgon/rng.hpp"
#include "hgon/tensor.hpp"

namespace hgon {

inline double eval_case1(double u, double v, double w) noexcept { return u * v * w; }

inline double eval_case2(double u, double v, double w, double c1, double c2, double c3) noexcept {
  return 1.0 / (1.0 + std::exp(-(c1 * u * u + c2 * v * v + c3 * w * w)));
}

/// Simple hypergraphon: a symmetric function of the m node coordinates only.
class SlhModel {
 public:
  enum class Kind { kCase1, kCase2, kConstant, kCustom };
  using Function = std::function<double(std::span<const double>)>;

  static SlhModel case1() {
    return SlhModel(Kind::kCase1, 3, "case1", [](std::span<const double> x) {
      return eval_case1(x[0], x[1], x[2]);
    });
  }

  /// With unequal coefficients, c1 weighs the smallest coordinate.
  static SlhModel case2(double c1, double c2, double c3) {
    SlhModel s(Kind::kCase2, 3, "case2", [c1, c2, c3](std::span<const double> x) {
      return eval_case2(x[0], x[1], x[2], c1, c2, c3);
    });
    s.params_ = {c1, c2, c3};
    return s;
  }

  static SlhModel constant(double c, std::size_t m = 3) {
    require(c >= 0.0 && c <= 1.0, "constant hypergraphon value must lie in [0, 1]");
    SlhModel s(Kind::kConstant, m, "constant", [c](std::span<const double>) { return c; });
    s.params_ = {c};
    return s;
  }

  static SlhModel custom(std::size_t m, Function f, std::string name = "custom") {
    require(m >= 2 && m <= kMaxOrder, "model order out of range");
    return SlhModel(Kind::kCustom, m, std::move(name), std::move(f));
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t order() const noexcept { return m_; }
  const std::string& label() const noexcept { return label_; }
  const std::vector<double>& params() const noexcept { return params_; }

  /// Evaluates at the coordinates in ascending order, so the result is
  /// exactly invariant under permutation of the arguments.
  double operator()(std::span<const double> x) const {
    require(x.size() == m_, "coordinate count does not match the model order");
    std::array<double, kMaxOrder> sorted{};
    std::ranges::copy(x, sorted.begin());
    std::sort(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(m_));
    return f_(std::span<const double>(sorted.data(), m_));
  }

 private:
  SlhModel(Kind kind, std::size_t m, std::string label, Function f)
      : kind_(kind), m_(m), label_(std::move(label)), f_(std::move(f)) {}

  Kind kind_;
  std::size_t m_;
  std::string label_;
  std::vector<double> params_;
  Function f_;
};

/// Piecewise-constant 3-uniform hypergraphon on [0,1]^6: latent pair edges
/// appear with probability p1 inside a community and q1 across; a hyperedge
/// has probability p2 when all three latent edges are present and q2 otherwise.
struct FullHypergraphon3 {
  double p1 = 0.0;
  double q1 = 0.0;
  double p2 = 0.0;
  double q2 = 0.0;
  std::size_t k_comm = 1;

  void validate() const {
    for (double p : {p1, q1, p2, q2}) {
      require(p >= 0.0 && p <= 1.0, "full hypergraphon probabilities must lie in [0, 1]");
    }
    require(k_comm >= 1, "k_comm must be at least 1");
  }
};

/// Community bucket of a node coordinate: i with x in [i/k, (i+1)/k), 0-based;
/// x = 1 falls in the last bucket.
inline std::size_t bucket_of(double x, std::size_t k) noexcept {
  const auto b = static_cast<std::size_t>(x * static_cast<double>(k));
  return std::min(b, k - 1);
}

inline double eval_full(const FullHypergraphon3& h, double x1, double x2, double x3,
                        double x12, double x13, double x23) {
  for (double x : {x1, x2, x3, x12, x13, x23}) {
    require(x >= 0.0 && x <= 1.0, "hypergraphon coordinates must lie in [0, 1]");
  }
  const auto b1 = bucket_of(x1, h.k_comm);
  const auto b2 = bucket_of(x2, h.k_comm);
  const auto b3 = bucket_of(x3, h.k_comm);
  // Thresholds for (x12, x13, x23): p1 on same-community pairs, q1 otherwise.
  const double t12 = b1 == b2 ? h.p1 : h.q1;
  const double t13 = b1 == b3 ? h.p1 : h.q1;
  const double t23 = b2 == b3 ? h.p1 : h.q1;
  const bool all_edges = x12 < t12 && x13 < t13 && x23 < t23;
  return all_edges ? h.p2 : h.q2;
}

using HypergraphonModel = std::variant<SlhModel, FullHypergraphon3>;

inline std::size_t model_order(const HypergraphonModel& model) {
  return std::visit(
      [](const auto& f) -> std::size_t {
        if constexpr (std::is_same_v<std::decay_t<decltype(f)>, SlhModel>) {
          return f.order();
        } else {
          return 3;
        }
      },
      model);
}

struct SampleResult {
  std::vector<double> node_latents;
  /// Indexed by colex rank of the vertex pair; empty for simple hypergraphons.
  std::vector<double> pair_latents;
  ProbabilityTensor theta;
  AdjacencyTensor adjacency;
};

namespace sample_detail {

inline std::vector<double> uniforms(std::uint64_t seed, Stream purpose, std::size_t count) {
  const auto key = derive_seed(seed, purpose);
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) out[i] = counter_uniform(key, i);
  return out;
}

inline AdjacencyTensor bernoulli(const ProbabilityTensor& theta, std::uint64_t seed) {
  const auto key = derive_seed(seed, Stream::kBernoulli);
  std::vector<std::uint8_t> flags(theta.slots());
  for (Count r = 0; r < theta.slots(); ++r) {
    flags[r] = counter_uniform(key, r) < theta.at_rank(r) ? 1 : 0;
  }
  return AdjacencyTensor::from_flags(theta.n(), theta.m(), std::move(flags));
}

inline void check_rho(double rho) {
  require(rho >= 0.0 && rho <= 1.0, "sparsity rho must lie in [0, 1]");
}

}  // namespace sample_detail

/// Sample (X, theta, A) from a simple hypergraphon with theta_j = rho * f(X_j).
inline SampleResult sample_slh(const SlhModel& f, std::size_t n, double rho, std::uint64_t seed) {
  const std::size_t m = f.order();
  require(n >= m, "sampling needs n >= m");
  sample_detail::check_rho(rho);
  auto x = sample_detail::uniforms(seed, Stream::kNodeLatent, n);

  std::vector<double> theta(binomial(n, m));
  std::array<double, kMaxOrder> coords{};
  for_each_hyperedge(n, m, [&](const Hyperedge& e, Count r) {
    for (std::size_t i = 0; i < m; ++i) coords[i] = x[e[i]];
    theta[r] = rho * f(std::span<const double>(coords.data(), m));
  });
  ProbabilityTensor t(n, m, std::move(theta));
  auto a = sample_detail::bernoulli(t, seed);
  return SampleResult{std::move(x), {}, std::move(t), std::move(a)};
}

/// Sample from the full 3-uniform hypergraphon: n node latents plus one latent
/// per vertex pair.
inline SampleResult sample_full(const FullHypergraphon3& h, std::size_t n, double rho,
                                std::uint64_t seed) {
  h.validate();
  require(n >= 3, "full hypergraphon sampling needs n >= 3");
  sample_detail::check_rho(rho);
  auto x = sample_detail::uniforms(seed, Stream::kNodeLatent, n);
  auto pairs = sample_detail::uniforms(seed, Stream::kPairLatent, binomial(n, 2));
  auto pair = [&](Vertex a, Vertex b) {  // a < b
    return pairs[binomial(a, 1) + binomial(b, 2)];
  };

  std::vector<double> theta(binomial(n, 3));
  for_each_hyperedge(n, 3, [&](const Hyperedge& e, Count r) {
    theta[r] = rho * eval_full(h, x[e[0]], x[e[1]], x[e[2]], pair(e[0], e[1]),
                               pair(e[0], e[2]), pair(e[1], e[2]));
  });
  ProbabilityTensor t(n, 3, std::move(theta));
  auto a = sample_detail::bernoulli(t, seed);
  return SampleResult{std::move(x), std::move(pairs), std::move(t), std::move(a)};
}

inline SampleResult sample(const HypergraphonModel& model, std::size_t n, double rho,
                           std::uint64_t seed) {
  if (const auto* slh = std::get_if<SlhModel>(&model)) return sample_slh(*slh, n, rho, seed);
  return sample_full(std::get<FullHypergraphon3>(model), n, rho, seed);
}

}  // namespace hgon
