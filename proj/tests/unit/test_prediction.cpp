#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hgon/hgon.hpp"
#include "oracles.hpp"

using namespace hgon;

namespace {

// The missing-entry objective written over ordered index tuples, with Theta
// taken blockwise from q under z.
double ordered_objective(const AdjacencyTensor& a, const ObservationMask& omega, const std::vector<Label>& z,
                         const BlockProbabilities& q) {
  const double n = static_cast<double>(a.n());
  double norm = 0.0, cross = 0.0, observed_ordered = 0.0;
  oracle::for_each_ordered(a.n(), a.m(), [&](const std::vector<Vertex>& j) {
    auto sorted = j;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return;
    std::vector<Label> labels;
    for (auto v : j) labels.push_back(z[v]);
    const double theta = q.at(std::span<const Label>(labels));
    norm += theta * theta;
    if (omega.observed(make_hyperedge(sorted, a.n()))) {
      observed_ordered += 1.0;
      cross += a.at(j) * theta;
    }
  });
  return norm - 2.0 * std::pow(n, static_cast<double>(a.m())) / observed_ordered * cross;
}

ObservationMask mask_of(std::size_t n, std::size_t m, std::initializer_list<Count> ranks) {
  std::vector<std::uint8_t> flags(binomial(n, m), 0);
  for (auto r : ranks) flags[r] = 1;
  return ObservationMask(n, m, std::move(flags));
}

double pairwise_auc(const std::vector<double>& s, const std::vector<std::uint8_t>& t) {
  double wins = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!t[i] || t[j]) continue;
      pairs += 1.0;
      wins += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return wins / pairs;
}

}  // namespace

TEST(SampleMask, SizesAndDeterminism) {
  EXPECT_EQ(sample_mask(4, 3, 0.5, 1).observed_count(), 2u);
  EXPECT_TRUE(sample_mask(7, 3, 1.0, 1).is_full());
  EXPECT_EQ(sample_mask(10, 3, 0.7, 9), sample_mask(10, 3, 0.7, 9));
  EXPECT_EQ(sample_mask(10, 3, 0.7, 9).observed_count(), 84u);
  EXPECT_NE(sample_mask(10, 3, 0.7, 9), sample_mask(10, 3, 0.7, 10));
  EXPECT_THROW(sample_mask(4, 3, 0.1, 1), Rejection);
  EXPECT_THROW(sample_mask(4, 3, 0.0, 1), Rejection);
  EXPECT_THROW(sample_mask(4, 3, 1.5, 1), Rejection);
}

TEST(SampleMask, RoughlyUniform) {
  std::vector<int> hits(binomial(6, 3), 0);
  for (std::uint64_t s = 0; s < 2000; ++s) {
    const auto m = sample_mask(6, 3, 0.5, s);
    for (Count r = 0; r < hits.size(); ++r) hits[r] += m.observed(r) ? 1 : 0;
  }
  // each slot is observed with probability 1/2; 2000 draws, sd ~ 22
  for (int h : hits) EXPECT_NEAR(h, 1000, 120);
}

TEST(MissingBlockwiseQ, SymbolicStationaryPoint) {
  // n=4, m=3, k=1, Omega = {(0,1,2), (0,1,3)} with (0,1,2) present.
  const AdjacencyTensor a(4, 3, {make_hyperedge({0, 1, 2}, 4)});
  const auto omega = mask_of(4, 3, {0, 1});
  const CommunityAssignment z({0, 0, 0, 0}, 1);
  // Over ordered tuples the objective is 24 Q^2 - 2 (64 / 12) 6 Q, so its
  // stationary point is 64 / 48 = 4/3, which clips to 1.
  BlockProbabilities probe(1, 3);
  probe[0] = 0.0;
  const double f0 = ordered_objective(a, omega, z.labels(), probe);
  probe[0] = 1.0;
  const double f1 = ordered_objective(a, omega, z.labels(), probe);
  probe[0] = 2.0;
  const double f2 = ordered_objective(a, omega, z.labels(), probe);
  const double quad = (f2 - 2 * f1 + f0) / 2.0, lin = f1 - f0 - quad;
  EXPECT_NEAR(quad, 24.0, 1e-9);
  EXPECT_NEAR(lin, -64.0, 1e-9);
  EXPECT_NEAR(-lin / (2 * quad), 4.0 / 3.0, 1e-12);
  EXPECT_EQ(missing_blockwise_q(a, omega, z)[0], 1.0);
}

TEST(MissingBlockwiseQ, SaturationAndZeros) {
  const auto z = CommunityAssignment({0, 1, 0, 1, 1, 0}, 2);
  const auto full = oracle::planted_two_blocks(3);
  const auto complete = AdjacencyTensor::from_flags(6, 3, std::vector<std::uint8_t>(20, 1));
  const auto all = ObservationMask::full(6, 3);
  const auto saturated = missing_blockwise_q(complete, all, z);
  for (double v : saturated.values()) EXPECT_EQ(v, 1.0);
  const auto nothing = missing_blockwise_q(AdjacencyTensor(6, 3), sample_mask(6, 3, 0.5, 2), z);
  for (double v : nothing.values()) EXPECT_EQ(v, 0.0);
  // with Omega = H the result is blockwise_means scaled by n^m / (m! C(n, m))
  const double scale = 216.0 / (6.0 * 20.0);
  const auto q = missing_blockwise_q(full, all, z);
  const auto means = blockwise_means(full, z);
  for (std::size_t r = 0; r < q.size(); ++r) EXPECT_DOUBLE_EQ(q[r], std::min(1.0, scale * means[r]));
  EXPECT_THROW(missing_blockwise_q(full, ObservationMask(6, 3, std::vector<std::uint8_t>(20, 0)), z),
               Rejection);
}

TEST(MissingBlockwiseQ, MinimizesOrderedObjective) {
  Rng rng(3);
  int interior = 0;
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t n = 5 + rng.below(2), k = 1 + rng.below(3);
    const auto a = oracle::random_adjacency(n, 3, 0.25, rng);
    const auto omega = sample_mask(n, 3, 0.9, rep);
    const auto labels = oracle::random_labels(n, k, rng);
    const CommunityAssignment z(labels, k);
    const auto q = missing_blockwise_q(a, omega, z);
    const double best = ordered_objective(a, omega, labels, q);
    EXPECT_NEAR(missing_objective(a, omega, z, q), best, 1e-9);
    const auto slots = block_edge_slots(z, 3);
    for (std::size_t r = 0; r < q.size(); ++r) {
      if (slots[r] == 0) continue;
      for (double d : {-1e-3, 1e-3}) {
        const double moved_value = q[r] + d;
        if (moved_value < 0.0 || moved_value > 1.0) continue;  // outside the feasible box
        if (q[r] > 0.0 && q[r] < 1.0) ++interior;
        auto moved = q;
        moved[r] = moved_value;
        EXPECT_GT(ordered_objective(a, omega, labels, moved), best);
      }
    }
  }
  EXPECT_GT(interior, 10);
}

TEST(FitMissing, FullMaskFollowsFitTrajectory) {
  Rng rng(4);
  for (int rep = 0; rep < 5; ++rep) {
    const auto a = oracle::random_adjacency(14, 3, 0.4, rng);
    for (InitKind init : {InitKind::kRandom, InitKind::kSpectral}) {
      FitOptions o;
      o.k = 3;
      o.init = init;
      o.restarts = 1;
      o.seed = static_cast<std::uint64_t>(rep);
      const auto full = fit(a, o);
      const auto missing = fit_missing(a, ObservationMask::full(14, 3), o);
      EXPECT_EQ(missing.z_hat, full.z_hat);
      EXPECT_EQ(missing.iterations, full.iterations);
    }
  }
}

TEST(FitMissing, PlantedRecoveryAndPrediction) {
  const auto a = oracle::planted_two_blocks(6);
  const auto omega = sample_mask(12, 3, 0.9, 5);
  FitOptions o;
  o.k = 2;
  o.seed = 1;
  const auto r = fit_missing(a, omega, o);
  for (std::size_t i = 1; i < 6; ++i) EXPECT_EQ(r.z_hat[i], r.z_hat[0]);
  for (std::size_t i = 7; i < 12; ++i) EXPECT_EQ(r.z_hat[i], r.z_hat[6]);
  EXPECT_NE(r.z_hat[0], r.z_hat[6]);

  const auto p = predict(r.theta_hat, omega);
  EXPECT_EQ(p.hyperedges.size(), 220u - omega.observed_count());
  for (std::size_t i = 0; i < p.hyperedges.size(); ++i) {
    EXPECT_EQ(p.labels[i], a.contains(p.hyperedges[i]) ? 1 : 0);
  }
}

TEST(FitMissing, EmptyMaskRejected) {
  FitOptions o;
  o.k = 2;
  EXPECT_THROW(fit_missing(AdjacencyTensor(6, 3), ObservationMask(6, 3, std::vector<std::uint8_t>(20, 0)), o),
               Rejection);
}

TEST(Predict, ThresholdIsStrict) {
  const auto omega = mask_of(4, 3, {0});
  const auto ones = predict(ProbabilityTensor(4, 3, 1.0), omega);
  EXPECT_EQ(ones.labels, (std::vector<std::uint8_t>{1, 1, 1}));
  const auto half = predict(ProbabilityTensor(4, 3, 0.5), omega);
  EXPECT_EQ(half.labels, (std::vector<std::uint8_t>{0, 0, 0}));
  const auto mixed = predict(ProbabilityTensor(4, 3, std::vector<double>{0.9, 0.3, 0.7, 0.5}), omega);
  EXPECT_EQ(mixed.scores, (std::vector<double>{0.3, 0.7, 0.5}));
  EXPECT_EQ(mixed.labels, (std::vector<std::uint8_t>{0, 1, 0}));
  EXPECT_TRUE(predict(ProbabilityTensor(4, 3, 0.2), ObservationMask::full(4, 3)).hyperedges.empty());
}

TEST(Auc, Examples) {
  const std::vector<double> sep{0.9, 0.8, 0.2, 0.1};
  const std::vector<std::uint8_t> t{1, 1, 0, 0};
  EXPECT_EQ(auc(sep, t), 1.0);
  const std::vector<double> flat{0.4, 0.4, 0.4, 0.4};
  EXPECT_EQ(auc(flat, t), 0.5);
  const std::vector<double> s3{0.9, 0.8, 0.3};
  const std::vector<std::uint8_t> t3{1, 0, 1};
  EXPECT_EQ(auc(s3, t3), 0.5);
  try {
    auc(flat, std::vector<std::uint8_t>{1, 1, 1, 1});
    FAIL() << "expected rejection";
  } catch (const Rejection& e) {
    EXPECT_NE(std::string(e.what()).find("degenerate labels"), std::string::npos);
  }
}

TEST(Auc, MatchesPairCountAndTransforms) {
  Rng rng(6);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t len = 2 + rng.below(40);
    std::vector<double> s(len);
    std::vector<std::uint8_t> t(len);
    for (std::size_t i = 0; i < len; ++i) {
      s[i] = std::round(rng.uniform() * 10.0) / 10.0;  // plenty of ties
      t[i] = rng.uniform() < 0.5 ? 1 : 0;
    }
    t[0] = 1;
    t[1] = 0;
    const double base = auc(s, t);
    EXPECT_DOUBLE_EQ(base, pairwise_auc(s, t));

    std::vector<double> ex(len), affine(len);
    for (std::size_t i = 0; i < len; ++i) {
      ex[i] = std::exp(s[i]);
      affine[i] = 3.0 * s[i] + 2.0;
    }
    EXPECT_EQ(auc(ex, t), base);
    EXPECT_EQ(auc(affine, t), base);

    std::vector<double> distinct(len), negated(len);
    for (std::size_t i = 0; i < len; ++i) {
      distinct[i] = rng.uniform();
      negated[i] = -distinct[i];
    }
    EXPECT_DOUBLE_EQ(auc(distinct, t) + auc(negated, t), 1.0);
  }
}

TEST(HyperedgeList, LoaderAndCsv) {
  std::istringstream in("# toy\n5 3\n0 1 2\n3 1 0 ?\n2 3 4\n");
  const auto data = read_hyperedge_list(in);
  EXPECT_EQ(data.adjacency.edge_count(), 2u);
  EXPECT_EQ(data.observed.observed_count(), 9u);
  EXPECT_FALSE(data.observed.observed(make_hyperedge({0, 1, 3}, 5)));
  EXPECT_FALSE(data.adjacency.contains(make_hyperedge({0, 1, 3}, 5)));

  const auto p = predict(ProbabilityTensor(5, 3, 0.75), data.observed);
  std::ostringstream out;
  write_predictions_csv(out, p);
  EXPECT_EQ(out.str(), "hyperedge,score,label\n0 1 3,0.75,1\n");

  std::istringstream bad("5 3\n0 1 2 x\n");
  EXPECT_THROW(read_hyperedge_list(bad), Rejection);
}
