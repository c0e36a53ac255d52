#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "hgon/error.hpp"
#include "hgon/rng.hpp"

namespace hgon {

struct KMeansResult {
  std::vector<std::uint32_t> labels;
  std::vector<double> centers;  // k x dim, row-major
  std::size_t iterations = 0;
};

namespace kmeans_detail {

inline double sq_dist(const double* a, const double* b, std::size_t dim) noexcept {
  double s = 0.0;
  for (std::size_t j = 0; j < dim; ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

}  // namespace kmeans_detail

/// Lloyd's algorithm with k-means++ seeding on `count` points of dimension
/// `dim` stored row-major in `points`. Assignment ties go to the lowest
/// center index; a center that loses all its points stays where it was.
inline KMeansResult kmeans(std::span<const double> points, std::size_t dim, std::size_t k,
                           std::uint64_t seed, std::size_t max_iters = 100) {
  require(dim > 0, "k-means dimension must be positive");
  require(points.size() % dim == 0, "point buffer is not a multiple of dim");
  const std::size_t count = points.size() / dim;
  require(k >= 1 && k <= count, "k-means needs 1 <= k <= number of points");
  const double* p = points.data();
  Rng rng(seed);

  KMeansResult out;
  out.centers.resize(k * dim);
  auto set_center = [&](std::size_t c, std::size_t i) {
    for (std::size_t j = 0; j < dim; ++j) out.centers[c * dim + j] = p[i * dim + j];
  };

  // k-means++ seeding.
  set_center(0, rng.below(count));
  std::vector<double> d2(count);
  for (std::size_t i = 0; i < count; ++i) {
    d2[i] = kmeans_detail::sq_dist(p + i * dim, out.centers.data(), dim);
  }
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      pick = count;
      for (std::size_t i = 0; i < count; ++i) {
        if (d2[i] <= 0.0) continue;
        pick = i;
        target -= d2[i];
        if (target < 0.0) break;
      }
    } else {
      pick = rng.below(count);  // every point already coincides with a center
    }
    set_center(c, pick);
    for (std::size_t i = 0; i < count; ++i) {
      const double d = kmeans_detail::sq_dist(p + i * dim, out.centers.data() + c * dim, dim);
      if (d < d2[i]) d2[i] = d;
    }
  }

  out.labels.assign(count, std::numeric_limits<std::uint32_t>::max());
  std::vector<double> sums(k * dim);
  std::vector<std::size_t> sizes(k);
  for (std::size_t it = 0; it < max_iters; ++it) {
    bool changed = false;
    for (std::size_t i = 0; i < count; ++i) {
      std::uint32_t best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t c = 0; c < k; ++c) {
        const double d = kmeans_detail::sq_dist(p + i * dim, out.centers.data() + c * dim, dim);
        if (d < best_d) {
          best_d = d;
          best = static_cast<std::uint32_t>(c);
        }
      }
      if (out.labels[i] != best) {
        out.labels[i] = best;
        changed = true;
      }
    }
    out.iterations = it + 1;
    if (!changed) break;

    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(sizes.begin(), sizes.end(), 0);
    for (std::size_t i = 0; i < count; ++i) {
      const auto c = out.labels[i];
      ++sizes[c];
      for (std::size_t j = 0; j < dim; ++j) sums[c * dim + j] += p[i * dim + j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (sizes[c] == 0) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        out.centers[c * dim + j] = sums[c * dim + j] / static_cast<double>(sizes[c]);
      }
    }
  }
  return out;
}

}  // namespace hgon
