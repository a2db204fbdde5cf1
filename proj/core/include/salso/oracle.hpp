#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "salso/labels.hpp"
#include "salso/losses.hpp"

namespace salso {

inline constexpr std::size_t kDefaultEnumerationCap = 12;

// Streams every partition of n items as a restricted-growth string, in
// lexicographic order. Single consumer.
class PartitionEnumerator {
public:
    explicit PartitionEnumerator(std::size_t n, std::size_t cap = kDefaultEnumerationCap);

    // Current partition; valid until the next call to advance().
    const std::vector<int>& current() const { return labels_; }
    int current_clusters() const { return prefix_max_.back(); }
    // Moves to the next partition; false once the sequence is exhausted.
    bool advance();

private:
    std::vector<int> labels_;
    std::vector<int> prefix_max_;  // prefix_max_[i] = max(labels_[0..i])
};

std::vector<ClusterLabels> enumerate_partitions(std::size_t n, std::size_t cap = kDefaultEnumerationCap);

// Bell number B(n) via the Bell triangle. Exact for n <= 25.
std::uint64_t bell_number(std::size_t n);

struct BruteForceResult {
    std::vector<ClusterLabels> minimizers;  // lexicographic order
    double loss = 0.0;
};

// Exact minimizer of the posterior expected loss over all partitions with at
// most `max_clusters` clusters. Ties are losses within 1e-12 * max(1, |min|).
BruteForceResult brute_force_minimizer(const DrawsMatrix& draws, const LossSpec& spec, int max_clusters,
                                       std::size_t cap = kDefaultEnumerationCap);

struct DrawsMethodResult {
    ClusterLabels estimate;
    double loss = 0.0;
    std::size_t draw_index = 0;
};

// The draw with the smallest expected loss; ties go to the lowest index.
DrawsMethodResult draws_method(const DrawsMatrix& draws, const LossSpec& spec);

struct MapResult {
    ClusterLabels estimate;
    double frequency = 0.0;
    std::size_t count = 0;
};

// Most frequent partition among the draws; ties go to the earliest first
// occurrence.
MapResult map_estimate(const DrawsMatrix& draws);

struct SyntheticSpec {
    std::size_t n = 10;
    int k_true = 3;
    std::size_t h = 100;
    double q = 0.1;  // per-item reallocation probability
    std::uint64_t seed = 0;
};

// Label noise around a base partition (item i in cluster i mod k_true): in
// each draw every item is, with probability q, relabeled uniformly in
// {1..k_true}.
DrawsMatrix synthetic_draws(const SyntheticSpec& spec);

} // namespace salso
