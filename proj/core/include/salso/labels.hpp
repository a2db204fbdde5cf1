#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace salso {

// A partition of items {0..n-1} stored as 1-based labels in canonical
// (restricted-growth) form: item 0 has label 1 and every later label is at
// most one more than the largest label seen before it.
class ClusterLabels {
public:
    ClusterLabels() = default;

    // Relabels by order of first appearance. Any integer values are accepted.
    static ClusterLabels canonicalize(std::span<const long long> raw);
    static ClusterLabels canonicalize(std::span<const int> raw);

    // Takes labels that are already canonical; throws InputError otherwise.
    static ClusterLabels from_canonical(std::vector<int> labels);

    std::size_t size() const { return labels_.size(); }
    int operator[](std::size_t i) const { return labels_[i]; }
    int num_clusters() const { return num_clusters_; }
    std::span<const int> values() const { return labels_; }
    const std::vector<int>& vector() const { return labels_; }

    friend bool operator==(const ClusterLabels&, const ClusterLabels&) = default;
    friend auto operator<=>(const ClusterLabels& x, const ClusterLabels& y) { return x.labels_ <=> y.labels_; }

private:
    std::vector<int> labels_;
    int num_clusters_ = 0;
};

ClusterLabels canonicalize(std::span<const long long> raw);
int num_clusters(const ClusterLabels& labels);

// H posterior draws over the same n items. Rows are canonical. An item-major
// 0-based copy of the labels is kept for the inner loops of the search, which
// walk all draws for a single item.
class DrawsMatrix {
public:
    DrawsMatrix() = default;
    explicit DrawsMatrix(std::vector<ClusterLabels> rows);
    static DrawsMatrix from_raw(const std::vector<std::vector<long long>>& rows);

    std::size_t num_draws() const { return rows_.size(); }
    std::size_t num_items() const { return n_; }
    int max_clusters() const { return k_h_; }  // k_H

    const ClusterLabels& row(std::size_t h) const { return rows_[h]; }
    const std::vector<ClusterLabels>& rows() const { return rows_; }

    // 0-based label of `item` in every draw, length H.
    std::span<const std::int32_t> item_labels(std::size_t item) const {
        return {by_item_.data() + item * rows_.size(), rows_.size()};
    }

private:
    std::vector<ClusterLabels> rows_;
    std::vector<std::int32_t> by_item_;
    std::size_t n_ = 0;
    int k_h_ = 0;
};

} // namespace salso
