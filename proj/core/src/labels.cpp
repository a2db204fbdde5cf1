#include "salso/labels.hpp"

#include <algorithm>
#include <string>
#include <unordered_map>

#include "salso/errors.hpp"

namespace salso {

namespace {

template <class T>
std::vector<int> first_appearance(std::span<const T> raw) {
    if (raw.empty()) throw InputError("cannot canonicalize an empty label vector");
    std::unordered_map<T, int> seen;
    std::vector<int> out;
    out.reserve(raw.size());
    for (const T value : raw) {
        auto [it, inserted] = seen.try_emplace(value, static_cast<int>(seen.size()) + 1);
        out.push_back(it->second);
    }
    return out;
}

} // namespace

ClusterLabels ClusterLabels::canonicalize(std::span<const long long> raw) {
    ClusterLabels c;
    c.labels_ = first_appearance(raw);
    c.num_clusters_ = *std::max_element(c.labels_.begin(), c.labels_.end());
    return c;
}

ClusterLabels ClusterLabels::canonicalize(std::span<const int> raw) {
    ClusterLabels c;
    c.labels_ = first_appearance(raw);
    c.num_clusters_ = *std::max_element(c.labels_.begin(), c.labels_.end());
    return c;
}

ClusterLabels ClusterLabels::from_canonical(std::vector<int> labels) {
    if (labels.empty()) throw InputError("empty label vector");
    int max_seen = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 1 || labels[i] > max_seen + 1)
            throw InputError("labels are not in canonical form at position " + std::to_string(i));
        max_seen = std::max(max_seen, labels[i]);
    }
    ClusterLabels c;
    c.labels_ = std::move(labels);
    c.num_clusters_ = max_seen;
    return c;
}

ClusterLabels canonicalize(std::span<const long long> raw) { return ClusterLabels::canonicalize(raw); }

int num_clusters(const ClusterLabels& labels) { return labels.num_clusters(); }

DrawsMatrix::DrawsMatrix(std::vector<ClusterLabels> rows) : rows_(std::move(rows)) {
    if (rows_.empty()) throw InputError("draws matrix needs at least one draw");
    n_ = rows_.front().size();
    if (n_ == 0) throw InputError("draws must have at least one item");
    for (std::size_t h = 0; h < rows_.size(); ++h) {
        if (rows_[h].size() != n_)
            throw InputError("draw " + std::to_string(h + 1) + " has " + std::to_string(rows_[h].size()) +
                             " items, expected " + std::to_string(n_));
        k_h_ = std::max(k_h_, rows_[h].num_clusters());
    }
    const std::size_t num_draws = rows_.size();
    by_item_.resize(n_ * num_draws);
    for (std::size_t h = 0; h < num_draws; ++h)
        for (std::size_t i = 0; i < n_; ++i) by_item_[i * num_draws + h] = rows_[h][i] - 1;
}

DrawsMatrix DrawsMatrix::from_raw(const std::vector<std::vector<long long>>& rows) {
    std::vector<ClusterLabels> canon;
    canon.reserve(rows.size());
    for (const auto& r : rows) canon.push_back(ClusterLabels::canonicalize(std::span<const long long>(r)));
    return DrawsMatrix(std::move(canon));
}

} // namespace salso
