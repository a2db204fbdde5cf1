#include "salso/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <string>

#include "salso/errors.hpp"

namespace salso {

PartitionEnumerator::PartitionEnumerator(std::size_t n, std::size_t cap) : labels_(n, 1), prefix_max_(n, 1) {
    if (n == 0) throw InputError("cannot enumerate partitions of zero items");
    if (n > cap)
        throw InputError("refusing to enumerate partitions of " + std::to_string(n) + " items (cap " +
                         std::to_string(cap) + ")");
}

bool PartitionEnumerator::advance() {
    const std::size_t n = labels_.size();
    for (std::size_t i = n; i-- > 1;) {
        if (labels_[i] <= prefix_max_[i - 1]) {
            ++labels_[i];
            prefix_max_[i] = std::max(prefix_max_[i - 1], labels_[i]);
            for (std::size_t j = i + 1; j < n; ++j) {
                labels_[j] = 1;
                prefix_max_[j] = prefix_max_[i];
            }
            return true;
        }
    }
    return false;
}

std::vector<ClusterLabels> enumerate_partitions(std::size_t n, std::size_t cap) {
    PartitionEnumerator e(n, cap);
    std::vector<ClusterLabels> out;
    do {
        out.push_back(ClusterLabels::from_canonical(e.current()));
    } while (e.advance());
    return out;
}

std::uint64_t bell_number(std::size_t n) {
    if (n > 25) throw InputError("Bell number overflows 64 bits beyond n = 25");
    std::vector<std::uint64_t> row{1};
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint64_t> next{row.back()};
        for (std::uint64_t v : row) next.push_back(next.back() + v);
        row = std::move(next);
    }
    return row.front();
}

BruteForceResult brute_force_minimizer(const DrawsMatrix& draws, const LossSpec& spec, int max_clusters,
                                       std::size_t cap) {
    if (max_clusters < 1) throw InputError("the maximum number of clusters must be positive");
    const LossEvaluator evaluator(draws, spec);
    PartitionEnumerator e(draws.num_items(), cap);
    std::vector<std::pair<double, ClusterLabels>> scored;
    do {
        if (e.current_clusters() > max_clusters) continue;
        auto candidate = ClusterLabels::from_canonical(e.current());
        const double value = evaluator(candidate);
        scored.emplace_back(value, std::move(candidate));
    } while (e.advance());

    BruteForceResult out;
    out.loss = std::min_element(scored.begin(), scored.end(),
                                [](const auto& x, const auto& y) { return x.first < y.first; })
                   ->first;
    const double tol = 1e-12 * std::max(1.0, std::abs(out.loss));
    for (auto& [value, labels] : scored)
        if (value - out.loss <= tol) out.minimizers.push_back(std::move(labels));
    return out;
}

DrawsMethodResult draws_method(const DrawsMatrix& draws, const LossSpec& spec) {
    const LossEvaluator evaluator(draws, spec);
    DrawsMethodResult out;
    std::map<std::vector<int>, double> seen;
    for (std::size_t h = 0; h < draws.num_draws(); ++h) {
        const auto& row = draws.row(h);
        auto [it, inserted] = seen.try_emplace(row.vector(), 0.0);
        if (inserted) it->second = evaluator(row);
        if (h == 0 || it->second < out.loss) {
            out.estimate = row;
            out.loss = it->second;
            out.draw_index = h;
        }
    }
    return out;
}

MapResult map_estimate(const DrawsMatrix& draws) {
    struct Tally {
        std::size_t count = 0;
        std::size_t first = 0;
    };
    std::map<std::vector<int>, Tally> tallies;
    for (std::size_t h = 0; h < draws.num_draws(); ++h) {
        auto [it, inserted] = tallies.try_emplace(draws.row(h).vector(), Tally{0, h});
        ++it->second.count;
    }
    const Tally* best = nullptr;
    for (const auto& [labels, tally] : tallies)
        if (!best || tally.count > best->count || (tally.count == best->count && tally.first < best->first))
            best = &tally;
    MapResult out;
    out.estimate = draws.row(best->first);
    out.count = best->count;
    out.frequency = static_cast<double>(best->count) / static_cast<double>(draws.num_draws());
    return out;
}

DrawsMatrix synthetic_draws(const SyntheticSpec& spec) {
    if (spec.n == 0 || spec.h == 0) throw InputError("synthetic draws need n >= 1 and h >= 1");
    if (spec.k_true < 1 || static_cast<std::size_t>(spec.k_true) > spec.n)
        throw InputError("k_true must lie in [1, n]");
    if (!(spec.q >= 0.0 && spec.q <= 1.0)) throw InputError("noise probability must lie in [0, 1]");
    std::mt19937_64 rng(spec.seed);
    std::bernoulli_distribution flip(spec.q);
    std::uniform_int_distribution<int> label(1, spec.k_true);
    std::vector<ClusterLabels> rows;
    rows.reserve(spec.h);
    std::vector<int> raw(spec.n);
    for (std::size_t d = 0; d < spec.h; ++d) {
        for (std::size_t i = 0; i < spec.n; ++i) {
            raw[i] = static_cast<int>(i % spec.k_true) + 1;
            if (flip(rng)) raw[i] = label(rng);
        }
        rows.push_back(ClusterLabels::canonicalize(std::span<const int>(raw)));
    }
    return DrawsMatrix(std::move(rows));
}

} // namespace salso
