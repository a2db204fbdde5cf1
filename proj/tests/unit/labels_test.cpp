#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "oracles.hpp"
#include "salso/errors.hpp"
#include "salso/labels.hpp"

namespace salso {
namespace {

std::vector<int> canon_values(std::vector<long long> raw) { return canonicalize(raw).vector(); }

TEST(Canonicalize, FirstAppearanceRelabeling) {
    EXPECT_EQ(canon_values({7, 7, 2, 7}), (std::vector<int>{1, 1, 2, 1}));
    EXPECT_EQ(canon_values({1, 2, 3}), (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(canon_values({3, 1, 3, 2}), (std::vector<int>{1, 2, 1, 3}));
}

TEST(Canonicalize, AcceptsZeroAndNegativeLabels) {
    EXPECT_EQ(canon_values({0, 0, 5}), (std::vector<int>{1, 1, 2}));
    EXPECT_EQ(canon_values({-4, 9, -4, 0}), (std::vector<int>{1, 2, 1, 3}));
}

TEST(Canonicalize, EmptyInputIsAnInputError) {
    EXPECT_THROW(canonicalize(std::vector<long long>{}), InputError);
}

TEST(Canonicalize, IdempotentAndInvariantUnderLabelPermutation) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + rng() % 30;
        const int k = 1 + static_cast<int>(rng() % 8);
        const auto raw = test::random_labels(rng, n, k);
        const ClusterLabels c = test::canon(raw);

        EXPECT_EQ(test::canon(c.vector()), c);

        std::vector<int> perm(k + 1);
        std::iota(perm.begin(), perm.end(), 100);
        std::shuffle(perm.begin(), perm.end(), rng);
        std::vector<int> relabeled(n);
        for (std::size_t i = 0; i < n; ++i) relabeled[i] = perm[raw[i]];
        EXPECT_EQ(test::canon(relabeled), c);

        // restricted growth
        int max_seen = 0;
        for (int l : c.values()) {
            ASSERT_LE(l, max_seen + 1);
            max_seen = std::max(max_seen, l);
        }
        EXPECT_EQ(c.num_clusters(), max_seen);
    }
}

TEST(Canonicalize, DifferentPartitionsStayDifferent) {
    EXPECT_NE(canonicalize(std::vector<long long>{1, 1, 2}), canonicalize(std::vector<long long>{1, 2, 2}));
}

TEST(NumClusters, IsTheLargestCanonicalLabel) {
    EXPECT_EQ(num_clusters(canonicalize(std::vector<long long>{1, 1, 1})), 1);
    EXPECT_EQ(num_clusters(canonicalize(std::vector<long long>{1, 2, 3})), 3);
    EXPECT_EQ(num_clusters(canonicalize(std::vector<long long>{1, 2, 1, 3})), 3);
}

TEST(FromCanonical, RejectsNonCanonicalLabels) {
    EXPECT_NO_THROW(ClusterLabels::from_canonical({1, 2, 1, 3}));
    EXPECT_THROW(ClusterLabels::from_canonical({2, 1}), InputError);
    EXPECT_THROW(ClusterLabels::from_canonical({1, 3}), InputError);
    EXPECT_THROW(ClusterLabels::from_canonical({}), InputError);
}

TEST(DrawsMatrix, SummarizesRows) {
    const auto draws = DrawsMatrix::from_raw({{1, 1, 2}, {1, 2, 2}, {5, 5, 5}});
    EXPECT_EQ(draws.num_draws(), 3u);
    EXPECT_EQ(draws.num_items(), 3u);
    EXPECT_EQ(draws.max_clusters(), 2);
    const auto item2 = draws.item_labels(2);
    EXPECT_EQ(std::vector<int>(item2.begin(), item2.end()), (std::vector<int>{1, 1, 0}));
}

TEST(DrawsMatrix, RejectsRaggedOrEmptyInput) {
    EXPECT_THROW(DrawsMatrix::from_raw({{1, 1}, {1}}), InputError);
    EXPECT_THROW(DrawsMatrix(std::vector<ClusterLabels>{}), InputError);
}

} // namespace
} // namespace salso
