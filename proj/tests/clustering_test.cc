// Copyright 2026 The mvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "mvec/clustering.h"
#include "mvec/errors.h"
#include "test_util.h"

namespace mvec {
namespace {

using testing::random_page;
using testing::reference_upgma;

// n rows drawn from `groups` random directions, row i belonging to group i % groups.
PageEmbeddings duplicate_page(std::mt19937_64& rng, std::size_t n, std::size_t groups, std::size_t d) {
    const auto centers = random_page(rng, groups, d, true);
    PageEmbeddings p{"dup", Matrix(n, d), std::nullopt, true};
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = centers.vectors.row(i % groups);
        std::copy(src.begin(), src.end(), p.vectors.row(i).begin());
    }
    return p;
}

TEST(HierarchicalCluster, FullCountIsIdentity) {
    std::mt19937_64 rng(1);
    const auto p = random_page(rng, 10, 4);
    const auto a = hierarchical_cluster(p, 10);
    EXPECT_EQ(a.num_clusters, 10u);
    for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(a.labels[i], i);
}

TEST(HierarchicalCluster, SeparatesBundles) {
    PageEmbeddings p{"p", Matrix(6, 3), std::nullopt, false};
    const std::vector<std::size_t> bundle{1, 0, 0, 1, 1, 0};
    for (std::size_t i = 0; i < 6; ++i) {
        p.vectors.row(i)[0] = bundle[i] ? 0.0f : 2.0f;
        p.vectors.row(i)[1] = bundle[i] ? 1.0f : 0.0f;
    }
    const auto a = hierarchical_cluster(p, 2);
    EXPECT_EQ(a.labels, (std::vector<std::size_t>{0, 1, 1, 0, 0, 1}));
}

TEST(HierarchicalCluster, MatchesReferenceOnEightRows) {
    std::mt19937_64 rng(2);
    const auto p = random_page(rng, 8, 6);
    EXPECT_EQ(hierarchical_cluster(p, 3).labels, reference_upgma(p, 3));
}

TEST(HierarchicalCluster, MatchesReferenceOnRandomInstances) {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const auto p = random_page(rng, n, 2 + rng() % 8);
        const std::size_t k = 1 + rng() % n;
        ASSERT_EQ(hierarchical_cluster(p, k).labels, reference_upgma(p, k)) << "trial " << trial;
    }
}

TEST(HierarchicalCluster, TieRuleOnDuplicates) {
    // every distance inside a group is exactly zero, so ties are everywhere
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t groups = 1 + rng() % 4;
        const std::size_t n = groups + rng() % 9;
        const auto p = duplicate_page(rng, n, groups, 5);
        for (std::size_t k = 1; k <= n; ++k) ASSERT_EQ(hierarchical_cluster(p, k).labels, reference_upgma(p, k));
    }
}

TEST(HierarchicalCluster, LabelsCoverEveryCluster) {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const auto p = random_page(rng, 40, 8);
        const std::size_t k = 1 + rng() % 40;
        const auto a = hierarchical_cluster(p, k);
        ASSERT_EQ(a.num_clusters, k);
        std::set<std::size_t> seen(a.labels.begin(), a.labels.end());
        EXPECT_EQ(seen.size(), k);
        EXPECT_EQ(*seen.rbegin(), k - 1);
        // labels appear in order of each cluster's smallest member
        std::size_t next = 0;
        for (std::size_t l : a.labels) {
            if (l == next) ++next;
            EXPECT_LT(l, next);
        }
    }
}

TEST(Dendrogram, CutsAgreeWithDirectClustering) {
    std::mt19937_64 rng(6);
    const auto p = random_page(rng, 30, 8);
    const auto tree = Dendrogram::build(p, 2);
    EXPECT_EQ(tree.min_clusters(), 2u);
    for (std::size_t k = 2; k <= 30; ++k) EXPECT_EQ(tree.cut(k), hierarchical_cluster(p, k));
    EXPECT_THROW(tree.cut(1), ValidationError);
}

TEST(Dendrogram, CutsAreNested) {
    std::mt19937_64 rng(7);
    const auto p = random_page(rng, 25, 6);
    const auto tree = Dendrogram::build(p);
    for (std::size_t k = 1; k < 25; ++k) {
        const auto coarse = tree.cut(k), fine = tree.cut(k + 1);
        // each fine cluster sits inside exactly one coarse cluster
        std::vector<std::size_t> parent(k + 1, SIZE_MAX);
        for (std::size_t i = 0; i < 25; ++i) {
            auto& slot = parent[fine.labels[i]];
            if (slot == SIZE_MAX) slot = coarse.labels[i];
            EXPECT_EQ(slot, coarse.labels[i]);
        }
    }
}

TEST(CosineDistances, SymmetricWithZeroDiagonal) {
    std::mt19937_64 rng(8);
    const auto p = random_page(rng, 7, 5);
    const auto dist = cosine_distances(p);
    ASSERT_EQ(dist.size(), 49u);
    for (std::size_t i = 0; i < 7; ++i) {
        EXPECT_NEAR(dist[i * 7 + i], 0.0, 1e-12);
        for (std::size_t j = 0; j < 7; ++j) {
            EXPECT_EQ(dist[i * 7 + j], dist[j * 7 + i]);
            EXPECT_GE(dist[i * 7 + j], -1e-12);
            EXPECT_LE(dist[i * 7 + j], 2.0 + 1e-12);
        }
    }
}

TEST(HierarchicalCluster, Errors) {
    std::mt19937_64 rng(9);
    const auto p = random_page(rng, 5, 3);
    EXPECT_THROW(hierarchical_cluster(p, 0), ValidationError);
    EXPECT_THROW(hierarchical_cluster(p, 6), ValidationError);
    auto zero = p;
    std::fill(zero.vectors.row(2).begin(), zero.vectors.row(2).end(), 0.0f);
    EXPECT_THROW(hierarchical_cluster(zero, 2), ValidationError);
}

}  // namespace
}  // namespace mvec
