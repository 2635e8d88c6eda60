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
#include <cmath>
#include <random>
#include <set>

#include "mvec/errors.h"
#include "mvec/merging.h"
#include "mvec/scoring.h"
#include "test_util.h"

namespace mvec {
namespace {

using testing::random_page;
using testing::random_query;

PageEmbeddings grid_page(std::mt19937_64& rng, std::uint16_t rows, std::uint16_t cols, std::size_t d = 4) {
    auto p = random_page(rng, std::size_t{rows} * cols, d);
    p.grid = Grid{rows, cols};
    return p;
}

std::vector<float> mean_rows(const PageEmbeddings& p, const std::vector<std::size_t>& rows) {
    std::vector<double> acc(p.dim(), 0.0);
    for (std::size_t r : rows) {
        for (std::size_t t = 0; t < p.dim(); ++t) acc[t] += p.vectors.row(r)[t];
    }
    std::vector<float> out(p.dim());
    for (std::size_t t = 0; t < p.dim(); ++t) out[t] = static_cast<float>(acc[t] / rows.size());
    return out;
}

void expect_row_near(std::span<const float> got, const std::vector<float>& want, double tol = 1e-6) {
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t t = 0; t < want.size(); ++t) EXPECT_NEAR(got[t], want[t], tol);
}

// Unit-norm page where row i equals one of `groups` random directions.
PageEmbeddings duplicate_groups(std::mt19937_64& rng, std::size_t n, std::size_t groups, std::size_t d) {
    const auto centers = random_page(rng, groups, d, true);
    PageEmbeddings p{"dup", Matrix(n, d), std::nullopt, true};
    for (std::size_t i = 0; i < n; ++i) {
        const auto src = centers.vectors.row(rng() % groups);
        std::copy(src.begin(), src.end(), p.vectors.row(i).begin());
    }
    // make sure every group is present
    for (std::size_t g = 0; g < groups; ++g) {
        const auto src = centers.vectors.row(g);
        std::copy(src.begin(), src.end(), p.vectors.row(g * (n / groups)).begin());
    }
    return p;
}

TEST(MergedCount, RoundsAndClamps) {
    EXPECT_EQ(merged_count(768, 9), 85u);
    EXPECT_EQ(merged_count(768, 49), 16u);
    EXPECT_EQ(merged_count(7, 2), 4u);
    EXPECT_EQ(merged_count(5, 2), 2u);  // round(2.5) = 2
    EXPECT_EQ(merged_count(3, 100), 1u);
    EXPECT_THROW(merged_count(3, 0.5), ValidationError);
    EXPECT_THROW(merged_count(3, NAN), ValidationError);
}

TEST(Pool1d, FactorOneIsIdentity) {
    std::mt19937_64 rng(1);
    auto p = grid_page(rng, 3, 5);
    EXPECT_EQ(merge_pool_1d(p, 1.0), p);
    EXPECT_EQ(merge_pool_2d(p, 1.0), p);
}

TEST(Pool1d, ConstantRuns) {
    PageEmbeddings p{"p", Matrix(4, 2, {1, 0, 1, 0, 0, 1, 0, 1}), std::nullopt, true};
    const auto m = merge_pool_1d(p, 2.0);
    EXPECT_EQ(m.vectors, Matrix(2, 2, {1, 0, 0, 1}));
}

TEST(Pool1d, RunsAreNearEqualLongerFirst) {
    std::mt19937_64 rng(2);
    const auto p = random_page(rng, 7, 5);
    const auto m = merge_pool_1d(p, 2.0);
    ASSERT_EQ(m.num_vectors(), 4u);
    expect_row_near(m.vectors.row(0), mean_rows(p, {0, 1}));
    expect_row_near(m.vectors.row(1), mean_rows(p, {2, 3}));
    expect_row_near(m.vectors.row(2), mean_rows(p, {4, 5}));
    EXPECT_EQ(std::vector<float>(m.vectors.row(3).begin(), m.vectors.row(3).end()),
              std::vector<float>(p.vectors.row(6).begin(), p.vectors.row(6).end()));

    const auto r = merge_pool_1d(p, 2.0, true);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(std::sqrt(squared_norm(r.vectors.row(i))), 1.0, 1e-6);
}

TEST(Pool2d, WindowChoice) {
    const Grid big{32, 24};
    auto w = [&](double f) {
        const auto x = choose_window(big, f);
        return std::make_pair(x.rows, x.cols);
    };
    EXPECT_EQ(w(4), std::make_pair(std::size_t{2}, std::size_t{2}));
    EXPECT_EQ(w(9), std::make_pair(std::size_t{3}, std::size_t{3}));
    EXPECT_EQ(w(25), std::make_pair(std::size_t{5}, std::size_t{5}));
    EXPECT_EQ(w(49), std::make_pair(std::size_t{7}, std::size_t{7}));
    EXPECT_EQ(w(2), std::make_pair(std::size_t{2}, std::size_t{1}));  // 2x1 and 1x2 tie, larger w_r wins
    EXPECT_EQ(w(6), std::make_pair(std::size_t{3}, std::size_t{2}));
    const auto clamped = choose_window(Grid{1, 10}, 4);
    EXPECT_EQ(clamped.rows, 1u);
    EXPECT_EQ(clamped.cols, 4u);
}

TEST(Pool2d, WholeGridCollapses) {
    std::mt19937_64 rng(3);
    const auto p = grid_page(rng, 2, 2);
    const auto m = merge_pool_2d(p, 4.0);
    ASSERT_EQ(m.num_vectors(), 1u);
    expect_row_near(m.vectors.row(0), mean_rows(p, {0, 1, 2, 3}));
    EXPECT_EQ(m.grid, (Grid{1, 1}));
}

TEST(Pool2d, ConstantField) {
    PageEmbeddings p{"p", Matrix(16, 3), Grid{4, 4}, true};
    for (std::size_t i = 0; i < 16; ++i) {
        p.vectors.row(i)[0] = 0.6f;
        p.vectors.row(i)[2] = 0.8f;
    }
    const auto m = merge_pool_2d(p, 4.0);
    ASSERT_EQ(m.num_vectors(), 4u);
    for (std::size_t i = 0; i < 4; ++i) expect_row_near(m.vectors.row(i), {0.6f, 0.0f, 0.8f}, 1e-7);
}

TEST(Pool2d, RaggedEdges) {
    std::mt19937_64 rng(4);
    const auto p = grid_page(rng, 3, 3);
    const auto m = merge_pool_2d(p, 4.0);
    ASSERT_EQ(m.num_vectors(), 4u);
    EXPECT_EQ(m.grid, (Grid{2, 2}));
    expect_row_near(m.vectors.row(0), mean_rows(p, {0, 1, 3, 4}));
    expect_row_near(m.vectors.row(1), mean_rows(p, {2, 5}));
    expect_row_near(m.vectors.row(2), mean_rows(p, {6, 7}));
    expect_row_near(m.vectors.row(3), mean_rows(p, {8}));
}

TEST(Pool2d, NeedsGrid) {
    std::mt19937_64 rng(5);
    EXPECT_THROW(merge_pool_2d(random_page(rng, 4, 3), 4.0), ValidationError);
}

TEST(MergeCluster, FactorOneIsIdentity) {
    std::mt19937_64 rng(6);
    const auto p = grid_page(rng, 4, 4);
    EXPECT_EQ(merge_cluster(p, 1.0, true), p);
    EXPECT_EQ(merge_cluster(p, 1.0, false), p);
}

TEST(MergeCluster, FullCollapseIsMean) {
    std::mt19937_64 rng(7);
    const auto p = random_page(rng, 12, 6);
    const auto m = merge_cluster(p, 12.0, false);
    ASSERT_EQ(m.num_vectors(), 1u);
    expect_row_near(m.vectors.row(0), mean_rows(p, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11}));
    EXPECT_FALSE(m.grid.has_value());
}

TEST(MergeCluster, DuplicateGroupsPreserveScores) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t groups = 2 + rng() % 8;
        const std::size_t n = groups * (2 + rng() % 6);
        const auto p = duplicate_groups(rng, n, groups, 16);
        const auto m = merge_cluster(p, double(n) / double(groups), true);
        ASSERT_EQ(m.num_vectors(), groups);
        std::set<std::vector<float>> distinct_in, distinct_out;
        for (std::size_t i = 0; i < n; ++i) distinct_in.emplace(p.vectors.row(i).begin(), p.vectors.row(i).end());
        for (std::size_t i = 0; i < groups; ++i) distinct_out.emplace(m.vectors.row(i).begin(), m.vectors.row(i).end());
        EXPECT_EQ(distinct_in.size(), groups);
        ASSERT_EQ(distinct_out.size(), groups);
        auto a = distinct_in.begin();
        for (auto b = distinct_out.begin(); b != distinct_out.end(); ++a, ++b) expect_row_near(*b, *a, 1e-6);
        for (int k = 0; k < 10; ++k) {
            const auto q = random_query(rng, 1 + rng() % 8, 16, true);
            EXPECT_NEAR(maxsim_score(q, m), maxsim_score(q, p), 1e-6);
        }
    }
}

TEST(MergeCluster, PermutationWithinEquivalenceClasses) {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = duplicate_groups(rng, 24, 4, 8);
        std::vector<std::size_t> perm(24);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        const PageEmbeddings shuffled{"dup", p.vectors.select_rows(perm), std::nullopt, true};
        auto as_set = [](const PageEmbeddings& m) {
            std::multiset<std::vector<float>> rows;
            for (std::size_t i = 0; i < m.num_vectors(); ++i) rows.emplace(m.vectors.row(i).begin(), m.vectors.row(i).end());
            return rows;
        };
        EXPECT_EQ(as_set(merge_cluster(p, 6.0)), as_set(merge_cluster(shuffled, 6.0)));
    }
}

TEST(Merging, OutputCountAndConvexHull) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 60; ++trial) {
        const auto rows = static_cast<std::uint16_t>(1 + rng() % 9), cols = static_cast<std::uint16_t>(1 + rng() % 9);
        const auto p = grid_page(rng, rows, cols, 5);
        const double factor = 1.0 + (rng() % 400) / 10.0;
        const std::size_t n = p.num_vectors();
        const auto m1 = merge_pool_1d(p, factor);
        const auto mc = merge_cluster(p, factor, false);
        EXPECT_EQ(m1.num_vectors(), merged_count(n, factor));
        EXPECT_EQ(mc.num_vectors(), merged_count(n, factor));
        const auto w = choose_window(*p.grid, factor);
        EXPECT_EQ(merge_pool_2d(p, factor).num_vectors(),
                  ((rows + w.rows - 1) / w.rows) * ((cols + w.cols - 1) / w.cols));
        // every coordinate of a mean lies within the member range, hence within the page range
        for (const auto* m : {&m1, &mc}) {
            for (std::size_t t = 0; t < 5; ++t) {
                float lo = INFINITY, hi = -INFINITY;
                for (std::size_t i = 0; i < n; ++i) {
                    lo = std::min(lo, p.vectors.row(i)[t]);
                    hi = std::max(hi, p.vectors.row(i)[t]);
                }
                for (std::size_t i = 0; i < m->num_vectors(); ++i) {
                    EXPECT_GE(m->vectors.row(i)[t], lo - 1e-6f);
                    EXPECT_LE(m->vectors.row(i)[t], hi + 1e-6f);
                }
            }
        }
        // cluster output rows are exactly the means of their clusters
        const auto assignment = hierarchical_cluster(p, mc.num_vectors());
        for (std::size_t c = 0; c < assignment.num_clusters; ++c) {
            std::vector<std::size_t> members;
            for (std::size_t i = 0; i < n; ++i) {
                if (assignment.labels[i] == c) members.push_back(i);
            }
            expect_row_near(mc.vectors.row(c), mean_rows(p, members));
        }
    }
}

TEST(Merging, RenormalizeRejectsCancellingMeans) {
    PageEmbeddings p{"p", Matrix(2, 2, {1, 0, -1, 0}), std::nullopt, true};
    EXPECT_THROW(merge_pool_1d(p, 2.0, true), ValidationError);
    EXPECT_NO_THROW(merge_pool_1d(p, 2.0, false));
}

TEST(MergeCorpus, DispatchAndDeterminism) {
    std::mt19937_64 rng(11);
    std::vector<PageEmbeddings> pages;
    for (int i = 0; i < 6; ++i) pages.push_back(grid_page(rng, 6, 6, 8));
    for (Strategy s : {Strategy::pool1d, Strategy::pool2d, Strategy::cluster}) {
        const auto one = merge_corpus(pages, MergeSpec{s, 9.0, true}, 1);
        EXPECT_EQ(merge_corpus(pages, MergeSpec{s, 9.0, true}, 4), one);
        for (const auto& m : one) EXPECT_EQ(m.num_vectors(), 4u);
    }
    EXPECT_THROW(merge_corpus(pages, MergeSpec{Strategy::random, 2.0, true}), ValidationError);
}

}  // namespace
}  // namespace mvec
