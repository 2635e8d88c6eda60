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

#include "mvec/analysis.h"
#include "mvec/errors.h"
#include "mvec/scoring.h"
#include "mvec/synthetic.h"
#include "test_util.h"

namespace mvec {
namespace {

using testing::random_page;
using testing::random_query;

std::vector<std::size_t> sort_oracle(const std::vector<float>& potential, std::size_t count) {
    std::vector<std::size_t> order(potential.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return potential[a] > potential[b]; });
    order.resize(count);
    std::sort(order.begin(), order.end());
    return order;
}

TEST(ActivatedPatches, Examples) {
    std::mt19937_64 rng(1);
    const auto p = random_page(rng, 10, 4);
    const auto q = random_query(rng, 2, 4);
    std::vector<std::size_t> all(10);
    std::iota(all.begin(), all.end(), std::size_t{0});
    EXPECT_EQ(activated_patches(p, q, 100.0), all);

    const auto r = response_potential(p, q).values;
    const auto argmax = static_cast<std::size_t>(std::max_element(r.begin(), r.end()) - r.begin());
    EXPECT_EQ(activated_patches(p, q, 10.0), std::vector<std::size_t>{argmax});

    EXPECT_EQ(activated_count(10, 25.0), 3u);
    EXPECT_EQ(activated_count(768, 10.0), 77u);
    EXPECT_EQ(activated_count(100, 30.0), 30u);  // no spill over from floating point
    EXPECT_THROW(activated_count(10, 0.0), ValidationError);
    EXPECT_THROW(activated_count(10, 100.5), ValidationError);
}

TEST(ActivatedPatches, MatchesSortOracleAndNests) {
    std::mt19937_64 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 60;
        auto potential = testing::random_values(rng, n);
        if (trial % 3 == 0) {
            for (auto& v : potential) v = std::round(v * 3.0f);  // plenty of ties
        }
        const double k1 = 1.0 + (rng() % 990) / 10.0;
        const double k2 = std::min(100.0, k1 + (rng() % 400) / 10.0);
        const auto a1 = activated_from_potential(potential, k1);
        const auto a2 = activated_from_potential(potential, k2);
        EXPECT_EQ(a1, sort_oracle(potential, activated_count(n, k1)));
        EXPECT_TRUE(std::includes(a2.begin(), a2.end(), a1.begin(), a1.end()));
    }
}

TEST(PairwiseOverlap, Examples) {
    std::mt19937_64 rng(3);
    const auto p = random_page(rng, 20, 6);
    const auto q = random_query(rng, 3, 6);
    EXPECT_EQ(pairwise_overlap(p, q, q, 10.0), 1.0);

    std::vector<float> first(20, 0.0f), second(20, 0.0f);
    first[0] = first[1] = 1.0f;
    second[5] = second[6] = 1.0f;
    EXPECT_EQ(overlap_of_potentials(first, second, 10.0), 0.0);
    EXPECT_THROW(overlap_of_potentials(first, std::vector<float>(19), 10.0), ValidationError);
}

TEST(PairwiseOverlap, SymmetricInQueries) {
    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_page(rng, 30, 8);
        const auto q1 = random_query(rng, 3, 8), q2 = random_query(rng, 4, 8);
        const double k = 1.0 + (rng() % 99);
        EXPECT_EQ(pairwise_overlap(p, q1, q2, k), pairwise_overlap(p, q2, q1, k));
    }
}

TEST(PairwiseOverlap, RandomPotentialsMatchChance) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<float> u(0.0f, 1.0f);
    for (double k : {10.0, 30.0, 50.0, 80.0}) {
        double sum = 0.0;
        const int trials = 10000;
        std::vector<float> a(100), b(100);
        for (int t = 0; t < trials; ++t) {
            for (auto& x : a) x = u(rng);
            for (auto& x : b) x = u(rng);
            sum += overlap_of_potentials(a, b, k);
        }
        EXPECT_NEAR(sum / trials, k / 100.0, 0.01) << "top " << k << "%";
    }
}

TEST(NormalizedPotential, Examples) {
    EXPECT_EQ(normalize_potential(std::vector<float>{1, 3, 5}), (std::vector<double>{0.0, 0.5, 1.0}));
    EXPECT_EQ(normalize_potential(std::vector<float>{2, 2, 2}), (std::vector<double>{0.0, 0.0, 0.0}));
    EXPECT_THROW(normalize_potential(std::vector<float>{1}), ValidationError);

    std::mt19937_64 rng(6);
    const auto p = random_page(rng, 15, 5);
    const auto q = random_query(rng, 2, 5);
    const auto r = response_potential(p, q).values;
    const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
    const auto norm = normalized_potential(p, q);
    for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(norm[i], (r[i] - lo) / (hi - lo), 1e-9);
}

TEST(NormalizedPotential, AffineInvariant) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto r = testing::random_values(rng, 25);
        const float a = std::ldexp(1.0f, static_cast<int>(rng() % 5));  // exact scaling
        const float b = static_cast<float>(static_cast<int>(rng() % 7) - 3) * 0.5f;
        std::vector<float> t(r.size());
        std::transform(r.begin(), r.end(), t.begin(), [&](float x) { return a * x + b; });
        const auto n1 = normalize_potential(r), n2 = normalize_potential(t);
        for (std::size_t i = 0; i < r.size(); ++i) EXPECT_NEAR(n1[i], n2[i], 1e-6);
    }
}

TEST(RedundancyStats, StrictThresholds) {
    // a min-max normalized vector always contains 1, so the max patch sits beside {0, 0.92, 0.96}
    PageEmbeddings p{"p", Matrix(4, 1, {0.0f, 0.92f, 0.96f, 1.0f}), std::nullopt, false};
    QueryEmbeddings q{"q", Matrix(1, 1, {1.0f}), true};
    const auto stats = redundancy_stats({{&p, &q}}, {0.9, 0.95, 1.0});
    EXPECT_EQ(stats.mean_count_above.at(0.9), 3.0);
    EXPECT_EQ(stats.mean_count_above.at(0.95), 2.0);
    EXPECT_EQ(stats.mean_count_above.at(1.0), 0.0);
    EXPECT_EQ(stats.pairs, 1u);

    EXPECT_TRUE(redundancy_stats({{&p, &q}}, {}).mean_count_above.empty());
}

TEST(RedundancyStats, MatchesRecountOnSyntheticPages) {
    SyntheticSpec spec;
    spec.pages = 100;
    spec.seed = 8;
    const auto data = generate_synthetic(spec);
    std::vector<std::pair<const PageEmbeddings*, const QueryEmbeddings*>> pairs;
    for (const auto& page : data.pages) {
        for (const auto& q : data.synth_queries.at(page.page_id)) pairs.emplace_back(&page, &q);
    }
    const std::vector<double> thresholds{0.5, 0.9, 0.95};
    const auto stats = redundancy_stats(pairs, thresholds, 10, 3);
    EXPECT_EQ(stats.pairs, pairs.size());
    std::map<double, double> recount;
    std::vector<std::uint64_t> hist(10, 0);
    for (const auto& [p, q] : pairs) {
        const auto r = response_potential(*p, *q).values;
        const double lo = *std::min_element(r.begin(), r.end()), hi = *std::max_element(r.begin(), r.end());
        for (float v : r) {
            const double norm = hi > lo ? (v - lo) / (hi - lo) : 0.0;
            for (double t : thresholds) recount[t] += norm > t ? 1.0 : 0.0;
            ++hist[std::min<std::size_t>(9, static_cast<std::size_t>(norm * 10))];
        }
    }
    for (double t : thresholds) EXPECT_NEAR(stats.mean_count_above.at(t), recount[t] / pairs.size(), 1e-9);
    EXPECT_EQ(stats.histogram, hist);
    EXPECT_EQ(std::accumulate(hist.begin(), hist.end(), std::uint64_t{0}), pairs.size() * 64);
}

TEST(OverlapCurve, PointsAndBaseline) {
    SyntheticSpec spec;
    spec.pages = 30;
    spec.seed = 9;
    const auto data = generate_synthetic(spec);
    std::vector<PageQueries> pages;
    for (const auto& page : data.pages) {
        std::vector<const QueryEmbeddings*> qs;
        for (const auto& q : data.synth_queries.at(page.page_id)) qs.push_back(&q);
        pages.emplace_back(&page, qs);
    }
    const auto curve = overlap_curve(pages, {0.9, 0.1, 0.5}, 1);
    ASSERT_EQ(curve.points.size(), 3u);
    EXPECT_EQ(curve.points[0].prune_ratio, 0.1);
    EXPECT_EQ(curve.points[2].prune_ratio, 0.9);
    for (const auto& pt : curve.points) {
        EXPECT_DOUBLE_EQ(pt.random_overlap, 1.0 - pt.prune_ratio);
        EXPECT_GE(pt.mean_overlap, 0.0);
        EXPECT_LE(pt.mean_overlap, 1.0);
        EXPECT_EQ(pt.pairs, 30u * 3u);
    }
    // oracle for one point
    double sum = 0.0;
    for (const auto& [page, qs] : pages) {
        for (std::size_t a = 0; a < qs.size(); ++a) {
            for (std::size_t b = a + 1; b < qs.size(); ++b) sum += pairwise_overlap(*page, *qs[a], *qs[b], 50.0);
        }
    }
    EXPECT_NEAR(curve.points[1].mean_overlap, sum / 90.0, 1e-12);
    const auto threaded = overlap_curve(pages, {0.9, 0.1, 0.5}, 4);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(threaded.points[i].mean_overlap, curve.points[i].mean_overlap);
}

}  // namespace
}  // namespace mvec
