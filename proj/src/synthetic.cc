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

#include "mvec/synthetic.h"

#include <cmath>
#include <cstdio>
#include <numeric>

#include "mvec/errors.h"
#include "mvec/random.h"

namespace mvec {

namespace {

std::vector<double> gaussian_vector(Rng& rng, std::size_t d) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> v(d);
    for (auto& x : v) x = normal(rng);
    return v;
}

void write_unit(std::span<float> dst, const std::vector<double>& v) {
    double sq = 0.0;
    for (double x : v) sq += x * x;
    const double inv = 1.0 / std::sqrt(sq);
    for (std::size_t t = 0; t < v.size(); ++t) dst[t] = static_cast<float>(v[t] * inv);
}

// Noisy unit copy of a unit topic vector.
void perturb_into(std::span<float> dst, std::span<const float> topic, double noise, Rng& rng) {
    auto v = gaussian_vector(rng, topic.size());
    const double scale = noise / std::sqrt(static_cast<double>(topic.size()));
    for (std::size_t t = 0; t < v.size(); ++t) v[t] = topic[t] + scale * v[t];
    write_unit(dst, v);
}

// k distinct values from [0, n), in draw order.
std::vector<std::size_t> sample_distinct(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, n - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
}

std::string numbered(const char* prefix, std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%05zu", prefix, i);
    return buf;
}

struct PagePlan {
    std::vector<std::size_t> topics;   // per group
    std::vector<double> weights;       // per group
    std::vector<std::size_t> group_of; // per patch
};

QueryEmbeddings make_query(std::string id, const PagePlan& plan, const Matrix& topics, const SyntheticSpec& spec,
                           Rng& rng) {
    const std::size_t tokens = std::min(spec.tokens_per_query, plan.topics.size());
    const auto groups = sample_distinct(rng, plan.topics.size(), tokens);
    QueryEmbeddings q{std::move(id), Matrix(tokens, spec.d), true};
    for (std::size_t t = 0; t < tokens; ++t) {
        perturb_into(q.vectors.row(t), topics.row(plan.topics[groups[t]]), spec.query_noise, rng);
    }
    return q;
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    const std::size_t n = std::size_t{spec.grid_rows} * spec.grid_cols;
    if (spec.pages == 0 || n == 0 || spec.d == 0) throw ValidationError("synthetic corpus needs pages, patches and d");
    if (spec.groups_per_page == 0 || spec.groups_per_page > n || spec.groups_per_page > spec.topics) {
        throw ValidationError("groups_per_page must be in [1, min(patches, topics)]");
    }
    if (spec.tokens_per_query == 0) throw ValidationError("tokens_per_query must be at least 1");

    Rng rng(spec.seed);
    Matrix topics(spec.topics, spec.d);
    for (std::size_t t = 0; t < spec.topics; ++t) write_unit(topics.row(t), gaussian_vector(rng, spec.d));

    SyntheticData data;
    std::vector<PagePlan> plans(spec.pages);
    for (std::size_t p = 0; p < spec.pages; ++p) {
        PagePlan& plan = plans[p];
        plan.topics = sample_distinct(rng, spec.topics, spec.groups_per_page);
        plan.weights.resize(spec.groups_per_page);
        for (auto& w : plan.weights) w = std::exp(2.0 * uniform_unit(rng));
        const double total = std::accumulate(plan.weights.begin(), plan.weights.end(), 0.0);

        // every group owns at least one patch; the rest follow the weights
        plan.group_of.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            if (i < spec.groups_per_page) {
                plan.group_of[i] = i;
                continue;
            }
            double u = uniform_unit(rng) * total;
            std::size_t g = 0;
            while (g + 1 < plan.weights.size() && u >= plan.weights[g]) u -= plan.weights[g++];
            plan.group_of[i] = g;
        }
        for (std::size_t i = n; i > 1; --i) {
            std::swap(plan.group_of[i - 1], plan.group_of[static_cast<std::size_t>(uniform_below(rng, i))]);
        }

        PageEmbeddings page{numbered("page_", p), Matrix(n, spec.d), Grid{spec.grid_rows, spec.grid_cols}, true};
        std::vector<float> attention(n);
        for (std::size_t i = 0; i < n; ++i) {
            const auto topic = topics.row(plan.topics[plan.group_of[i]]);
            if (spec.duplicates) {
                std::copy(topic.begin(), topic.end(), page.vectors.row(i).begin());
            } else {
                perturb_into(page.vectors.row(i), topic, spec.patch_noise, rng);
            }
            attention[i] = static_cast<float>(plan.weights[plan.group_of[i]] * (0.5 + uniform_unit(rng)));
        }
        data.attention.emplace(page.page_id, std::move(attention));
        data.pages.push_back(std::move(page));
    }

    for (std::size_t i = 0; i < spec.queries; ++i) {
        const std::size_t target = i % spec.pages;
        auto q = make_query(numbered("query_", i), plans[target], topics, spec, rng);
        data.qrels.add(q.query_id, data.pages[target].page_id, 1);
        data.queries.push_back(std::move(q));
    }
    for (std::size_t p = 0; p < spec.pages; ++p) {
        auto& list = data.synth_queries[data.pages[p].page_id];
        for (std::size_t k = 0; k < spec.synth_per_page; ++k) {
            list.push_back(make_query(data.pages[p].page_id + "#" + std::to_string(k), plans[p], topics, spec, rng));
        }
    }
    return data;
}

}  // namespace mvec
