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

#include "mvec/pruning.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mvec/errors.h"
#include "mvec/parallel.h"
#include "mvec/random.h"
#include "mvec/scoring.h"

namespace mvec {

std::size_t retained_count(std::size_t num_vectors, double ratio) {
    if (!(ratio >= 0.0 && ratio < 1.0)) {
        throw ValidationError("pruning ratio " + std::to_string(ratio) + " outside [0, 1)");
    }
    const long long dropped = round_half_even(ratio * static_cast<double>(num_vectors));
    const long long kept = static_cast<long long>(num_vectors) - dropped;
    if (kept < 1) {
        throw ValidationError("pruning ratio " + std::to_string(ratio) + " leaves no vectors out of " +
                              std::to_string(num_vectors));
    }
    return static_cast<std::size_t>(kept);
}

namespace {

PageEmbeddings keep_rows(const PageEmbeddings& page, const std::vector<std::size_t>& rows) {
    PageEmbeddings out;
    out.page_id = page.page_id;
    out.vectors = page.vectors.select_rows(rows);
    out.normalized = page.normalized;
    return out;
}

}  // namespace

PageEmbeddings prune_random(const PageEmbeddings& page, double ratio, std::uint64_t seed) {
    const std::size_t n = page.num_vectors();
    const std::size_t keep = retained_count(n, ratio);
    if (keep == n) return page;

    // Selection sampling: each k-subset is equally likely and survivors stay in order.
    Rng rng(seed);
    std::vector<std::size_t> rows;
    rows.reserve(keep);
    for (std::size_t i = 0; i < n && rows.size() < keep; ++i) {
        const std::size_t left = n - i;
        const std::size_t need = keep - rows.size();
        if (uniform_below(rng, left) < need) rows.push_back(i);
    }
    return keep_rows(page, rows);
}

PageEmbeddings prune_by_scores(const PageEmbeddings& page, std::span<const float> importance, double ratio) {
    const std::size_t n = page.num_vectors();
    if (importance.size() != n) {
        throw ValidationError("page '" + page.page_id + "': importance has " + std::to_string(importance.size()) +
                              " entries for " + std::to_string(n) + " vectors");
    }
    if (std::any_of(importance.begin(), importance.end(), [](float x) { return !std::isfinite(x); })) {
        throw ValidationError("page '" + page.page_id + "': non-finite importance");
    }
    const std::size_t keep = retained_count(n, ratio);
    if (keep == n) return page;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return importance[a] < importance[b]; });
    std::vector<std::size_t> rows(order.begin() + static_cast<std::ptrdiff_t>(n - keep), order.end());
    std::sort(rows.begin(), rows.end());
    return keep_rows(page, rows);
}

std::vector<PageEmbeddings> prune_corpus(const std::vector<PageEmbeddings>& pages, const PruneSpec& spec,
                                         const PruneAux& aux, std::size_t threads) {
    std::vector<PageEmbeddings> out(pages.size());
    const std::uint64_t seed = spec.seed.value_or(0);
    parallel_for(pages.size(), threads, [&](std::size_t i) {
        const auto& page = pages[i];
        switch (spec.strategy) {
            case Strategy::random:
                out[i] = prune_random(page, spec.ratio, derive_seed(seed, i));
                break;
            case Strategy::score_oriented: {
                auto it = aux.synth_queries.find(page.page_id);
                if (it == aux.synth_queries.end() || it->second.empty()) {
                    throw ValidationError("page '" + page.page_id + "' has no synthesized queries");
                }
                out[i] = prune_by_scores(page, aggregate_potential(page, it->second), spec.ratio);
                break;
            }
            case Strategy::attention_oriented: {
                auto it = aux.attention.find(page.page_id);
                if (it == aux.attention.end()) {
                    throw ValidationError("page '" + page.page_id + "' has no attention vector");
                }
                out[i] = prune_by_scores(page, it->second, spec.ratio);
                break;
            }
            default:
                throw ValidationError(std::string("'") + std::string(to_string(spec.strategy)) +
                                      "' is not a pruning strategy");
        }
    });
    return out;
}

}  // namespace mvec
