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

#include "mvec/scoring.h"

#include <algorithm>
#include <limits>

#include "mvec/errors.h"
#include "mvec/matrix.h"
#include "mvec/parallel.h"

namespace mvec {

namespace {

void check_dims(const QueryEmbeddings& query, const PageEmbeddings& page) {
    if (query.dim() != page.dim()) {
        throw ValidationError("query '" + query.query_id + "' has d=" + std::to_string(query.dim()) + " but page '" +
                              page.page_id + "' has d=" + std::to_string(page.dim()));
    }
    if (query.num_tokens() == 0 || page.num_vectors() == 0) {
        throw ValidationError("cannot score empty embeddings");
    }
}

bool ranks_before(const Hit& a, const Hit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.page_id < b.page_id;
}

}  // namespace

CompressedIndex::CompressedIndex(Corpus corpus) : corpus_(std::move(corpus)) {
    if (corpus_.pages.empty()) throw ValidationError("cannot build an index over an empty corpus");
    validate_collection(corpus_.pages);
}

std::size_t CompressedIndex::total_vectors() const {
    std::size_t n = 0;
    for (const auto& p : corpus_.pages) n += p.num_vectors();
    return n;
}

std::vector<float> maxsim_token_scores(const QueryEmbeddings& query, const PageEmbeddings& page) {
    check_dims(query, page);
    std::vector<float> best(query.num_tokens(), -std::numeric_limits<float>::infinity());
    for (std::size_t j = 0; j < query.num_tokens(); ++j) {
        const auto token = query.vectors.row(j);
        float m = best[j];
        for (std::size_t i = 0; i < page.num_vectors(); ++i) {
            m = std::max(m, dot(page.vectors.row(i), token));
        }
        best[j] = m;
    }
    return best;
}

float maxsim_score(const QueryEmbeddings& query, const PageEmbeddings& page) {
    float total = 0.0f;
    for (float s : maxsim_token_scores(query, page)) total += s;
    return total;
}

RankedList retrieve_topk(const QueryEmbeddings& query, const CompressedIndex& index, std::size_t k,
                         std::size_t threads) {
    if (k == 0) throw ValidationError("k must be at least 1");
    const auto& pages = index.pages();
    std::vector<Hit> all(pages.size());
    parallel_for(pages.size(), threads, [&](std::size_t i) {
        all[i] = Hit{pages[i].page_id, maxsim_score(query, pages[i])};
    });
    const std::size_t keep = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), ranks_before);
    all.resize(keep);
    return RankedList{query.query_id, std::move(all)};
}

ResponsePotential response_potential(const PageEmbeddings& page, const QueryEmbeddings& query) {
    check_dims(query, page);
    ResponsePotential out{page.page_id, query.query_id, std::vector<float>(page.num_vectors())};
    for (std::size_t i = 0; i < page.num_vectors(); ++i) {
        const auto row = page.vectors.row(i);
        float m = -std::numeric_limits<float>::infinity();
        for (std::size_t j = 0; j < query.num_tokens(); ++j) {
            m = std::max(m, dot(row, query.vectors.row(j)));
        }
        out.values[i] = m;
    }
    return out;
}

std::vector<float> aggregate_potential(const PageEmbeddings& page, const std::vector<QueryEmbeddings>& queries) {
    if (queries.empty()) {
        throw ValidationError("page '" + page.page_id + "': aggregate potential needs at least one query");
    }
    std::vector<float> out = response_potential(page, queries.front()).values;
    for (std::size_t q = 1; q < queries.size(); ++q) {
        const auto r = response_potential(page, queries[q]).values;
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::max(out[i], r[i]);
    }
    return out;
}

}  // namespace mvec
