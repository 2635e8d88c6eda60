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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

struct Hit {
    std::string page_id;
    float score = 0.0f;

    bool operator==(const Hit&) const = default;
};

// Retrieval result: hits sorted by descending score, ties by ascending page_id.
struct RankedList {
    std::string query_id;
    std::vector<Hit> hits;
};

struct ResponsePotential {
    std::string page_id;
    std::string query_id;
    std::vector<float> values;  // one entry per page vector
};

// Immutable searchable corpus. Holds the (possibly compressed) pages and their manifest.
class CompressedIndex {
 public:
    /// Throws ValidationError when the corpus is empty or pages disagree on d.
    explicit CompressedIndex(Corpus corpus);

    const std::vector<PageEmbeddings>& pages() const { return corpus_.pages; }
    const CorpusManifest& manifest() const { return corpus_.manifest; }
    std::size_t dim() const { return corpus_.pages.front().dim(); }
    std::size_t size() const { return corpus_.pages.size(); }
    std::size_t total_vectors() const;

 private:
    Corpus corpus_;
};

/// Late-interaction relevance: sum over query tokens (ascending) of the best dot product
/// against any page vector. Accumulates in float. Throws ValidationError on a d mismatch.
float maxsim_score(const QueryEmbeddings& query, const PageEmbeddings& page);

/// Per-token contributions whose ordered float sum is maxsim_score.
std::vector<float> maxsim_token_scores(const QueryEmbeddings& query, const PageEmbeddings& page);

/// Scores every page (in parallel when threads > 1) and keeps the best min(k, size) hits.
RankedList retrieve_topk(const QueryEmbeddings& query, const CompressedIndex& index, std::size_t k,
                         std::size_t threads = 1);

/// values[i] = max over query tokens of <page row i, token>.
ResponsePotential response_potential(const PageEmbeddings& page, const QueryEmbeddings& query);

/// Element-wise max of response_potential over a set of queries. Throws on an empty set.
std::vector<float> aggregate_potential(const PageEmbeddings& page, const std::vector<QueryEmbeddings>& queries);

}  // namespace mvec
