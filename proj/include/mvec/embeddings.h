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

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mvec/matrix.h"

namespace mvec {

// 2D patch layout of a page. rows * cols must equal the page's vector count.
struct Grid {
    std::uint16_t rows = 0;
    std::uint16_t cols = 0;

    std::size_t cells() const { return std::size_t{rows} * cols; }
    bool operator==(const Grid&) const = default;
};

struct PageEmbeddings {
    std::string page_id;
    Matrix vectors;
    std::optional<Grid> grid;
    bool normalized = false;

    std::size_t num_vectors() const { return vectors.rows(); }
    std::size_t dim() const { return vectors.cols(); }
    bool operator==(const PageEmbeddings&) const = default;
};

struct QueryEmbeddings {
    std::string query_id;
    Matrix vectors;
    bool normalized = false;

    std::size_t num_tokens() const { return vectors.rows(); }
    std::size_t dim() const { return vectors.cols(); }
    bool operator==(const QueryEmbeddings&) const = default;
};

// Per-page side data used by the guided pruning strategies.
struct PageAux {
    std::string page_id;
    std::optional<std::vector<float>> attention;
    std::optional<std::vector<QueryEmbeddings>> synth_queries;
};

enum class Dtype : std::uint8_t { f32 = 0, f16 = 1 };

std::size_t bytes_per_element(Dtype dtype);
std::string_view to_string(Dtype dtype);
Dtype parse_dtype(std::string_view name);

enum class Strategy { random, score_oriented, attention_oriented, pool1d, pool2d, cluster };

std::string_view to_string(Strategy strategy);
Strategy parse_strategy(std::string_view name);

// How a stored corpus was derived from its uncompressed source.
struct Provenance {
    Strategy strategy = Strategy::random;
    double parameter = 0.0;
    std::optional<std::uint64_t> seed;

    bool operator==(const Provenance&) const = default;
};

struct CorpusManifest {
    std::string corpus_id;
    std::size_t d = 0;
    std::size_t page_count = 0;
    Dtype dtype = Dtype::f32;
    std::optional<Provenance> provenance;

    bool operator==(const CorpusManifest&) const = default;
};

struct Corpus {
    CorpusManifest manifest;
    std::vector<PageEmbeddings> pages;
};

// Graded relevance judgments, keyed by query then page.
class Qrels {
 public:
    /// Throws ValidationError on a duplicate (query_id, page_id) pair.
    void add(const std::string& query_id, const std::string& page_id, int relevance);

    bool contains(const std::string& query_id) const { return judgments_.count(query_id) != 0; }
    /// Judgments of one query; throws ValidationError when the query is absent.
    const std::map<std::string, int>& judgments(const std::string& query_id) const;
    int relevance(const std::string& query_id, const std::string& page_id) const;

    std::size_t size() const;
    const std::map<std::string, std::map<std::string, int>>& all() const { return judgments_; }

 private:
    std::map<std::string, std::map<std::string, int>> judgments_;
};

// Tolerance on row norms for data flagged as normalized.
inline constexpr double kNormTolerance = 1e-4;

void validate(const PageEmbeddings& page);
void validate(const QueryEmbeddings& query);

/// Checks per-page invariants plus a uniform dimension across pages.
void validate_collection(const std::vector<PageEmbeddings>& pages);

/// Splits a synthesized-query record id "page#k" into (page, k).
std::pair<std::string, std::size_t> split_synth_id(std::string_view id);

/// Round-half-to-even to an integer count.
long long round_half_even(double value);

}  // namespace mvec
