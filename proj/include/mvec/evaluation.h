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
#include <variant>
#include <vector>

#include <json.hpp>

#include "mvec/embeddings.h"
#include "mvec/merging.h"
#include "mvec/pruning.h"
#include "mvec/scoring.h"

namespace mvec {

/// NDCG@k with gain 2^rel - 1 and discount log2(rank + 1). Unjudged pages count as rel 0.
/// Throws ValidationError when k is 0 or the query has no judgments; returns 0 when
/// the query has no positive judgment.
double ndcg_at_k(const RankedList& ranking, const Qrels& qrels, std::size_t k);

using CompressionSpec = std::variant<PruneSpec, MergeSpec>;

Strategy strategy_of(const CompressionSpec& spec);
double parameter_of(const CompressionSpec& spec);

std::vector<PageEmbeddings> compress(const std::vector<PageEmbeddings>& pages, const CompressionSpec& spec,
                                     const PruneAux& aux = {}, std::size_t threads = 1);

struct SweepPoint {
    Strategy strategy = Strategy::random;
    double parameter = 0.0;
    double mean_ndcg = 0.0;
    double relative_performance = 0.0;  // mean_ndcg / uncompressed mean_ndcg
    double memory_ratio = 0.0;          // payload / uncompressed payload
    std::uint64_t memory_bytes = 0;
};

struct EvalReport {
    std::size_t k = 5;
    std::map<std::string, double> per_query;
    double mean_ndcg = 0.0;
    std::optional<double> relative_performance;
    std::uint64_t memory_bytes = 0;  // payload at the index dtype
    std::optional<double> memory_ratio;
    std::optional<Provenance> provenance;
    std::vector<SweepPoint> sweep;
};

/// Retrieves the top k for every query and scores it against qrels.
EvalReport evaluate(const CompressedIndex& index, const std::vector<QueryEmbeddings>& queries, const Qrels& qrels,
                    std::size_t k, std::size_t threads = 1);

/// Fills relative_performance and memory_ratio against a previously computed report.
void compare_to_baseline(EvalReport& report, const EvalReport& baseline);

/// Evaluates the uncompressed corpus, then each point after compressing every page.
EvalReport run_sweep(const Corpus& corpus, const std::vector<QueryEmbeddings>& queries, const Qrels& qrels,
                     const std::vector<CompressionSpec>& points, std::size_t k, const PruneAux& aux = {},
                     std::size_t threads = 1);

nlohmann::json to_json(const EvalReport& report);
EvalReport report_from_json(const nlohmann::json& j);

}  // namespace mvec
