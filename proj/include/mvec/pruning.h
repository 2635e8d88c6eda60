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
#include <span>
#include <string>
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

// strategy must be one of random, score_oriented, attention_oriented.
struct PruneSpec {
    Strategy strategy = Strategy::random;
    double ratio = 0.0;  // fraction of rows removed
    std::optional<std::uint64_t> seed;
};

/// N_p - round_half_even(ratio * N_p). Throws ValidationError when ratio is outside
/// [0, 1) or nothing would survive.
std::size_t retained_count(std::size_t num_vectors, double ratio);

/// Keeps a uniformly random subset (seeded, order preserved). Grid metadata is dropped
/// unless ratio is 0, which returns the page unchanged.
PageEmbeddings prune_random(const PageEmbeddings& page, double ratio, std::uint64_t seed);

/// Drops the round(ratio * N_p) rows with the lowest importance; equal importance drops
/// the lower index first. Survivors keep their original order.
PageEmbeddings prune_by_scores(const PageEmbeddings& page, std::span<const float> importance, double ratio);

// Side inputs for the guided strategies, keyed by page id.
struct PruneAux {
    std::map<std::string, std::vector<float>> attention;
    std::map<std::string, std::vector<QueryEmbeddings>> synth_queries;
};

/// Applies one strategy to every page. Random pruning derives an independent seed per page
/// from spec.seed (default 0) and the page position.
std::vector<PageEmbeddings> prune_corpus(const std::vector<PageEmbeddings>& pages, const PruneSpec& spec,
                                         const PruneAux& aux = {}, std::size_t threads = 1);

}  // namespace mvec
