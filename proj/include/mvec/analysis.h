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
#include <span>
#include <utility>
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

/// ceil(top_percent / 100 * n), at least 1. Throws ValidationError unless 0 < top_percent <= 100.
std::size_t activated_count(std::size_t n, double top_percent);

/// Indices (ascending) of the highest-potential entries; ties keep the lower index.
std::vector<std::size_t> activated_from_potential(std::span<const float> potential, double top_percent);
std::vector<std::size_t> activated_patches(const PageEmbeddings& page, const QueryEmbeddings& query,
                                           double top_percent);

/// |A1 ∩ A2| / |A1| for the activated sets of two potential vectors of equal length.
double overlap_of_potentials(std::span<const float> first, std::span<const float> second, double top_percent);
double pairwise_overlap(const PageEmbeddings& page, const QueryEmbeddings& first, const QueryEmbeddings& second,
                        double top_percent);

/// Min-max normalization to [0, 1]; a constant vector maps to all zeros. Needs n >= 2.
std::vector<double> normalize_potential(std::span<const float> potential);
std::vector<double> normalized_potential(const PageEmbeddings& page, const QueryEmbeddings& query);

struct OverlapPoint {
    double prune_ratio = 0.0;
    double mean_overlap = 0.0;
    double random_overlap = 0.0;  // 1 - prune_ratio
    std::size_t pairs = 0;
};

struct OverlapCurve {
    std::vector<OverlapPoint> points;  // ascending prune_ratio
};

using PageQueries = std::pair<const PageEmbeddings*, std::vector<const QueryEmbeddings*>>;

/// Mean overlap over every unordered query pair of every page, retaining the top
/// (1 - ratio) fraction of patches. Pages with fewer than two queries are skipped.
OverlapCurve overlap_curve(const std::vector<PageQueries>& pages, std::vector<double> prune_ratios,
                           std::size_t threads = 1);

struct RedundancyStats {
    std::map<double, double> mean_count_above;  // threshold -> mean |{i : r_norm_i > threshold}|
    std::vector<std::uint64_t> histogram;       // equal-width bins over [0, 1]
    std::size_t pairs = 0;
};

RedundancyStats redundancy_stats(const std::vector<std::pair<const PageEmbeddings*, const QueryEmbeddings*>>& pairs,
                                 const std::vector<double>& thresholds, std::size_t bins = 20,
                                 std::size_t threads = 1);

}  // namespace mvec
