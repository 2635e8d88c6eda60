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
#include <vector>

#include "mvec/clustering.h"
#include "mvec/embeddings.h"

namespace mvec {

// approach must be one of pool1d, pool2d, cluster.
struct MergeSpec {
    Strategy approach = Strategy::cluster;
    double factor = 1.0;  // N_p / N_p'
    bool renormalize = true;
};

/// max(1, round_half_even(N_p / factor)). Throws ValidationError when factor < 1.
std::size_t merged_count(std::size_t num_vectors, double factor);

struct PoolWindow {
    std::size_t rows = 1;
    std::size_t cols = 1;
};

/// Window whose area is closest to factor, then most square, then taller. Never larger
/// than the grid in either direction.
PoolWindow choose_window(const Grid& grid, double factor);

/// Replaces each group of rows by its mean (optionally L2 renormalized). groups[c] lists
/// the member rows of output row c. Single-member groups are copied unchanged. Throws
/// ValidationError if a renormalized mean has norm below 1e-12.
Matrix mean_of_groups(const Matrix& vectors, const std::vector<std::vector<std::size_t>>& groups, bool renormalize);

/// Contiguous runs of near-equal length (longer runs first), one mean per run.
PageEmbeddings merge_pool_1d(const PageEmbeddings& page, double factor, bool renormalize = false);

/// Tiles the patch grid from the top-left with choose_window; ragged edge tiles keep the
/// remaining cells. Throws ValidationError when the page has no grid.
PageEmbeddings merge_pool_2d(const PageEmbeddings& page, double factor, bool renormalize = false);

/// Average-linkage clustering into merged_count(N_p, factor) clusters, one mean per
/// cluster in label order.
PageEmbeddings merge_cluster(const PageEmbeddings& page, double factor, bool renormalize = true);

/// Means per cluster of an existing assignment.
PageEmbeddings merge_by_assignment(const PageEmbeddings& page, const ClusterAssignment& assignment,
                                   bool renormalize);

std::vector<PageEmbeddings> merge_corpus(const std::vector<PageEmbeddings>& pages, const MergeSpec& spec,
                                         std::size_t threads = 1);

}  // namespace mvec
