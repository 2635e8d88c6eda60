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
#include <utility>
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

struct ClusterAssignment {
    std::vector<std::size_t> labels;  // one per input row, in [0, num_clusters)
    std::size_t num_clusters = 0;

    bool operator==(const ClusterAssignment&) const = default;
};

// Merge history of average-linkage (UPGMA) agglomeration under cosine distance.
//
// A cluster is named by its smallest member index. Each step merges the active pair with
// the smallest mean pairwise distance; equal distances go to the lexicographically smallest
// (name_a, name_b) pair with name_a < name_b. Stopping after N - n merges yields the
// n-cluster partition, so one history serves every cut at or above its floor.
class Dendrogram {
 public:
    /// Agglomerates until min_clusters remain. Throws ValidationError on a zero-norm row
    /// or min_clusters outside [1, N].
    static Dendrogram build(const PageEmbeddings& page, std::size_t min_clusters = 1);

    std::size_t num_points() const { return num_points_; }
    std::size_t min_clusters() const { return num_points_ - merges_.size(); }
    /// (kept, absorbed) cluster names of each merge, kept < absorbed.
    const std::vector<std::pair<std::size_t, std::size_t>>& merges() const { return merges_; }

    /// Partition into n clusters, labelled by ascending smallest member index.
    ClusterAssignment cut(std::size_t n_clusters) const;

 private:
    std::size_t num_points_ = 0;
    std::vector<std::pair<std::size_t, std::size_t>> merges_;
};

/// Cosine distance (1 - cosine similarity) between every pair of rows, N x N row-major,
/// computed in double. Throws ValidationError on a zero-norm row.
std::vector<double> cosine_distances(const PageEmbeddings& page);

ClusterAssignment hierarchical_cluster(const PageEmbeddings& page, std::size_t n_clusters);

}  // namespace mvec
