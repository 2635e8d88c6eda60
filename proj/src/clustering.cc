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

#include "mvec/clustering.h"

#include <cmath>
#include <limits>
#include <numeric>

#include "mvec/errors.h"

namespace mvec {

std::vector<double> cosine_distances(const PageEmbeddings& page) {
    const std::size_t n = page.num_vectors();
    const std::size_t d = page.dim();
    std::vector<double> norms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double sq = squared_norm(page.vectors.row(i));
        if (sq == 0.0) {
            throw ValidationError("page '" + page.page_id + "': row " + std::to_string(i) +
                                  " has zero norm, cosine distance undefined");
        }
        norms[i] = std::sqrt(sq);
    }
    std::vector<double> dist(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto a = page.vectors.row(i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const auto b = page.vectors.row(j);
            double acc = 0.0;
            for (std::size_t t = 0; t < d; ++t) acc += static_cast<double>(a[t]) * static_cast<double>(b[t]);
            const double v = 1.0 - acc / (norms[i] * norms[j]);
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    return dist;
}

namespace {

// Total order on candidate merges: distance, then cluster names.
struct PairKey {
    double dist;
    std::size_t lo;
    std::size_t hi;

    bool operator<(const PairKey& o) const {
        if (dist != o.dist) return dist < o.dist;
        if (lo != o.lo) return lo < o.lo;
        return hi < o.hi;
    }
};

class Agglomerator {
 public:
    Agglomerator(std::vector<double> sums, std::size_t n)
        : n_(n), sums_(std::move(sums)), size_(n, 1), active_(n, true), nn_(n, 0), nn_key_(n) {
        for (std::size_t a = 0; a < n_; ++a) rescan(a);
    }

    std::pair<std::size_t, std::size_t> merge_next() {
        std::size_t best = n_;
        for (std::size_t a = 0; a < n_; ++a) {
            if (!active_[a]) continue;
            if (best == n_ || nn_key_[a] < nn_key_[best]) best = a;
        }
        const std::size_t a = nn_key_[best].lo;
        const std::size_t b = nn_key_[best].hi;

        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k] || k == a || k == b) continue;
            const double s = sums_[a * n_ + k] + sums_[b * n_ + k];
            sums_[a * n_ + k] = s;
            sums_[k * n_ + a] = s;
        }
        size_[a] += size_[b];
        active_[b] = false;

        rescan(a);
        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k] || k == a) continue;
            if (nn_[k] == a || nn_[k] == b) {
                rescan(k);
            } else {
                const PairKey cand = key(k, a);
                if (cand < nn_key_[k]) {
                    nn_[k] = a;
                    nn_key_[k] = cand;
                }
            }
        }
        return {a, b};
    }

 private:
    PairKey key(std::size_t a, std::size_t b) const {
        const double avg = sums_[a * n_ + b] / (static_cast<double>(size_[a]) * static_cast<double>(size_[b]));
        return PairKey{avg, std::min(a, b), std::max(a, b)};
    }

    void rescan(std::size_t a) {
        bool found = false;
        for (std::size_t k = 0; k < n_; ++k) {
            if (!active_[k] || k == a) continue;
            const PairKey cand = key(a, k);
            if (!found || cand < nn_key_[a]) {
                nn_[a] = k;
                nn_key_[a] = cand;
                found = true;
            }
        }
        if (!found) nn_key_[a] = PairKey{std::numeric_limits<double>::infinity(), a, a};
    }

    std::size_t n_;
    std::vector<double> sums_;  // summed pairwise distance between clusters
    std::vector<std::size_t> size_;
    std::vector<bool> active_;
    std::vector<std::size_t> nn_;
    std::vector<PairKey> nn_key_;
};

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
    while (parent[x] != x) {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    return x;
}

}  // namespace

Dendrogram Dendrogram::build(const PageEmbeddings& page, std::size_t min_clusters) {
    const std::size_t n = page.num_vectors();
    if (min_clusters < 1 || min_clusters > n) {
        throw ValidationError("page '" + page.page_id + "': cluster count " + std::to_string(min_clusters) +
                              " outside [1, " + std::to_string(n) + "]");
    }
    Dendrogram out;
    out.num_points_ = n;
    if (min_clusters == n) return out;

    Agglomerator agg(cosine_distances(page), n);
    out.merges_.reserve(n - min_clusters);
    for (std::size_t step = 0; step < n - min_clusters; ++step) {
        out.merges_.push_back(agg.merge_next());
    }
    return out;
}

ClusterAssignment Dendrogram::cut(std::size_t n_clusters) const {
    if (n_clusters < min_clusters() || n_clusters > num_points_) {
        throw ValidationError("cannot cut a dendrogram of " + std::to_string(num_points_) + " points into " +
                              std::to_string(n_clusters) + " clusters");
    }
    std::vector<std::size_t> parent(num_points_);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    for (std::size_t m = 0; m < num_points_ - n_clusters; ++m) {
        parent[merges_[m].second] = merges_[m].first;
    }
    ClusterAssignment out;
    out.labels.resize(num_points_);
    std::vector<std::size_t> label_of(num_points_, num_points_);
    for (std::size_t i = 0; i < num_points_; ++i) {
        const std::size_t root = find_root(parent, i);
        if (label_of[root] == num_points_) label_of[root] = out.num_clusters++;
        out.labels[i] = label_of[root];
    }
    return out;
}

ClusterAssignment hierarchical_cluster(const PageEmbeddings& page, std::size_t n_clusters) {
    return Dendrogram::build(page, n_clusters).cut(n_clusters);
}

}  // namespace mvec
