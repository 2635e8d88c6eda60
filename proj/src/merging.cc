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

#include "mvec/merging.h"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <tuple>

#include "mvec/errors.h"
#include "mvec/parallel.h"

namespace mvec {

namespace {

constexpr double kMinRenormNorm = 1e-12;

void check_factor(double factor) {
    if (!(factor >= 1.0) || !std::isfinite(factor)) {
        throw ValidationError("merging factor " + std::to_string(factor) + " must be a finite value >= 1");
    }
}

PageEmbeddings assemble(const PageEmbeddings& page, const std::vector<std::vector<std::size_t>>& groups,
                        bool renormalize, std::optional<Grid> grid) {
    PageEmbeddings out;
    out.page_id = page.page_id;
    out.vectors = mean_of_groups(page.vectors, groups, renormalize);
    bool singletons = true;
    bool any_singleton = false;
    for (const auto& g : groups) {
        singletons = singletons && g.size() == 1;
        any_singleton = any_singleton || g.size() == 1;
    }
    out.normalized = (renormalize || singletons) && (!any_singleton || page.normalized);
    // an identity partition keeps the original layout
    out.grid = groups.size() == page.num_vectors() && singletons ? page.grid : grid;
    return out;
}

}  // namespace

std::size_t merged_count(std::size_t num_vectors, double factor) {
    check_factor(factor);
    const long long n = round_half_even(static_cast<double>(num_vectors) / factor);
    return static_cast<std::size_t>(std::max(1LL, n));
}

PoolWindow choose_window(const Grid& grid, double factor) {
    check_factor(factor);
    PoolWindow best;
    auto score = [&](std::size_t r, std::size_t c) {
        const double area_gap = std::abs(static_cast<double>(r * c) - factor);
        const std::size_t skew = r > c ? r - c : c - r;
        return std::make_tuple(area_gap, skew, -static_cast<long long>(r));
    };
    auto best_score = score(1, 1);
    for (std::size_t r = 1; r <= grid.rows; ++r) {
        for (std::size_t c = 1; c <= grid.cols; ++c) {
            const auto s = score(r, c);
            if (s < best_score) {
                best_score = s;
                best = PoolWindow{r, c};
            }
        }
    }
    return best;
}

Matrix mean_of_groups(const Matrix& vectors, const std::vector<std::vector<std::size_t>>& groups, bool renormalize) {
    const std::size_t d = vectors.cols();
    Matrix out(groups.size(), d);
    std::vector<double> acc(d);
    for (std::size_t c = 0; c < groups.size(); ++c) {
        if (groups[c].size() == 1) {
            // a lone member is an original embedding and is copied verbatim
            const auto src = vectors.row(groups[c].front());
            std::copy(src.begin(), src.end(), out.row(c).begin());
            continue;
        }
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t member : groups[c]) {
            const auto row = vectors.row(member);
            for (std::size_t t = 0; t < d; ++t) acc[t] += row[t];
        }
        const double count = static_cast<double>(groups[c].size());
        double sq = 0.0;
        for (auto& v : acc) {
            v /= count;
            sq += v * v;
        }
        double scale = 1.0;
        if (renormalize) {
            const double norm = std::sqrt(sq);
            if (norm < kMinRenormNorm) {
                throw ValidationError("merged vector " + std::to_string(c) + " has norm below 1e-12");
            }
            scale = 1.0 / norm;
        }
        auto dst = out.row(c);
        for (std::size_t t = 0; t < d; ++t) dst[t] = static_cast<float>(renormalize ? acc[t] * scale : acc[t]);
    }
    return out;
}

PageEmbeddings merge_pool_1d(const PageEmbeddings& page, double factor, bool renormalize) {
    const std::size_t n = page.num_vectors();
    const std::size_t k = merged_count(n, factor);
    const std::size_t base = n / k;
    const std::size_t longer = n % k;
    std::vector<std::vector<std::size_t>> groups(k);
    std::size_t next = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::size_t len = base + (c < longer ? 1 : 0);
        for (std::size_t i = 0; i < len; ++i) groups[c].push_back(next++);
    }
    return assemble(page, groups, renormalize, std::nullopt);
}

PageEmbeddings merge_pool_2d(const PageEmbeddings& page, double factor, bool renormalize) {
    if (!page.grid) {
        throw ValidationError("page '" + page.page_id + "' has no grid; 2D pooling needs patch geometry");
    }
    const Grid grid = *page.grid;
    const PoolWindow w = choose_window(grid, factor);
    const std::size_t tile_rows = (grid.rows + w.rows - 1) / w.rows;
    const std::size_t tile_cols = (grid.cols + w.cols - 1) / w.cols;
    std::vector<std::vector<std::size_t>> groups;
    groups.reserve(tile_rows * tile_cols);
    for (std::size_t tr = 0; tr < tile_rows; ++tr) {
        for (std::size_t tc = 0; tc < tile_cols; ++tc) {
            auto& g = groups.emplace_back();
            for (std::size_t r = tr * w.rows; r < std::min<std::size_t>(grid.rows, (tr + 1) * w.rows); ++r) {
                for (std::size_t c = tc * w.cols; c < std::min<std::size_t>(grid.cols, (tc + 1) * w.cols); ++c) {
                    g.push_back(r * grid.cols + c);
                }
            }
        }
    }
    return assemble(page, groups, renormalize,
                    Grid{static_cast<std::uint16_t>(tile_rows), static_cast<std::uint16_t>(tile_cols)});
}

PageEmbeddings merge_by_assignment(const PageEmbeddings& page, const ClusterAssignment& assignment,
                                   bool renormalize) {
    if (assignment.labels.size() != page.num_vectors()) {
        throw ValidationError("page '" + page.page_id + "': assignment does not cover every row");
    }
    std::vector<std::vector<std::size_t>> groups(assignment.num_clusters);
    for (std::size_t i = 0; i < assignment.labels.size(); ++i) groups.at(assignment.labels[i]).push_back(i);
    return assemble(page, groups, renormalize, std::nullopt);
}

PageEmbeddings merge_cluster(const PageEmbeddings& page, double factor, bool renormalize) {
    const std::size_t k = merged_count(page.num_vectors(), factor);
    return merge_by_assignment(page, hierarchical_cluster(page, k), renormalize);
}

std::vector<PageEmbeddings> merge_corpus(const std::vector<PageEmbeddings>& pages, const MergeSpec& spec,
                                         std::size_t threads) {
    std::vector<PageEmbeddings> out(pages.size());
    parallel_for(pages.size(), threads, [&](std::size_t i) {
        switch (spec.approach) {
            case Strategy::pool1d: out[i] = merge_pool_1d(pages[i], spec.factor, spec.renormalize); break;
            case Strategy::pool2d: out[i] = merge_pool_2d(pages[i], spec.factor, spec.renormalize); break;
            case Strategy::cluster: out[i] = merge_cluster(pages[i], spec.factor, spec.renormalize); break;
            default:
                throw ValidationError(std::string("'") + std::string(to_string(spec.approach)) +
                                      "' is not a merging approach");
        }
    });
    return out;
}

}  // namespace mvec
