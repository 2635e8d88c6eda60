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

#include "mvec/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "mvec/errors.h"
#include "mvec/parallel.h"
#include "mvec/scoring.h"

namespace mvec {

std::size_t activated_count(std::size_t n, double top_percent) {
    if (!(top_percent > 0.0 && top_percent <= 100.0)) {
        throw ValidationError("top percent " + std::to_string(top_percent) + " outside (0, 100]");
    }
    // slack absorbs representation error such as (1 - 0.9) * 100 = 9.999999999999998
    const double exact = top_percent / 100.0 * static_cast<double>(n);
    const auto count = static_cast<std::size_t>(std::ceil(exact - 1e-9));
    return std::clamp<std::size_t>(count, 1, n);
}

std::vector<std::size_t> activated_from_potential(std::span<const float> potential, double top_percent) {
    const std::size_t keep = activated_count(potential.size(), top_percent);
    std::vector<std::size_t> order(potential.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (potential[a] != potential[b]) return potential[a] > potential[b];
                          return a < b;
                      });
    order.resize(keep);
    std::sort(order.begin(), order.end());
    return order;
}

std::vector<std::size_t> activated_patches(const PageEmbeddings& page, const QueryEmbeddings& query,
                                           double top_percent) {
    return activated_from_potential(response_potential(page, query).values, top_percent);
}

double overlap_of_potentials(std::span<const float> first, std::span<const float> second, double top_percent) {
    if (first.size() != second.size()) throw ValidationError("potential vectors differ in length");
    const auto a = activated_from_potential(first, top_percent);
    const auto b = activated_from_potential(second, top_percent);
    std::vector<std::size_t> common;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
    return static_cast<double>(common.size()) / static_cast<double>(a.size());
}

double pairwise_overlap(const PageEmbeddings& page, const QueryEmbeddings& first, const QueryEmbeddings& second,
                        double top_percent) {
    return overlap_of_potentials(response_potential(page, first).values, response_potential(page, second).values,
                                 top_percent);
}

std::vector<double> normalize_potential(std::span<const float> potential) {
    if (potential.size() < 2) throw ValidationError("normalized potential needs at least two patches");
    const auto [lo_it, hi_it] = std::minmax_element(potential.begin(), potential.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    std::vector<double> out(potential.size(), 0.0);
    if (hi == lo) return out;
    for (std::size_t i = 0; i < potential.size(); ++i) out[i] = (potential[i] - lo) / (hi - lo);
    return out;
}

std::vector<double> normalized_potential(const PageEmbeddings& page, const QueryEmbeddings& query) {
    return normalize_potential(response_potential(page, query).values);
}

OverlapCurve overlap_curve(const std::vector<PageQueries>& pages, std::vector<double> prune_ratios,
                           std::size_t threads) {
    std::sort(prune_ratios.begin(), prune_ratios.end());
    for (double r : prune_ratios) {
        if (!(r >= 0.0 && r < 1.0)) throw ValidationError("prune ratio " + std::to_string(r) + " outside [0, 1)");
    }
    // per page: potentials of each query, then per ratio the summed overlap and pair count
    std::vector<std::vector<double>> sums(pages.size(), std::vector<double>(prune_ratios.size(), 0.0));
    std::vector<std::size_t> pair_counts(pages.size(), 0);
    parallel_for(pages.size(), threads, [&](std::size_t p) {
        const auto& [page, queries] = pages[p];
        if (queries.size() < 2) return;
        std::vector<std::vector<float>> potentials;
        for (const auto* q : queries) potentials.push_back(response_potential(*page, *q).values);
        for (std::size_t a = 0; a < potentials.size(); ++a) {
            for (std::size_t b = a + 1; b < potentials.size(); ++b) {
                for (std::size_t r = 0; r < prune_ratios.size(); ++r) {
                    sums[p][r] += overlap_of_potentials(potentials[a], potentials[b], 100.0 * (1.0 - prune_ratios[r]));
                }
                ++pair_counts[p];
            }
        }
    });
    const std::size_t total_pairs = std::accumulate(pair_counts.begin(), pair_counts.end(), std::size_t{0});
    if (total_pairs == 0) throw ValidationError("overlap analysis needs a page with at least two queries");

    OverlapCurve curve;
    for (std::size_t r = 0; r < prune_ratios.size(); ++r) {
        double total = 0.0;
        for (std::size_t p = 0; p < pages.size(); ++p) total += sums[p][r];
        curve.points.push_back(OverlapPoint{prune_ratios[r], total / static_cast<double>(total_pairs),
                                            1.0 - prune_ratios[r], total_pairs});
    }
    return curve;
}

RedundancyStats redundancy_stats(const std::vector<std::pair<const PageEmbeddings*, const QueryEmbeddings*>>& pairs,
                                 const std::vector<double>& thresholds, std::size_t bins, std::size_t threads) {
    if (bins == 0) throw ValidationError("histogram needs at least one bin");
    std::vector<std::vector<std::size_t>> counts(pairs.size(), std::vector<std::size_t>(thresholds.size(), 0));
    std::vector<std::vector<std::uint64_t>> hists(pairs.size(), std::vector<std::uint64_t>(bins, 0));
    parallel_for(pairs.size(), threads, [&](std::size_t i) {
        const auto norm = normalized_potential(*pairs[i].first, *pairs[i].second);
        for (double v : norm) {
            for (std::size_t t = 0; t < thresholds.size(); ++t) {
                if (v > thresholds[t]) ++counts[i][t];
            }
            const auto bin = std::min(bins - 1, static_cast<std::size_t>(v * static_cast<double>(bins)));
            ++hists[i][bin];
        }
    });

    RedundancyStats stats;
    stats.pairs = pairs.size();
    stats.histogram.assign(bins, 0);
    for (const auto& h : hists) {
        for (std::size_t b = 0; b < bins; ++b) stats.histogram[b] += h[b];
    }
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
        double total = 0.0;
        for (const auto& c : counts) total += static_cast<double>(c[t]);
        stats.mean_count_above[thresholds[t]] = pairs.empty() ? 0.0 : total / static_cast<double>(pairs.size());
    }
    return stats;
}

}  // namespace mvec
