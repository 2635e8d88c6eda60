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

#include "mvec/memory.h"

#include "mvec/errors.h"

namespace mvec {

std::uint64_t memory_footprint(const std::vector<PageEmbeddings>& pages, Dtype dtype) {
    std::uint64_t total = 0;
    for (const auto& page : pages) {
        total += std::uint64_t{page.num_vectors()} * page.dim() * bytes_per_element(dtype);
    }
    return total;
}

double relative_memory(const std::vector<PageEmbeddings>& candidate, const std::vector<PageEmbeddings>& baseline,
                       Dtype dtype) {
    if (candidate.empty() || baseline.empty()) {
        throw ValidationError("relative memory needs non-empty candidate and baseline collections");
    }
    const auto base = memory_footprint(baseline, dtype);
    if (base == 0) throw ValidationError("baseline memory footprint is zero");
    return static_cast<double>(memory_footprint(candidate, dtype)) / static_cast<double>(base);
}

MemoryReport describe_bytes(std::uint64_t bytes) {
    return {bytes, static_cast<double>(bytes) / 1e6, static_cast<double>(bytes) / 1048576.0};
}

}  // namespace mvec
