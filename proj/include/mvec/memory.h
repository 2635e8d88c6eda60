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
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

/// Vector payload bytes: sum over pages of N_p * d * bytes_per_element(dtype). Headers excluded.
std::uint64_t memory_footprint(const std::vector<PageEmbeddings>& pages, Dtype dtype);

/// footprint(candidate) / footprint(baseline) at a common storage dtype.
/// Throws ValidationError on an empty baseline or a zero baseline footprint.
double relative_memory(const std::vector<PageEmbeddings>& candidate, const std::vector<PageEmbeddings>& baseline,
                       Dtype dtype = Dtype::f32);

struct MemoryReport {
    std::uint64_t bytes = 0;
    double mb = 0.0;   // 10^6 bytes
    double mib = 0.0;  // 2^20 bytes
};

MemoryReport describe_bytes(std::uint64_t bytes);

}  // namespace mvec
