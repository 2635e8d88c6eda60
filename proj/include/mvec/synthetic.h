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
#include <string>
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

// Seeded corpora with planted group structure. Every page draws `groups_per_page` topics
// from a shared pool of unit vectors; each patch is a noisy copy of one of its page's
// topics, with uneven group sizes. Queries are noisy copies of a few topics of one target
// page, which is their single relevant page.
struct SyntheticSpec {
    std::size_t pages = 100;
    std::uint16_t grid_rows = 8;
    std::uint16_t grid_cols = 8;
    std::size_t d = 32;
    std::size_t topics = 64;
    std::size_t groups_per_page = 8;
    double patch_noise = 0.1;   // ignored when duplicates is set
    bool duplicates = false;    // patches are exact copies of their topic
    std::size_t queries = 50;
    std::size_t tokens_per_query = 4;
    double query_noise = 0.05;
    std::size_t synth_per_page = 3;
    std::uint64_t seed = 0;
};

struct SyntheticData {
    std::vector<PageEmbeddings> pages;
    std::vector<QueryEmbeddings> queries;
    Qrels qrels;
    std::map<std::string, std::vector<float>> attention;
    std::map<std::string, std::vector<QueryEmbeddings>> synth_queries;
};

/// Throws ValidationError on inconsistent sizes (e.g. more groups than patches or topics).
SyntheticData generate_synthetic(const SyntheticSpec& spec);

}  // namespace mvec
