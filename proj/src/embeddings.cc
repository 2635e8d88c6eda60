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

#include "mvec/embeddings.h"

#include <cmath>
#include <string>

#include "mvec/errors.h"

namespace mvec {

std::size_t bytes_per_element(Dtype dtype) {
    return dtype == Dtype::f16 ? 2 : 4;
}

std::string_view to_string(Dtype dtype) {
    return dtype == Dtype::f16 ? "f16" : "f32";
}

Dtype parse_dtype(std::string_view name) {
    if (name == "f32") return Dtype::f32;
    if (name == "f16") return Dtype::f16;
    throw ValidationError("unknown dtype '" + std::string(name) + "'");
}

std::string_view to_string(Strategy strategy) {
    switch (strategy) {
        case Strategy::random: return "random";
        case Strategy::score_oriented: return "score";
        case Strategy::attention_oriented: return "attention";
        case Strategy::pool1d: return "pool1d";
        case Strategy::pool2d: return "pool2d";
        case Strategy::cluster: return "cluster";
    }
    return "random";
}

Strategy parse_strategy(std::string_view name) {
    if (name == "random") return Strategy::random;
    if (name == "score") return Strategy::score_oriented;
    if (name == "attention") return Strategy::attention_oriented;
    if (name == "pool1d") return Strategy::pool1d;
    if (name == "pool2d") return Strategy::pool2d;
    if (name == "cluster") return Strategy::cluster;
    throw ValidationError("unknown strategy '" + std::string(name) + "'");
}

void Qrels::add(const std::string& query_id, const std::string& page_id, int relevance) {
    if (relevance < 0) {
        throw ValidationError("negative relevance for (" + query_id + ", " + page_id + ")");
    }
    auto [it, inserted] = judgments_[query_id].emplace(page_id, relevance);
    if (!inserted) {
        throw ValidationError("duplicate judgment for (" + query_id + ", " + page_id + ")");
    }
}

const std::map<std::string, int>& Qrels::judgments(const std::string& query_id) const {
    auto it = judgments_.find(query_id);
    if (it == judgments_.end()) {
        throw ValidationError("query '" + query_id + "' has no relevance judgments");
    }
    return it->second;
}

int Qrels::relevance(const std::string& query_id, const std::string& page_id) const {
    auto it = judgments_.find(query_id);
    if (it == judgments_.end()) return 0;
    auto jt = it->second.find(page_id);
    return jt == it->second.end() ? 0 : jt->second;
}

std::size_t Qrels::size() const {
    std::size_t n = 0;
    for (const auto& [q, m] : judgments_) n += m.size();
    return n;
}

namespace {

void validate_matrix(const Matrix& m, bool normalized, const std::string& what) {
    if (m.rows() == 0) throw ValidationError(what + ": no vectors");
    if (m.cols() == 0) throw ValidationError(what + ": zero dimension");
    for (float x : m.values()) {
        if (!std::isfinite(x)) throw ValidationError(what + ": non-finite value");
    }
    if (normalized) {
        for (std::size_t i = 0; i < m.rows(); ++i) {
            const double norm = std::sqrt(squared_norm(m.row(i)));
            if (std::abs(norm - 1.0) > kNormTolerance) {
                throw ValidationError(what + ": flagged normalized but row " + std::to_string(i) +
                                      " has norm " + std::to_string(norm));
            }
        }
    }
}

}  // namespace

void validate(const PageEmbeddings& page) {
    const std::string what = "page '" + page.page_id + "'";
    validate_matrix(page.vectors, page.normalized, what);
    if (page.grid && page.grid->cells() != page.num_vectors()) {
        throw ValidationError(what + ": grid " + std::to_string(page.grid->rows) + "x" +
                              std::to_string(page.grid->cols) + " does not match " +
                              std::to_string(page.num_vectors()) + " vectors");
    }
}

void validate(const QueryEmbeddings& query) {
    validate_matrix(query.vectors, query.normalized, "query '" + query.query_id + "'");
}

void validate_collection(const std::vector<PageEmbeddings>& pages) {
    for (const auto& page : pages) {
        validate(page);
        if (page.dim() != pages.front().dim()) {
            throw ValidationError("page '" + page.page_id + "' has d=" + std::to_string(page.dim()) +
                                  ", expected " + std::to_string(pages.front().dim()));
        }
    }
}

std::pair<std::string, std::size_t> split_synth_id(std::string_view id) {
    const auto pos = id.rfind('#');
    if (pos == std::string_view::npos || pos == 0 || pos + 1 == id.size()) {
        throw ValidationError("synthesized query id '" + std::string(id) + "' is not of the form page#k");
    }
    std::size_t k = 0;
    for (char c : id.substr(pos + 1)) {
        if (c < '0' || c > '9') {
            throw ValidationError("synthesized query id '" + std::string(id) + "' has a non-numeric index");
        }
        k = k * 10 + static_cast<std::size_t>(c - '0');
    }
    return {std::string(id.substr(0, pos)), k};
}

long long round_half_even(double value) {
    const double lower = std::floor(value);
    const double frac = value - lower;
    auto result = static_cast<long long>(lower);
    if (frac > 0.5 || (frac == 0.5 && (result % 2 != 0))) {
        ++result;
    }
    return result;
}

}  // namespace mvec
