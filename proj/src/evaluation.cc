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

#include "mvec/evaluation.h"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mvec/errors.h"
#include "mvec/memory.h"
#include "mvec/parallel.h"

namespace mvec {

namespace {

double gain(int relevance) {
    return std::exp2(static_cast<double>(relevance)) - 1.0;
}

double discount(std::size_t rank) {
    return std::log2(static_cast<double>(rank) + 1.0);
}

}  // namespace

double ndcg_at_k(const RankedList& ranking, const Qrels& qrels, std::size_t k) {
    if (k == 0) throw ValidationError("k must be at least 1");
    const auto& judged = qrels.judgments(ranking.query_id);

    double dcg = 0.0;
    const std::size_t depth = std::min(k, ranking.hits.size());
    for (std::size_t i = 0; i < depth; ++i) {
        auto it = judged.find(ranking.hits[i].page_id);
        if (it != judged.end()) dcg += gain(it->second) / discount(i + 1);
    }

    std::vector<int> grades;
    grades.reserve(judged.size());
    for (const auto& [page, rel] : judged) grades.push_back(rel);
    std::sort(grades.begin(), grades.end(), std::greater<>());
    double idcg = 0.0;
    for (std::size_t i = 0; i < std::min(k, grades.size()); ++i) idcg += gain(grades[i]) / discount(i + 1);
    return idcg > 0.0 ? dcg / idcg : 0.0;
}

Strategy strategy_of(const CompressionSpec& spec) {
    return std::visit(
        [](const auto& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, PruneSpec>) {
                return s.strategy;
            } else {
                return s.approach;
            }
        },
        spec);
}

double parameter_of(const CompressionSpec& spec) {
    return std::visit(
        [](const auto& s) {
            if constexpr (std::is_same_v<std::decay_t<decltype(s)>, PruneSpec>) {
                return s.ratio;
            } else {
                return s.factor;
            }
        },
        spec);
}

std::vector<PageEmbeddings> compress(const std::vector<PageEmbeddings>& pages, const CompressionSpec& spec,
                                     const PruneAux& aux, std::size_t threads) {
    if (const auto* prune = std::get_if<PruneSpec>(&spec)) {
        return prune_corpus(pages, *prune, aux, threads);
    }
    return merge_corpus(pages, std::get<MergeSpec>(spec), threads);
}

EvalReport evaluate(const CompressedIndex& index, const std::vector<QueryEmbeddings>& queries, const Qrels& qrels,
                    std::size_t k, std::size_t threads) {
    if (queries.empty()) throw ValidationError("no queries to evaluate");
    for (const auto& q : queries) {
        const auto& judged = qrels.judgments(q.query_id);
        if (std::none_of(judged.begin(), judged.end(), [](const auto& kv) { return kv.second > 0; })) {
            throw ValidationError("query '" + q.query_id + "' has no relevant page in qrels");
        }
    }
    std::vector<double> scores(queries.size());
    parallel_for(queries.size(), threads, [&](std::size_t i) {
        scores[i] = ndcg_at_k(retrieve_topk(queries[i], index, k), qrels, k);
    });

    EvalReport report;
    report.k = k;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        if (!report.per_query.emplace(queries[i].query_id, scores[i]).second) {
            throw ValidationError("duplicate query id '" + queries[i].query_id + "'");
        }
    }
    double sum = 0.0;
    for (const auto& [id, v] : report.per_query) sum += v;
    report.mean_ndcg = sum / static_cast<double>(report.per_query.size());
    report.memory_bytes = memory_footprint(index.pages(), index.manifest().dtype);
    report.provenance = index.manifest().provenance;
    return report;
}

void compare_to_baseline(EvalReport& report, const EvalReport& baseline) {
    if (baseline.mean_ndcg > 0.0) report.relative_performance = report.mean_ndcg / baseline.mean_ndcg;
    if (baseline.memory_bytes > 0) {
        report.memory_ratio = static_cast<double>(report.memory_bytes) / static_cast<double>(baseline.memory_bytes);
    }
}

EvalReport run_sweep(const Corpus& corpus, const std::vector<QueryEmbeddings>& queries, const Qrels& qrels,
                     const std::vector<CompressionSpec>& points, std::size_t k, const PruneAux& aux,
                     std::size_t threads) {
    const CompressedIndex baseline_index(corpus);
    EvalReport report = evaluate(baseline_index, queries, qrels, k, threads);
    const auto base_bytes = memory_footprint(corpus.pages, Dtype::f32);

    for (const auto& spec : points) {
        Corpus compressed;
        compressed.manifest = corpus.manifest;
        compressed.pages = compress(corpus.pages, spec, aux, threads);
        compressed.manifest.page_count = compressed.pages.size();
        const CompressedIndex index(std::move(compressed));
        const EvalReport point = evaluate(index, queries, qrels, k, threads);

        SweepPoint row;
        row.strategy = strategy_of(spec);
        row.parameter = parameter_of(spec);
        row.mean_ndcg = point.mean_ndcg;
        row.relative_performance = report.mean_ndcg > 0.0 ? point.mean_ndcg / report.mean_ndcg : 0.0;
        row.memory_bytes = memory_footprint(index.pages(), corpus.manifest.dtype);
        row.memory_ratio = static_cast<double>(memory_footprint(index.pages(), Dtype::f32)) /
                           static_cast<double>(base_bytes);
        report.sweep.push_back(row);
    }
    return report;
}

nlohmann::json to_json(const EvalReport& report) {
    nlohmann::json j;
    j["k"] = report.k;
    j["per_query_ndcg"] = report.per_query;
    j["mean_ndcg"] = report.mean_ndcg;
    j["relative_performance"] =
        report.relative_performance ? nlohmann::json(*report.relative_performance) : nlohmann::json(nullptr);
    j["memory_bytes"] = report.memory_bytes;
    j["memory_ratio"] = report.memory_ratio ? nlohmann::json(*report.memory_ratio) : nlohmann::json(nullptr);
    if (report.provenance) {
        j["provenance"] = {{"strategy", std::string(to_string(report.provenance->strategy))},
                           {"parameter", report.provenance->parameter},
                           {"seed", report.provenance->seed ? nlohmann::json(*report.provenance->seed)
                                                            : nlohmann::json(nullptr)}};
    } else {
        j["provenance"] = nullptr;
    }
    j["sweep"] = nlohmann::json::array();
    for (const auto& p : report.sweep) {
        j["sweep"].push_back({{"strategy", std::string(to_string(p.strategy))},
                              {"parameter", p.parameter},
                              {"mean_ndcg", p.mean_ndcg},
                              {"relative_performance", p.relative_performance},
                              {"memory_ratio", p.memory_ratio},
                              {"memory_bytes", p.memory_bytes}});
    }
    return j;
}

EvalReport report_from_json(const nlohmann::json& j) {
    EvalReport r;
    try {
        r.k = j.at("k").get<std::size_t>();
        r.per_query = j.at("per_query_ndcg").get<std::map<std::string, double>>();
        r.mean_ndcg = j.at("mean_ndcg").get<double>();
        if (!j.at("relative_performance").is_null()) r.relative_performance = j["relative_performance"].get<double>();
        r.memory_bytes = j.at("memory_bytes").get<std::uint64_t>();
        if (!j.at("memory_ratio").is_null()) r.memory_ratio = j["memory_ratio"].get<double>();
        if (j.contains("provenance") && !j["provenance"].is_null()) {
            const auto& p = j["provenance"];
            Provenance prov;
            prov.strategy = parse_strategy(p.at("strategy").get<std::string>());
            prov.parameter = p.at("parameter").get<double>();
            if (!p.at("seed").is_null()) prov.seed = p["seed"].get<std::uint64_t>();
            r.provenance = prov;
        }
        if (j.contains("sweep")) {
            for (const auto& s : j["sweep"]) {
                SweepPoint p;
                p.strategy = parse_strategy(s.at("strategy").get<std::string>());
                p.parameter = s.at("parameter").get<double>();
                p.mean_ndcg = s.at("mean_ndcg").get<double>();
                p.relative_performance = s.at("relative_performance").get<double>();
                p.memory_ratio = s.at("memory_ratio").get<double>();
                p.memory_bytes = s.at("memory_bytes").get<std::uint64_t>();
                r.sweep.push_back(p);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("eval report: ") + e.what());
    }
    return r;
}

}  // namespace mvec
