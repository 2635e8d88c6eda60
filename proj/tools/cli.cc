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

#include "cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "mvec/analysis.h"
#include "mvec/errors.h"
#include "mvec/evaluation.h"
#include "mvec/memory.h"
#include "mvec/merging.h"
#include "mvec/mvec_format.h"
#include "mvec/pruning.h"
#include "mvec/random.h"
#include "mvec/scoring.h"
#include "mvec/synthetic.h"

namespace mvec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum class LogLevel { error = 0, warn = 1, info = 2, debug = 3 };

struct Context {
    std::ostream& out;
    std::ostream& err;
    bool json_output = false;
    std::size_t threads = 1;
    LogLevel log_level = LogLevel::warn;

    void log(LogLevel level, const std::string& msg) const {
        if (level <= log_level) err << "[mvec] " << msg << "\n";
    }
};

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void require_input(const std::string& path) {
    if (!fs::exists(path)) throw IoError("input '" + path + "' does not exist");
    if (fs::is_directory(path)) throw IoError("input '" + path + "' is a directory");
}

void require_output(const std::string& path) {
    const fs::path parent = fs::path(path).parent_path();
    if (!parent.empty() && !fs::is_directory(parent)) {
        throw IoError("output directory '" + parent.string() + "' does not exist");
    }
    if (fs::is_directory(path)) throw IoError("output '" + path + "' is a directory");
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::stringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            values.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ValidationError(std::string("cannot parse ") + what + " value '" + item + "'");
        }
    }
    return values;
}

json provenance_json(const std::optional<Provenance>& p) {
    if (!p) return nullptr;
    return {{"strategy", std::string(to_string(p->strategy))},
            {"parameter", p->parameter},
            {"seed", p->seed ? json(*p->seed) : json(nullptr)}};
}

json corpus_summary(const Corpus& corpus) {
    std::size_t vectors = 0;
    std::size_t gridded = 0;
    for (const auto& p : corpus.pages) {
        vectors += p.num_vectors();
        gridded += p.grid ? 1 : 0;
    }
    const auto mem = describe_bytes(memory_footprint(corpus.pages, corpus.manifest.dtype));
    return {{"corpus_id", corpus.manifest.corpus_id},
            {"pages", corpus.pages.size()},
            {"d", corpus.manifest.d},
            {"dtype", std::string(to_string(corpus.manifest.dtype))},
            {"vectors", vectors},
            {"pages_with_grid", gridded},
            {"memory_bytes", mem.bytes},
            {"memory_mb", mem.mb},
            {"memory_mib", mem.mib},
            {"provenance", provenance_json(corpus.manifest.provenance)}};
}

void print_summary(const Context& ctx, const json& summary) {
    if (ctx.json_output) {
        ctx.out << summary.dump(2) << "\n";
        return;
    }
    for (const auto& [key, value] : summary.items()) {
        ctx.out << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << "\n";
    }
}

// --- ingest / validate / index -------------------------------------------------------

struct StoreArgs {
    std::string input;
    std::string output;
    std::string dtype;
    std::string corpus_id;
    std::string kind = "corpus";
};

int cmd_ingest(const Context& ctx, const StoreArgs& a) {
    require_input(a.input);
    require_output(a.output);
    Corpus corpus = ingest_corpus(a.input);
    const Dtype dtype = a.dtype.empty() ? corpus.manifest.dtype : parse_dtype(a.dtype);
    const std::string id = a.corpus_id.empty() ? corpus.manifest.corpus_id : a.corpus_id;
    write_corpus(corpus.pages, dtype, a.output, corpus.manifest.provenance, id);
    ctx.log(LogLevel::info, "ingested " + std::to_string(corpus.pages.size()) + " pages");
    print_summary(ctx, corpus_summary(ingest_corpus(a.output)));
    return kOk;
}

int cmd_validate(const Context& ctx, const StoreArgs& a) {
    require_input(a.input);
    json summary;
    if (a.kind == "corpus") {
        summary = corpus_summary(ingest_corpus(a.input));
    } else if (a.kind == "queries") {
        const auto qs = read_queries(a.input);
        std::size_t tokens = 0;
        for (const auto& q : qs) tokens += q.num_tokens();
        summary = {{"queries", qs.size()}, {"tokens", tokens}, {"d", qs.empty() ? 0 : qs.front().dim()}};
    } else if (a.kind == "attention") {
        summary = {{"pages", read_attention(a.input).size()}};
    } else if (a.kind == "synth") {
        const auto synth = read_synth_queries(a.input);
        std::size_t total = 0;
        for (const auto& [page, qs] : synth) total += qs.size();
        summary = {{"pages", synth.size()}, {"queries", total}};
    } else if (a.kind == "qrels") {
        const auto qrels = read_qrels(a.input);
        summary = {{"queries", qrels.all().size()}, {"judgments", qrels.size()}};
    } else {
        throw ValidationError("unknown kind '" + a.kind + "'");
    }
    summary["valid"] = true;
    print_summary(ctx, summary);
    return kOk;
}

int cmd_index(const Context& ctx, const StoreArgs& a) {
    require_input(a.input);
    if (!a.output.empty()) require_output(a.output);
    Corpus corpus = ingest_corpus(a.input);
    if (!a.output.empty()) {
        const Dtype dtype = a.dtype.empty() ? corpus.manifest.dtype : parse_dtype(a.dtype);
        write_corpus(corpus.pages, dtype, a.output, corpus.manifest.provenance,
                     a.corpus_id.empty() ? corpus.manifest.corpus_id : a.corpus_id);
        corpus = ingest_corpus(a.output);
    }
    const CompressedIndex index(std::move(corpus));
    Corpus view{index.manifest(), index.pages()};
    json summary = corpus_summary(view);
    summary["mean_vectors_per_page"] =
        static_cast<double>(index.total_vectors()) / static_cast<double>(index.size());
    print_summary(ctx, summary);
    return kOk;
}

// --- prune / merge -------------------------------------------------------------------

struct CompressArgs {
    std::string input;
    std::string output;
    std::string strategy;
    double ratio = 0.0;
    double factor = 1.0;
    std::optional<std::uint64_t> seed;
    std::string aux;
    bool no_renormalize = false;
    std::string dtype;
};

PruneAux load_aux(const std::string& path, Strategy strategy) {
    PruneAux aux;
    if (strategy == Strategy::attention_oriented) {
        if (path.empty()) throw ValidationError("attention pruning needs --aux <attention.mvec>");
        require_input(path);
        aux.attention = read_attention(path);
    } else if (strategy == Strategy::score_oriented) {
        if (path.empty()) throw ValidationError("score pruning needs --aux <synth-queries.mvec>");
        require_input(path);
        aux.synth_queries = read_synth_queries(path);
    }
    return aux;
}

void write_compressed(const Context& ctx, const Corpus& source, std::vector<PageEmbeddings> pages,
                      const Provenance& provenance, const std::string& dtype_name, const std::string& output) {
    const Dtype dtype = dtype_name.empty() ? source.manifest.dtype : parse_dtype(dtype_name);
    const double ratio = relative_memory(pages, source.pages, dtype);
    write_corpus(pages, dtype, output, provenance, source.manifest.corpus_id);
    json summary = corpus_summary(ingest_corpus(output));
    summary["relative_memory"] = ratio;
    print_summary(ctx, summary);
}

int cmd_prune(const Context& ctx, const CompressArgs& a) {
    require_input(a.input);
    require_output(a.output);
    PruneSpec spec;
    spec.strategy = parse_strategy(a.strategy);
    spec.ratio = a.ratio;
    spec.seed = a.seed;
    if (spec.strategy != Strategy::random && a.seed) {
        throw ValidationError("--seed only applies to random pruning");
    }
    if (spec.strategy == Strategy::random && !spec.seed) spec.seed = 0;
    const PruneAux aux = load_aux(a.aux, spec.strategy);
    const Corpus corpus = ingest_corpus(a.input);
    auto pages = prune_corpus(corpus.pages, spec, aux, ctx.threads);
    write_compressed(ctx, corpus, std::move(pages), Provenance{spec.strategy, spec.ratio, spec.seed}, a.dtype,
                     a.output);
    return kOk;
}

int cmd_merge(const Context& ctx, const CompressArgs& a) {
    require_input(a.input);
    require_output(a.output);
    MergeSpec spec;
    spec.approach = parse_strategy(a.strategy);
    spec.factor = a.factor;
    spec.renormalize = !a.no_renormalize;
    const Corpus corpus = ingest_corpus(a.input);
    auto pages = merge_corpus(corpus.pages, spec, ctx.threads);
    write_compressed(ctx, corpus, std::move(pages), Provenance{spec.approach, spec.factor, std::nullopt}, a.dtype,
                     a.output);
    return kOk;
}

// --- search / eval / sweep ------------------------------------------------------------

struct RetrievalArgs {
    std::string corpus;
    std::string queries;
    std::string qrels;
    std::size_t k = 5;
    std::string output;
    std::string baseline;
    std::string strategy;
    std::vector<double> points;
    std::optional<std::uint64_t> seed;
    std::string aux;
    bool no_renormalize = false;
    std::string csv;
};

int cmd_search(const Context& ctx, const RetrievalArgs& a) {
    require_input(a.corpus);
    require_input(a.queries);
    require_output(a.output);
    if (a.k == 0) throw ValidationError("--k must be at least 1");
    const CompressedIndex index(ingest_corpus(a.corpus));
    const auto queries = read_queries(a.queries);
    std::vector<RankedList> results(queries.size());
    // queries run one after another; pages are scored in parallel inside retrieve_topk
    for (std::size_t i = 0; i < queries.size(); ++i) results[i] = retrieve_topk(queries[i], index, a.k, ctx.threads);

    std::string tsv;
    for (const auto& r : results) {
        for (std::size_t rank = 0; rank < r.hits.size(); ++rank) {
            tsv += r.query_id + "\t" + std::to_string(rank + 1) + "\t" + r.hits[rank].page_id + "\t" +
                   fixed(r.hits[rank].score) + "\n";
        }
    }
    write_text_file(a.output, tsv);
    print_summary(ctx, {{"queries", queries.size()}, {"k", a.k}, {"pages", index.size()}, {"output", a.output}});
    return kOk;
}

void emit_report(const Context& ctx, const EvalReport& report, const std::string& output) {
    const json j = to_json(report);
    if (!output.empty()) write_text_file(output, j.dump(2) + "\n");
    if (ctx.json_output) {
        ctx.out << j.dump(2) << "\n";
        return;
    }
    ctx.out << "queries: " << report.per_query.size() << "\n";
    ctx.out << "mean ndcg@" << report.k << ": " << fixed(report.mean_ndcg) << "\n";
    if (report.relative_performance) ctx.out << "relative performance: " << fixed(*report.relative_performance) << "\n";
    ctx.out << "memory bytes: " << report.memory_bytes << "\n";
    if (report.memory_ratio) ctx.out << "memory ratio: " << fixed(*report.memory_ratio) << "\n";
    if (!report.sweep.empty()) {
        ctx.out << "strategy\tparameter\tmean_ndcg\trelative\tmemory_ratio\n";
        for (const auto& p : report.sweep) {
            ctx.out << to_string(p.strategy) << "\t" << fixed(p.parameter, 4) << "\t" << fixed(p.mean_ndcg) << "\t"
                    << fixed(p.relative_performance) << "\t" << fixed(p.memory_ratio) << "\n";
        }
    }
}

int cmd_eval(const Context& ctx, const RetrievalArgs& a) {
    require_input(a.corpus);
    require_input(a.queries);
    require_input(a.qrels);
    if (!a.baseline.empty()) require_input(a.baseline);
    if (!a.output.empty()) require_output(a.output);
    if (a.k == 0) throw ValidationError("--k must be at least 1");
    const CompressedIndex index(ingest_corpus(a.corpus));
    EvalReport report = evaluate(index, read_queries(a.queries), read_qrels(a.qrels), a.k, ctx.threads);
    if (!a.baseline.empty()) {
        const auto bytes = read_file_bytes(a.baseline);
        json j;
        try {
            j = json::parse(bytes.begin(), bytes.end());
        } catch (const json::exception& e) {
            throw FormatError("baseline report: " + std::string(e.what()));
        }
        compare_to_baseline(report, report_from_json(j));
    }
    emit_report(ctx, report, a.output);
    return kOk;
}

int cmd_sweep(const Context& ctx, const RetrievalArgs& a) {
    require_input(a.corpus);
    require_input(a.queries);
    require_input(a.qrels);
    if (!a.output.empty()) require_output(a.output);
    if (!a.csv.empty()) require_output(a.csv);
    if (a.points.empty()) throw ValidationError("sweep needs at least one --point");
    const Strategy strategy = parse_strategy(a.strategy);
    const bool pruning = strategy == Strategy::random || strategy == Strategy::score_oriented ||
                         strategy == Strategy::attention_oriented;
    std::vector<CompressionSpec> specs;
    for (double p : a.points) {
        if (pruning) {
            specs.emplace_back(PruneSpec{strategy, p, strategy == Strategy::random ? a.seed.value_or(0)
                                                                                   : std::optional<std::uint64_t>{}});
        } else {
            specs.emplace_back(MergeSpec{strategy, p, !a.no_renormalize});
        }
    }
    const PruneAux aux = load_aux(a.aux, strategy);
    const Corpus corpus = ingest_corpus(a.corpus);
    const EvalReport report = run_sweep(corpus, read_queries(a.queries), read_qrels(a.qrels), specs, a.k, aux,
                                        ctx.threads);
    if (!a.csv.empty()) {
        std::string csv = "strategy,parameter,mean_ndcg,relative_performance,memory_ratio,memory_bytes\n";
        for (const auto& p : report.sweep) {
            csv += std::string(to_string(p.strategy)) + "," + fixed(p.parameter) + "," + fixed(p.mean_ndcg) + "," +
                   fixed(p.relative_performance) + "," + fixed(p.memory_ratio) + "," +
                   std::to_string(p.memory_bytes) + "\n";
        }
        write_text_file(a.csv, csv);
    }
    emit_report(ctx, report, a.output);
    return kOk;
}

// --- analyze ---------------------------------------------------------------------------

struct AnalyzeArgs {
    std::string corpus;
    std::string synth;
    std::string ratios = "0.1,0.3,0.5,0.7,0.9";
    std::string thresholds = "0.9,0.95";
    std::size_t sample = 1000;
    std::uint64_t seed = 0;
    std::size_t bins = 20;
    std::string output;
    std::string csv;
};

int cmd_analyze_overlap(const Context& ctx, const AnalyzeArgs& a) {
    require_input(a.corpus);
    require_input(a.synth);
    if (!a.output.empty()) require_output(a.output);
    if (!a.csv.empty()) require_output(a.csv);
    const Corpus corpus = ingest_corpus(a.corpus);
    const auto synth = read_synth_queries(a.synth);
    std::vector<PageQueries> pages;
    for (const auto& page : corpus.pages) {
        auto it = synth.find(page.page_id);
        if (it == synth.end()) continue;
        PageQueries pq{&page, {}};
        for (const auto& q : it->second) pq.second.push_back(&q);
        pages.push_back(std::move(pq));
    }
    const auto curve = overlap_curve(pages, parse_list(a.ratios, "ratio"), ctx.threads);

    json j = {{"analysis", "overlap"}, {"points", json::array()}};
    std::string csv = "prune_ratio,mean_overlap,random_overlap,pairs\n";
    for (const auto& p : curve.points) {
        j["points"].push_back({{"prune_ratio", p.prune_ratio},
                               {"mean_overlap", p.mean_overlap},
                               {"random_overlap", p.random_overlap},
                               {"pairs", p.pairs}});
        csv += fixed(p.prune_ratio, 4) + "," + fixed(p.mean_overlap) + "," + fixed(p.random_overlap) + "," +
               std::to_string(p.pairs) + "\n";
    }
    if (!a.output.empty()) write_text_file(a.output, j.dump(2) + "\n");
    if (!a.csv.empty()) write_text_file(a.csv, csv);
    if (ctx.json_output) {
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << "prune_ratio\tmean_overlap\trandom\n";
        for (const auto& p : curve.points) {
            ctx.out << fixed(p.prune_ratio, 4) << "\t" << fixed(p.mean_overlap) << "\t" << fixed(p.random_overlap)
                    << "\n";
        }
    }
    return kOk;
}

int cmd_analyze_redundancy(const Context& ctx, const AnalyzeArgs& a) {
    require_input(a.corpus);
    require_input(a.synth);
    if (!a.output.empty()) require_output(a.output);
    if (!a.csv.empty()) require_output(a.csv);
    if (a.sample == 0) throw ValidationError("--sample must be at least 1");
    const Corpus corpus = ingest_corpus(a.corpus);
    const auto synth = read_synth_queries(a.synth);

    std::vector<const PageEmbeddings*> candidates;
    for (const auto& page : corpus.pages) {
        if (synth.count(page.page_id)) candidates.push_back(&page);
    }
    // seeded partial shuffle, then restore corpus order for a stable report
    Rng rng(a.seed);
    const std::size_t take = std::min(a.sample, candidates.size());
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < take; ++i) {
        std::swap(order[i], order[i + static_cast<std::size_t>(uniform_below(rng, order.size() - i))]);
    }
    order.resize(take);
    std::sort(order.begin(), order.end());

    std::vector<std::pair<const PageEmbeddings*, const QueryEmbeddings*>> pairs;
    for (std::size_t idx : order) {
        for (const auto& q : synth.at(candidates[idx]->page_id)) pairs.emplace_back(candidates[idx], &q);
    }
    const auto thresholds = parse_list(a.thresholds, "threshold");
    const auto stats = redundancy_stats(pairs, thresholds, a.bins, ctx.threads);

    json counts = json::object();
    for (const auto& [t, c] : stats.mean_count_above) counts[fixed(t, 4)] = c;
    json j = {{"analysis", "redundancy"},
              {"sampled_pages", take},
              {"pairs", stats.pairs},
              {"mean_count_above", counts},
              {"histogram", stats.histogram}};
    std::string csv = "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < stats.histogram.size(); ++b) {
        csv += fixed(static_cast<double>(b) / static_cast<double>(a.bins), 4) + "," +
               fixed(static_cast<double>(b + 1) / static_cast<double>(a.bins), 4) + "," +
               std::to_string(stats.histogram[b]) + "\n";
    }
    if (!a.output.empty()) write_text_file(a.output, j.dump(2) + "\n");
    if (!a.csv.empty()) write_text_file(a.csv, csv);
    if (ctx.json_output) {
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << "pairs: " << stats.pairs << "\n";
        for (const auto& [t, c] : stats.mean_count_above) {
            ctx.out << "mean patches above " << fixed(t, 4) << ": " << fixed(c, 4) << "\n";
        }
    }
    return kOk;
}

// --- mem / gen-synthetic ----------------------------------------------------------------

struct MemArgs {
    std::string input;
    std::string dtype;
    std::string baseline;
};

int cmd_mem(const Context& ctx, const MemArgs& a) {
    require_input(a.input);
    if (!a.baseline.empty()) require_input(a.baseline);
    const Corpus corpus = ingest_corpus(a.input);
    const Dtype dtype = a.dtype.empty() ? corpus.manifest.dtype : parse_dtype(a.dtype);
    const auto mem = describe_bytes(memory_footprint(corpus.pages, dtype));
    json j = {{"bytes", mem.bytes}, {"mb", mem.mb}, {"mib", mem.mib}, {"dtype", std::string(to_string(dtype))}};
    std::optional<double> ratio;
    if (!a.baseline.empty()) {
        ratio = relative_memory(corpus.pages, ingest_corpus(a.baseline).pages, dtype);
        j["relative_memory"] = *ratio;
    }
    if (ctx.json_output) {
        ctx.out << j.dump(2) << "\n";
    } else {
        ctx.out << mem.bytes << " bytes (" << fixed(mem.mb) << " MB, " << fixed(mem.mib) << " MiB)\n";
        if (ratio) ctx.out << "relative memory: " << fixed(*ratio) << "\n";
    }
    return kOk;
}

struct GenArgs {
    SyntheticSpec spec;
    std::string out_dir;
    std::string dtype = "f32";
};

int cmd_gen(const Context& ctx, const GenArgs& a) {
    const Dtype dtype = parse_dtype(a.dtype);
    const auto data = generate_synthetic(a.spec);
    std::error_code ec;
    fs::create_directories(a.out_dir, ec);
    if (!fs::is_directory(a.out_dir)) throw IoError("cannot create output directory '" + a.out_dir + "'");
    const fs::path dir(a.out_dir);
    write_corpus(data.pages, dtype, dir / "corpus.mvec", std::nullopt, "synthetic");
    write_queries(data.queries, dtype, dir / "queries.mvec");
    write_text_file(dir / "qrels.tsv", format_qrels(data.qrels));
    write_attention(data.attention, dir / "attention.mvec");
    write_synth_queries(data.synth_queries, dtype, dir / "synth_queries.mvec");
    print_summary(ctx, {{"pages", data.pages.size()},
                        {"queries", data.queries.size()},
                        {"vectors_per_page", data.pages.front().num_vectors()},
                        {"d", a.spec.d},
                        {"out_dir", a.out_dir}});
    return kOk;
}

std::size_t default_threads() {
    if (const char* env = std::getenv("MVEC_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1) return static_cast<std::size_t>(v);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

std::map<std::string, std::string> parse_config(const std::string& text) {
    std::map<std::string, std::string> out;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        const auto e = s.find_last_not_of(" \t\r");
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> apply_config(std::vector<std::string> args, const std::map<std::string, std::string>& config) {
    std::set<std::string> present;
    for (const auto& a : args) {
        if (a.rfind("--", 0) == 0) present.insert(a.substr(0, a.find('=')));
    }
    for (const auto& [key, value] : config) {
        const std::string flag = "--" + key;
        if (present.count(flag)) continue;
        if (value == "true") {
            args.push_back(flag);
        } else if (value != "false") {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    Context ctx{out, err};
    std::vector<std::string> args = raw_args;

    try {
        // the config file is folded into the arguments before parsing so flags win
        for (std::size_t i = 0; i < args.size(); ++i) {
            std::string path;
            if (args[i] == "--config" && i + 1 < args.size()) {
                path = args[i + 1];
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
            } else if (args[i].rfind("--config=", 0) == 0) {
                path = args[i].substr(9);
                args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            } else {
                continue;
            }
            require_input(path);
            const auto bytes = read_file_bytes(path);
            args = apply_config(args, parse_config(std::string(bytes.begin(), bytes.end())));
            break;
        }
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kValidation;
    }

    CLI::App app{"mvec: compressed multi-vector retrieval toolkit", "mvec"};
    app.require_subcommand(1);
    std::size_t threads = default_threads();
    std::string log_level = "warn";
    app.add_option("--threads", threads, "Worker threads (default: MVEC_THREADS or hardware)")
        ->check(CLI::PositiveNumber);
    app.add_flag("--json", ctx.json_output, "Machine-readable JSON on stdout");
    app.add_option("--log-level", log_level, "error, warn, info or debug")
        ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
    app.add_option("--config", "Flat key=value file; command-line flags take precedence");

    StoreArgs store;
    auto* ingest = app.add_subcommand("ingest", "Validate an MVEC corpus and write it with a manifest");
    ingest->add_option("--input", store.input)->required();
    ingest->add_option("--output", store.output)->required();
    ingest->add_option("--dtype", store.dtype)->check(CLI::IsMember({"f32", "f16"}));
    ingest->add_option("--corpus-id", store.corpus_id);

    auto* validate_cmd = app.add_subcommand("validate", "Check a file against its format and invariants");
    validate_cmd->add_option("--input", store.input)->required();
    validate_cmd->add_option("--kind", store.kind)
        ->check(CLI::IsMember({"corpus", "queries", "attention", "synth", "qrels"}));

    auto* index_cmd = app.add_subcommand("index", "Load a corpus as a searchable index and report its shape");
    index_cmd->add_option("--input", store.input)->required();
    index_cmd->add_option("--output", store.output, "Optionally re-encode the index");
    index_cmd->add_option("--dtype", store.dtype)->check(CLI::IsMember({"f32", "f16"}));
    index_cmd->add_option("--corpus-id", store.corpus_id);

    CompressArgs compress_args;
    auto* prune = app.add_subcommand("prune", "Drop patch embeddings per page");
    prune->add_option("--input", compress_args.input)->required();
    prune->add_option("--output", compress_args.output)->required();
    prune->add_option("--strategy", compress_args.strategy)
        ->required()
        ->check(CLI::IsMember({"random", "score", "attention"}));
    prune->add_option("--ratio", compress_args.ratio, "Fraction of vectors removed")->required();
    prune->add_option("--seed", compress_args.seed);
    prune->add_option("--aux", compress_args.aux, "Attention or synthesized-query MVEC");
    prune->add_option("--dtype", compress_args.dtype)->check(CLI::IsMember({"f32", "f16"}));

    auto* merge = app.add_subcommand("merge", "Merge patch embeddings per page");
    merge->add_option("--input", compress_args.input)->required();
    merge->add_option("--output", compress_args.output)->required();
    merge->add_option("--approach", compress_args.strategy)
        ->required()
        ->check(CLI::IsMember({"pool1d", "pool2d", "cluster"}));
    merge->add_option("--factor", compress_args.factor, "N_p / N_p'")->required();
    merge->add_flag("--no-renormalize", compress_args.no_renormalize);
    merge->add_option("--dtype", compress_args.dtype)->check(CLI::IsMember({"f32", "f16"}));

    RetrievalArgs retrieval;
    auto* search = app.add_subcommand("search", "Top-k MaxSim retrieval to TSV");
    search->add_option("--corpus", retrieval.corpus)->required();
    search->add_option("--queries", retrieval.queries)->required();
    search->add_option("--k", retrieval.k)->required();
    search->add_option("--output", retrieval.output)->required();

    auto* eval = app.add_subcommand("eval", "NDCG@k of a corpus against qrels");
    eval->add_option("--corpus", retrieval.corpus)->required();
    eval->add_option("--queries", retrieval.queries)->required();
    eval->add_option("--qrels", retrieval.qrels)->required();
    eval->add_option("--k", retrieval.k);
    eval->add_option("--baseline", retrieval.baseline, "Report JSON to compare against");
    eval->add_option("--output", retrieval.output, "Write the report JSON here");

    auto* sweep = app.add_subcommand("sweep", "Evaluate a compression strategy over a parameter grid");
    sweep->add_option("--corpus", retrieval.corpus)->required();
    sweep->add_option("--queries", retrieval.queries)->required();
    sweep->add_option("--qrels", retrieval.qrels)->required();
    sweep->add_option("--strategy", retrieval.strategy)
        ->required()
        ->check(CLI::IsMember({"random", "score", "attention", "pool1d", "pool2d", "cluster"}));
    sweep->add_option("--point", retrieval.points, "Ratio (pruning) or factor (merging); repeatable")->required();
    sweep->add_option("--k", retrieval.k);
    sweep->add_option("--seed", retrieval.seed);
    sweep->add_option("--aux", retrieval.aux);
    sweep->add_flag("--no-renormalize", retrieval.no_renormalize);
    sweep->add_option("--output", retrieval.output);
    sweep->add_option("--csv", retrieval.csv);

    AnalyzeArgs analyze_args;
    auto* analyze = app.add_subcommand("analyze", "Diagnostics on response potentials");
    analyze->require_subcommand(1);
    auto* overlap = analyze->add_subcommand("overlap", "Activated-patch overlap between query pairs");
    overlap->add_option("--corpus", analyze_args.corpus)->required();
    overlap->add_option("--synth-queries", analyze_args.synth)->required();
    overlap->add_option("--ratios", analyze_args.ratios, "Comma-separated prune ratios");
    overlap->add_option("--output", analyze_args.output);
    overlap->add_option("--csv", analyze_args.csv);
    auto* redundancy = analyze->add_subcommand("redundancy", "Counts of near-maximal normalized potentials");
    redundancy->add_option("--corpus", analyze_args.corpus)->required();
    redundancy->add_option("--synth-queries", analyze_args.synth)->required();
    redundancy->add_option("--thresholds", analyze_args.thresholds, "Comma-separated thresholds");
    redundancy->add_option("--sample", analyze_args.sample, "Pages sampled");
    redundancy->add_option("--seed", analyze_args.seed);
    redundancy->add_option("--bins", analyze_args.bins)->check(CLI::PositiveNumber);
    redundancy->add_option("--output", analyze_args.output);
    redundancy->add_option("--csv", analyze_args.csv);

    MemArgs mem_args;
    auto* mem = app.add_subcommand("mem", "Vector payload size of a corpus");
    mem->add_option("--input", mem_args.input)->required();
    mem->add_option("--dtype", mem_args.dtype)->check(CLI::IsMember({"f32", "f16"}));
    mem->add_option("--baseline", mem_args.baseline, "Corpus to compute relative memory against");

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a seeded synthetic corpus, queries and qrels");
    gen_cmd->add_option("--out-dir", gen.out_dir)->required();
    gen_cmd->add_option("--pages", gen.spec.pages);
    gen_cmd->add_option("--grid-rows", gen.spec.grid_rows);
    gen_cmd->add_option("--grid-cols", gen.spec.grid_cols);
    gen_cmd->add_option("--d", gen.spec.d);
    gen_cmd->add_option("--topics", gen.spec.topics);
    gen_cmd->add_option("--groups", gen.spec.groups_per_page);
    gen_cmd->add_option("--noise", gen.spec.patch_noise);
    gen_cmd->add_flag("--duplicates", gen.spec.duplicates);
    gen_cmd->add_option("--queries", gen.spec.queries);
    gen_cmd->add_option("--tokens", gen.spec.tokens_per_query);
    gen_cmd->add_option("--query-noise", gen.spec.query_noise);
    gen_cmd->add_option("--synth", gen.spec.synth_per_page);
    gen_cmd->add_option("--seed", gen.spec.seed);
    gen_cmd->add_option("--dtype", gen.dtype)->check(CLI::IsMember({"f32", "f16"}));

    for (auto* sub : {ingest, validate_cmd, index_cmd, prune, merge, search, eval, sweep, analyze, overlap, redundancy,
                      mem, gen_cmd}) {
        sub->fallthrough();
    }

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return kValidation;
    }

    ctx.threads = threads;
    ctx.log_level = log_level == "error" ? LogLevel::error
                    : log_level == "info" ? LogLevel::info
                    : log_level == "debug" ? LogLevel::debug
                                           : LogLevel::warn;
    ctx.log(LogLevel::debug, "threads=" + std::to_string(ctx.threads));

    try {
        if (ingest->parsed()) return cmd_ingest(ctx, store);
        if (validate_cmd->parsed()) return cmd_validate(ctx, store);
        if (index_cmd->parsed()) return cmd_index(ctx, store);
        if (prune->parsed()) return cmd_prune(ctx, compress_args);
        if (merge->parsed()) return cmd_merge(ctx, compress_args);
        if (search->parsed()) return cmd_search(ctx, retrieval);
        if (eval->parsed()) return cmd_eval(ctx, retrieval);
        if (sweep->parsed()) return cmd_sweep(ctx, retrieval);
        if (overlap->parsed()) return cmd_analyze_overlap(ctx, analyze_args);
        if (redundancy->parsed()) return cmd_analyze_redundancy(ctx, analyze_args);
        if (mem->parsed()) return cmd_mem(ctx, mem_args);
        if (gen_cmd->parsed()) return cmd_gen(ctx, gen);
    } catch (const IoError& e) {
        err << e.what() << "\n";
        return kIo;
    } catch (const Error& e) {
        err << e.what() << "\n";
        return kValidation;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "io error: " << e.what() << "\n";
        return kIo;
    }
    return kValidation;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace mvec::cli
