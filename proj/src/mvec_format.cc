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

#include "mvec/mvec_format.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mvec/errors.h"
#include "mvec/half.h"

namespace mvec {

namespace {

constexpr char kMagic[4] = {'M', 'V', 'E', 'C'};
// Half rounding moves each element by at most 2^-11 of itself, so a unit row read back
// from f16 may miss the unit-norm tolerance by that much.
constexpr double kHalfNormSlack = 1.0 / 1024.0;

// Drops the normalized flag of an f16 record whose rows are unit up to half rounding
// but not up to kNormTolerance. Rows further off are left for validate() to reject.
void settle_half_normalized(PageEmbeddings& rec) {
    bool within_f32 = true;
    for (std::size_t i = 0; i < rec.num_vectors(); ++i) {
        const double err = std::abs(std::sqrt(squared_norm(rec.vectors.row(i))) - 1.0);
        if (!(err <= kNormTolerance + kHalfNormSlack)) return;
        within_f32 = within_f32 && err <= kNormTolerance;
    }
    if (!within_f32) rec.normalized = false;
}

// id_len + n_vectors + grid + normalized
constexpr std::size_t kMinRecordBytes = 2 + 4 + 2 + 2 + 1;

class Writer {
 public:
    void bytes(const void* p, std::size_t n) {
        const auto* b = static_cast<const std::uint8_t*>(p);
        out_.insert(out_.end(), b, b + n);
    }
    void u8(std::uint8_t v) { out_.push_back(v); }
    void u16(std::uint16_t v) {
        for (int i = 0; i < 2; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    std::vector<std::uint8_t> take() { return std::move(out_); }
    void reserve(std::size_t n) { out_.reserve(n); }

 private:
    std::vector<std::uint8_t> out_;
};

class Reader {
 public:
    explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

    std::size_t remaining() const { return in_.size() - pos_; }

    std::span<const std::uint8_t> take(std::size_t n, const char* what) {
        if (n > remaining()) {
            throw FormatError(std::string("truncated while reading ") + what);
        }
        auto s = in_.subspan(pos_, n);
        pos_ += n;
        return s;
    }
    std::uint64_t uint(std::size_t n, const char* what) {
        auto s = take(n, what);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < n; ++i) v |= std::uint64_t{s[i]} << (8 * i);
        return v;
    }

 private:
    std::span<const std::uint8_t> in_;
    std::size_t pos_ = 0;
};

bool valid_utf8(std::span<const std::uint8_t> s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const std::uint8_t c = s[i];
        std::size_t extra;
        std::uint32_t cp;
        if (c < 0x80) {
            ++i;
            continue;
        } else if ((c & 0xe0) == 0xc0) {
            extra = 1;
            cp = c & 0x1f;
        } else if ((c & 0xf0) == 0xe0) {
            extra = 2;
            cp = c & 0x0f;
        } else if ((c & 0xf8) == 0xf0) {
            extra = 3;
            cp = c & 0x07;
        } else {
            return false;
        }
        if (i + extra >= s.size()) return false;
        for (std::size_t k = 1; k <= extra; ++k) {
            if ((s[i + k] & 0xc0) != 0x80) return false;
            cp = (cp << 6) | (s[i + k] & 0x3f);
        }
        static constexpr std::uint32_t kMinForLength[4] = {0, 0x80, 0x800, 0x10000};
        if (cp < kMinForLength[extra] || cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) return false;
        i += extra + 1;
    }
    return true;
}

void encode_values(Writer& w, std::span<const float> values, Dtype dtype) {
    if (dtype == Dtype::f32) {
        for (float x : values) w.u32(std::bit_cast<std::uint32_t>(x));
    } else {
        for (float x : values) w.u16(float_to_half(x));
    }
}

std::filesystem::path sibling_manifest(const std::filesystem::path& p) {
    return std::filesystem::path(p.string() + ".manifest.json");
}

}  // namespace

std::vector<std::uint8_t> encode_mvec(const std::vector<PageEmbeddings>& records, Dtype dtype) {
    const std::size_t d = records.empty() ? 0 : records.front().dim();
    std::size_t payload = 0;
    for (const auto& r : records) {
        if (r.dim() != d) {
            throw ValidationError("record '" + r.page_id + "' has d=" + std::to_string(r.dim()) + ", expected " +
                                  std::to_string(d));
        }
        if (r.page_id.size() > 0xffff) throw ValidationError("record id longer than 65535 bytes");
        if (r.num_vectors() > 0xffffffffull) throw ValidationError("too many vectors in '" + r.page_id + "'");
        if (dtype == Dtype::f16) {
            for (float x : r.vectors.values()) {
                if (float_to_half(x) == 0x7c00 || float_to_half(x) == 0xfc00) {
                    throw ValidationError("value " + std::to_string(x) + " in '" + r.page_id +
                                          "' overflows half precision");
                }
            }
        }
        payload += kMinRecordBytes + r.page_id.size() + r.vectors.values().size() * bytes_per_element(dtype);
    }
    if (d > 0xffffffffull) throw ValidationError("dimension exceeds u32");

    Writer w;
    w.reserve(kMvecHeaderBytes + payload);
    w.bytes(kMagic, 4);
    w.u32(kMvecVersion);
    w.u8(static_cast<std::uint8_t>(dtype));
    w.u8(0);
    w.u8(0);
    w.u8(0);
    w.u64(records.size());
    w.u32(static_cast<std::uint32_t>(d));
    for (const auto& r : records) {
        w.u16(static_cast<std::uint16_t>(r.page_id.size()));
        w.bytes(r.page_id.data(), r.page_id.size());
        w.u32(static_cast<std::uint32_t>(r.num_vectors()));
        w.u16(r.grid ? r.grid->rows : 0);
        w.u16(r.grid ? r.grid->cols : 0);
        w.u8(r.normalized ? 1 : 0);
        encode_values(w, r.vectors.values(), dtype);
    }
    return w.take();
}

MvecFile decode_mvec(std::span<const std::uint8_t> bytes) {
    Reader r(bytes);
    auto magic = r.take(4, "magic");
    if (std::memcmp(magic.data(), kMagic, 4) != 0) throw FormatError("bad magic, not an MVEC file");
    const auto version = r.uint(4, "version");
    if (version != kMvecVersion) throw FormatError("unsupported MVEC version " + std::to_string(version));
    const auto dtype_byte = r.uint(1, "dtype");
    if (dtype_byte > 1) throw FormatError("unknown dtype code " + std::to_string(dtype_byte));
    const auto reserved = r.uint(3, "reserved");
    if (reserved != 0) throw FormatError("reserved header bytes are not zero");
    const std::uint64_t page_count = r.uint(8, "page_count");
    const std::uint64_t d = r.uint(4, "d");

    MvecFile file;
    file.dtype = static_cast<Dtype>(dtype_byte);
    file.d = static_cast<std::size_t>(d);
    if (page_count > r.remaining() / kMinRecordBytes) {
        throw FormatError("page_count " + std::to_string(page_count) + " exceeds the file size");
    }
    if (page_count > 0 && d == 0) throw ValidationError("dimension d must be at least 1");

    const std::size_t elem = bytes_per_element(file.dtype);
    file.records.reserve(static_cast<std::size_t>(page_count));
    std::set<std::string> seen;
    for (std::uint64_t p = 0; p < page_count; ++p) {
        PageEmbeddings rec;
        const auto id_len = r.uint(2, "id_len");
        auto id = r.take(static_cast<std::size_t>(id_len), "record id");
        if (!valid_utf8(id)) throw FormatError("record " + std::to_string(p) + " id is not valid UTF-8");
        rec.page_id.assign(reinterpret_cast<const char*>(id.data()), id.size());
        if (rec.page_id.empty()) throw ValidationError("record " + std::to_string(p) + " has an empty id");
        if (!seen.insert(rec.page_id).second) throw ValidationError("duplicate record id '" + rec.page_id + "'");

        const std::uint64_t n = r.uint(4, "n_vectors");
        const auto grid_rows = static_cast<std::uint16_t>(r.uint(2, "grid_rows"));
        const auto grid_cols = static_cast<std::uint16_t>(r.uint(2, "grid_cols"));
        const auto normalized = r.uint(1, "normalized");
        if (normalized > 1) throw FormatError("normalized flag must be 0 or 1 in '" + rec.page_id + "'");
        if (n == 0) throw ValidationError("record '" + rec.page_id + "' has no vectors");
        if ((grid_rows == 0) != (grid_cols == 0)) {
            throw ValidationError("record '" + rec.page_id + "' has a half-specified grid");
        }
        // n < 2^32 and d < 2^32, so n * d fits in 64 bits; guard the byte count instead.
        const std::uint64_t count = n * d;
        if (count > r.remaining() / elem) {
            throw FormatError("truncated payload in record '" + rec.page_id + "'");
        }
        auto payload = r.take(static_cast<std::size_t>(count * elem), "payload");
        std::vector<float> values(static_cast<std::size_t>(count));
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (file.dtype == Dtype::f32) {
                std::uint32_t bits = 0;
                for (int b = 0; b < 4; ++b) bits |= std::uint32_t{payload[i * 4 + b]} << (8 * b);
                values[i] = std::bit_cast<float>(bits);
            } else {
                const auto bits = static_cast<std::uint16_t>(payload[i * 2] | (payload[i * 2 + 1] << 8));
                values[i] = half_to_float(bits);
            }
        }
        rec.vectors = Matrix(static_cast<std::size_t>(n), file.d, std::move(values));
        if (grid_rows != 0) rec.grid = Grid{grid_rows, grid_cols};
        rec.normalized = normalized == 1;
        file.records.push_back(std::move(rec));
    }
    if (r.remaining() != 0) throw FormatError(std::to_string(r.remaining()) + " trailing bytes after last record");
    // invariants only once the whole layout is known to be sound
    for (auto& rec : file.records) {
        if (file.dtype == Dtype::f16 && rec.normalized) settle_half_normalized(rec);
        validate(rec);
    }
    return file;
}

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("failed reading '" + path.string() + "'");
    return bytes;
}

void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("failed writing '" + path.string() + "'");
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
    write_file_bytes(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::filesystem::path manifest_path(const std::filesystem::path& corpus_path) {
    return sibling_manifest(corpus_path);
}

namespace {

nlohmann::json manifest_to_json(const CorpusManifest& m) {
    nlohmann::json j;
    j["corpus_id"] = m.corpus_id;
    j["d"] = m.d;
    j["page_count"] = m.page_count;
    j["dtype"] = std::string(to_string(m.dtype));
    if (m.provenance) {
        nlohmann::json p;
        p["strategy"] = std::string(to_string(m.provenance->strategy));
        p["parameter"] = m.provenance->parameter;
        p["seed"] = m.provenance->seed ? nlohmann::json(*m.provenance->seed) : nlohmann::json(nullptr);
        j["provenance"] = p;
    } else {
        j["provenance"] = nullptr;
    }
    return j;
}

CorpusManifest manifest_from_json(const nlohmann::json& j) {
    CorpusManifest m;
    try {
        m.corpus_id = j.at("corpus_id").get<std::string>();
        m.d = j.at("d").get<std::size_t>();
        m.page_count = j.at("page_count").get<std::size_t>();
        m.dtype = parse_dtype(j.at("dtype").get<std::string>());
        const auto& p = j.at("provenance");
        if (!p.is_null()) {
            Provenance prov;
            prov.strategy = parse_strategy(p.at("strategy").get<std::string>());
            prov.parameter = p.at("parameter").get<double>();
            if (!p.at("seed").is_null()) prov.seed = p.at("seed").get<std::uint64_t>();
            m.provenance = prov;
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    } catch (const ValidationError& e) {
        throw FormatError(std::string("manifest: ") + e.what());
    }
    return m;
}

}  // namespace

Corpus ingest_corpus(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    MvecFile file = decode_mvec(bytes);

    Corpus corpus;
    const auto sidecar = manifest_path(path);
    if (std::filesystem::exists(sidecar)) {
        const auto text = read_file_bytes(sidecar);
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text.begin(), text.end());
        } catch (const nlohmann::json::exception& e) {
            throw FormatError("manifest '" + sidecar.string() + "': " + e.what());
        }
        corpus.manifest = manifest_from_json(j);
        if (corpus.manifest.d != file.d || corpus.manifest.page_count != file.records.size() ||
            corpus.manifest.dtype != file.dtype) {
            throw FormatError("manifest '" + sidecar.string() + "' disagrees with the MVEC header");
        }
    } else {
        corpus.manifest.corpus_id = path.stem().string();
        corpus.manifest.d = file.d;
        corpus.manifest.page_count = file.records.size();
        corpus.manifest.dtype = file.dtype;
    }
    corpus.pages = std::move(file.records);
    return corpus;
}

void write_corpus(const std::vector<PageEmbeddings>& pages, Dtype dtype, const std::filesystem::path& path,
                  const std::optional<Provenance>& provenance, std::string corpus_id) {
    validate_collection(pages);
    const auto bytes = encode_mvec(pages, dtype);
    CorpusManifest m;
    m.corpus_id = corpus_id.empty() ? path.stem().string() : std::move(corpus_id);
    m.d = pages.empty() ? 0 : pages.front().dim();
    m.page_count = pages.size();
    m.dtype = dtype;
    m.provenance = provenance;
    write_file_bytes(path, bytes);
    write_text_file(manifest_path(path), manifest_to_json(m).dump(2) + "\n");
}

std::vector<QueryEmbeddings> read_queries(const std::filesystem::path& path) {
    MvecFile file = decode_mvec(read_file_bytes(path));
    std::vector<QueryEmbeddings> out;
    out.reserve(file.records.size());
    for (auto& r : file.records) {
        out.push_back(QueryEmbeddings{std::move(r.page_id), std::move(r.vectors), r.normalized});
    }
    return out;
}

namespace {

std::vector<PageEmbeddings> as_records(const std::vector<QueryEmbeddings>& queries) {
    std::vector<PageEmbeddings> records;
    records.reserve(queries.size());
    for (const auto& q : queries) {
        validate(q);
        records.push_back(PageEmbeddings{q.query_id, q.vectors, std::nullopt, q.normalized});
    }
    return records;
}

}  // namespace

void write_queries(const std::vector<QueryEmbeddings>& queries, Dtype dtype, const std::filesystem::path& path) {
    write_file_bytes(path, encode_mvec(as_records(queries), dtype));
}

std::map<std::string, std::vector<float>> read_attention(const std::filesystem::path& path) {
    MvecFile file = decode_mvec(read_file_bytes(path));
    std::map<std::string, std::vector<float>> out;
    for (auto& r : file.records) {
        if (r.num_vectors() != 1) {
            throw ValidationError("attention record '" + r.page_id + "' must hold exactly one vector");
        }
        auto values = r.vectors.values();
        if (std::any_of(values.begin(), values.end(), [](float x) { return x < 0.0f; })) {
            throw ValidationError("attention record '" + r.page_id + "' has negative values");
        }
        out.emplace(r.page_id, std::vector<float>(values.begin(), values.end()));
    }
    return out;
}

void write_attention(const std::map<std::string, std::vector<float>>& attention, const std::filesystem::path& path) {
    std::vector<PageEmbeddings> records;
    for (const auto& [id, values] : attention) {
        records.push_back(PageEmbeddings{id, Matrix(1, values.size(), values), std::nullopt, false});
    }
    for (const auto& r : records) validate(r);
    write_file_bytes(path, encode_mvec(records, Dtype::f32));
}

std::map<std::string, std::vector<QueryEmbeddings>> read_synth_queries(const std::filesystem::path& path) {
    std::map<std::string, std::map<std::size_t, QueryEmbeddings>> by_page;
    for (auto& q : read_queries(path)) {
        auto [page, k] = split_synth_id(q.query_id);
        by_page[page].emplace(k, std::move(q));
    }
    std::map<std::string, std::vector<QueryEmbeddings>> out;
    for (auto& [page, qs] : by_page) {
        auto& list = out[page];
        for (auto& [k, q] : qs) list.push_back(std::move(q));
    }
    return out;
}

void write_synth_queries(const std::map<std::string, std::vector<QueryEmbeddings>>& synth, Dtype dtype,
                         const std::filesystem::path& path) {
    std::vector<QueryEmbeddings> flat;
    for (const auto& [page, qs] : synth) {
        for (std::size_t k = 0; k < qs.size(); ++k) {
            flat.push_back(QueryEmbeddings{page + "#" + std::to_string(k), qs[k].vectors, qs[k].normalized});
        }
    }
    write_queries(flat, dtype, path);
}

Qrels parse_qrels(const std::string& text) {
    Qrels qrels;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto t1 = line.find('\t');
        const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
        if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos) {
            throw FormatError("qrels line " + std::to_string(line_no) + ": expected 3 tab-separated fields");
        }
        const std::string query = line.substr(0, t1);
        const std::string page = line.substr(t1 + 1, t2 - t1 - 1);
        const std::string grade = line.substr(t2 + 1);
        if (query.empty() || page.empty() || grade.empty() ||
            !std::all_of(grade.begin(), grade.end(), [](char c) { return c >= '0' && c <= '9'; }) ||
            grade.size() > 9) {
            throw FormatError("qrels line " + std::to_string(line_no) + ": malformed judgment");
        }
        qrels.add(query, page, std::stoi(grade));
    }
    return qrels;
}

Qrels read_qrels(const std::filesystem::path& path) {
    const auto bytes = read_file_bytes(path);
    return parse_qrels(std::string(bytes.begin(), bytes.end()));
}

std::string format_qrels(const Qrels& qrels) {
    std::string out;
    for (const auto& [q, pages] : qrels.all()) {
        for (const auto& [p, rel] : pages) {
            out += q + "\t" + p + "\t" + std::to_string(rel) + "\n";
        }
    }
    return out;
}

}  // namespace mvec
