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

// MVEC: little-endian container for collections of embedding matrices.
//
//   header  : "MVEC" | version u32 = 1 | dtype u8 (0 = f32, 1 = f16) | 3 reserved zero bytes
//             | page_count u64 | d u32
//   record  : id_len u16 | id (UTF-8) | n_vectors u32 | grid_rows u16 | grid_cols u16
//             | normalized u8 | n_vectors * d elements, row-major
//
// grid (0, 0) means the record has no patch layout. Corpora additionally carry a JSON
// sidecar ("<path>.manifest.json") holding the corpus id and compression provenance.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mvec/embeddings.h"

namespace mvec {

inline constexpr std::uint32_t kMvecVersion = 1;
inline constexpr std::size_t kMvecHeaderBytes = 24;

struct MvecFile {
    Dtype dtype = Dtype::f32;
    std::size_t d = 0;
    std::vector<PageEmbeddings> records;
};

std::vector<std::uint8_t> encode_mvec(const std::vector<PageEmbeddings>& records, Dtype dtype);

/// Parses and validates an MVEC image. Structural problems raise FormatError,
/// invariant violations (grid mismatch, non-finite values, bad norms) ValidationError.
/// An f16 record flagged normalized keeps the flag only if its rows are still unit to
/// within kNormTolerance; rows off by no more than half rounding just lose the flag.
MvecFile decode_mvec(std::span<const std::uint8_t> bytes);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& path, const std::string& text);

std::filesystem::path manifest_path(const std::filesystem::path& corpus_path);

Corpus ingest_corpus(const std::filesystem::path& path);

void write_corpus(const std::vector<PageEmbeddings>& pages, Dtype dtype, const std::filesystem::path& path,
                  const std::optional<Provenance>& provenance = std::nullopt, std::string corpus_id = {});

std::vector<QueryEmbeddings> read_queries(const std::filesystem::path& path);
void write_queries(const std::vector<QueryEmbeddings>& queries, Dtype dtype, const std::filesystem::path& path);

/// Attention file: one record per page, n_vectors = 1, d = the page's vector count.
std::map<std::string, std::vector<float>> read_attention(const std::filesystem::path& path);
void write_attention(const std::map<std::string, std::vector<float>>& attention, const std::filesystem::path& path);

/// Synthesized queries: record ids "page_id#k", grouped by page and ordered by k.
std::map<std::string, std::vector<QueryEmbeddings>> read_synth_queries(const std::filesystem::path& path);
void write_synth_queries(const std::map<std::string, std::vector<QueryEmbeddings>>& synth, Dtype dtype,
                         const std::filesystem::path& path);

Qrels parse_qrels(const std::string& text);
Qrels read_qrels(const std::filesystem::path& path);
std::string format_qrels(const Qrels& qrels);

}  // namespace mvec
