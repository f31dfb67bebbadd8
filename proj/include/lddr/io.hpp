// Copyright 2026 The LDDR Authors.
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

// Embedding ingestion and plan serialization.
//
// Binary embedding file, all integers and floats little-endian:
//
//   offset  size        field
//   0       8           magic "LDDREMB1"
//   8       4           T (uint32, frame count)
//   12      4           d (uint32, embedding dim)
//   16      4*T*d       frame embeddings, float32, row-major
//   16+4Td  4*d         query embedding, float32
//
// The file is exactly 16 + 4*d*(T+1) bytes. Values are widened to double.
//
// JSON embedding file: {"frames": [[...], ...], "query": [...]}.

#ifndef LDDR_IO_HPP
#define LDDR_IO_HPP

#include "lddr/config.hpp"
#include "lddr/types.hpp"

#include <filesystem>
#include <string>

namespace lddr {

inline constexpr char kEmbeddingMagic[] = "LDDREMB1";
inline constexpr std::size_t kEmbeddingHeaderBytes = 16;

EmbeddingSet read_embeddings(const std::filesystem::path& path);
EmbeddingSet read_embeddings_json(const std::filesystem::path& path);

// Dispatches on the extension: ".json" goes to the JSON reader.
EmbeddingSet load_embeddings(const std::filesystem::path& path);

// Narrows to float32. Used by tests and the benchmark generator.
void write_embeddings(const EmbeddingSet& embeddings, const std::filesystem::path& path);
void write_embeddings_json(const EmbeddingSet& embeddings, const std::filesystem::path& path);

// Deterministic JSON rendering of a plan: floats use 9 significant digits and
// retained frames are listed in temporal order.
std::string render_plan(const AllocationPlan& plan, const SelectionTrace& trace,
                        const ImportanceTable& scores, const RunConfig& config);

void write_plan(const AllocationPlan& plan, const SelectionTrace& trace,
                const ImportanceTable& scores, const RunConfig& config,
                const std::filesystem::path& path);

}  // namespace lddr

#endif  // LDDR_IO_HPP
