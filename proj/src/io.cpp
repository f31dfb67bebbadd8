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

#include "lddr/io.hpp"

#include <json.hpp>

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>
#include <unordered_map>
#include <vector>

namespace lddr {

namespace {

using nlohmann::json;

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t load_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void check_rows(const Matrix& frames, const Vector& query, std::size_t payload_offset) {
  const auto dim = static_cast<std::size_t>(frames.cols());
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    if (frames.row(t).squaredNorm() == 0.0) {
      throw Error(ErrorCode::kZeroNorm,
                  "frame " + std::to_string(t) + " at byte offset " +
                      std::to_string(payload_offset + 4 * dim * static_cast<std::size_t>(t)) +
                      " has zero norm");
    }
  }
  if (query.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kZeroNorm,
                "query at byte offset " +
                    std::to_string(payload_offset + 4 * dim * static_cast<std::size_t>(frames.rows())) +
                    " has zero norm");
  }
}

void write_text(const std::filesystem::path& path, const std::string& text,
                std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoFailure, "cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw Error(ErrorCode::kIoFailure, "failed writing " + path.string());
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<double> json_vector(const json& node, const std::string& what) {
  if (!node.is_array()) throw Error(ErrorCode::kParseError, what + " must be an array");
  std::vector<double> out;
  out.reserve(node.size());
  for (const auto& v : node) {
    if (!v.is_number()) throw Error(ErrorCode::kParseError, what + " must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

EmbeddingSet read_embeddings(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = slurp(path);
  const std::size_t magic_len = std::strlen(kEmbeddingMagic);
  if (bytes.size() < magic_len) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": " + std::to_string(bytes.size()) +
                                               " bytes is shorter than the header");
  }
  if (std::memcmp(bytes.data(), kEmbeddingMagic, magic_len) != 0) {
    throw Error(ErrorCode::kBadMagic, path.string() + ": expected magic LDDREMB1 at byte offset 0");
  }
  if (bytes.size() < kEmbeddingHeaderBytes) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": expected at least 16 header bytes, got " +
                                               std::to_string(bytes.size()));
  }
  const std::uint32_t frames = load_u32(bytes.data() + 8);
  const std::uint32_t dim = load_u32(bytes.data() + 12);
  if (frames == 0 || dim == 0) {
    throw Error(ErrorCode::kDimensionMismatch, path.string() + ": T and d must be positive");
  }
  const std::uint64_t expected =
      kEmbeddingHeaderBytes + 4ull * dim * (static_cast<std::uint64_t>(frames) + 1);
  if (bytes.size() < expected) {
    throw Error(ErrorCode::kTruncatedFile, path.string() + ": expected " + std::to_string(expected) +
                                               " bytes, got " + std::to_string(bytes.size()));
  }
  if (bytes.size() > expected) {
    throw Error(ErrorCode::kTrailingBytes, path.string() + ": expected " + std::to_string(expected) +
                                               " bytes, got " + std::to_string(bytes.size()));
  }

  auto value_at = [&](std::size_t offset) {
    const float f = std::bit_cast<float>(load_u32(bytes.data() + offset));
    if (!std::isfinite(f)) {
      throw Error(ErrorCode::kNonFinite,
                  path.string() + ": non-finite value at byte offset " + std::to_string(offset));
    }
    return static_cast<double>(f);
  };

  Matrix frame_matrix(frames, dim);
  std::size_t offset = kEmbeddingHeaderBytes;
  for (std::uint32_t t = 0; t < frames; ++t) {
    for (std::uint32_t c = 0; c < dim; ++c, offset += 4) frame_matrix(t, c) = value_at(offset);
  }
  Vector query(dim);
  for (std::uint32_t c = 0; c < dim; ++c, offset += 4) query[c] = value_at(offset);
  check_rows(frame_matrix, query, kEmbeddingHeaderBytes);
  return EmbeddingSet(std::move(frame_matrix), std::move(query));
}

EmbeddingSet read_embeddings_json(const std::filesystem::path& path) {
  const std::vector<unsigned char> bytes = slurp(path);
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("frames") || !doc.contains("query")) {
    throw Error(ErrorCode::kParseError, path.string() + ": expected object with frames and query");
  }
  const json& rows = doc["frames"];
  if (!rows.is_array() || rows.empty()) {
    throw Error(ErrorCode::kDimensionMismatch, path.string() + ": frames must be a nonempty array");
  }
  const std::vector<double> query = json_vector(doc["query"], "query");
  const std::size_t dim = json_vector(rows[0], "frames[0]").size();
  if (dim == 0) throw Error(ErrorCode::kDimensionMismatch, path.string() + ": empty frame row");

  Matrix frame_matrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t t = 0; t < rows.size(); ++t) {
    const std::vector<double> row = json_vector(rows[t], "frames[" + std::to_string(t) + "]");
    if (row.size() != dim) {
      throw Error(ErrorCode::kDimensionMismatch,
                  path.string() + ": frame " + std::to_string(t) + " has " +
                      std::to_string(row.size()) + " values, expected " + std::to_string(dim));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      frame_matrix(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  if (query.size() != dim) {
    throw Error(ErrorCode::kDimensionMismatch, path.string() + ": query has " +
                                                   std::to_string(query.size()) +
                                                   " values, expected " + std::to_string(dim));
  }
  return EmbeddingSet(std::move(frame_matrix),
                      Eigen::Map<const Vector>(query.data(), static_cast<Eigen::Index>(dim)));
}

EmbeddingSet load_embeddings(const std::filesystem::path& path) {
  if (path.extension() == ".json") return read_embeddings_json(path);
  return read_embeddings(path);
}

void write_embeddings(const EmbeddingSet& embeddings, const std::filesystem::path& path) {
  std::string out(kEmbeddingMagic);
  store_u32(out, static_cast<std::uint32_t>(embeddings.frame_count()));
  store_u32(out, static_cast<std::uint32_t>(embeddings.dim()));
  const Matrix& frames = embeddings.frames();
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    for (Eigen::Index c = 0; c < frames.cols(); ++c) {
      store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(frames(t, c))));
    }
  }
  for (Eigen::Index c = 0; c < embeddings.query().size(); ++c) {
    store_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(embeddings.query()[c])));
  }
  write_text(path, out, std::ios::out | std::ios::binary);
}

void write_embeddings_json(const EmbeddingSet& embeddings, const std::filesystem::path& path) {
  json doc;
  doc["frames"] = json::array();
  const Matrix& frames = embeddings.frames();
  for (Eigen::Index t = 0; t < frames.rows(); ++t) {
    json row = json::array();
    for (Eigen::Index c = 0; c < frames.cols(); ++c) row.push_back(frames(t, c));
    doc["frames"].push_back(std::move(row));
  }
  doc["query"] = json::array();
  for (Eigen::Index c = 0; c < embeddings.query().size(); ++c) {
    doc["query"].push_back(embeddings.query()[c]);
  }
  write_text(path, doc.dump() + "\n");
}

std::string render_plan(const AllocationPlan& plan, const SelectionTrace& trace,
                        const ImportanceTable& scores, const RunConfig& config) {
  std::unordered_map<Index, const ImportanceEntry*> by_frame;
  for (const auto& e : scores.entries()) by_frame[e.frame] = &e;
  std::unordered_map<Index, Index> rank_of;
  for (Index r = 0; r < plan.ranking().size(); ++r) rank_of[plan.ranking()[r]] = r;

  std::ostringstream os;
  os << "{\n";
  os << "  \"config\": {\"mode\": \"" << to_string(config.mode) << "\", \"frame_budget\": "
     << config.frame_budget << ", \"w_min\": " << config.bounds.w_min
     << ", \"w_max\": " << config.bounds.w_max << ", \"tau\": " << fmt_double(config.tau)
     << ", \"pool_multiplier\": " << fmt_double(config.pool_multiplier)
     << ", \"chunks\": " << config.chunks << ", \"frame_height\": " << config.geometry.height_px
     << ", \"frame_width\": " << config.geometry.width_px << "},\n";

  os << "  \"candidates\": [";
  for (Index i = 0; i < trace.size(); ++i) {
    os << (i == 0 ? "\n" : ",\n") << "    {\"step\": " << i
       << ", \"frame_index\": " << trace.selected()[i]
       << ", \"gain\": " << fmt_double(trace.gains()[i]) << "}";
  }
  os << (trace.size() == 0 ? "],\n" : "\n  ],\n");
  os << "  \"exhausted\": " << (trace.exhausted() ? "true" : "false") << ",\n";

  os << "  \"frames\": [";
  const std::vector<Index> order = plan.temporal_order();
  for (Index n = 0; n < order.size(); ++n) {
    const Index pos = order[n];
    const Index frame = plan.retained()[pos];
    const ImportanceEntry& e = *by_frame.at(frame);
    const Resolution& r = plan.resolutions()[pos];
    os << (n == 0 ? "\n" : ",\n") << "    {\"frame_index\": " << frame
       << ", \"gd_rank\": " << rank_of.at(frame) << ", \"gd_score\": " << fmt_double(e.gd_score)
       << ", \"density\": " << fmt_double(e.density)
       << ", \"density_aware_score\": " << fmt_double(e.density_aware)
       << ", \"tokens\": " << plan.tokens()[pos] << ", \"height_px\": " << r.height_px
       << ", \"width_px\": " << r.width_px << "}";
  }
  os << (order.empty() ? "],\n" : "\n  ],\n");

  os << "  \"totals\": {\"k_star\": " << plan.k_star() << ", \"total_tokens\": "
     << plan.total_tokens() << ", \"budget\": " << plan.budget() << "}\n";
  os << "}\n";
  return os.str();
}

void write_plan(const AllocationPlan& plan, const SelectionTrace& trace,
                const ImportanceTable& scores, const RunConfig& config,
                const std::filesystem::path& path) {
  write_text(path, render_plan(plan, trace, scores, config));
}

}  // namespace lddr
