// Copyright 2026 The genret Authors.
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
//
// Baseline descriptor retrieval: exhaustive cosine scan and sign-random-
// projection LSH with flat Hamming ranking. Indices are immutable after
// build; concurrent queries are safe.

#ifndef GENRET_DESCINDEX_HPP
#define GENRET_DESCINDEX_HPP

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "genret/common.hpp"

namespace genret {

struct descriptor_matrix {
  std::vector<std::vector<float>> rows;
  std::vector<std::int64_t> scene_index;  // per row

  std::size_t size() const { return rows.size(); }
  int dim() const { return rows.empty() ? 0 : static_cast<int>(rows[0].size()); }
};

struct search_hit {
  std::int64_t scene_index = 0;
  double score = 0.0;  // cosine similarity, or Hamming distance for LSH
};

namespace detail {

inline double dot_f(const float* a, const float* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

inline double norm_f(const float* a, int dim) { return std::sqrt(dot_f(a, a, dim)); }

}  // namespace detail

// Top-k by cosine similarity, descending; ties broken by ascending scene
// index. Excluded indices are never returned.
inline std::vector<search_hit> exact_search(const std::vector<float>& query,
                                            const descriptor_matrix& ref, int k,
                                            const std::unordered_set<std::int64_t>* exclusion = nullptr) {
  require(k >= 1, "k must be >= 1");
  if (ref.rows.empty()) return {};
  const int dim = ref.dim();
  require(static_cast<int>(query.size()) == dim, "query dim ", query.size(),
          " != reference dim ", dim);
  const double qn = detail::norm_f(query.data(), dim);
  std::vector<search_hit> hits;
  hits.reserve(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) {
    const std::int64_t idx = ref.scene_index[i];
    if (exclusion && exclusion->count(idx)) continue;
    const double rn = detail::norm_f(ref.rows[i].data(), dim);
    const double denom = qn * rn;
    const double sim = denom > 0 ? detail::dot_f(query.data(), ref.rows[i].data(), dim) / denom : 0.0;
    hits.push_back({idx, sim});
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    [](const search_hit& a, const search_hit& b) {
                      if (a.score != b.score) return a.score > b.score;
                      return a.scene_index < b.scene_index;
                    });
  hits.resize(keep);
  return hits;
}

// Sign-random-projection index: H Gaussian hyperplanes; bit b of a code is 1
// iff the projection onto hyperplane b is >= 0. Codes are bit-packed into
// 64-bit words, least significant bit first.
struct lsh_index {
  int bits = 0;                      // H
  int dim = 0;                       // D
  std::uint64_t seed = 0;
  std::vector<float> hyperplanes;    // H x D row-major
  std::vector<std::uint64_t> codes;  // N x words_per_code
  std::vector<std::int64_t> scene_index;

  int words_per_code() const { return (bits + 63) / 64; }
  std::size_t size() const { return scene_index.size(); }
};

namespace detail {

inline void lsh_encode(const lsh_index& index, const float* vec, std::uint64_t* out) {
  const int words = index.words_per_code();
  std::fill(out, out + words, 0ULL);
  for (int b = 0; b < index.bits; ++b) {
    const float* h = &index.hyperplanes[static_cast<std::size_t>(b) * index.dim];
    if (dot_f(h, vec, index.dim) >= 0.0) out[b / 64] |= 1ULL << (b % 64);
  }
}

inline int hamming(const std::uint64_t* a, const std::uint64_t* b, int words) {
  int d = 0;
  for (int w = 0; w < words; ++w) d += std::popcount(a[w] ^ b[w]);
  return d;
}

}  // namespace detail

inline lsh_index lsh_build(const descriptor_matrix& ref, int bits, std::uint64_t seed) {
  require(bits >= 1, "H must be >= 1");
  lsh_index index;
  index.bits = bits;
  index.dim = ref.dim();
  index.seed = seed;
  index.scene_index = ref.scene_index;
  rng r(seed);
  index.hyperplanes.resize(static_cast<std::size_t>(bits) * index.dim);
  for (float& v : index.hyperplanes) v = static_cast<float>(r.gaussian());
  const int words = index.words_per_code();
  index.codes.resize(ref.size() * static_cast<std::size_t>(words));
  for (std::size_t i = 0; i < ref.size(); ++i)
    detail::lsh_encode(index, ref.rows[i].data(), &index.codes[i * static_cast<std::size_t>(words)]);
  return index;
}

// Top-k by ascending Hamming distance over all codes (flat scan); ties broken
// by ascending scene index. Hit scores hold the Hamming distance.
inline std::vector<search_hit> lsh_search(const std::vector<float>& query, const lsh_index& index,
                                          int k,
                                          const std::unordered_set<std::int64_t>* exclusion = nullptr) {
  require(k >= 1, "k must be >= 1");
  if (index.size() == 0) return {};
  require(static_cast<int>(query.size()) == index.dim, "query dim ", query.size(),
          " != index dim ", index.dim);
  const int words = index.words_per_code();
  std::vector<std::uint64_t> qcode(static_cast<std::size_t>(words));
  detail::lsh_encode(index, query.data(), qcode.data());
  std::vector<search_hit> hits;
  hits.reserve(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) {
    const std::int64_t idx = index.scene_index[i];
    if (exclusion && exclusion->count(idx)) continue;
    const int d = detail::hamming(qcode.data(), &index.codes[i * static_cast<std::size_t>(words)], words);
    hits.push_back({idx, static_cast<double>(d)});
  }
  const std::size_t keep = std::min<std::size_t>(static_cast<std::size_t>(k), hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(keep), hits.end(),
                    [](const search_hit& a, const search_hit& b) {
                      if (a.score != b.score) return a.score < b.score;
                      return a.scene_index < b.scene_index;
                    });
  hits.resize(keep);
  return hits;
}

// ---------------------------------------------------------------------------
// Serialization: "LSH1" | u32 H | u32 D | u32 N | u64 seed | hyperplanes f32 |
// codes bit-packed little-endian | scene indices i64.

inline void write_lsh_index(const std::string& path, const lsh_index& index) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write LSH index: ", path);
  out.write("LSH1", 4);
  const std::uint32_t h = static_cast<std::uint32_t>(index.bits);
  const std::uint32_t d = static_cast<std::uint32_t>(index.dim);
  const std::uint32_t n = static_cast<std::uint32_t>(index.size());
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(&d), 4);
  out.write(reinterpret_cast<const char*>(&n), 4);
  out.write(reinterpret_cast<const char*>(&index.seed), 8);
  out.write(reinterpret_cast<const char*>(index.hyperplanes.data()),
            static_cast<std::streamsize>(sizeof(float) * index.hyperplanes.size()));
  const int bytes_per_code = (index.bits + 7) / 8;
  for (std::size_t i = 0; i < index.size(); ++i) {
    const auto* words = &index.codes[i * static_cast<std::size_t>(index.words_per_code())];
    out.write(reinterpret_cast<const char*>(words), bytes_per_code);
  }
  out.write(reinterpret_cast<const char*>(index.scene_index.data()),
            static_cast<std::streamsize>(sizeof(std::int64_t) * index.scene_index.size()));
  require(out.good(), "short write: ", path);
}

inline lsh_index read_lsh_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open LSH index: ", path);
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "LSH1", 4) == 0, path, ": bad magic");
  std::uint32_t h = 0, d = 0, n = 0;
  std::uint64_t seed = 0;
  in.read(reinterpret_cast<char*>(&h), 4);
  in.read(reinterpret_cast<char*>(&d), 4);
  in.read(reinterpret_cast<char*>(&n), 4);
  in.read(reinterpret_cast<char*>(&seed), 8);
  require(in.good(), path, ": truncated header");
  lsh_index index;
  index.bits = static_cast<int>(h);
  index.dim = static_cast<int>(d);
  index.seed = seed;
  index.hyperplanes.resize(static_cast<std::size_t>(h) * d);
  in.read(reinterpret_cast<char*>(index.hyperplanes.data()),
          static_cast<std::streamsize>(sizeof(float) * index.hyperplanes.size()));
  const int bytes_per_code = (static_cast<int>(h) + 7) / 8;
  const int words = (static_cast<int>(h) + 63) / 64;
  index.codes.assign(static_cast<std::size_t>(n) * words, 0ULL);
  for (std::uint32_t i = 0; i < n; ++i)
    in.read(reinterpret_cast<char*>(&index.codes[static_cast<std::size_t>(i) * words]), bytes_per_code);
  index.scene_index.resize(n);
  in.read(reinterpret_cast<char*>(index.scene_index.data()),
          static_cast<std::streamsize>(sizeof(std::int64_t) * n));
  require(in.good(), path, ": truncated body");
  return index;
}

}  // namespace genret

#endif  // GENRET_DESCINDEX_HPP
