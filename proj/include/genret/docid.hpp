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
// Scene identifiers (docids): strings over '0'..'9' produced by one of four
// codecs.
//   label    -- zero-padded sequential scene index
//   semantic -- recursive k-means cluster path plus a within-leaf rank
//   gps      -- digit-interleaved shifted/scaled planar coordinates
//   hilbert  -- Hilbert-curve distance of the shifted/scaled cell
// gps and hilbert docids have one fixed length per dataset; scenes that fall
// into the same cell collide and are disambiguated by a rank suffix, with the
// collision count reported.

#ifndef GENRET_DOCID_HPP
#define GENRET_DOCID_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "genret/common.hpp"
#include "genret/dataset.hpp"
#include "genret/hilbert.hpp"

namespace genret {

enum class docid_strategy : std::uint8_t { label, semantic, gps, hilbert };

inline const char* strategy_name(docid_strategy s) {
  switch (s) {
    case docid_strategy::label: return "LABEL";
    case docid_strategy::semantic: return "SEMANTIC";
    case docid_strategy::gps: return "GPS";
    default: return "HILBERT";
  }
}

inline docid_strategy strategy_from_name(const std::string& name) {
  if (name == "LABEL") return docid_strategy::label;
  if (name == "SEMANTIC") return docid_strategy::semantic;
  if (name == "GPS") return docid_strategy::gps;
  if (name == "HILBERT") return docid_strategy::hilbert;
  fail("unknown docid strategy '", name, "'");
}

struct docid {
  std::string text;
  docid_strategy strategy = docid_strategy::label;
};

// Dataset-wide codec state. Offsets make shifted coordinates non-negative;
// scale 100 gives centimeter cells; digit_width is fixed once per dataset so
// queries and references agree.
struct codec_meta {
  docid_strategy strategy = docid_strategy::gps;
  double x_offset = 0.0;
  double y_offset = 0.0;
  double scale = 100.0;  // units per meter
  int digit_width = 1;
  int hilbert_order = 17;
  int kmeans_k = 10;
  std::uint64_t kmeans_seed = 0;
};

namespace detail {

inline int decimal_width(std::uint64_t v) {
  int w = 1;
  while (v >= 10) {
    v /= 10;
    ++w;
  }
  return w;
}

inline std::string zero_pad(std::uint64_t v, int width) {
  std::string s = std::to_string(v);
  require(static_cast<int>(s.size()) <= width, "value ", v, " does not fit in ", width, " digits");
  return std::string(static_cast<std::size_t>(width) - s.size(), '0') + s;
}

inline std::uint64_t scaled_coord(double v, double offset, double scale, const char* axis) {
  const double shifted = (v + offset) * scale;
  const long long r = std::llround(shifted);
  require(r >= 0, axis, " coordinate ", v, " negative after shift by ", offset);
  return static_cast<std::uint64_t>(r);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Label codec

inline docid encode_label(std::int64_t scene_index, const codec_meta& meta) {
  require(scene_index >= 0, "scene index must be non-negative");
  return {detail::zero_pad(static_cast<std::uint64_t>(scene_index), meta.digit_width),
          docid_strategy::label};
}

// ---------------------------------------------------------------------------
// GPS codec: round to cells, zero-pad both axes to digit_width, interleave
// X[0] Y[0] X[1] Y[1] ... starting from the most significant digit.

inline docid encode_gps(double x, double y, const codec_meta& meta) {
  const std::uint64_t cx = detail::scaled_coord(x, meta.x_offset, meta.scale, "x");
  const std::uint64_t cy = detail::scaled_coord(y, meta.y_offset, meta.scale, "y");
  require(detail::decimal_width(cx) <= meta.digit_width && detail::decimal_width(cy) <= meta.digit_width,
          "scaled coordinate overflows digit width ", meta.digit_width, ": (", cx, ",", cy, ")");
  const std::string xs = detail::zero_pad(cx, meta.digit_width);
  const std::string ys = detail::zero_pad(cy, meta.digit_width);
  std::string out(static_cast<std::size_t>(2 * meta.digit_width), '0');
  for (int i = 0; i < meta.digit_width; ++i) {
    out[2 * i] = xs[i];
    out[2 * i + 1] = ys[i];
  }
  return {std::move(out), docid_strategy::gps};
}

// Inverse of encode_gps up to the cell quantum (1/scale meters).
inline std::pair<double, double> decode_gps(const std::string& text, const codec_meta& meta) {
  require(static_cast<int>(text.size()) == 2 * meta.digit_width, "gps docid '", text,
          "' has length ", text.size(), ", expected ", 2 * meta.digit_width);
  std::uint64_t cx = 0, cy = 0;
  for (int i = 0; i < meta.digit_width; ++i) {
    const char a = text[2 * i], b = text[2 * i + 1];
    require(a >= '0' && a <= '9' && b >= '0' && b <= '9', "gps docid '", text,
            "' contains a non-digit");
    cx = cx * 10 + static_cast<std::uint64_t>(a - '0');
    cy = cy * 10 + static_cast<std::uint64_t>(b - '0');
  }
  return {static_cast<double>(cx) / meta.scale - meta.x_offset,
          static_cast<double>(cy) / meta.scale - meta.y_offset};
}

// ---------------------------------------------------------------------------
// Hilbert codec: cellify like the GPS codec, then take the curve distance.

// Decimal width of the largest curve distance, 4^order - 1.
inline int hilbert_digit_width(int order) {
  return detail::decimal_width((1ULL << (2 * order)) - 1ULL);
}

inline docid encode_hilbert(double x, double y, const codec_meta& meta) {
  const std::uint64_t cx = detail::scaled_coord(x, meta.x_offset, meta.scale, "x");
  const std::uint64_t cy = detail::scaled_coord(y, meta.y_offset, meta.scale, "y");
  const std::uint64_t side = 1ULL << meta.hilbert_order;
  require(cx < side && cy < side, "cell (", cx, ",", cy, ") outside the 2^", meta.hilbert_order,
          " grid");
  const std::uint64_t d = hilbert_xy_to_d(static_cast<std::uint32_t>(cx),
                                          static_cast<std::uint32_t>(cy), meta.hilbert_order);
  return {detail::zero_pad(d, hilbert_digit_width(meta.hilbert_order)), docid_strategy::hilbert};
}

// ---------------------------------------------------------------------------
// Semantic codec: recursive k-means over descriptors. Every scene's docid is
// its cluster digit at each level followed by its zero-padded rank within the
// leaf. Leaf paths are prefix-free, which makes the docids unique.

struct semantic_encoding {
  std::vector<docid> docids;
  std::vector<std::string> leaf_path;  // cluster-digit path per scene
};

namespace detail {

inline double sq_dist(const float* a, const float* b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    s += d * d;
  }
  return s;
}

// Lloyd iterations with k-means++ seeding; ties go to the lowest cluster.
inline std::vector<int> kmeans_assign(const std::vector<const float*>& pts, int dim, int k,
                                      std::uint64_t seed, int max_iter = 50) {
  const int n = static_cast<int>(pts.size());
  rng r(seed);
  std::vector<std::vector<double>> centers;
  centers.reserve(static_cast<std::size_t>(k));
  auto push_center = [&](const float* p) {
    std::vector<double> c(static_cast<std::size_t>(dim));
    for (int i = 0; i < dim; ++i) c[static_cast<std::size_t>(i)] = p[i];
    centers.push_back(std::move(c));
  };
  push_center(pts[static_cast<std::size_t>(r.below(static_cast<std::uint64_t>(n)))]);
  std::vector<double> best_d(static_cast<std::size_t>(n));
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centers) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) {
          const double d = static_cast<double>(pts[i][j]) - c[static_cast<std::size_t>(j)];
          s += d * d;
        }
        best = std::min(best, s);
      }
      best_d[static_cast<std::size_t>(i)] = best;
      total += best;
    }
    if (total <= 0.0) {
      // all remaining points coincide with a center; reuse point 0
      push_center(pts[0]);
      continue;
    }
    double pick = r.uniform() * total;
    int chosen = n - 1;
    for (int i = 0; i < n; ++i) {
      pick -= best_d[static_cast<std::size_t>(i)];
      if (pick <= 0.0) {
        chosen = i;
        break;
      }
    }
    push_center(pts[static_cast<std::size_t>(chosen)]);
  }

  std::vector<int> assign(static_cast<std::size_t>(n), 0);
  std::vector<int> count(static_cast<std::size_t>(k));
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int arg = 0;
      double best = std::numeric_limits<double>::max();
      for (int c = 0; c < k; ++c) {
        double s = 0.0;
        for (int j = 0; j < dim; ++j) {
          const double d = static_cast<double>(pts[i][j]) - centers[c][static_cast<std::size_t>(j)];
          s += d * d;
        }
        if (s < best) {
          best = s;
          arg = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != arg) {
        assign[static_cast<std::size_t>(i)] = arg;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
    for (int c = 0; c < k; ++c) {
      count[static_cast<std::size_t>(c)] = 0;
      std::fill(centers[c].begin(), centers[c].end(), 0.0);
    }
    for (int i = 0; i < n; ++i) {
      const int c = assign[static_cast<std::size_t>(i)];
      ++count[static_cast<std::size_t>(c)];
      for (int j = 0; j < dim; ++j)
        centers[c][static_cast<std::size_t>(j)] += static_cast<double>(pts[i][j]);
    }
    for (int c = 0; c < k; ++c)
      if (count[static_cast<std::size_t>(c)] > 0)
        for (double& v : centers[c]) v /= count[static_cast<std::size_t>(c)];
  }
  return assign;
}

struct semantic_builder {
  const std::vector<const float*>& pts;
  int dim;
  int k;
  int leaf_size;
  std::uint64_t seed;
  std::vector<std::string>* paths;

  void run(const std::vector<int>& group, const std::string& path) {
    const int g = static_cast<int>(group.size());
    const bool at_root = path.empty();
    if (g <= 1 || (!at_root && g <= leaf_size)) {
      emit_leaf(group, path);
      return;
    }
    const int k_eff = std::min(k, g);
    std::vector<const float*> sub(group.size());
    for (std::size_t i = 0; i < group.size(); ++i)
      sub[i] = pts[static_cast<std::size_t>(group[i])];
    const std::vector<int> assign =
        kmeans_assign(sub, dim, k_eff, sub_seed(seed, "kmeans." + path));
    std::vector<std::vector<int>> children(static_cast<std::size_t>(k_eff));
    for (std::size_t i = 0; i < group.size(); ++i)
      children[static_cast<std::size_t>(assign[i])].push_back(group[i]);
    for (int c = 0; c < k_eff; ++c) {
      const auto& child = children[static_cast<std::size_t>(c)];
      if (child.empty()) continue;
      if (static_cast<int>(child.size()) == g) {
        // clustering made no progress (identical descriptors); stop here
        emit_leaf(group, path);
        return;
      }
      const std::string child_path = path + static_cast<char>('0' + c);
      if (static_cast<int>(child.size()) > leaf_size)
        run(child, child_path);
      else
        emit_leaf(child, child_path);
    }
  }

  void emit_leaf(const std::vector<int>& group, const std::string& path) {
    const int width = decimal_width(group.empty() ? 0 : group.size() - 1);
    for (std::size_t i = 0; i < group.size(); ++i)
      (*paths)[static_cast<std::size_t>(group[i])] = path;
    for (std::size_t i = 0; i < group.size(); ++i)
      leaf_docids.push_back({group[i], path + zero_pad(i, width)});
  }

  std::vector<std::pair<int, std::string>> leaf_docids;
};

}  // namespace detail

inline semantic_encoding encode_semantic(const std::vector<std::vector<float>>& descriptors, int k,
                                         int leaf_size, std::uint64_t seed) {
  semantic_encoding out;
  const int n = static_cast<int>(descriptors.size());
  if (n == 0) return out;
  require(k >= 2 && k <= 10, "semantic k must be in [2, 10], got ", k);
  require(leaf_size >= 1, "leaf_size must be >= 1");
  const int dim = static_cast<int>(descriptors[0].size());
  std::vector<const float*> pts(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pts[static_cast<std::size_t>(i)] = descriptors[static_cast<std::size_t>(i)].data();

  out.leaf_path.resize(static_cast<std::size_t>(n));
  detail::semantic_builder builder{pts, dim, k, leaf_size, seed, &out.leaf_path, {}};
  std::vector<int> all(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  builder.run(all, "");

  out.docids.resize(static_cast<std::size_t>(n));
  for (const auto& [row, text] : builder.leaf_docids)
    out.docids[static_cast<std::size_t>(row)] = {text, docid_strategy::semantic};
  return out;
}

// ---------------------------------------------------------------------------
// Dataset-level encoding

inline codec_meta fit_codec_meta(docid_strategy strategy, const sequence_dataset& ds,
                                 double scale = 100.0, int hilbert_order = 17, int kmeans_k = 10,
                                 std::uint64_t kmeans_seed = 0) {
  codec_meta meta;
  meta.strategy = strategy;
  meta.scale = scale;
  meta.hilbert_order = hilbert_order;
  meta.kmeans_k = kmeans_k;
  meta.kmeans_seed = kmeans_seed;
  if (strategy == docid_strategy::label) {
    std::int64_t max_index = 0;
    for (const scene& s : ds.scenes) max_index = std::max(max_index, s.scene_index);
    meta.digit_width = detail::decimal_width(static_cast<std::uint64_t>(max_index));
    return meta;
  }
  if (strategy == docid_strategy::semantic) return meta;
  double min_x = 0.0, min_y = 0.0;
  for (const scene& s : ds.scenes) {
    min_x = std::min(min_x, s.p.x);
    min_y = std::min(min_y, s.p.y);
  }
  meta.x_offset = -min_x;
  meta.y_offset = -min_y;
  if (strategy == docid_strategy::hilbert) {
    meta.digit_width = hilbert_digit_width(hilbert_order);
    return meta;
  }
  std::uint64_t max_cell = 0;
  for (const scene& s : ds.scenes) {
    max_cell = std::max(max_cell, detail::scaled_coord(s.p.x, meta.x_offset, scale, "x"));
    max_cell = std::max(max_cell, detail::scaled_coord(s.p.y, meta.y_offset, scale, "y"));
  }
  meta.digit_width = detail::decimal_width(max_cell);
  return meta;
}

struct dataset_encoding {
  std::vector<docid> docids;  // one per scene, unique
  codec_meta meta;
  std::int64_t collision_count = 0;  // scenes that shared a cell with an earlier one
};

// Encodes every scene. gps/hilbert cell collisions are resolved by appending a
// zero-padded within-cell rank; the count is reported, never silently merged.
inline dataset_encoding encode_dataset(const sequence_dataset& ds, const codec_meta& meta,
                                       int kmeans_leaf_size = 100) {
  dataset_encoding out;
  out.meta = meta;
  out.docids.resize(ds.scenes.size());
  switch (meta.strategy) {
    case docid_strategy::label: {
      for (std::size_t i = 0; i < ds.scenes.size(); ++i)
        out.docids[i] = encode_label(ds.scenes[i].scene_index, meta);
      return out;
    }
    case docid_strategy::semantic: {
      std::vector<std::vector<float>> rows;
      rows.reserve(ds.scenes.size());
      for (const scene& s : ds.scenes) rows.push_back(s.descriptor);
      semantic_encoding enc =
          encode_semantic(rows, meta.kmeans_k, kmeans_leaf_size, meta.kmeans_seed);
      out.docids = std::move(enc.docids);
      return out;
    }
    default: {
      std::map<std::string, std::vector<std::size_t>> by_cell;
      for (std::size_t i = 0; i < ds.scenes.size(); ++i) {
        const scene& s = ds.scenes[i];
        out.docids[i] = meta.strategy == docid_strategy::gps
                            ? encode_gps(s.p.x, s.p.y, meta)
                            : encode_hilbert(s.p.x, s.p.y, meta);
        by_cell[out.docids[i].text].push_back(i);
      }
      for (const auto& [text, rows] : by_cell) {
        if (rows.size() < 2) continue;
        out.collision_count += static_cast<std::int64_t>(rows.size()) - 1;
        const int width = detail::decimal_width(rows.size() - 1);
        for (std::size_t r = 0; r < rows.size(); ++r)
          out.docids[rows[r]].text = text + detail::zero_pad(r, width);
      }
      return out;
    }
  }
}

// ---------------------------------------------------------------------------
// Docid table CSV: scene_index,docid,strategy

inline void write_docid_csv(const std::string& path, const sequence_dataset& ds,
                            const std::vector<docid>& docids) {
  require(docids.size() == ds.scenes.size(), "docid count mismatch");
  std::ofstream out(path);
  require(out.good(), "cannot write docid table: ", path);
  out << "scene_index,docid,strategy\n";
  for (std::size_t i = 0; i < docids.size(); ++i)
    out << ds.scenes[i].scene_index << ',' << docids[i].text << ','
        << strategy_name(docids[i].strategy) << '\n';
  require(out.good(), "short write: ", path);
}

inline std::vector<std::pair<std::int64_t, std::string>> read_docid_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open docid table: ", path);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<std::int64_t, std::string>> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    require(c1 != std::string::npos && c2 != std::string::npos, path, ":", line_no,
            ": malformed docid row");
    out.emplace_back(std::stoll(line.substr(0, c1)), line.substr(c1 + 1, c2 - c1 - 1));
  }
  return out;
}

}  // namespace genret

#endif  // GENRET_DOCID_HPP
