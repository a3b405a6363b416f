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
// Pose-stamped descriptor sequences: ingestion, synthesis, merging,
// train/val/eval splits, tuple mining and revisit ground truth.
// All geometric radii below are 2D Euclidean over (x, y).

#ifndef GENRET_DATASET_HPP
#define GENRET_DATASET_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "genret/common.hpp"

namespace genret {

struct pose {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double t = 0.0;  // seconds
};

inline double planar_dist(const pose& a, const pose& b) {
  const double dx = a.x - b.x, dy = a.y - b.y;
  return std::sqrt(dx * dx + dy * dy);
}

enum class split_kind : std::uint8_t { train, val, eval };

inline const char* split_name(split_kind s) {
  switch (s) {
    case split_kind::train: return "TRAIN";
    case split_kind::val: return "VAL";
    default: return "EVAL";
  }
}

struct scene {
  std::int64_t scene_index = 0;  // contiguous from 0 over the dataset
  int sequence_id = 0;
  pose p;
  std::vector<float> descriptor;
};

struct sequence_dataset {
  std::vector<scene> scenes;
  int descriptor_dim = 0;
  std::vector<split_kind> split;  // parallel to scenes; empty until assigned

  std::size_t size() const { return scenes.size(); }

  std::vector<std::int64_t> indices_of(split_kind k) const {
    std::vector<std::int64_t> out;
    for (std::size_t i = 0; i < scenes.size(); ++i)
      if (i < split.size() && split[i] == k) out.push_back(scenes[i].scene_index);
    return out;
  }
};

struct train_tuple {
  std::int64_t q = 0;
  std::int64_t p = 0;
  std::int64_t n = 0;
  std::int64_t nbis = 0;
};

struct revisit_label {
  std::int64_t scene_index = 0;
  bool is_revisit = false;
};

// ---------------------------------------------------------------------------
// Pose loading

enum class pose_format { kitti_odometry_3x4, xyzt_csv };

// KITTI odometry lines hold a row-major 3x4 rigid transform; translation sits
// at positions 3, 7, 11. Those files carry no timestamps, so we default to the
// 10 Hz convention t = line_index * timestep.
inline std::vector<pose> load_poses(const std::string& path, pose_format fmt,
                                    double timestep = 0.1) {
  std::ifstream in(path);
  require(in.good(), "cannot open pose file: ", path);
  std::vector<pose> out;
  std::string line;
  std::size_t line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    if (fmt == pose_format::xyzt_csv && !saw_header) {
      std::string h = line;
      h.erase(std::remove_if(h.begin(), h.end(),
                             [](unsigned char c) { return c == ' ' || c == '\r'; }),
              h.end());
      require(h == "x,y,z,t", path, ":", line_no, ": expected header 'x,y,z,t', got '", line, "'");
      saw_header = true;
      continue;
    }
    std::string fields = line;
    if (fmt == pose_format::xyzt_csv)
      std::replace(fields.begin(), fields.end(), ',', ' ');
    std::istringstream ss(fields);
    std::vector<double> v;
    double d;
    while (ss >> d) v.push_back(d);
    pose p;
    if (fmt == pose_format::kitti_odometry_3x4) {
      require(v.size() == 12, path, ":", line_no, ": expected 12 values, got ", v.size());
      p.x = v[3];
      p.y = v[7];
      p.z = v[11];
      p.t = static_cast<double>(out.size()) * timestep;
    } else {
      require(v.size() == 4, path, ":", line_no, ": expected 4 values, got ", v.size());
      p = pose{v[0], v[1], v[2], v[3]};
    }
    require(std::isfinite(p.x) && std::isfinite(p.y) && std::isfinite(p.z) && std::isfinite(p.t),
            path, ":", line_no, ": non-finite pose value");
    out.push_back(p);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Descriptor file: "DSC1" | u32 count | u32 dim | count*dim f32 little-endian.

inline void write_descriptors(const std::string& path, const std::vector<scene>& scenes, int dim) {
  std::ofstream out(path, std::ios::binary);
  require(out.good(), "cannot write descriptor file: ", path);
  out.write("DSC1", 4);
  const std::uint32_t count = static_cast<std::uint32_t>(scenes.size());
  const std::uint32_t d32 = static_cast<std::uint32_t>(dim);
  out.write(reinterpret_cast<const char*>(&count), 4);
  out.write(reinterpret_cast<const char*>(&d32), 4);
  for (const scene& s : scenes) {
    require(static_cast<int>(s.descriptor.size()) == dim, "descriptor dim mismatch at scene ",
            s.scene_index);
    out.write(reinterpret_cast<const char*>(s.descriptor.data()),
              static_cast<std::streamsize>(sizeof(float) * s.descriptor.size()));
  }
  require(out.good(), "short write: ", path);
}

inline std::vector<std::vector<float>> read_descriptors(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "cannot open descriptor file: ", path);
  char magic[4];
  in.read(magic, 4);
  require(in.good() && std::memcmp(magic, "DSC1", 4) == 0, path, ": bad magic");
  std::uint32_t count = 0, dim = 0;
  in.read(reinterpret_cast<char*>(&count), 4);
  in.read(reinterpret_cast<char*>(&dim), 4);
  require(in.good(), path, ": truncated header");
  std::vector<std::vector<float>> rows(count, std::vector<float>(dim));
  for (auto& r : rows) {
    in.read(reinterpret_cast<char*>(r.data()), static_cast<std::streamsize>(sizeof(float) * dim));
    require(in.good(), path, ": truncated descriptor data");
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Spatial hash over (x, y) for radius queries; cell size equals the radius.

class planar_grid {
 public:
  planar_grid(const std::vector<scene>& scenes, double cell)
      : scenes_(scenes), cell_(cell > 0 ? cell : 1.0) {
    buckets_.reserve(scenes.size());
    for (std::size_t i = 0; i < scenes.size(); ++i)
      buckets_[key(scenes[i].p.x, scenes[i].p.y)].push_back(i);
  }

  // Calls fn(j) for every scene j with planar distance <= radius of `at`.
  template <class Fn>
  void for_neighbors(const pose& at, double radius, Fn&& fn) const {
    const int r = static_cast<int>(std::ceil(radius / cell_));
    const int cx = coord(at.x), cy = coord(at.y);
    for (int gx = cx - r; gx <= cx + r; ++gx)
      for (int gy = cy - r; gy <= cy + r; ++gy) {
        auto it = buckets_.find(pack(gx, gy));
        if (it == buckets_.end()) continue;
        for (std::size_t j : it->second)
          if (planar_dist(at, scenes_[j].p) <= radius) fn(j);
      }
  }

 private:
  int coord(double v) const { return static_cast<int>(std::floor(v / cell_)); }
  static std::uint64_t pack(int gx, int gy) {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(gx)) << 32) |
           static_cast<std::uint32_t>(gy);
  }
  std::uint64_t key(double x, double y) const { return pack(coord(x), coord(y)); }

  const std::vector<scene>& scenes_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets_;
};

// ---------------------------------------------------------------------------
// Synthetic data

struct synth_params {
  std::int64_t n_scenes = 0;
  double loop_fraction = 0.0;  // trailing fraction that retraces visited ground
  int descriptor_dim = 256;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Smooth random planar field: per output dimension, a sum of 8 seeded cosine
// waves with wavelengths between 20 m and 200 m. Unit-normalized per location.
class cosine_field {
 public:
  cosine_field(int dim, std::uint64_t seed) : dim_(dim) {
    rng r(seed);
    waves_.resize(static_cast<std::size_t>(dim) * kWaves);
    for (auto& w : waves_) {
      const double wavelength = r.uniform(20.0, 200.0);
      const double k = 2.0 * 3.141592653589793 / wavelength;
      const double theta = r.uniform(0.0, 2.0 * 3.141592653589793);
      w.kx = k * std::cos(theta);
      w.ky = k * std::sin(theta);
      w.phase = r.uniform(0.0, 2.0 * 3.141592653589793);
    }
  }

  void eval(double x, double y, std::vector<float>& out) const {
    out.resize(dim_);
    double norm_sq = 0.0;
    for (int d = 0; d < dim_; ++d) {
      double v = 0.0;
      const wave* w = &waves_[static_cast<std::size_t>(d) * kWaves];
      for (int m = 0; m < kWaves; ++m)
        v += std::cos(w[m].kx * x + w[m].ky * y + w[m].phase);
      out[d] = static_cast<float>(v);
      norm_sq += v * v;
    }
    const double inv = norm_sq > 0 ? 1.0 / std::sqrt(norm_sq) : 0.0;
    for (int d = 0; d < dim_; ++d) out[d] = static_cast<float>(out[d] * inv);
  }

 private:
  static constexpr int kWaves = 8;
  struct wave {
    double kx, ky, phase;
  };
  int dim_;
  std::vector<wave> waves_;
};

inline void unit_normalize(std::vector<float>& v) {
  double s = 0.0;
  for (float f : v) s += static_cast<double>(f) * f;
  if (s <= 0.0) return;
  const double inv = 1.0 / std::sqrt(s);
  for (float& f : v) f = static_cast<float>(f * inv);
}

}  // namespace detail

// Simulated trajectory: smooth 2D random walk with 1 m steps at 10 Hz. The
// trailing loop_fraction of scenes retraces already-visited ground (a U-turn
// back along the path) with sub-meter lateral jitter, producing genuine
// revisits once the 30 s rule is applied. Descriptors are unit-norm samples of
// a fixed seeded smooth field plus Gaussian noise.
inline sequence_dataset synth_dataset(const synth_params& sp) {
  require(sp.n_scenes >= 0, "n_scenes must be >= 0");
  require(sp.loop_fraction >= 0.0 && sp.loop_fraction <= 1.0, "loop_fraction must be in [0,1]");
  require(sp.noise_sigma >= 0.0, "noise_sigma must be >= 0");

  sequence_dataset ds;
  ds.descriptor_dim = sp.descriptor_dim;
  if (sp.n_scenes == 0) return ds;

  rng walk_rng(sub_seed(sp.seed, "synth.walk"));
  rng noise_rng(sub_seed(sp.seed, "synth.noise"));
  detail::cosine_field field(sp.descriptor_dim, sub_seed(sp.seed, "synth.field"));

  const std::int64_t n = sp.n_scenes;
  const std::int64_t n_loop = std::min<std::int64_t>(
      n, static_cast<std::int64_t>(std::llround(sp.loop_fraction * static_cast<double>(n))));
  const std::int64_t n_walk = n - n_loop;

  std::vector<pose> track(static_cast<std::size_t>(n));
  double x = 0.0, y = 0.0, heading = walk_rng.uniform(0.0, 6.283185307179586);
  for (std::int64_t i = 0; i < n_walk; ++i) {
    track[i] = pose{x, y, 0.0, 0.1 * static_cast<double>(i)};
    heading += walk_rng.uniform(-0.15, 0.15);
    x += std::cos(heading);
    y += std::sin(heading);
  }
  // Retrace: walk back along the visited path, jittered within 1 m.
  for (std::int64_t i = 0; i < n_loop; ++i) {
    const std::int64_t src = std::max<std::int64_t>(0, n_walk - 2 - i);
    const pose base = n_walk > 0 ? track[static_cast<std::size_t>(src)] : pose{};
    track[static_cast<std::size_t>(n_walk + i)] =
        pose{base.x + walk_rng.uniform(-0.5, 0.5), base.y + walk_rng.uniform(-0.5, 0.5), 0.0,
             0.1 * static_cast<double>(n_walk + i)};
  }

  ds.scenes.resize(static_cast<std::size_t>(n));
  std::vector<float> buf;
  for (std::int64_t i = 0; i < n; ++i) {
    scene& s = ds.scenes[static_cast<std::size_t>(i)];
    s.scene_index = i;
    s.sequence_id = 0;
    s.p = track[static_cast<std::size_t>(i)];
    field.eval(s.p.x, s.p.y, buf);
    s.descriptor = buf;
    for (float& f : s.descriptor)
      f += static_cast<float>(sp.noise_sigma * noise_rng.gaussian());
    detail::unit_normalize(s.descriptor);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Merging, splits, mining, revisits

// Concatenates sequences, adding (i*1000 m, i*1000 m) to every pose of the
// sequence at list position i. Scene indices are renumbered contiguously;
// sequence ids are kept.
inline sequence_dataset merge_shift(const std::vector<sequence_dataset>& sequences) {
  sequence_dataset out;
  if (sequences.empty()) return out;
  out.descriptor_dim = sequences[0].descriptor_dim;
  std::int64_t next = 0;
  for (std::size_t i = 0; i < sequences.size(); ++i) {
    require(sequences[i].descriptor_dim == out.descriptor_dim,
            "descriptor dim mismatch: sequence 0 has ", out.descriptor_dim, ", sequence ", i,
            " has ", sequences[i].descriptor_dim);
    const double shift = 1000.0 * static_cast<double>(i);
    for (const scene& s : sequences[i].scenes) {
      scene c = s;
      c.scene_index = next++;
      c.p.x += shift;
      c.p.y += shift;
      out.scenes.push_back(std::move(c));
    }
  }
  return out;
}

// Per-sequence index rule: !(i % 5) ? (i % 10 ? VAL : EVAL) : TRAIN.
inline split_kind split_for_index(std::int64_t i) {
  if (i % 5 != 0) return split_kind::train;
  return (i % 10 == 0) ? split_kind::eval : split_kind::val;
}

inline sequence_dataset assign_split(sequence_dataset ds) {
  ds.split.resize(ds.scenes.size());
  std::unordered_map<int, std::int64_t> seq_pos;
  for (std::size_t i = 0; i < ds.scenes.size(); ++i) {
    const std::int64_t pos = seq_pos[ds.scenes[i].sequence_id]++;
    ds.split[i] = split_for_index(pos);
  }
  return ds;
}

// Mines (q, p, n, nbis) tuples from TRAIN scenes: positive within p_radius of
// the query, both negatives at least n_radius from the query and from each
// other. Queries with no positive are skipped. Sampling is seeded-uniform
// over the eligible candidates.
inline std::vector<train_tuple> mine_tuples(const sequence_dataset& ds, double p_radius = 3.0,
                                            double n_radius = 20.0, int negatives_per_query = 1,
                                            std::uint64_t seed = 0) {
  require(!ds.split.empty(), "mine_tuples requires an assigned split");
  require(negatives_per_query >= 1, "negatives_per_query must be >= 1");
  std::vector<std::size_t> train_rows;
  for (std::size_t i = 0; i < ds.scenes.size(); ++i)
    if (ds.split[i] == split_kind::train) train_rows.push_back(i);
  require(train_rows.size() >= 4, "need at least 4 TRAIN scenes, have ", train_rows.size());

  std::vector<scene> train_scenes;
  train_scenes.reserve(train_rows.size());
  for (std::size_t r : train_rows) {
    train_scenes.push_back(scene{ds.scenes[r].scene_index, ds.scenes[r].sequence_id,
                                 ds.scenes[r].p, {}});
  }
  planar_grid grid(train_scenes, p_radius);

  rng r(sub_seed(seed, "mine_tuples"));
  std::vector<train_tuple> out;
  std::vector<std::size_t> positives, negatives, nbis_pool;
  for (std::size_t qi = 0; qi < train_scenes.size(); ++qi) {
    const pose& qp = train_scenes[qi].p;
    positives.clear();
    grid.for_neighbors(qp, p_radius, [&](std::size_t j) {
      if (j != qi) positives.push_back(j);
    });
    if (positives.empty()) continue;
    std::sort(positives.begin(), positives.end());

    negatives.clear();
    for (std::size_t j = 0; j < train_scenes.size(); ++j)
      if (j != qi && planar_dist(qp, train_scenes[j].p) >= n_radius) negatives.push_back(j);
    if (negatives.empty()) continue;

    for (int rep = 0; rep < negatives_per_query; ++rep) {
      const std::size_t p = positives[r.below(positives.size())];
      const std::size_t n = negatives[r.below(negatives.size())];
      if (n == p) continue;  // only reachable when p_radius >= n_radius
      nbis_pool.clear();
      for (std::size_t j : negatives)
        if (j != n && j != p && planar_dist(train_scenes[n].p, train_scenes[j].p) >= n_radius)
          nbis_pool.push_back(j);
      if (nbis_pool.empty()) continue;
      const std::size_t nb = nbis_pool[r.below(nbis_pool.size())];
      out.push_back(train_tuple{train_scenes[qi].scene_index, train_scenes[p].scene_index,
                                train_scenes[n].scene_index, train_scenes[nb].scene_index});
    }
  }
  require(!out.empty(), "no tuples: no query satisfies the radius conditions");
  return out;
}

// A scene is a revisit iff some scene lies within `radius` and was observed
// more than `dt` seconds earlier.
inline std::vector<revisit_label> revisit_labels(const sequence_dataset& ds, double radius = 3.0,
                                                 double dt = 30.0) {
  std::vector<revisit_label> out(ds.scenes.size());
  planar_grid grid(ds.scenes, radius);
  for (std::size_t i = 0; i < ds.scenes.size(); ++i) {
    const scene& q = ds.scenes[i];
    bool revisit = false;
    grid.for_neighbors(q.p, radius, [&](std::size_t j) {
      if (q.p.t - ds.scenes[j].p.t > dt) revisit = true;
    });
    out[i] = revisit_label{q.scene_index, revisit};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Text outputs (pose CSV and split manifest)

namespace detail {
inline std::string fmt_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}
}  // namespace detail

inline void write_pose_csv(const std::string& path, const std::vector<scene>& scenes) {
  std::ofstream out(path);
  require(out.good(), "cannot write pose file: ", path);
  out << "x,y,z,t\n";
  for (const scene& s : scenes)
    out << detail::fmt_double(s.p.x) << ',' << detail::fmt_double(s.p.y) << ','
        << detail::fmt_double(s.p.z) << ',' << detail::fmt_double(s.p.t) << '\n';
  require(out.good(), "short write: ", path);
}

inline void write_split_csv(const std::string& path, const sequence_dataset& ds) {
  require(ds.split.size() == ds.scenes.size(), "split not assigned");
  std::ofstream out(path);
  require(out.good(), "cannot write split file: ", path);
  out << "scene_index,sequence_id,split\n";
  for (std::size_t i = 0; i < ds.scenes.size(); ++i)
    out << ds.scenes[i].scene_index << ',' << ds.scenes[i].sequence_id << ','
        << split_name(ds.split[i]) << '\n';
  require(out.good(), "short write: ", path);
}

inline std::vector<split_kind> read_split_csv(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open split file: ", path);
  std::string line;
  std::getline(in, line);
  std::vector<split_kind> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto last = line.rfind(',');
    require(last != std::string::npos, path, ": malformed split row '", line, "'");
    std::string name = line.substr(last + 1);
    if (!name.empty() && name.back() == '\r') name.pop_back();
    if (name == "TRAIN")
      out.push_back(split_kind::train);
    else if (name == "VAL")
      out.push_back(split_kind::val);
    else if (name == "EVAL")
      out.push_back(split_kind::eval);
    else
      fail(path, ": unknown split '", name, "'");
  }
  return out;
}

}  // namespace genret

#endif  // GENRET_DATASET_HPP
