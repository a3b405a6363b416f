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
// Prefix tree over docids. Drives restricted-vocabulary decoding: at any
// prefix, the tokens that can still complete a valid docid are exactly the
// node's child digits, plus EOS at terminal nodes. Immutable after build.

#ifndef GENRET_TRIE_HPP
#define GENRET_TRIE_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genret/common.hpp"

namespace genret {

class docid_trie {
 public:
  static constexpr std::int32_t npos = -1;

  struct allowed {
    std::vector<int> digits;  // ascending
    bool eos = false;
  };

  void insert(const std::string& text, std::int64_t scene_index) {
    require(!text.empty(), "cannot insert an empty docid");
    std::int32_t at = 0;
    if (nodes_.empty()) nodes_.emplace_back();
    for (char c : text) {
      require(c >= '0' && c <= '9', "docid '", text, "' contains a non-digit");
      const int d = c - '0';
      std::int32_t next = nodes_[static_cast<std::size_t>(at)].child[static_cast<std::size_t>(d)];
      if (next == npos) {
        next = static_cast<std::int32_t>(nodes_.size());
        nodes_[static_cast<std::size_t>(at)].child[static_cast<std::size_t>(d)] = next;
        nodes_.emplace_back();
      }
      at = next;
    }
    node& leaf = nodes_[static_cast<std::size_t>(at)];
    require(!leaf.terminal, "duplicate docid '", text, "': scenes ", leaf.scene, " and ",
            scene_index);
    leaf.terminal = true;
    leaf.scene = scene_index;
    ++size_;
  }

  std::int32_t root() const { return nodes_.empty() ? npos : 0; }

  std::int32_t child(std::int32_t at, int digit) const {
    return nodes_[static_cast<std::size_t>(at)].child[static_cast<std::size_t>(digit)];
  }

  bool terminal(std::int32_t at) const { return nodes_[static_cast<std::size_t>(at)].terminal; }

  std::int64_t scene_at(std::int32_t at) const { return nodes_[static_cast<std::size_t>(at)].scene; }

  std::int32_t walk(const std::string& prefix) const {
    std::int32_t at = root();
    for (char c : prefix) {
      require(c >= '0' && c <= '9', "prefix '", prefix, "' contains a non-digit");
      if (at == npos) return npos;
      at = child(at, c - '0');
    }
    return at;
  }

  // Valid continuations of a prefix already in the trie.
  allowed allowed_next(const std::string& prefix) const {
    const std::int32_t at = walk(prefix);
    require(at != npos, "prefix '", prefix, "' is not in the trie");
    allowed out;
    for (int d = 0; d < 10; ++d)
      if (child(at, d) != npos) out.digits.push_back(d);
    out.eos = terminal(at);
    return out;
  }

  std::optional<std::int64_t> lookup(const std::string& text) const {
    const std::int32_t at = walk(text);
    if (at == npos || !terminal(at)) return std::nullopt;
    return scene_at(at);
  }

  std::size_t size() const { return size_; }              // docid count
  std::size_t node_count() const { return nodes_.size(); }
  bool empty() const { return size_ == 0; }

  // Enumerates every docid in lexicographic order.
  std::vector<std::pair<std::string, std::int64_t>> enumerate() const {
    std::vector<std::pair<std::string, std::int64_t>> out;
    if (nodes_.empty()) return out;
    std::string prefix;
    enumerate_from(0, prefix, out);
    return out;
  }

 private:
  struct node {
    std::array<std::int32_t, 10> child;
    bool terminal = false;
    std::int64_t scene = -1;
    node() { child.fill(npos); }
  };

  void enumerate_from(std::int32_t at, std::string& prefix,
                      std::vector<std::pair<std::string, std::int64_t>>& out) const {
    const node& n = nodes_[static_cast<std::size_t>(at)];
    if (n.terminal) out.emplace_back(prefix, n.scene);
    for (int d = 0; d < 10; ++d) {
      if (n.child[static_cast<std::size_t>(d)] == npos) continue;
      prefix.push_back(static_cast<char>('0' + d));
      enumerate_from(n.child[static_cast<std::size_t>(d)], prefix, out);
      prefix.pop_back();
    }
  }

  std::vector<node> nodes_;
  std::size_t size_ = 0;
};

inline docid_trie build_trie(const std::vector<std::pair<std::string, std::int64_t>>& docids) {
  docid_trie trie;
  for (const auto& [text, scene_index] : docids) trie.insert(text, scene_index);
  return trie;
}

}  // namespace genret

#endif  // GENRET_TRIE_HPP
