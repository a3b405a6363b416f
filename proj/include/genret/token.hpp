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
// Token vocabulary for the decoder: the ten digits plus BOS and EOS.
// Digit tokens use their own value as the token id.

#ifndef GENRET_TOKEN_HPP
#define GENRET_TOKEN_HPP

#include <string>
#include <vector>

#include "genret/common.hpp"

namespace genret {

namespace vocab {
inline constexpr int bos = 10;
inline constexpr int eos = 11;
inline constexpr int size = 12;

inline bool is_digit(int token) { return token >= 0 && token <= 9; }
}  // namespace vocab

using token_seq = std::vector<int>;  // BOS, digits..., EOS

inline token_seq tokenize(const std::string& docid_text) {
  require(!docid_text.empty(), "cannot tokenize an empty docid");
  token_seq out;
  out.reserve(docid_text.size() + 2);
  out.push_back(vocab::bos);
  for (char c : docid_text) {
    require(c >= '0' && c <= '9', "docid '", docid_text, "' contains a non-digit");
    out.push_back(c - '0');
  }
  out.push_back(vocab::eos);
  return out;
}

inline std::string detokenize(const token_seq& tokens) {
  require(tokens.size() >= 3, "token sequence too short");
  require(tokens.front() == vocab::bos, "token sequence must start with BOS");
  require(tokens.back() == vocab::eos, "token sequence must end with EOS");
  std::string out;
  out.reserve(tokens.size() - 2);
  for (std::size_t i = 1; i + 1 < tokens.size(); ++i) {
    require(vocab::is_digit(tokens[i]), "interior token at position ", i, " is not a digit");
    out.push_back(static_cast<char>('0' + tokens[i]));
  }
  return out;
}

}  // namespace genret

#endif  // GENRET_TOKEN_HPP
