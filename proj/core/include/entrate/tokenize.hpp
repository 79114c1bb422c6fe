// Copyright 2026 The entrate Authors.
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

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace entrate {

using TokenId = std::uint32_t;

enum class Granularity { kLetter, kWord };

std::string_view to_string(Granularity g);
// Accepts "letter" or "word"; throws DataError otherwise.
Granularity parse_granularity(std::string_view name);

// Bijection between surface tokens and dense 0-based token IDs.
class Vocabulary {
 public:
  explicit Vocabulary(Granularity granularity = Granularity::kWord)
      : granularity_(granularity) {}

  // The fixed 45-symbol letter alphabet: a-z, 0-9, space, and . , ; : ' - ? !
  static const Vocabulary& letters();

  // Returns the ID of `token`, appending it when unseen.
  TokenId intern(std::string_view token);
  std::optional<TokenId> find(std::string_view token) const;

  const std::string& token(TokenId id) const { return entries_.at(id); }
  std::span<const std::string> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  Granularity granularity() const { return granularity_; }

  bool operator==(const Vocabulary& other) const {
    return granularity_ == other.granularity_ && entries_ == other.entries_;
  }

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const {
      return std::hash<std::string_view>{}(s);
    }
  };

  Granularity granularity_;
  std::vector<std::string> entries_;
  std::unordered_map<std::string, TokenId, Hash, std::equal_to<>> index_;
};

// Free-form provenance: corpus name, model, temperature, ...
using SourceMeta = std::map<std::string, std::string>;

struct TokenStream {
  std::vector<TokenId> tokens;
  Vocabulary vocab;
  SourceMeta source_meta;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  Granularity granularity() const { return vocab.granularity(); }
};

// Incremental tokenizer. Text is NFC-normalized and lower-cased before
// symbols are extracted.
//
// Word mode: a word is a maximal run of Unicode letters (L*) and decimal
// digits (Nd), optionally joined by single internal apostrophes (' or U+2019)
// or hyphens (- or U+2010/U+2011). Joiners are stored as ASCII ' and -.
// Every other character separates words, and so does every feed() boundary.
//
// Letter mode: symbols come from Vocabulary::letters(); runs of white space
// collapse to one space (also across feed() calls) and other characters are
// dropped.
class Tokenizer {
 public:
  explicit Tokenizer(Granularity granularity);

  void feed(std::string_view utf8_text);
  std::size_t size() const { return emitted_; }
  TokenStream finish() &&;

 private:
  friend std::size_t count_words(std::string_view text);

  void on_code_point(char32_t cp);
  void emit_letter(TokenId id);
  void flush_word();

  TokenStream stream_;
  std::size_t emitted_ = 0;
  bool count_only_ = false;
  // Word state.
  std::string word_;
  char pending_joiner_ = 0;
  // Letter state.
  bool last_was_space_ = false;
};

TokenStream tokenize_words(std::string_view text);
TokenStream tokenize_letters(std::string_view text);
TokenStream tokenize(std::string_view text, Granularity granularity);

// Number of tokens tokenize_words(text) would produce, without building a
// vocabulary.
std::size_t count_words(std::string_view text);

// Words joined by single spaces; letters concatenated.
std::string detokenize(const TokenStream& stream);

// Merges vocabularies built independently. The merged vocabulary lists the
// union of surface tokens in lexicographic (byte) order; remap[i][id] gives
// the merged ID of token `id` from inputs[i].
struct VocabularyMerge {
  Vocabulary vocab;
  std::vector<std::vector<TokenId>> remap;
};
VocabularyMerge merge_vocabularies(std::span<const Vocabulary> inputs);

// Rewrites `stream` onto a merged vocabulary using one remap table.
void remap_stream(TokenStream& stream, const Vocabulary& merged,
                  std::span<const TokenId> remap);

}  // namespace entrate
