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

#include "entrate/tokenize.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <array>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

constexpr std::string_view kLetterAlphabet =
    "abcdefghijklmnopqrstuvwxyz0123456789 .,;:'-?!";
constexpr TokenId kNoLetter = ~TokenId{0};

bool is_word_char(char32_t cp) {
  return u_isalpha(static_cast<UChar32>(cp)) ||
         u_isdigit(static_cast<UChar32>(cp));
}

// Maps typographic apostrophes and hyphens onto their ASCII forms.
char joiner_of(char32_t cp) {
  switch (cp) {
    case U'\'':
    case U'’':
      return '\'';
    case U'-':
    case U'‐':
    case U'‑':
      return '-';
    default:
      return 0;
  }
}

bool is_space(char32_t cp) {
  return u_isUWhiteSpace(static_cast<UChar32>(cp));
}

const std::array<TokenId, 128>& ascii_letter_ids() {
  static const std::array<TokenId, 128> table = [] {
    std::array<TokenId, 128> t;
    t.fill(kNoLetter);
    for (std::size_t i = 0; i < kLetterAlphabet.size(); ++i) {
      t[static_cast<unsigned char>(kLetterAlphabet[i])] =
          static_cast<TokenId>(i);
    }
    return t;
  }();
  return table;
}

void append_utf8(std::string& out, char32_t cp) {
  char buf[U8_MAX_LENGTH];
  int32_t len = 0;
  U8_APPEND_UNSAFE(buf, len, static_cast<UChar32>(cp));
  out.append(buf, static_cast<std::size_t>(len));
}

bool is_ascii(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](char c) {
    return static_cast<unsigned char>(c) < 0x80;
  });
}

}  // namespace

std::string_view to_string(Granularity g) {
  return g == Granularity::kLetter ? "letter" : "word";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "letter") return Granularity::kLetter;
  if (name == "word") return Granularity::kWord;
  throw DataError("unknown granularity '" + std::string(name) +
                  "' (expected letter or word)");
}

const Vocabulary& Vocabulary::letters() {
  static const Vocabulary alphabet = [] {
    Vocabulary v(Granularity::kLetter);
    for (char c : kLetterAlphabet) v.intern(std::string_view(&c, 1));
    return v;
  }();
  return alphabet;
}

TokenId Vocabulary::intern(std::string_view token) {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  const auto id = static_cast<TokenId>(entries_.size());
  entries_.emplace_back(token);
  index_.emplace(entries_.back(), id);
  return id;
}

std::optional<TokenId> Vocabulary::find(std::string_view token) const {
  if (auto it = index_.find(token); it != index_.end()) return it->second;
  return std::nullopt;
}

Tokenizer::Tokenizer(Granularity granularity) {
  stream_.vocab = granularity == Granularity::kLetter ? Vocabulary::letters()
                                                      : Vocabulary(granularity);
}

void Tokenizer::feed(std::string_view utf8_text) {
  if (is_ascii(utf8_text)) {
    // ASCII is already NFC; lower-casing is the only transformation.
    for (char c : utf8_text) {
      auto cp = static_cast<char32_t>(static_cast<unsigned char>(c));
      if (cp >= U'A' && cp <= U'Z') cp += U'a' - U'A';
      on_code_point(cp);
    }
  } else {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status)) throw Error("ICU NFC normalizer unavailable");
    icu::UnicodeString text = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8_text.data(),
                         static_cast<int32_t>(utf8_text.size())));
    if (!nfc->isNormalized(text, status)) {
      text = nfc->normalize(text, status);
    }
    if (U_FAILURE(status)) throw Error("NFC normalization failed");
    text.toLower(icu::Locale::getRoot());
    for (int32_t i = 0; i < text.length(); i = text.moveIndex32(i, 1)) {
      on_code_point(static_cast<char32_t>(text.char32At(i)));
    }
  }
  if (stream_.vocab.granularity() == Granularity::kWord) flush_word();
}

void Tokenizer::on_code_point(char32_t cp) {
  if (stream_.vocab.granularity() == Granularity::kLetter) {
    if (cp < 128) {
      if (is_space(cp)) {
        if (!last_was_space_) emit_letter(ascii_letter_ids()[' ']);
        return;
      }
      if (TokenId id = ascii_letter_ids()[cp]; id != kNoLetter) emit_letter(id);
    } else if (is_space(cp)) {
      if (!last_was_space_) emit_letter(ascii_letter_ids()[' ']);
    } else if (char j = joiner_of(cp); j != 0) {
      emit_letter(ascii_letter_ids()[static_cast<unsigned char>(j)]);
    }
    return;
  }

  if (is_word_char(cp)) {
    if (pending_joiner_ != 0) {
      word_.push_back(pending_joiner_);
      pending_joiner_ = 0;
    }
    append_utf8(word_, cp);
  } else if (char j = joiner_of(cp); j != 0 && !word_.empty()) {
    if (pending_joiner_ == 0) {
      pending_joiner_ = j;
    } else {
      flush_word();  // two joiners in a row end the word
    }
  } else {
    flush_word();
  }
}

void Tokenizer::emit_letter(TokenId id) {
  last_was_space_ = id == ascii_letter_ids()[' '];
  ++emitted_;
  if (!count_only_) stream_.tokens.push_back(id);
}

void Tokenizer::flush_word() {
  pending_joiner_ = 0;
  if (word_.empty()) return;
  ++emitted_;
  if (!count_only_) stream_.tokens.push_back(stream_.vocab.intern(word_));
  word_.clear();
}

TokenStream Tokenizer::finish() && {
  if (stream_.vocab.granularity() == Granularity::kWord) flush_word();
  return std::move(stream_);
}

TokenStream tokenize_words(std::string_view text) {
  return tokenize(text, Granularity::kWord);
}

TokenStream tokenize_letters(std::string_view text) {
  return tokenize(text, Granularity::kLetter);
}

TokenStream tokenize(std::string_view text, Granularity granularity) {
  Tokenizer tokenizer(granularity);
  tokenizer.feed(text);
  return std::move(tokenizer).finish();
}

std::size_t count_words(std::string_view text) {
  Tokenizer tokenizer(Granularity::kWord);
  tokenizer.count_only_ = true;
  tokenizer.feed(text);
  return tokenizer.size();
}

std::string detokenize(const TokenStream& stream) {
  std::string out;
  const bool words = stream.granularity() == Granularity::kWord;
  for (std::size_t i = 0; i < stream.tokens.size(); ++i) {
    if (words && i > 0) out.push_back(' ');
    out += stream.vocab.token(stream.tokens[i]);
  }
  return out;
}

VocabularyMerge merge_vocabularies(std::span<const Vocabulary> inputs) {
  const Granularity g =
      inputs.empty() ? Granularity::kWord : inputs.front().granularity();
  std::vector<std::string> all;
  for (const Vocabulary& v : inputs) {
    if (v.granularity() != g) {
      throw VocabMismatch("cannot merge letter and word vocabularies");
    }
    all.insert(all.end(), v.entries().begin(), v.entries().end());
  }
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());

  VocabularyMerge merged{Vocabulary(g), {}};
  for (const std::string& t : all) merged.vocab.intern(t);
  merged.remap.reserve(inputs.size());
  for (const Vocabulary& v : inputs) {
    std::vector<TokenId> remap(v.size());
    for (TokenId id = 0; id < v.size(); ++id) {
      remap[id] = *merged.vocab.find(v.token(id));
    }
    merged.remap.push_back(std::move(remap));
  }
  return merged;
}

void remap_stream(TokenStream& stream, const Vocabulary& merged,
                  std::span<const TokenId> remap) {
  if (remap.size() != stream.vocab.size()) {
    throw VocabMismatch("remap table does not match the stream vocabulary");
  }
  for (TokenId& t : stream.tokens) t = remap[t];
  stream.vocab = merged;
}

}  // namespace entrate
