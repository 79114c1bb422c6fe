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
#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "entrate/tokenize.hpp"

namespace entrate {

// Exact counts of every k-gram, k = 1..n_max, over one token sequence.
//
// Each order is stored as a lexicographically sorted flat array of k-tuples
// with a parallel array of 64-bit counts. Sorting makes all k-grams sharing a
// (k-1)-token context contiguous, which the entropy estimator relies on.
class NgramTable {
 public:
  struct Order {
    std::vector<TokenId> keys;         // distinct() * k token IDs
    std::vector<std::uint64_t> counts;  // one per distinct k-gram
    std::uint64_t total = 0;            // number of k-gram positions

    bool operator==(const Order&) const = default;
  };

  NgramTable() = default;
  NgramTable(int n_max, std::size_t vocab_size,
             Granularity granularity = Granularity::kWord);

  int n_max() const { return static_cast<int>(orders_.size()); }
  std::size_t vocab_size() const { return vocab_size_; }
  Granularity granularity() const { return granularity_; }

  // Set when low-count high-order grams were dropped (memory-budget mode);
  // entropies computed from such a table are biased low.
  bool pruned() const { return pruned_; }
  void set_pruned(bool pruned) { pruned_ = pruned; }

  // k is 1-based. Throws OrderOutOfRange outside 1..n_max.
  const Order& order(int k) const;
  Order& mutable_order(int k);

  std::uint64_t total(int k) const { return order(k).total; }
  std::size_t distinct(int k) const { return order(k).counts.size(); }
  std::span<const TokenId> gram(int k, std::size_t i) const {
    return std::span<const TokenId>(order(k).keys).subspan(
        i * static_cast<std::size_t>(k), static_cast<std::size_t>(k));
  }
  std::uint64_t count_at(int k, std::size_t i) const {
    return order(k).counts[i];
  }

  // Occurrence count of `gram` (order = gram.size()), 0 when absent.
  std::uint64_t count(std::span<const TokenId> gram) const;

  bool operator==(const NgramTable&) const = default;

 private:
  std::vector<Order> orders_;
  std::size_t vocab_size_ = 0;
  Granularity granularity_ = Granularity::kWord;
  bool pruned_ = false;
};

struct CountOptions {
  // Worker threads; 0 means std::thread::hardware_concurrency().
  unsigned threads = 0;
  // Start positions per chunk; 0 splits the stream evenly across threads.
  // Chunks overlap by n_max - 1 tokens so every window is counted once.
  std::size_t chunk_size = 0;
  // Memory-budget mode (off when 0): grams of order >= prune_from_order
  // occurring fewer than prune_threshold times are not stored. Totals are
  // kept, so the table is marked pruned().
  std::uint64_t prune_threshold = 0;
  int prune_from_order = 0;  // 0 means n_max
};

// Throws StreamTooShort when tokens.size() < n_max and OrderOutOfRange when
// n_max < 1. The result does not depend on threads or chunk_size.
NgramTable count_ngrams(std::span<const TokenId> tokens, std::size_t vocab_size,
                        int n_max, const CountOptions& options = {},
                        Granularity granularity = Granularity::kWord);
NgramTable count_ngrams(const TokenStream& stream, int n_max,
                        const CountOptions& options = {});

// Pointwise sum of counts and totals. Throws VocabMismatch unless both
// tables share n_max, vocabulary size and granularity.
NgramTable merge_tables(const NgramTable& lhs, const NgramTable& rhs);

// Table cache files.
//
// TSV: '#'-prefixed header lines (format tag, n_max, vocab_size, granularity,
// pruned, one "total<TAB>k<TAB>value" line per order) followed by one row per
// gram: "k<TAB>id id ... id<TAB>count", sorted by k then tuple.
//
// Binary (little-endian): magic "ENTRNGT1", u32 version (1), u32 n_max,
// u64 vocab_size, u8 granularity (0 letter, 1 word), u8 pruned, 6 bytes of
// padding, then per order k: u64 total, u64 distinct, distinct*k u32 IDs,
// distinct u64 counts.
void write_table_tsv(const NgramTable& table, std::ostream& out);
NgramTable read_table_tsv(std::istream& in);
void write_table_binary(const NgramTable& table, std::ostream& out);
NgramTable read_table_binary(std::istream& in);

// Chooses TSV for a ".tsv" extension and binary otherwise.
void save_table(const NgramTable& table, const std::filesystem::path& path);
NgramTable load_table(const std::filesystem::path& path);

}  // namespace entrate
