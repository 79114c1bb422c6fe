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

#include "entrate/ngram.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <limits>
#include <thread>
#include <utility>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

bool less_gram(std::span<const TokenId> a, std::span<const TokenId> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// A start position together with as many leading tokens as fit into 64 bits.
// Tokens are stored as id + 1 so that 0 marks "past the end of the stream",
// which sorts a truncated window before any longer window sharing its prefix.
struct Entry {
  std::uint64_t key;
  std::uint64_t pos;
};

class WindowSorter {
 public:
  WindowSorter(std::span<const TokenId> tokens, std::size_t vocab_size,
               int n_max)
      : tokens_(tokens), n_max_(n_max) {
    bits_ = std::max(1, static_cast<int>(std::bit_width(vocab_size)));
    packed_ = std::min(n_max_, 64 / bits_);
    unused_bits_ = 64 - packed_ * bits_;
  }

  int window(std::uint64_t pos) const {
    return static_cast<int>(
        std::min<std::uint64_t>(n_max_, tokens_.size() - pos));
  }

  Entry make_entry(std::uint64_t pos) const {
    const int len = window(pos);
    std::uint64_t key = 0;
    for (int j = 0; j < packed_; ++j) {
      key <<= bits_;
      if (j < len) key |= std::uint64_t{tokens_[pos + j]} + 1;
    }
    return {key, pos};
  }

  bool less(const Entry& a, const Entry& b) const {
    if (a.key != b.key) return a.key < b.key;
    const int la = window(a.pos);
    const int lb = window(b.pos);
    for (int j = packed_; j < n_max_; ++j) {
      if (j >= la || j >= lb) return la < lb;
      const TokenId ta = tokens_[a.pos + j];
      const TokenId tb = tokens_[b.pos + j];
      if (ta != tb) return ta < tb;
    }
    return false;
  }

  // Length of the common prefix of two windows.
  int common_prefix(const Entry& a, const Entry& b) const {
    const int limit = std::min(window(a.pos), window(b.pos));
    int lcp;
    if (a.key != b.key) {
      lcp = (std::countl_zero(a.key ^ b.key) - unused_bits_) / bits_;
    } else {
      lcp = packed_;
      while (lcp < limit && tokens_[a.pos + lcp] == tokens_[b.pos + lcp]) {
        ++lcp;
      }
    }
    return std::min(lcp, limit);
  }

  std::span<const TokenId> tokens() const { return tokens_; }

 private:
  std::span<const TokenId> tokens_;
  int n_max_;
  int bits_ = 1;
  int packed_ = 1;
  int unused_bits_ = 0;
};

// Counts all windows starting in [begin, end). Windows may read up to
// n_max - 1 tokens past `end`.
NgramTable count_range(const WindowSorter& sorter, std::size_t vocab_size,
                       int n_max, Granularity granularity, std::uint64_t begin,
                       std::uint64_t end) {
  NgramTable table(n_max, vocab_size, granularity);
  if (begin >= end) return table;

  std::vector<Entry> entries;
  entries.reserve(end - begin);
  for (std::uint64_t pos = begin; pos < end; ++pos) {
    entries.push_back(sorter.make_entry(pos));
  }
  std::sort(entries.begin(), entries.end(),
            [&](const Entry& a, const Entry& b) { return sorter.less(a, b); });

  // In lexicographic order the windows sharing a k-prefix are contiguous for
  // every k at once, so one sweep emits all orders already sorted.
  const auto tokens = sorter.tokens();
  std::vector<std::uint64_t> run(n_max + 1, 0);
  std::vector<std::uint64_t> rep(n_max + 1, 0);
  auto flush = [&](int k) {
    if (run[k] == 0) return;
    auto& order = table.mutable_order(k);
    order.keys.insert(order.keys.end(), tokens.begin() + rep[k],
                      tokens.begin() + rep[k] + k);
    order.counts.push_back(run[k]);
    order.total += run[k];
    run[k] = 0;
  };

  for (std::size_t i = 0; i < entries.size(); ++i) {
    const int len = sorter.window(entries[i].pos);
    const int lcp = i == 0 ? 0 : sorter.common_prefix(entries[i - 1], entries[i]);
    for (int k = 1; k <= len; ++k) {
      if (k <= lcp) {
        ++run[k];
      } else {
        flush(k);
        run[k] = 1;
        rep[k] = entries[i].pos;
      }
    }
  }
  for (int k = 1; k <= n_max; ++k) flush(k);
  return table;
}

NgramTable::Order merge_orders(const NgramTable::Order& a,
                               const NgramTable::Order& b, int k) {
  NgramTable::Order out;
  out.total = a.total + b.total;
  out.keys.reserve(std::max(a.keys.size(), b.keys.size()));
  out.counts.reserve(std::max(a.counts.size(), b.counts.size()));
  const auto ka = std::span<const TokenId>(a.keys);
  const auto kb = std::span<const TokenId>(b.keys);
  const auto uk = static_cast<std::size_t>(k);
  std::size_t i = 0;
  std::size_t j = 0;
  auto take = [&](std::span<const TokenId> gram, std::uint64_t count) {
    out.keys.insert(out.keys.end(), gram.begin(), gram.end());
    out.counts.push_back(count);
  };
  while (i < a.counts.size() && j < b.counts.size()) {
    const auto ga = ka.subspan(i * uk, uk);
    const auto gb = kb.subspan(j * uk, uk);
    if (less_gram(ga, gb)) {
      take(ga, a.counts[i++]);
    } else if (less_gram(gb, ga)) {
      take(gb, b.counts[j++]);
    } else {
      take(ga, a.counts[i++] + b.counts[j++]);
    }
  }
  for (; i < a.counts.size(); ++i) take(ka.subspan(i * uk, uk), a.counts[i]);
  for (; j < b.counts.size(); ++j) take(kb.subspan(j * uk, uk), b.counts[j]);
  return out;
}

void prune(NgramTable& table, std::uint64_t threshold, int from_order) {
  for (int k = std::max(1, from_order); k <= table.n_max(); ++k) {
    auto& order = table.mutable_order(k);
    const auto uk = static_cast<std::size_t>(k);
    std::size_t kept = 0;
    for (std::size_t i = 0; i < order.counts.size(); ++i) {
      if (order.counts[i] < threshold) continue;
      std::copy_n(order.keys.begin() + i * uk, uk,
                  order.keys.begin() + kept * uk);
      order.counts[kept++] = order.counts[i];
    }
    order.keys.resize(kept * uk);
    order.counts.resize(kept);
    order.keys.shrink_to_fit();
    order.counts.shrink_to_fit();
  }
  table.set_pruned(true);
}

}  // namespace

NgramTable::NgramTable(int n_max, std::size_t vocab_size,
                       Granularity granularity)
    : vocab_size_(vocab_size), granularity_(granularity) {
  if (n_max < 1) throw OrderOutOfRange("n_max must be at least 1");
  orders_.resize(static_cast<std::size_t>(n_max));
}

const NgramTable::Order& NgramTable::order(int k) const {
  if (k < 1 || k > n_max()) {
    throw OrderOutOfRange("order " + std::to_string(k) + " outside 1.." +
                          std::to_string(n_max()));
  }
  return orders_[static_cast<std::size_t>(k - 1)];
}

NgramTable::Order& NgramTable::mutable_order(int k) {
  return const_cast<Order&>(std::as_const(*this).order(k));
}

std::uint64_t NgramTable::count(std::span<const TokenId> gram) const {
  const int k = static_cast<int>(gram.size());
  const Order& o = order(k);
  std::size_t lo = 0;
  std::size_t hi = o.counts.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (less_gram(this->gram(k, mid), gram)) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  if (lo < o.counts.size() && std::ranges::equal(this->gram(k, lo), gram)) {
    return o.counts[lo];
  }
  return 0;
}

NgramTable count_ngrams(std::span<const TokenId> tokens, std::size_t vocab_size,
                        int n_max, const CountOptions& options,
                        Granularity granularity) {
  if (n_max < 1) throw OrderOutOfRange("n_max must be at least 1");
  if (tokens.size() < static_cast<std::size_t>(n_max)) {
    throw StreamTooShort("stream of " + std::to_string(tokens.size()) +
                         " tokens is shorter than n_max = " +
                         std::to_string(n_max));
  }
  if (vocab_size >= std::numeric_limits<TokenId>::max()) {
    throw DataError("vocabulary too large for 32-bit token IDs");
  }

  const WindowSorter sorter(tokens, vocab_size, n_max);
  const std::uint64_t n = tokens.size();
  unsigned threads =
      options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, threads);
  const std::uint64_t chunk =
      options.chunk_size != 0 ? options.chunk_size : (n + threads - 1) / threads;
  const std::uint64_t chunks = (n + chunk - 1) / chunk;

  NgramTable table;
  if (chunks <= 1) {
    table = count_range(sorter, vocab_size, n_max, granularity, 0, n);
  } else {
    std::vector<NgramTable> parts(chunks);
    std::atomic<std::uint64_t> next{0};
    auto worker = [&] {
      for (std::uint64_t c = next++; c < chunks; c = next++) {
        parts[c] = count_range(sorter, vocab_size, n_max, granularity,
                               c * chunk, std::min(n, (c + 1) * chunk));
      }
    };
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::min<std::uint64_t>(threads, chunks); ++t) {
      pool.emplace_back(worker);
    }
    worker();
    pool.clear();

    // Pairwise reduction keeps the merged inputs of similar size.
    while (parts.size() > 1) {
      std::vector<NgramTable> next_round;
      for (std::size_t i = 0; i + 1 < parts.size(); i += 2) {
        next_round.push_back(merge_tables(parts[i], parts[i + 1]));
        parts[i] = NgramTable();
        parts[i + 1] = NgramTable();
      }
      if (parts.size() % 2 == 1) next_round.push_back(std::move(parts.back()));
      parts = std::move(next_round);
    }
    table = std::move(parts.front());
  }

  if (options.prune_threshold > 0) {
    prune(table, options.prune_threshold,
          options.prune_from_order > 0 ? options.prune_from_order : n_max);
  }
  return table;
}

NgramTable count_ngrams(const TokenStream& stream, int n_max,
                        const CountOptions& options) {
  return count_ngrams(stream.tokens, stream.vocab.size(), n_max, options,
                      stream.granularity());
}

NgramTable merge_tables(const NgramTable& lhs, const NgramTable& rhs) {
  if (lhs.n_max() != rhs.n_max() || lhs.vocab_size() != rhs.vocab_size() ||
      lhs.granularity() != rhs.granularity()) {
    throw VocabMismatch(
        "cannot merge tables with different n_max, vocabulary size or "
        "granularity");
  }
  NgramTable out(lhs.n_max(), lhs.vocab_size(), lhs.granularity());
  for (int k = 1; k <= lhs.n_max(); ++k) {
    out.mutable_order(k) = merge_orders(lhs.order(k), rhs.order(k), k);
  }
  out.set_pruned(lhs.pruned() || rhs.pruned());
  return out;
}

}  // namespace entrate
