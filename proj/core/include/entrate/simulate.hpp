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
#include <span>
#include <string>
#include <vector>

#include "entrate/tokenize.hpp"

namespace entrate {

// Sources with known entropy rate for testing the estimator. Sampling uses
// std::mt19937_64 with an explicit 53-bit uniform mapping, so a given seed
// reproduces the same stream on every platform.

// i.i.d. draws from `probs` (normalized internally).
std::vector<TokenId> sample_iid(std::span<const double> probs, std::size_t length,
                                std::uint64_t seed);
std::vector<TokenId> sample_uniform(std::size_t alphabet, std::size_t length,
                                    std::uint64_t seed);
// Zipf law p(r) ~ 1 / r^exponent over ranks 1..vocab.
std::vector<TokenId> sample_zipf(std::size_t vocab, double exponent,
                                 std::size_t length, std::uint64_t seed);

// Order-k Markov chain over `alphabet` symbols. Row r of the transition
// matrix is the next-symbol distribution after context r, where the context
// (s_1, ..., s_k), oldest first, is numbered sum s_i * alphabet^(k - i).
class MarkovSource {
 public:
  MarkovSource(std::size_t alphabet, int order, std::vector<std::vector<double>> rows);

  // Rows drawn from a symmetric Dirichlet(concentration).
  static MarkovSource random(std::size_t alphabet, int order, std::uint64_t seed,
                             double concentration = 1.0);

  std::size_t alphabet() const { return alphabet_; }
  int order() const { return order_; }
  const std::vector<std::vector<double>>& rows() const { return rows_; }

  // Stationary distribution over contexts, by power iteration.
  std::vector<double> stationary_contexts() const;
  // sum_r pi(r) H(row r), bits per symbol.
  double entropy_rate() const;

  // Starts from a context drawn from the stationary distribution.
  std::vector<TokenId> sample(std::size_t length, std::uint64_t seed) const;

 private:
  std::size_t alphabet_;
  int order_;
  std::size_t contexts_;
  std::vector<std::vector<double>> rows_;
};

// Renders symbols as space-separated words: "a".."z" for alphabets up to 26,
// otherwise "w0", "w1", ... Lines hold `per_line` symbols.
std::string symbols_to_text(std::span<const TokenId> symbols, std::size_t alphabet,
                            std::size_t per_line = 20);

}  // namespace entrate
