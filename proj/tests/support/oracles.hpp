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

// Brute-force reference implementations used as independent oracles. They
// share no code with the library estimators they check.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "entrate/tokenize.hpp"

namespace entrate::testing {

using Gram = std::vector<TokenId>;

// Naive O(N k) window scan.
inline std::map<Gram, std::uint64_t> naive_counts(std::span<const TokenId> s, int k) {
  std::map<Gram, std::uint64_t> counts;
  const auto uk = static_cast<std::size_t>(k);
  for (std::size_t i = 0; i + uk <= s.size(); ++i) {
    ++counts[Gram(s.begin() + static_cast<std::ptrdiff_t>(i),
                  s.begin() + static_cast<std::ptrdiff_t>(i + uk))];
  }
  return counts;
}

// Builds every context's explicit next-symbol distribution and averages
// their entropies weighted by empirical context probability.
inline double brute_conditional_entropy(std::span<const TokenId> s, int n) {
  const auto un = static_cast<std::size_t>(n);
  std::map<Gram, std::map<TokenId, double>> next;
  double windows = 0.0;
  for (std::size_t i = 0; i + un <= s.size(); ++i) {
    Gram ctx(s.begin() + static_cast<std::ptrdiff_t>(i),
             s.begin() + static_cast<std::ptrdiff_t>(i + un - 1));
    next[ctx][s[i + un - 1]] += 1.0;
    windows += 1.0;
  }
  double h = 0.0;
  for (const auto& [ctx, dist] : next) {
    double ctx_total = 0.0;
    for (const auto& [sym, c] : dist) ctx_total += c;
    double h_ctx = 0.0;
    for (const auto& [sym, c] : dist) {
      const double p = c / ctx_total;
      h_ctx -= p * std::log(p) / std::log(2.0);
    }
    h += (ctx_total / windows) * h_ctx;
  }
  return h;
}

// Closed-form entropy rate of a two-state chain [[1-p, p], [q, 1-q]].
inline double two_state_rate(double p, double q) {
  auto h2 = [](double x) {
    return x <= 0.0 || x >= 1.0 ? 0.0 : -x * std::log2(x) - (1 - x) * std::log2(1 - x);
  };
  const double pi0 = q / (p + q);
  return pi0 * h2(p) + (1.0 - pi0) * h2(q);
}

}  // namespace entrate::testing
