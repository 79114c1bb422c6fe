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

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "entrate/diagnose.hpp"
#include "entrate/ngram.hpp"

namespace entrate {

// Shannon entropy -sum p log2 p in bits, with 0 log 0 = 0. Throws
// NotADistribution when a probability is negative or the sum is off by more
// than 1e-9.
double shannon_entropy(std::span<const double> p);

// Plug-in conditional entropy h(n) = H(X_n | X_{n-1}, ..., X_1) in bits.
//
// Contexts are the (n-1)-token prefixes of the order-n grams, weighted by
// their share of the order-n positions. No smoothing or bias correction is
// applied, and the result is never negative. h(1) is the unigram entropy.
// Throws OrderOutOfRange unless 1 <= n <= table.n_max().
double conditional_entropy(const NgramTable& table, int n);

struct CurvePoint {
  int n = 0;
  double h = 0.0;  // bits per token
};

struct EntropyCurve {
  std::vector<CurvePoint> points;  // n = 1..n_max
  Granularity granularity = Granularity::kWord;
  std::vector<std::uint64_t> totals;
  std::vector<std::uint64_t> distinct;
  // Computed from a pruned table: every h(n) is a lower bound.
  bool lower_bound_biased = false;
};

EntropyCurve entropy_curve(const NgramTable& table);

// CSV with header "n,h_bits,total,distinct,coverage".
void write_curve_csv(std::ostream& out, const EntropyCurve& curve,
                     const CoverageReport& coverage);

}  // namespace entrate
