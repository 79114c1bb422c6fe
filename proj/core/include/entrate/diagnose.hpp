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
#include <vector>

#include "entrate/ngram.hpp"

namespace entrate {

// Sample-coverage statistics of one order.
struct OrderCoverage {
  int n = 0;
  std::uint64_t total = 0;     // k-gram positions
  std::uint64_t possible = 0;  // min(|A|^n, total), saturating
  std::uint64_t distinct = 0;
  std::uint64_t singletons = 0;
  double coverage = 0.0;            // distinct / possible
  double singleton_fraction = 0.0;  // singleton occurrences / total
  double missing_mass = 0.0;        // Good-Turing: singletons / total
};

struct CoverageReport {
  std::uint64_t alphabet_size = 0;
  std::vector<OrderCoverage> orders;  // orders[n - 1]

  // Throws OrderOutOfRange.
  const OrderCoverage& at(int n) const;
};

struct UndersamplingThresholds {
  double max_missing_mass = 0.05;
  double min_samples_per_gram = 10.0;
};

// base^exp clamped to UINT64_MAX.
std::uint64_t saturating_pow(std::uint64_t base, int exp);

CoverageReport coverage_report(const NgramTable& table);

// True iff missing_mass(n) > max_missing_mass or
// total(n) < min_samples_per_gram * distinct(n).
bool undersampled(const CoverageReport& report, int n,
                  const UndersamplingThresholds& thresholds = {});

}  // namespace entrate
