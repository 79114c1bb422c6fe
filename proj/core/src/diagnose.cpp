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

#include "entrate/diagnose.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "entrate/errors.hpp"

namespace entrate {

const OrderCoverage& CoverageReport::at(int n) const {
  if (n < 1 || n > static_cast<int>(orders.size())) {
    throw OrderOutOfRange("order " + std::to_string(n) +
                          " not in coverage report");
  }
  return orders[static_cast<std::size_t>(n - 1)];
}

std::uint64_t saturating_pow(std::uint64_t base, int exp) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t result = 1;
  for (int i = 0; i < exp; ++i) {
    if (base != 0 && result > kMax / base) return kMax;
    result *= base;
  }
  return result;
}

CoverageReport coverage_report(const NgramTable& table) {
  CoverageReport report;
  report.alphabet_size = table.vocab_size();
  for (int n = 1; n <= table.n_max(); ++n) {
    OrderCoverage c;
    c.n = n;
    c.total = table.total(n);
    c.distinct = table.distinct(n);
    c.possible = std::min(saturating_pow(table.vocab_size(), n), c.total);
    const auto& counts = table.order(n).counts;
    c.singletons = static_cast<std::uint64_t>(
        std::count(counts.begin(), counts.end(), std::uint64_t{1}));
    if (c.possible > 0) {
      c.coverage = std::min(
          1.0, static_cast<double>(c.distinct) / static_cast<double>(c.possible));
    }
    if (c.total > 0) {
      c.singleton_fraction =
          static_cast<double>(c.singletons) / static_cast<double>(c.total);
      c.missing_mass = c.singleton_fraction;
    } else {
      c.missing_mass = 1.0;
    }
    report.orders.push_back(c);
  }
  return report;
}

bool undersampled(const CoverageReport& report, int n,
                  const UndersamplingThresholds& thresholds) {
  const OrderCoverage& c = report.at(n);
  return c.missing_mass > thresholds.max_missing_mass ||
         static_cast<double>(c.total) <
             thresholds.min_samples_per_gram * static_cast<double>(c.distinct);
}

}  // namespace entrate
