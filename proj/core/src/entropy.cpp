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

#include "entrate/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

// sum_i c_i log2(group / c_i) over one block of counts.
double block_term(std::span<const std::uint64_t> counts, std::uint64_t group) {
  const double log_group = std::log2(static_cast<double>(group));
  double sum = 0.0;
  for (std::uint64_t c : counts) {
    const auto cd = static_cast<double>(c);
    sum += cd * (log_group - std::log2(cd));
  }
  return sum;
}

}  // namespace

double shannon_entropy(std::span<const double> p) {
  double sum = 0.0;
  for (double pi : p) {
    if (!(pi >= 0.0)) {
      throw NotADistribution("negative or NaN probability");
    }
    sum += pi;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw NotADistribution("probabilities sum to " + std::to_string(sum));
  }
  double h = 0.0;
  for (double pi : p) {
    if (pi > 0.0) h -= pi * std::log2(pi);
  }
  return h;
}

double conditional_entropy(const NgramTable& table, int n) {
  const auto& order = table.order(n);
  if (order.total == 0) return 0.0;
  const std::span<const std::uint64_t> counts(order.counts);
  double sum = 0.0;
  if (n == 1) {
    sum = block_term(counts, order.total);
  } else {
    // Grams are sorted, so each context's continuations form one block.
    const auto context = static_cast<std::size_t>(n - 1);
    std::size_t begin = 0;
    while (begin < counts.size()) {
      const auto ctx = table.gram(n, begin).first(context);
      std::size_t end = begin + 1;
      std::uint64_t ctx_count = counts[begin];
      while (end < counts.size() &&
             std::ranges::equal(table.gram(n, end).first(context), ctx)) {
        ctx_count += counts[end];
        ++end;
      }
      if (end - begin > 1) {
        sum += block_term(counts.subspan(begin, end - begin), ctx_count);
      }
      begin = end;
    }
  }
  return std::max(0.0, sum / static_cast<double>(order.total));
}

EntropyCurve entropy_curve(const NgramTable& table) {
  EntropyCurve curve;
  curve.granularity = table.granularity();
  curve.lower_bound_biased = table.pruned();
  for (int n = 1; n <= table.n_max(); ++n) {
    curve.points.push_back({n, conditional_entropy(table, n)});
    curve.totals.push_back(table.total(n));
    curve.distinct.push_back(table.distinct(n));
  }
  return curve;
}

void write_curve_csv(std::ostream& out, const EntropyCurve& curve,
                     const CoverageReport& coverage) {
  out << "n,h_bits,total,distinct,coverage\n";
  char buf[128];
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const auto& p = curve.points[i];
    const double cov =
        p.n <= static_cast<int>(coverage.orders.size()) ? coverage.at(p.n).coverage : 0.0;
    std::snprintf(buf, sizeof(buf), "%d,%.12f,%llu,%llu,%.12f\n", p.n, p.h,
                  static_cast<unsigned long long>(curve.totals[i]),
                  static_cast<unsigned long long>(curve.distinct[i]), cov);
    out << buf;
  }
}

}  // namespace entrate
