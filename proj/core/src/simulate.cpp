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

#include "entrate/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> cumulative(std::span<const double> probs) {
  std::vector<double> cdf(probs.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (!(probs[i] >= 0.0)) throw NotADistribution("negative probability");
    sum += probs[i];
    cdf[i] = sum;
  }
  if (!(sum > 0.0)) throw NotADistribution("probabilities sum to zero");
  for (double& c : cdf) c /= sum;
  return cdf;
}

TokenId draw(const std::vector<double>& cdf, std::mt19937_64& rng) {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  return static_cast<TokenId>(
      std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1));
}

double entropy_bits(const std::vector<double>& row) {
  double h = 0.0;
  for (double p : row) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

}  // namespace

std::vector<TokenId> sample_iid(std::span<const double> probs, std::size_t length,
                                std::uint64_t seed) {
  const auto cdf = cumulative(probs);
  std::mt19937_64 rng(seed);
  std::vector<TokenId> out(length);
  for (TokenId& t : out) t = draw(cdf, rng);
  return out;
}

std::vector<TokenId> sample_uniform(std::size_t alphabet, std::size_t length,
                                    std::uint64_t seed) {
  const std::vector<double> probs(alphabet, 1.0);
  return sample_iid(probs, length, seed);
}

std::vector<TokenId> sample_zipf(std::size_t vocab, double exponent,
                                 std::size_t length, std::uint64_t seed) {
  std::vector<double> probs(vocab);
  for (std::size_t r = 0; r < vocab; ++r) {
    probs[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
  }
  return sample_iid(probs, length, seed);
}

MarkovSource::MarkovSource(std::size_t alphabet, int order,
                           std::vector<std::vector<double>> rows)
    : alphabet_(alphabet), order_(order), rows_(std::move(rows)) {
  if (alphabet_ < 1 || order_ < 1) {
    throw DataError("Markov source needs alphabet >= 1 and order >= 1");
  }
  contexts_ = 1;
  for (int i = 0; i < order_; ++i) contexts_ *= alphabet_;
  if (rows_.size() != contexts_) {
    throw DataError("Markov source needs alphabet^order transition rows");
  }
  for (auto& row : rows_) {
    if (row.size() != alphabet_) throw DataError("transition row has wrong width");
    (void)cumulative(row);  // validates
    const double sum = std::accumulate(row.begin(), row.end(), 0.0);
    for (double& p : row) p /= sum;
  }
}

MarkovSource MarkovSource::random(std::size_t alphabet, int order, std::uint64_t seed,
                                  double concentration) {
  std::mt19937_64 rng(seed);
  std::size_t contexts = 1;
  for (int i = 0; i < order; ++i) contexts *= alphabet;
  std::vector<std::vector<double>> rows(contexts, std::vector<double>(alphabet));
  // Gamma(concentration) via Marsaglia-Tsang on our own uniforms keeps the
  // draw platform independent.
  auto normal = [&] {
    const double u1 = std::max(uniform01(rng), 1e-300);
    const double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  auto gamma = [&](double shape) {
    const double boost = shape < 1.0 ? std::pow(std::max(uniform01(rng), 1e-300), 1.0 / shape) : 1.0;
    const double a = shape < 1.0 ? shape + 1.0 : shape;
    const double d = a - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x;
      double v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform01(rng);
      if (u < 1.0 - 0.0331 * x * x * x * x ||
          std::log(std::max(u, 1e-300)) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v * boost;
      }
    }
  };
  for (auto& row : rows) {
    for (double& p : row) p = std::max(gamma(concentration), 1e-12);
  }
  return MarkovSource(alphabet, order, std::move(rows));
}

std::vector<double> MarkovSource::stationary_contexts() const {
  std::vector<double> pi(contexts_, 1.0 / static_cast<double>(contexts_));
  std::vector<double> next(contexts_);
  const std::size_t shift = contexts_ / alphabet_;
  for (int iter = 0; iter < 100000; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t r = 0; r < contexts_; ++r) {
      const std::size_t tail = (r % shift) * alphabet_;
      for (std::size_t s = 0; s < alphabet_; ++s) next[tail + s] += pi[r] * rows_[r][s];
    }
    double diff = 0.0;
    for (std::size_t r = 0; r < contexts_; ++r) diff += std::abs(next[r] - pi[r]);
    pi.swap(next);
    if (diff < 1e-15) break;
  }
  return pi;
}

double MarkovSource::entropy_rate() const {
  const auto pi = stationary_contexts();
  double rate = 0.0;
  for (std::size_t r = 0; r < contexts_; ++r) rate += pi[r] * entropy_bits(rows_[r]);
  return rate;
}

std::vector<TokenId> MarkovSource::sample(std::size_t length, std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> cdfs;
  cdfs.reserve(contexts_);
  for (const auto& row : rows_) cdfs.push_back(cumulative(row));
  const auto start = cumulative(stationary_contexts());

  std::vector<TokenId> out;
  out.reserve(length);
  std::size_t context = draw(start, rng);
  // Emit the starting context's symbols, oldest first.
  std::vector<TokenId> head(static_cast<std::size_t>(order_));
  for (std::size_t i = head.size(), c = context; i-- > 0; c /= alphabet_) {
    head[i] = static_cast<TokenId>(c % alphabet_);
  }
  for (TokenId t : head) {
    if (out.size() < length) out.push_back(t);
  }
  const std::size_t shift = contexts_ / alphabet_;
  while (out.size() < length) {
    const TokenId s = draw(cdfs[context], rng);
    out.push_back(s);
    context = (context % shift) * alphabet_ + s;
  }
  return out;
}

std::string symbols_to_text(std::span<const TokenId> symbols, std::size_t alphabet,
                            std::size_t per_line) {
  std::string out;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    if (alphabet <= 26) {
      out.push_back(static_cast<char>('a' + symbols[i]));
    } else {
      out += 'w';
      out += std::to_string(symbols[i]);
    }
    const bool eol = per_line != 0 && (i + 1) % per_line == 0;
    out.push_back(eol || i + 1 == symbols.size() ? '\n' : ' ');
  }
  return out;
}

}  // namespace entrate
