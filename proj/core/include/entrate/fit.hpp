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

#include <nlohmann/json_fwd.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "entrate/diagnose.hpp"
#include "entrate/entropy.hpp"

namespace entrate {

namespace fit_flags {
inline constexpr std::string_view kNegativeRate = "NEGATIVE_RATE";
inline constexpr std::string_view kFlatCurve = "FLAT_CURVE";
inline constexpr std::string_view kUndersampled = "UNDERSAMPLED";
inline constexpr std::string_view kLowerBoundBiased = "LOWER_BOUND_BIASED";
inline constexpr std::string_view kNoConvergence = "NO_CONVERGENCE";
}  // namespace fit_flags

struct FitPoint {
  double x = 0.0;
  double y = 0.0;
};

struct ExpParams {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;

  double operator()(double x) const;
};

struct FitOptions {
  int max_iterations = 200;
  // Stop once an accepted step lowers the SSE by less than this fraction.
  double min_relative_improvement = 1e-12;
  // Converged when |grad SSE| w.r.t. (a, ln b, c) is at most this.
  double gradient_tolerance = 1e-8;
  // Curves whose range is below this are treated as flat.
  double flat_tolerance = 1e-9;
};

// Least-squares fit of f(x) = a * exp(-b x) + c. The extrapolated entropy
// rate is c, reported unclamped.
struct ExpFit {
  double a = 0.0;
  double b = 1.0;
  double c = 0.0;
  double sse = 0.0;
  double gradient_norm = 0.0;
  bool converged = false;
  int iterations = 0;
  std::vector<std::string> flags;
  std::vector<FitPoint> points;

  ExpParams params() const { return {a, b, c}; }
  double operator()(double x) const { return params()(x); }
  bool has_flag(std::string_view flag) const;
};

double sum_squared_residuals(std::span<const FitPoint> points,
                             const ExpParams& params);

// Deterministic starting point for the optimizer (points sorted by x):
//   c0 = y_last - max(y_prev - y_last, 0)
//   a0 = y_first - c0, |a0| >= 1e-6
//   b0 = clamp(ln((y1 - c0) / (y2 - c0)) / (x2 - x1), 1e-3, 10) if the ratio
//        is positive, else 1.
ExpParams initial_guess(std::span<const FitPoint> points);

// Levenberg-damped Gauss-Newton over (a, ln b, c), so b stays positive.
// Throws TooFewPoints for fewer than 3 distinct x. A flat curve (range below
// flat_tolerance) yields a = 0, b = 1, c = mean(y) and FLAT_CURVE. When the
// iteration budget runs out the best parameters found are returned with
// converged = false.
ExpFit fit_exponential(std::span<const FitPoint> points,
                       const FitOptions& options = {});

// Fits h(n) against n and attaches NEGATIVE_RATE, UNDERSAMPLED and
// LOWER_BOUND_BIASED flags from the curve and its coverage report.
ExpFit estimate_rate(const EntropyCurve& curve, const CoverageReport& coverage,
                     const UndersamplingThresholds& thresholds = {},
                     const FitOptions& options = {});

void to_json(nlohmann::json& j, const ExpFit& fit);
void from_json(const nlohmann::json& j, ExpFit& fit);

}  // namespace entrate
