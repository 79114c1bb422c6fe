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

#include "entrate/fit.hpp"

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "entrate/errors.hpp"

namespace entrate {
namespace {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// theta = (a, ln b, c)
ExpParams from_theta(const Vec3& theta) {
  return {theta[0], std::exp(theta[1]), theta[2]};
}

struct Linearization {
  Mat3 jtj = Mat3::Zero();
  Vec3 jtr = Vec3::Zero();  // -grad(SSE) / 2
};

Linearization linearize(std::span<const FitPoint> points, const Vec3& theta) {
  const ExpParams p = from_theta(theta);
  Linearization lin;
  for (const FitPoint& pt : points) {
    const double e = std::exp(-p.b * pt.x);
    const Vec3 j(e, -p.a * pt.x * p.b * e, 1.0);
    const double r = pt.y - (p.a * e + p.c);
    lin.jtj.noalias() += j * j.transpose();
    lin.jtr.noalias() += j * r;
  }
  return lin;
}

}  // namespace

double ExpParams::operator()(double x) const { return a * std::exp(-b * x) + c; }

bool ExpFit::has_flag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double sum_squared_residuals(std::span<const FitPoint> points,
                             const ExpParams& params) {
  double sse = 0.0;
  for (const FitPoint& pt : points) {
    const double r = pt.y - params(pt.x);
    sse += r * r;
  }
  return sse;
}

ExpParams initial_guess(std::span<const FitPoint> points) {
  const std::size_t m = points.size();
  const double y_last = points[m - 1].y;
  const double c0 = y_last - std::max(points[m - 2].y - y_last, 0.0);
  double a0 = points[0].y - c0;
  if (std::abs(a0) < 1e-6) a0 = a0 < 0.0 ? -1e-6 : 1e-6;
  double b0 = 1.0;
  const double ratio = (points[0].y - c0) / (points[1].y - c0);
  if (std::isfinite(ratio) && ratio > 0.0) {
    b0 = std::clamp(std::log(ratio) / (points[1].x - points[0].x), 1e-3, 10.0);
  }
  return {a0, b0, c0};
}

ExpFit fit_exponential(std::span<const FitPoint> input,
                       const FitOptions& options) {
  std::vector<FitPoint> points(input.begin(), input.end());
  std::sort(points.begin(), points.end(),
            [](const FitPoint& l, const FitPoint& r) { return l.x < r.x; });
  std::set<double> xs;
  for (const FitPoint& p : points) xs.insert(p.x);
  if (xs.size() < 3) {
    throw TooFewPoints("exponential fit needs at least 3 distinct x values");
  }

  ExpFit fit;
  fit.points = points;

  const auto [lo, hi] = std::minmax_element(
      points.begin(), points.end(),
      [](const FitPoint& l, const FitPoint& r) { return l.y < r.y; });
  if (hi->y - lo->y < options.flat_tolerance) {
    double mean = 0.0;
    for (const FitPoint& p : points) mean += p.y;
    mean /= static_cast<double>(points.size());
    fit.a = 0.0;
    fit.b = 1.0;
    fit.c = mean;
    fit.sse = sum_squared_residuals(points, fit.params());
    fit.converged = true;
    fit.flags.emplace_back(fit_flags::kFlatCurve);
    return fit;
  }

  const ExpParams start = initial_guess(points);
  Vec3 theta(start.a, std::log(start.b), start.c);
  double sse = sum_squared_residuals(points, start);
  double lambda = 1e-3;
  int iterations = 0;
  Linearization lin = linearize(points, theta);

  while (iterations < options.max_iterations) {
    if (2.0 * lin.jtr.norm() <= options.gradient_tolerance) break;
    ++iterations;

    // Marquardt scaling, floored so a vanishing column (a = 0 makes ln b
    // unidentifiable) cannot make the system singular.
    const double floor = 1e-12 * std::max(1.0, lin.jtj.diagonal().maxCoeff());
    const Vec3 scale = lin.jtj.diagonal().cwiseMax(floor);
    bool accepted = false;
    double improvement = 0.0;
    while (lambda <= 1e16) {
      Mat3 damped = lin.jtj;
      damped.diagonal() += lambda * scale;
      const Vec3 step = damped.ldlt().solve(lin.jtr);
      const Vec3 candidate = theta + step;
      const double candidate_sse =
          sum_squared_residuals(points, from_theta(candidate));
      if (step.allFinite() && std::isfinite(candidate_sse) &&
          candidate_sse < sse) {
        improvement = sse - candidate_sse;
        theta = candidate;
        sse = candidate_sse;
        lambda = std::max(lambda * 0.1, 1e-15);
        accepted = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!accepted) break;
    lin = linearize(points, theta);
    if (improvement <= options.min_relative_improvement * (sse + improvement)) {
      break;
    }
  }

  const ExpParams best = from_theta(theta);
  fit.a = best.a;
  fit.b = best.b;
  fit.c = best.c;
  fit.sse = sse;
  fit.iterations = iterations;
  fit.gradient_norm = 2.0 * lin.jtr.norm();
  fit.converged = fit.gradient_norm <= options.gradient_tolerance;
  if (!fit.converged) fit.flags.emplace_back(fit_flags::kNoConvergence);
  return fit;
}

ExpFit estimate_rate(const EntropyCurve& curve, const CoverageReport& coverage,
                     const UndersamplingThresholds& thresholds,
                     const FitOptions& options) {
  if (curve.points.size() < 3) {
    throw TooFewPoints("entropy curve needs at least 3 orders to extrapolate");
  }
  std::vector<FitPoint> points;
  points.reserve(curve.points.size());
  for (const CurvePoint& p : curve.points) {
    points.push_back({static_cast<double>(p.n), p.h});
  }
  ExpFit fit = fit_exponential(points, options);
  if (fit.c < 0.0) fit.flags.emplace_back(fit_flags::kNegativeRate);
  const bool thin = std::any_of(
      curve.points.begin(), curve.points.end(), [&](const CurvePoint& p) {
        return p.n <= static_cast<int>(coverage.orders.size()) &&
               undersampled(coverage, p.n, thresholds);
      });
  if (thin) fit.flags.emplace_back(fit_flags::kUndersampled);
  if (curve.lower_bound_biased) {
    fit.flags.emplace_back(fit_flags::kLowerBoundBiased);
  }
  return fit;
}

void to_json(nlohmann::json& j, const ExpFit& fit) {
  nlohmann::json points = nlohmann::json::array();
  for (const FitPoint& p : fit.points) points.push_back({{"x", p.x}, {"y", p.y}});
  j = nlohmann::json{{"a", fit.a},
                     {"b", fit.b},
                     {"c", fit.c},
                     {"sse", fit.sse},
                     {"gradient_norm", fit.gradient_norm},
                     {"converged", fit.converged},
                     {"iterations", fit.iterations},
                     {"flags", fit.flags},
                     {"points", std::move(points)}};
}

void from_json(const nlohmann::json& j, ExpFit& fit) {
  fit.a = j.at("a").get<double>();
  fit.b = j.at("b").get<double>();
  fit.c = j.at("c").get<double>();
  fit.sse = j.at("sse").get<double>();
  fit.gradient_norm = j.value("gradient_norm", 0.0);
  fit.converged = j.at("converged").get<bool>();
  fit.iterations = j.at("iterations").get<int>();
  fit.flags = j.at("flags").get<std::vector<std::string>>();
  fit.points.clear();
  for (const auto& p : j.at("points")) {
    fit.points.push_back({p.at("x").get<double>(), p.at("y").get<double>()});
  }
}

}  // namespace entrate
