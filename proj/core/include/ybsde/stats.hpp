/* Copyright 2026 The youngbsde Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Small sample statistics used by the experiments.

#ifndef YBSDE_STATS_HPP_
#define YBSDE_STATS_HPP_

#include <span>

namespace ybsde {

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;      // sample standard deviation / sqrt(n)
  double stddev = 0.0;  // with the n - 1 denominator
};

MeanSe mean_se(std::span<const double> samples);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Ordinary least squares y = intercept + slope * x.
LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

}  // namespace ybsde

#endif  // YBSDE_STATS_HPP_
