// SPDX-License-Identifier: MIT
//
// sup { sum_i c_i t_i : sum_i N-hat_i(t_i) <= p } for c >= 0.
//
// N-hat is t^2 on [0,1] and N beyond; when N'(1+) < 2 it has a concave kink at
// 1, so a single Lagrange multiplier does not close the gap. Each coordinate is
// therefore assigned a branch (quadratic on [0,1] or tail on [1,inf)); with the
// branch fixed the problem is separable-convex and the multiplier search is
// exact. With one tail function per row, an exchange argument shows the tail
// branch holds the coordinates with the largest c, so only n+1 assignments need
// checking. Mixed rows enumerate subsets (up to 12 active coordinates).
#pragma once

#include "chaosbound/norm_value.hpp"
#include "chaosbound/tail_function.hpp"

#include <span>
#include <vector>

namespace chaosbound {

struct WaterfillSolution {
    NormValue value;
    std::vector<double> t;  ///< maximizer, same length as c
    double dual_bound = 0.0;
    double multiplier = 0.0;
};

/// Throws InvalidInput for p < 2, negative or non-finite c, or a row length mismatch.
[[nodiscard]] WaterfillSolution waterfill_sup(std::span<const double> c, std::span<const TailFunction> row, double p);

/// Largest active-coordinate count for which mixed rows are solved exactly.
inline constexpr int kWaterfillSubsetLimit = 12;

}  // namespace chaosbound
