// SPDX-License-Identifier: MIT
//
// Independent brute-force check of the inner supremum for one choice of
// designated axes. It shares nothing with the solver beyond N-hat: candidate
// directions are pushed radially onto each block's constraint boundary, the
// best are refined by compass search.
#pragma once

#include "chaosbound/coeff_tensor.hpp"
#include "chaosbound/norm_value.hpp"
#include "chaosbound/partition.hpp"
#include "chaosbound/tail_function.hpp"

#include <cstdint>
#include <span>

namespace chaosbound {

inline constexpr std::size_t kOracleMaxDimensions = 8;

struct OracleOptions {
    double resolution = 0.05;
    std::size_t random_points = 100000;
    /// Full grids are used only up to this many points.
    std::size_t grid_limit = 200000;
    int refine_top = 8;
    std::uint64_t seed = 0x04ac1eULL;
};

/// Throws InvalidInput when the blocks have more than kOracleMaxDimensions
/// coordinates in total or resolution is outside (0, 0.1].
[[nodiscard]] NormValue brute_force_sup(const CoefficientTensor& a, const Partition& j,
                                        std::span<const int> designated, double p, const DistributionMatrix& dists,
                                        const OracleOptions& options = {});

}  // namespace chaosbound
