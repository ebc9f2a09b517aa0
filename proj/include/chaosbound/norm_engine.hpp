// SPDX-License-Identifier: MIT
//
// Partition norms ||A||_{J,p}^N, injective norms ||A||_J and the closed form
// for exponential generators.
//
// For a partition J = {I_1..I_k} and designated axes s_l in I_l, the inner
// supremum runs over block vectors x^l with
//     sum_{i_{s_l}} N-hat_{i}^{s_l}( || x^l restricted to i_{s_l} = i ||_2 ) <= p.
// With every other block fixed, the best x^l is aligned with the contracted
// tensor slice by slice, which leaves a water-filling problem on slice norms.
// One block is therefore solved exactly; several blocks are solved by
// alternating those exact block updates from several starts.
#pragma once

#include "chaosbound/coeff_tensor.hpp"
#include "chaosbound/norm_value.hpp"
#include "chaosbound/partition.hpp"
#include "chaosbound/tail_function.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace chaosbound {

struct NormOptions {
    int restarts = 16;
    std::uint64_t seed = 0x5eedULL;
    /// Stop alternating once a sweep improves the objective by less than this, relatively.
    double tolerance = 1e-10;
    int max_sweeps = 500;
};

/// Inner supremum for one choice of designated axes, one per block of J.
struct ChoiceSup {
    NormValue value;
    std::vector<int> designated;
    /// One block vector per block of J, row-major over the block's axes.
    std::vector<BlockVector> maximizer;
};

/// Sum of sum_{i in I} N-hat(||x_slice||) for block vector x with designated
/// axis s; the slices are indexed by the coordinate along s.
[[nodiscard]] double block_constraint(const CoefficientTensor& a, const BlockVector& x, int designated,
                                      std::span<const TailFunction> row);

[[nodiscard]] ChoiceSup choice_sup(const CoefficientTensor& a, const Partition& j, std::span<const int> designated,
                                   double p, const DistributionMatrix& dists, const NormOptions& options = {});

/// Every choice of designated axes, in lexicographic order over the blocks.
[[nodiscard]] std::vector<std::vector<int>> designated_choices(const Partition& j);

[[nodiscard]] NormValue partition_norm(const CoefficientTensor& a, const Partition& j, double p,
                                       const DistributionMatrix& dists, const NormOptions& options = {});

/// Supremum of the multilinear form over unit Euclidean balls, one per block.
/// Frobenius norm for one block, top singular value for two, alternating
/// power iteration otherwise.
[[nodiscard]] NormValue injective_norm(const CoefficientTensor& a, const Partition& j, const NormOptions& options = {});

/// sum_{I in Q(J)} p^{#I^c + (k - #I^c)/2} * max over i_{I^c} of the injective
/// norm of the slice (a_i)_{i_I} under S(J, I); the empty I contributes max|a_i|.
[[nodiscard]] NormValue exponential_closed_form(const CoefficientTensor& a, const Partition& j, double p,
                                                const NormOptions& options = {});

enum class Regime { general_d_le_3, exponential_any_d, heuristic };

[[nodiscard]] std::string to_string(Regime r);
[[nodiscard]] Regime classify_regime(int order, const DistributionMatrix& dists);

struct PartitionNorm {
    Partition partition;
    NormValue norm;
};

struct BoundTotal {
    std::vector<PartitionNorm> terms;
    double total = 0.0;
    NormStatus status = NormStatus::exact;
    Regime regime = Regime::heuristic;
};

/// All Bell(d) partition norms at level p and their sum.
[[nodiscard]] BoundTotal bound_total(const CoefficientTensor& a, double p, const DistributionMatrix& dists,
                                     const NormOptions& options = {});

}  // namespace chaosbound
