// SPDX-License-Identifier: MIT
//
// Sampling of decoupled and undecoupled chaoses and robust Monte Carlo
// estimates of their L_p norms and tails.
//
// Samples are generated in shards; shard s uses stream (seed, tag, s) and
// holds a fixed slice of the sample indices, so results never depend on how
// many threads did the work.
#pragma once

#include "chaosbound/coeff_tensor.hpp"
#include "chaosbound/rng.hpp"
#include "chaosbound/tail_function.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace chaosbound {

enum class ChaosMode { decoupled, undecoupled };

/// Tensor plus generators. Undecoupled mode needs a symmetric tensor vanishing
/// on repeated indices and one generator law per index shared by all axes.
class ChaosSpec {
public:
    ChaosSpec(CoefficientTensor a, DistributionMatrix dists, ChaosMode mode);

    [[nodiscard]] const CoefficientTensor& tensor() const { return a_; }
    [[nodiscard]] const DistributionMatrix& dists() const { return dists_; }
    [[nodiscard]] ChaosMode mode() const { return mode_; }

private:
    CoefficientTensor a_;
    DistributionMatrix dists_;
    ChaosMode mode_;
};

/// Reusable per-thread evaluator of one draw of S.
class ChaosSampler {
public:
    explicit ChaosSampler(const ChaosSpec& spec);
    double operator()(Stream& stream);

private:
    const ChaosSpec* spec_;
    std::vector<std::vector<double>> rows_;
    std::vector<std::span<const double>> views_;
    std::vector<double> scratch_;
};

[[nodiscard]] double sample_chaos(const ChaosSpec& spec, Stream& stream);

/// Draws grouped by shard.
struct SampleSet {
    std::vector<std::vector<double>> shards;
    [[nodiscard]] std::size_t size() const;
};

/// Throws InvalidInput when shards == 0 or samples < shards.
[[nodiscard]] SampleSet draw_samples(const ChaosSpec& spec, std::size_t samples, std::size_t shards,
                                     std::uint64_t seed, StreamTag tag = StreamTag::mc_shard);

struct MomentEstimate {
    double p = 2.0;
    double estimate = 0.0;
    double half_width = 0.0;
    std::size_t samples = 0;
    std::size_t shards = 0;
};

/// Median over shards of the shard-wise L_p norms; the half-width is three
/// standard errors of that median, estimated from the shard MAD.
/// Throws EstimatorUnstable when |S|^p overflows.
[[nodiscard]] MomentEstimate moment_from_samples(const SampleSet& set, double p);

/// Requires p >= 1, samples >= 10^4 and shards >= 8.
[[nodiscard]] MomentEstimate estimate_moment(const ChaosSpec& spec, double p, std::size_t samples,
                                             std::size_t shards, std::uint64_t seed);

struct TailEstimate {
    double threshold = 0.0;
    double probability = 0.0;
    /// Wilson score interval at three standard deviations.
    double lower = 0.0;
    double upper = 0.0;
    std::size_t hits = 0;
    std::size_t samples = 0;
};

[[nodiscard]] TailEstimate tail_from_samples(const SampleSet& set, double threshold);
[[nodiscard]] TailEstimate estimate_tail(const ChaosSpec& spec, double threshold, std::size_t samples,
                                         std::uint64_t seed, std::size_t shards = 32);

struct DecoupleComparison {
    MomentEstimate undecoupled;
    MomentEstimate decoupled;
    /// undecoupled / decoupled; 1 when both vanish.
    double ratio = 1.0;
    /// Sum of the two relative half-widths, times the ratio.
    double ratio_half_width = 0.0;
};

/// Moments of the chaos and of its decoupled version, from independent streams.
[[nodiscard]] DecoupleComparison decouple_compare(const CoefficientTensor& a, const DistributionMatrix& dists,
                                                  double p, std::size_t samples, std::uint64_t seed,
                                                  std::size_t shards = 32);

struct TetrahedralSplit {
    /// ||S_j||_p for j = 0..d; the constant term is exact.
    std::vector<MomentEstimate> parts;
    MomentEstimate whole;
    double parts_sum = 0.0;
    /// parts_sum / whole; 1 when both vanish.
    double ratio = 1.0;
};

/// Evaluates S = constant + sum_{j>=1} S_j on one shared sequence X_1..X_n,
/// where S_j is the degree-j chaos with coefficients parts[j-1] (all dims n,
/// symmetric, vanishing on repeated indices).
[[nodiscard]] TetrahedralSplit tetrahedral_eval_and_split(double constant, std::span<const CoefficientTensor> parts,
                                                          std::span<const TailFunction> row, double p,
                                                          std::size_t samples, std::uint64_t seed,
                                                          std::size_t shards = 32);

}  // namespace chaosbound
