// SPDX-License-Identifier: MIT
//
// Experiments that put the deterministic bounds next to Monte Carlo estimates
// and record the empirical constants.
#pragma once

#include "chaosbound/coeff_tensor.hpp"
#include "chaosbound/norm_engine.hpp"
#include "chaosbound/sampler.hpp"
#include "chaosbound/tail_function.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace chaosbound {

struct MCConfig {
    std::size_t samples = 1'000'000;
    std::size_t shards = 32;
    std::uint64_t seed = 1;
    NormOptions norm;
    /// Record wall-clock time in reports (makes them non-reproducible).
    bool timing = false;
};

/// 8, 32, 64 for d = 1, 2, 3; 128 for d = 4.
[[nodiscard]] double default_acceptance(int order);

enum class FixtureFamily { gaussian, sparse, rank_one, identity };

[[nodiscard]] std::string to_string(FixtureFamily f);
[[nodiscard]] FixtureFamily parse_fixture_family(const std::string& name);

struct Fixture {
    std::string name;
    FixtureFamily family = FixtureFamily::gaussian;
    CoefficientTensor tensor;
};

/// Deterministic fixture for the given family, order and side length.
/// Gaussian: symmetric, zero on repeated indices, standard normal entries.
/// Sparse: the same with each entry kept with probability 0.1 (at least one kept).
/// Rank one: u x u x ... with u standard normal.
/// Identity: ones on the main diagonal.
[[nodiscard]] Fixture make_fixture(FixtureFamily family, int order, std::size_t n);

/// Side lengths per order: {4,16,64}, {4,8,16}, {3,4,6}, {4}.
[[nodiscard]] std::vector<std::size_t> fixture_sizes(int order);

/// Every family at every size for the order.
[[nodiscard]] std::vector<Fixture> fixture_ensemble(int order);

struct MomentRow {
    double p = 2.0;
    BoundTotal bound;
    MomentEstimate moment;
    /// moment / bound total; 1 when both vanish.
    double ratio = 1.0;
    bool within = true;
    /// moment + half-width >= total / L.
    bool lower_ok = true;
    /// moment - half-width <= L * total.
    bool upper_ok = true;
    std::string error;
};

struct BoundReport {
    std::string description;
    std::vector<std::size_t> dims;
    std::string dists;
    std::vector<double> p_grid;
    std::vector<MomentRow> rows;
    Regime regime = Regime::heuristic;
    bool theorem_backed = false;
    double acceptance = 0.0;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    std::size_t shards = 0;
    bool degenerate = false;
    bool passed = true;
    std::optional<double> timing_seconds;
};

/// Bound totals and moments of the decoupled chaos over the p grid, all from
/// one sample set. The bracket check applies only in a theorem-backed regime;
/// solver and estimator failures are recorded in the row and fail the report.
[[nodiscard]] BoundReport run_two_sided(const CoefficientTensor& a, const DistributionMatrix& dists,
                                        const std::vector<double>& p_grid, const MCConfig& config,
                                        std::optional<double> acceptance = std::nullopt);

struct TailRow {
    double t = 0.0;
    /// Norm level max(t, 2).
    double level = 2.0;
    bool clamped = false;
    /// Sum over partitions of the norms at `level`, made nondecreasing in t.
    double threshold = 0.0;
    TailEstimate tail;
    /// No sample reached the threshold; the cell is left out of the fit.
    bool insufficient = false;
    /// Smallest L >= 1 with (1/L) e^{-L t} <= P.
    double fit_lower = 1.0;
    /// Smallest L >= 1 with P <= L e^{-t/L}.
    double fit_upper = 1.0;
    std::string error;
};

struct TailReport {
    std::string description;
    std::vector<std::size_t> dims;
    std::string dists;
    std::vector<double> t_grid;
    std::vector<TailRow> rows;
    Regime regime = Regime::heuristic;
    /// Over the sufficient cells: max of fit_lower, max of fit_upper, and the larger.
    double fitted_lower = 1.0;
    double fitted_upper = 1.0;
    double fitted = 1.0;
    /// The same fit with the exponents swapped: (1/L) e^{-t/L} <= P <= L e^{-L t}.
    /// Infinite when no L works.
    double swapped_lower = 1.0;
    double swapped_upper = 1.0;
    double limit = 16.0;
    std::uint64_t seed = 0;
    std::size_t samples = 0;
    bool passed = true;
    std::optional<double> timing_seconds;
};

/// In the d <= 3 regime the report fails when the fitted constant exceeds
/// `limit` or when no cell has any hits.
[[nodiscard]] TailReport run_tail(const CoefficientTensor& a, const DistributionMatrix& dists,
                                  const std::vector<double>& t_grid, const MCConfig& config, double limit = 16.0);

struct RemarkRow {
    Partition partition;
    double p = 2.0;
    NormValue norm;
    NormValue injective;
    /// norm / (p^{k/2} * injective); 1 when both vanish.
    double ratio = 1.0;
    bool within = true;
};

struct RemarkReport {
    std::vector<std::size_t> dims;
    std::vector<double> p_grid;
    double bracket = 16.0;
    std::vector<RemarkRow> rows;
    bool passed = true;
};

/// ||A||_{J,p}^N against p^{k/2} ||A||_J for normalized Gaussian generators,
/// every partition and every p.
[[nodiscard]] RemarkReport run_gaussian_remark(const CoefficientTensor& a, const std::vector<double>& p_grid,
                                               const NormOptions& options = {}, double bracket = 16.0);

}  // namespace chaosbound
