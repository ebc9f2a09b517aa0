// SPDX-License-Identifier: MIT
#include "chaosbound/norm_engine.hpp"

#include "chaosbound/errors.hpp"
#include "chaosbound/rng.hpp"
#include "chaosbound/waterfill.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>

namespace chaosbound {

namespace {

/// Where the designated coordinate sits inside a block's row-major layout.
struct BlockGeometry {
    std::size_t size = 1;
    std::size_t stride = 1;
    std::size_t n = 1;

    [[nodiscard]] std::size_t coordinate(std::size_t flat) const { return (flat / stride) % n; }
};

BlockGeometry geometry(const CoefficientTensor& a, AxisSet block, int designated) {
    BlockGeometry g;
    g.size = extent(a, block);
    g.n = a.dim(designated);
    for (int axis : block.axes()) {
        if (axis > designated) {
            g.stride *= a.dim(axis);
        }
    }
    return g;
}

std::vector<double> grouped_norms(std::span<const double> x, const BlockGeometry& g) {
    std::vector<double> sq(g.n, 0.0);
    for (std::size_t f = 0; f < x.size(); ++f) {
        sq[g.coordinate(f)] += x[f] * x[f];
    }
    for (double& v : sq) {
        v = std::sqrt(v);
    }
    return sq;
}

double dot(std::span<const double> x, std::span<const double> y) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += static_cast<long double>(x[i]) * y[i];
    }
    return static_cast<double>(s);
}

double euclid(std::span<const double> x) {
    return std::sqrt(std::max(0.0, dot(x, x)));
}

std::uint64_t partition_code(const Partition& j) {
    std::uint64_t code = 0;
    int shift = 0;
    for (AxisSet b : j.blocks()) {
        code |= static_cast<std::uint64_t>(b.mask()) << shift;
        shift += 4;
    }
    return code;
}

std::uint64_t start_stream(std::uint64_t code, std::uint64_t choice, int restart) {
    return make_stream_id(StreamTag::multistart, (code << 24) | (choice << 8) | static_cast<std::uint64_t>(restart));
}

constexpr std::uint64_t kInjectiveCode = 1ULL << 16;

/// Exact update of one block given the contraction G of A with the others.
/// Writes the new block into `out` and returns its objective value.
struct BlockUpdate {
    std::function<double(std::size_t block, std::span<const double> g, std::vector<double>& out)> solve;
    bool exact = true;
};

struct AlternatingRun {
    double value = 0.0;
    int sweeps = 0;
};

AlternatingRun alternate(const CoefficientTensor& a, const std::vector<AxisSet>& blocks, std::vector<BlockVector>& x,
                         const BlockUpdate& update, const NormOptions& options) {
    const std::size_t k = blocks.size();
    std::vector<BlockVector> others;
    others.reserve(k);
    std::vector<double> candidate;

    double objective = contract_keep(a, x, AxisSet{}).front();
    AlternatingRun run;
    for (int sweep = 0; sweep < std::max(1, options.max_sweeps); ++sweep) {
        const double before = objective;
        for (std::size_t l = 0; l < k; ++l) {
            others.clear();
            for (std::size_t m = 0; m < k; ++m) {
                if (m != l) {
                    others.push_back(x[m]);
                }
            }
            const auto g = contract_keep(a, others, blocks[l]);
            const double old = dot(g, x[l].values);
            candidate.assign(g.size(), 0.0);
            const double value = update.solve(l, g, candidate);
            if (value < old - 1e-9 * std::max(std::abs(old), 1e-300)) {
                if (update.exact) {
                    throw SolverError("alternating maximization: exact block update decreased the objective");
                }
                objective = old;
                continue;
            }
            if (value > old) {
                x[l].values.swap(candidate);
                objective = value;
            } else {
                objective = old;
            }
        }
        run.sweeps = sweep + 1;
        if (objective < before - 1e-9 * std::max(std::abs(before), 1e-300)) {
            throw SolverError("alternating maximization: objective decreased across a sweep");
        }
        if (k == 1 || objective - before <= options.tolerance * std::max(std::abs(objective), 1e-300)) {
            break;
        }
    }
    run.value = objective;
    return run;
}

std::vector<BlockVector> gaussian_start(const CoefficientTensor& a, const std::vector<AxisSet>& blocks,
                                        Stream& stream) {
    std::vector<BlockVector> x;
    x.reserve(blocks.size());
    for (AxisSet b : blocks) {
        BlockVector v{b, std::vector<double>(extent(a, b))};
        for (double& e : v.values) {
            e = stream.gaussian();
        }
        x.push_back(std::move(v));
    }
    return x;
}

void normalize_unit(std::vector<double>& v) {
    const double r = euclid(v);
    if (r > 0.0) {
        for (double& e : v) {
            e /= r;
        }
    }
}

/// Largest u with sum_i N-hat(u * r_i) <= p, by bisection on u.
double radial_scale(std::span<const double> norms, std::span<const TailFunction> row, double p) {
    auto phi = [&](double u) {
        double s = 0.0;
        for (std::size_t i = 0; i < norms.size(); ++i) {
            if (norms[i] > 0.0) {
                s += row[i].n_hat(u * norms[i]);
            }
        }
        return s;
    };
    double lo = 0.0;
    double hi = 1.0;
    int guard = 0;
    while (phi(hi) <= p) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 1100) {
            return lo;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (phi(mid) <= p ? lo : hi) = mid;
    }
    return lo;
}

struct InjectiveSearch {
    double value = 0.0;
    int iterations = 0;
    int best_start = -1;
    std::vector<BlockVector> maximizer;
};

InjectiveSearch injective_search(const CoefficientTensor& a, const Partition& j, const NormOptions& options) {
    const auto& blocks = j.blocks();
    BlockUpdate update;
    update.exact = true;
    update.solve = [](std::size_t, std::span<const double> g, std::vector<double>& out) {
        const double r = euclid(g);
        if (r > 0.0) {
            for (std::size_t f = 0; f < g.size(); ++f) {
                out[f] = g[f] / r;
            }
        }
        return r;
    };

    InjectiveSearch best;
    best.value = -1.0;
    const std::uint64_t code = partition_code(j) | kInjectiveCode;
    for (int r = 0; r < std::max(1, options.restarts); ++r) {
        Stream stream(options.seed, start_stream(code, 0, r));
        auto x = gaussian_start(a, blocks, stream);
        for (auto& b : x) {
            normalize_unit(b.values);
        }
        const auto run = alternate(a, blocks, x, update, options);
        best.iterations += run.sweeps;
        if (run.value > best.value) {
            best.value = run.value;
            best.best_start = r;
            best.maximizer = std::move(x);
        }
    }
    best.value = std::max(best.value, 0.0);
    return best;
}

double top_singular_value(const CoefficientTensor& a, AxisSet rows, AxisSet cols) {
    const auto nr = static_cast<Eigen::Index>(extent(a, rows));
    const auto nc = static_cast<Eigen::Index>(extent(a, cols));
    Eigen::MatrixXd m(nr, nc);
    const int d = a.order();
    std::array<std::size_t, kMaxOrder> row_stride{};
    std::array<std::size_t, kMaxOrder> col_stride{};
    std::size_t rs = 1;
    std::size_t cs = 1;
    for (int axis = d - 1; axis >= 0; --axis) {
        if (rows.contains(axis)) {
            row_stride[static_cast<std::size_t>(axis)] = rs;
            rs *= a.dim(axis);
        } else {
            col_stride[static_cast<std::size_t>(axis)] = cs;
            cs *= a.dim(axis);
        }
    }
    const auto values = a.values();
    for (std::size_t flat = 0; flat < values.size(); ++flat) {
        std::size_t rem = flat;
        std::size_t r = 0;
        std::size_t c = 0;
        for (int axis = d - 1; axis >= 0; --axis) {
            const std::size_t n = a.dim(axis);
            const std::size_t i = rem % n;
            rem /= n;
            r += i * row_stride[static_cast<std::size_t>(axis)];
            c += i * col_stride[static_cast<std::size_t>(axis)];
        }
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = values[flat];
    }
    const Eigen::MatrixXd gram = nr <= nc ? Eigen::MatrixXd(m * m.transpose()) : Eigen::MatrixXd(m.transpose() * m);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success) {
        throw SolverError("injective norm: eigenvalue solver failed");
    }
    return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

void check_partition(const CoefficientTensor& a, const Partition& j) {
    if (j.ground() != a.all_axes()) {
        throw InvalidInput("partition: ground set does not match the tensor axes");
    }
}

void check_level(double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw InvalidInput("level p must be a finite real >= 2");
    }
}

}  // namespace

double block_constraint(const CoefficientTensor& a, const BlockVector& x, int designated,
                        std::span<const TailFunction> row) {
    const auto g = geometry(a, x.axes, designated);
    const auto norms = grouped_norms(x.values, g);
    double s = 0.0;
    for (std::size_t i = 0; i < norms.size(); ++i) {
        s += row[i].n_hat(norms[i]);
    }
    return s;
}

std::vector<std::vector<int>> designated_choices(const Partition& j) {
    std::vector<std::vector<int>> out{{}};
    for (AxisSet b : j.blocks()) {
        std::vector<std::vector<int>> next;
        for (const auto& prefix : out) {
            for (int axis : b.axes()) {
                auto c = prefix;
                c.push_back(axis);
                next.push_back(std::move(c));
            }
        }
        out = std::move(next);
    }
    return out;
}

ChoiceSup choice_sup(const CoefficientTensor& a, const Partition& j, std::span<const int> designated, double p,
                     const DistributionMatrix& dists, const NormOptions& options) {
    check_partition(a, j);
    check_level(p);
    dists.check_matches(a);
    const auto& blocks = j.blocks();
    const std::size_t k = blocks.size();
    if (designated.size() != k) {
        throw InvalidInput("choice: need one designated axis per block");
    }
    std::vector<BlockGeometry> geo;
    for (std::size_t l = 0; l < k; ++l) {
        if (!blocks[l].contains(designated[l])) {
            throw InvalidInput("choice: designated axis is not in its block");
        }
        geo.push_back(geometry(a, blocks[l], designated[l]));
    }

    ChoiceSup out;
    out.designated.assign(designated.begin(), designated.end());

    double worst_gap = 0.0;
    bool exact_updates = true;
    BlockUpdate update;
    update.solve = [&](std::size_t l, std::span<const double> g, std::vector<double>& x) {
        const auto c = grouped_norms(g, geo[l]);
        const auto w = waterfill_sup(c, dists.row(designated[l]), p);
        worst_gap = std::max(worst_gap, w.value.diagnostics.duality_gap);
        exact_updates = exact_updates && w.value.status == NormStatus::exact;
        for (std::size_t f = 0; f < g.size(); ++f) {
            const std::size_t i = geo[l].coordinate(f);
            x[f] = c[i] > 0.0 ? w.t[i] * g[f] / c[i] : 0.0;
        }
        return w.value.value;
    };
    update.exact = std::all_of(designated.begin(), designated.end(), [&](int s) { return dists.row_uniform(s); }) ||
                   std::all_of(geo.begin(), geo.end(), [](const BlockGeometry& g) {
                       return g.n <= static_cast<std::size_t>(kWaterfillSubsetLimit);
                   });

    auto retract = [&](std::vector<BlockVector>& x) {
        for (std::size_t l = 0; l < k; ++l) {
            const auto norms = grouped_norms(x[l].values, geo[l]);
            const double u = radial_scale(norms, dists.row(designated[l]), p);
            for (double& e : x[l].values) {
                e *= u;
            }
        }
    };

    if (k == 1) {
        std::vector<BlockVector> x{BlockVector{blocks[0], std::vector<double>(geo[0].size, 0.0)}};
        const auto run = alternate(a, blocks, x, update, options);
        out.value.value = std::max(run.value, 0.0);
        out.value.status = exact_updates ? NormStatus::exact : NormStatus::local_search_lower_bound;
        out.value.diagnostics.iterations = run.sweeps;
        out.value.diagnostics.duality_gap = worst_gap;
        out.maximizer = std::move(x);
        return out;
    }

    // Start 0 is the injective maximizer pushed out to the constraint boundary;
    // the rest are Gaussian directions.
    const auto choices = designated_choices(j);
    const auto choice_index = static_cast<std::uint64_t>(
        std::find(choices.begin(), choices.end(), out.designated) - choices.begin());
    const std::uint64_t code = partition_code(j);
    const int restarts = std::max(1, options.restarts);

    double best = -1.0;
    int total_sweeps = 0;
    for (int r = 0; r <= restarts; ++r) {
        std::vector<BlockVector> x;
        if (r == 0) {
            NormOptions inj = options;
            inj.restarts = 4;
            x = injective_search(a, j, inj).maximizer;
        } else {
            Stream stream(options.seed, start_stream(code, choice_index, r - 1));
            x = gaussian_start(a, blocks, stream);
        }
        retract(x);
        const auto run = alternate(a, blocks, x, update, options);
        total_sweeps += run.sweeps;
        if (run.value > best) {
            best = run.value;
            out.maximizer = std::move(x);
            out.value.diagnostics.best_start = r;
        }
    }
    out.value.value = std::max(best, 0.0);
    out.value.status = NormStatus::local_search_lower_bound;
    out.value.diagnostics.iterations = total_sweeps;
    out.value.diagnostics.restarts = restarts + 1;
    out.value.diagnostics.duality_gap = worst_gap;
    return out;
}

NormValue partition_norm(const CoefficientTensor& a, const Partition& j, double p, const DistributionMatrix& dists,
                         const NormOptions& options) {
    check_partition(a, j);
    check_level(p);
    dists.check_matches(a);
    NormValue total;
    for (const auto& choice : designated_choices(j)) {
        const auto c = choice_sup(a, j, choice, p, dists, options);
        total.value += c.value.value;
        total.status = combine(total.status, c.value.status);
        total.diagnostics.iterations += c.value.diagnostics.iterations;
        total.diagnostics.restarts += c.value.diagnostics.restarts;
        total.diagnostics.best_start = std::max(total.diagnostics.best_start, c.value.diagnostics.best_start);
        total.diagnostics.duality_gap = std::max(total.diagnostics.duality_gap, c.value.diagnostics.duality_gap);
    }
    return total;
}

NormValue injective_norm(const CoefficientTensor& a, const Partition& j, const NormOptions& options) {
    check_partition(a, j);
    NormValue out;
    if (a.is_zero()) {
        return out;
    }
    switch (j.block_count()) {
        case 1:
            out.value = a.frobenius_norm();
            return out;
        case 2:
            out.value = top_singular_value(a, j.blocks()[0], j.blocks()[1]);
            return out;
        default: {
            const auto s = injective_search(a, j, options);
            out.value = s.value;
            out.status = NormStatus::local_search_lower_bound;
            out.diagnostics.iterations = s.iterations;
            out.diagnostics.restarts = std::max(1, options.restarts);
            out.diagnostics.best_start = s.best_start;
            return out;
        }
    }
}

NormValue exponential_closed_form(const CoefficientTensor& a, const Partition& j, double p,
                                  const NormOptions& options) {
    check_partition(a, j);
    check_level(p);
    const int d = a.order();
    const int k = j.block_count();
    NormValue out;
    for (AxisSet subset : q_family(j)) {
        const int outside = d - subset.size();
        const double weight = std::pow(p, outside + 0.5 * (k - outside));
        double term = 0.0;
        if (subset.empty()) {
            term = a.max_abs();
        } else {
            const Partition induced = induced_partition(j, subset).compacted();
            const AxisSet fixed_axes = a.all_axes().minus(subset);
            const auto fixed_list = fixed_axes.axes();
            const std::size_t count = extent(a, fixed_axes);
            std::vector<std::size_t> index(fixed_list.size(), 0);
            for (std::size_t flat = 0; flat < count; ++flat) {
                std::size_t rem = flat;
                for (std::size_t q = fixed_list.size(); q-- > 0;) {
                    index[q] = rem % a.dim(fixed_list[q]);
                    rem /= a.dim(fixed_list[q]);
                }
                const auto piece = fixed_list.empty() ? a : slice(a, subset, index);
                if (!piece.is_zero()) {
                    const auto v = injective_norm(piece, induced, options);
                    term = std::max(term, v.value);
                    out.status = combine(out.status, v.status);
                }
            }
        }
        out.value += weight * term;
    }
    return out;
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::general_d_le_3:
            return "general-d<=3";
        case Regime::exponential_any_d:
            return "exponential-any-d";
        case Regime::heuristic:
            return "heuristic";
    }
    return "?";
}

Regime classify_regime(int order, const DistributionMatrix& dists) {
    if (order <= 3) {
        return Regime::general_d_le_3;
    }
    if (dists.all_of_kind(TailKind::exponential)) {
        return Regime::exponential_any_d;
    }
    return Regime::heuristic;
}

BoundTotal bound_total(const CoefficientTensor& a, double p, const DistributionMatrix& dists,
                       const NormOptions& options) {
    BoundTotal out;
    out.regime = classify_regime(a.order(), dists);
    for (const auto& j : enumerate_partitions(a.order())) {
        auto v = partition_norm(a, j, p, dists, options);
        out.total += v.value;
        out.status = combine(out.status, v.status);
        out.terms.push_back(PartitionNorm{j, v});
    }
    return out;
}

}  // namespace chaosbound
