// SPDX-License-Identifier: MIT
#include "chaosbound/oracle.hpp"

#include "chaosbound/errors.hpp"
#include "chaosbound/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace chaosbound {

namespace {

struct OracleBlock {
    std::vector<int> axes;
    int designated = 0;
    std::size_t offset = 0;  // position in the concatenated direction
    std::size_t size = 1;
    std::vector<std::size_t> coordinate;  // designated index per block entry
    std::span<const TailFunction> row;
};

class Problem {
public:
    Problem(const CoefficientTensor& a, const Partition& j, std::span<const int> designated, double p,
            const DistributionMatrix& dists)
        : a_(a), p_(p) {
        std::size_t offset = 0;
        for (std::size_t l = 0; l < j.blocks().size(); ++l) {
            OracleBlock b;
            b.axes = j.blocks()[l].axes();
            b.designated = designated[l];
            b.offset = offset;
            for (int axis : b.axes) {
                b.size *= a.dim(axis);
            }
            b.coordinate.resize(b.size);
            for (std::size_t f = 0; f < b.size; ++f) {
                std::size_t rem = f;
                for (std::size_t q = b.axes.size(); q-- > 0;) {
                    const std::size_t n = a.dim(b.axes[q]);
                    if (b.axes[q] == b.designated) {
                        b.coordinate[f] = rem % n;
                    }
                    rem /= n;
                }
            }
            b.row = dists.row(b.designated);
            offset += b.size;
            blocks_.push_back(std::move(b));
        }
        dimension_ = offset;
    }

    [[nodiscard]] std::size_t dimension() const { return dimension_; }

    /// Objective at the boundary point in direction z; 0 when some block direction vanishes.
    [[nodiscard]] double value(std::span<const double> z) const {
        x_.assign(z.begin(), z.end());
        for (const auto& b : blocks_) {
            std::vector<double> norms(b.row.size(), 0.0);
            for (std::size_t f = 0; f < b.size; ++f) {
                norms[b.coordinate[f]] += z[b.offset + f] * z[b.offset + f];
            }
            bool nonzero = false;
            for (double& r : norms) {
                r = std::sqrt(r);
                nonzero = nonzero || r > 0.0;
            }
            if (!nonzero) {
                return 0.0;
            }
            const double u = radial(norms, b.row);
            for (std::size_t f = 0; f < b.size; ++f) {
                x_[b.offset + f] *= u;
            }
        }
        return multilinear();
    }

private:
    [[nodiscard]] double radial(const std::vector<double>& norms, std::span<const TailFunction> row) const {
        auto phi = [&](double u) {
            double s = 0.0;
            for (std::size_t i = 0; i < norms.size(); ++i) {
                s += row[i].n_hat(u * norms[i]);
            }
            return s;
        };
        double lo = 0.0;
        double hi = 1.0;
        while (phi(hi) <= p_) {
            lo = hi;
            hi *= 2.0;
        }
        while (hi - lo > 1e-13 * hi) {
            const double mid = 0.5 * (lo + hi);
            if (mid <= lo || mid >= hi) {
                break;
            }
            (phi(mid) <= p_ ? lo : hi) = mid;
        }
        return lo;
    }

    /// Plain sum over every entry of A.
    [[nodiscard]] double multilinear() const {
        const auto values = a_.values();
        const int d = a_.order();
        std::vector<std::size_t> index(static_cast<std::size_t>(d));
        long double total = 0.0L;
        for (std::size_t flat = 0; flat < values.size(); ++flat) {
            std::size_t rem = flat;
            for (int axis = d - 1; axis >= 0; --axis) {
                index[static_cast<std::size_t>(axis)] = rem % a_.dim(axis);
                rem /= a_.dim(axis);
            }
            long double term = values[flat];
            for (const auto& b : blocks_) {
                std::size_t off = 0;
                for (int axis : b.axes) {
                    off = off * a_.dim(axis) + index[static_cast<std::size_t>(axis)];
                }
                term *= x_[b.offset + off];
            }
            total += term;
        }
        return static_cast<double>(total);
    }

    const CoefficientTensor& a_;
    double p_;
    std::vector<OracleBlock> blocks_;
    std::size_t dimension_ = 0;
    mutable std::vector<double> x_;
};

struct Candidate {
    double value;
    std::vector<double> z;
};

}  // namespace

NormValue brute_force_sup(const CoefficientTensor& a, const Partition& j, std::span<const int> designated, double p,
                          const DistributionMatrix& dists, const OracleOptions& options) {
    if (j.ground() != a.all_axes()) {
        throw InvalidInput("oracle: partition does not match the tensor axes");
    }
    if (designated.size() != j.blocks().size()) {
        throw InvalidInput("oracle: need one designated axis per block");
    }
    for (std::size_t l = 0; l < designated.size(); ++l) {
        if (!j.blocks()[l].contains(designated[l])) {
            throw InvalidInput("oracle: designated axis is not in its block");
        }
    }
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw InvalidInput("oracle: level p must be a finite real >= 2");
    }
    if (!(options.resolution > 0.0 && options.resolution <= 0.1)) {
        throw InvalidInput("oracle: resolution must lie in (0, 0.1]");
    }
    dists.check_matches(a);
    const Problem problem(a, j, designated, p, dists);
    const std::size_t dim = problem.dimension();
    if (dim > kOracleMaxDimensions) {
        throw InvalidInput("oracle: too many free coordinates (limit " + std::to_string(kOracleMaxDimensions) + ")");
    }

    NormValue out;
    out.status = NormStatus::certified_oracle;
    if (a.is_zero()) {
        return out;
    }

    const auto keep = static_cast<std::size_t>(std::max(1, options.refine_top));
    std::vector<Candidate> top;
    auto offer = [&](std::span<const double> z) {
        const double v = problem.value(z);
        if (top.size() < keep || v > top.back().value) {
            Candidate c{v, std::vector<double>(z.begin(), z.end())};
            top.insert(std::upper_bound(top.begin(), top.end(), c,
                                        [](const Candidate& x, const Candidate& y) { return x.value > y.value; }),
                       std::move(c));
            if (top.size() > keep) {
                top.pop_back();
            }
        }
    };

    // Grid on [-1, 1]^dim when it is small enough.
    const auto per_axis = static_cast<std::size_t>(std::floor(2.0 / options.resolution + 1e-9)) + 1;
    double grid_size = std::pow(static_cast<double>(per_axis), static_cast<double>(dim));
    std::vector<double> z(dim);
    if (grid_size <= static_cast<double>(options.grid_limit)) {
        const auto total = static_cast<std::size_t>(grid_size);
        for (std::size_t g = 0; g < total; ++g) {
            std::size_t rem = g;
            for (std::size_t q = 0; q < dim; ++q) {
                z[q] = -1.0 + options.resolution * static_cast<double>(rem % per_axis);
                rem /= per_axis;
            }
            offer(z);
        }
    }
    Stream stream(options.seed, make_stream_id(StreamTag::oracle, 0));
    for (std::size_t r = 0; r < options.random_points; ++r) {
        for (double& e : z) {
            e = stream.gaussian();
        }
        offer(z);
    }

    double lipschitz = 0.0;
    double best = 0.0;
    int iterations = 0;
    for (auto& cand : top) {
        double step = options.resolution;
        double here = cand.value;
        bool first = true;
        while (step >= 1e-7 && iterations < 200000) {
            bool moved = false;
            for (std::size_t q = 0; q < dim && !moved; ++q) {
                for (double dir : {1.0, -1.0}) {
                    auto trial = cand.z;
                    trial[q] += dir * step;
                    const double v = problem.value(trial);
                    ++iterations;
                    if (first) {
                        lipschitz = std::max(lipschitz, std::abs(v - here) / step);
                    }
                    if (v > here) {
                        here = v;
                        cand.z = std::move(trial);
                        moved = true;
                        break;
                    }
                }
            }
            first = false;
            if (!moved) {
                step *= 0.5;
            }
        }
        cand.value = here;
        best = std::max(best, here);
    }
    out.value = std::max(best, 0.0);
    out.diagnostics.iterations = iterations;
    out.diagnostics.restarts = static_cast<int>(top.size());
    out.diagnostics.error_bound = options.resolution * lipschitz;
    return out;
}

}  // namespace chaosbound
