// SPDX-License-Identifier: MIT
#include "chaosbound/waterfill.hpp"

#include "chaosbound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace chaosbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// One coordinate restricted to a branch of N-hat.
struct Coordinate {
    double c;
    const TailFunction* f;
    bool tail;

    [[nodiscard]] double budget(double t) const { return tail ? f->n(t) : t * t; }
    [[nodiscard]] double upper() const { return tail ? f->finite_limit() : 1.0; }

    /// Smallest maximizer of c t - lambda g(t) on the branch interval.
    [[nodiscard]] double response(double lambda) const {
        const double sigma = c / lambda;
        if (!tail) {
            return std::min(0.5 * sigma, 1.0);
        }
        const double t = std::max(1.0, f->slope_inverse(sigma));
        return std::min(t, upper());
    }

    [[nodiscard]] double inverse_budget(double b) const {
        if (!tail) {
            return std::min(1.0, std::sqrt(std::max(b, 0.0)));
        }
        return std::clamp(f->n_inverse(b), 1.0, upper());
    }
};

struct BranchSolution {
    double primal = -kInf;
    double dual = kInf;
    double lambda = 0.0;
    int iterations = 0;
    std::vector<double> t;
};

double total_budget(const std::vector<Coordinate>& coords, const std::vector<double>& t) {
    double b = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        b += coords[i].budget(t[i]);
    }
    return b;
}

std::vector<double> responses(const std::vector<Coordinate>& coords, double lambda) {
    std::vector<double> t(coords.size());
    for (std::size_t i = 0; i < coords.size(); ++i) {
        t[i] = coords[i].response(lambda);
    }
    return t;
}

double objective(const std::vector<Coordinate>& coords, const std::vector<double>& t) {
    double v = 0.0;
    for (std::size_t i = 0; i < coords.size(); ++i) {
        v += coords[i].c * t[i];
    }
    return v;
}

/// Exact maximizer with every coordinate's branch fixed. Coordinates are in
/// decreasing-c order; the fill step below relies on it for determinism only.
BranchSolution solve_branch(const std::vector<Coordinate>& coords, double p) {
    BranchSolution out;
    const std::size_t n = coords.size();

    double mandatory = 0.0;
    for (const auto& co : coords) {
        if (co.tail) {
            mandatory += co.f->n(1.0);
        }
    }
    if (mandatory > p * (1.0 + 1e-12)) {
        return out;  // infeasible branch assignment
    }
    if (mandatory >= p * (1.0 - 1e-12)) {
        out.t.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            out.t[i] = coords[i].tail ? 1.0 : 0.0;
        }
        out.primal = objective(coords, out.t);
        out.dual = out.primal;
        out.lambda = kInf;
        return out;
    }

    // Slack: every coordinate at the top of its branch fits in the budget.
    {
        std::vector<double> top(n);
        double b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            top[i] = coords[i].upper();
            b += coords[i].budget(top[i]);
        }
        if (std::isfinite(b) && b <= p) {
            out.t = std::move(top);
            out.primal = objective(coords, out.t);
            out.dual = out.primal;
            out.lambda = 0.0;
            return out;
        }
    }

    double c_max = 0.0;
    for (const auto& co : coords) {
        c_max = std::max(c_max, co.c);
    }
    auto budget_at = [&](double lambda) { return total_budget(coords, responses(coords, lambda)); };

    double hi = c_max;
    int guard = 0;
    while (budget_at(hi) > p) {
        hi *= 2.0;
        if (++guard > 2000) {
            throw SolverError("waterfill: cannot bracket the multiplier from above");
        }
    }
    double lo = 0.5 * hi;
    guard = 0;
    while (budget_at(lo) <= p) {
        hi = lo;
        lo *= 0.5;
        if (++guard > 2000 || lo == 0.0) {
            throw SolverError("waterfill: cannot bracket the multiplier from below");
        }
    }
    // Illinois regula falsi on log(lambda), keeping a bracket with the budget
    // above p at lo and at most p at hi. An infinite budget at lo forces a
    // geometric midpoint.
    double g_lo = budget_at(lo) - p;
    double g_hi = budget_at(hi) - p;
    int side = 0;
    int iterations = 0;
    while (hi / lo - 1.0 > 4e-16 && g_hi < -1e-14 * p && iterations < 200) {
        double mid = std::sqrt(lo * hi);
        if (std::isfinite(g_lo)) {
            const double a = std::log(lo);
            const double b = std::log(hi);
            const double secant = std::exp(b - g_hi * (b - a) / (g_hi - g_lo));
            if (secant > lo && secant < hi) {
                mid = secant;
            }
        }
        if (mid <= lo || mid >= hi) {
            break;
        }
        const double g = budget_at(mid) - p;
        if (g <= 0.0) {
            hi = mid;
            g_hi = g;
            if (side == -1) {
                g_lo *= 0.5;
            }
            side = -1;
        } else {
            lo = mid;
            g_lo = g;
            if (side == 1) {
                g_hi *= 0.5;
            }
            side = 1;
        }
        ++iterations;
    }

    std::vector<double> t = responses(coords, hi);
    double dual = hi * p;
    for (std::size_t i = 0; i < n; ++i) {
        dual += coords[i].c * t[i] - hi * coords[i].budget(t[i]);
    }

    // The smallest maximizers at `hi` may leave budget unused when the optimal
    // multiplier sits on a flat stretch of some N (linear tails, table
    // segments). Spend it moving those coordinates toward their position just
    // below the multiplier; along a flat stretch every unit of budget is worth
    // the same multiplier, so the order does not change the value.
    double remaining = p - total_budget(coords, t);
    if (remaining > 0.0) {
        const std::vector<double> far = responses(coords, lo);
        for (std::size_t i = 0; i < n && remaining > 0.0; ++i) {
            if (!(far[i] > t[i])) {
                continue;
            }
            const double have = coords[i].budget(t[i]);
            const double room = std::isfinite(far[i]) ? coords[i].budget(far[i]) - have : kInf;
            const double move = std::min(remaining, room);
            t[i] = coords[i].inverse_budget(have + move);
            remaining -= move;
        }
    }

    out.t = std::move(t);
    out.primal = objective(coords, out.t);
    out.dual = dual;
    out.lambda = hi;
    out.iterations = iterations;
    return out;
}

}  // namespace

WaterfillSolution waterfill_sup(std::span<const double> c, std::span<const TailFunction> row, double p) {
    if (!(p >= 2.0) || !std::isfinite(p)) {
        throw InvalidInput("waterfill: level p must be a finite real >= 2");
    }
    if (c.size() != row.size()) {
        throw InvalidInput("waterfill: coefficient and tail-function rows differ in length");
    }
    for (double v : c) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw InvalidInput("waterfill: coefficients must be finite and nonnegative");
        }
    }

    WaterfillSolution result;
    result.t.assign(c.size(), 0.0);

    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c[i] > 0.0) {
            active.push_back(i);
        }
    }
    if (active.empty()) {
        return result;
    }
    std::stable_sort(active.begin(), active.end(), [&](std::size_t a, std::size_t b) { return c[a] > c[b]; });

    const bool uniform = std::all_of(active.begin(), active.end(), [&](std::size_t i) { return row[i] == row[active.front()]; });
    const std::size_t m = active.size();

    BranchSolution best;
    int total_iterations = 0;
    int branches = 0;
    std::vector<Coordinate> coords(m);
    auto try_assignment = [&](auto&& is_tail) {
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t i = active[k];
            coords[k] = Coordinate{c[i], &row[i], is_tail(k)};
        }
        BranchSolution s = solve_branch(coords, p);
        total_iterations += s.iterations;
        ++branches;
        if (s.primal > best.primal) {
            best = std::move(s);
        }
    };

    bool exact = true;
    if (uniform || m > static_cast<std::size_t>(kWaterfillSubsetLimit)) {
        // Tail branch = the k largest coefficients.
        const double per_tail = row[active.front()].n(1.0);
        const auto max_tail =
            std::min<std::size_t>(m, static_cast<std::size_t>(std::floor(p / per_tail + 1e-9)));
        for (std::size_t k = 0; k <= max_tail; ++k) {
            try_assignment([k](std::size_t j) { return j < k; });
        }
        exact = uniform;
    } else {
        for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
            try_assignment([mask](std::size_t j) { return ((mask >> j) & 1u) != 0; });
        }
    }
    if (best.t.empty()) {
        throw SolverError("waterfill: no feasible branch assignment");
    }

    for (std::size_t k = 0; k < m; ++k) {
        result.t[active[k]] = best.t[k];
    }
    result.value.value = best.primal;
    result.value.status = exact ? NormStatus::exact : NormStatus::local_search_lower_bound;
    result.value.diagnostics.iterations = total_iterations;
    result.value.diagnostics.restarts = branches;
    result.value.diagnostics.duality_gap =
        best.primal > 0.0 ? std::max(0.0, best.dual - best.primal) / best.primal : 0.0;
    result.dual_bound = best.dual;
    result.multiplier = best.lambda;
    return result;
}

}  // namespace chaosbound
