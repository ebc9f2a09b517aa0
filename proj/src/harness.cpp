// SPDX-License-Identifier: MIT
#include "chaosbound/harness.hpp"

#include "chaosbound/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace chaosbound {

namespace {

constexpr std::uint64_t kFixtureSeed = 0xf1c5'7e5e'ed00'0001ULL;
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string describe(const CoefficientTensor& a, const DistributionMatrix& dists) {
    std::string s = "d=" + std::to_string(a.order()) + " dims=";
    for (std::size_t q = 0; q < a.dims().size(); ++q) {
        s += (q ? "x" : "") + std::to_string(a.dims()[q]);
    }
    return s + " dists=" + dists.describe();
}

std::vector<double> flat_values(std::size_t n, int order, Stream& stream, double keep_probability) {
    std::size_t size = 1;
    for (int q = 0; q < order; ++q) {
        size *= n;
    }
    std::vector<double> v(size, 0.0);
    for (double& e : v) {
        const double g = stream.gaussian();
        if (keep_probability >= 1.0 || stream.uniform() < keep_probability) {
            e = g;
        }
    }
    return v;
}

double ratio_or_one(double num, double den) {
    if (num == 0.0 && den == 0.0) {
        return 1.0;
    }
    return den == 0.0 ? kInf : num / den;
}

/// Smallest L >= 1 with pred(L), given pred is false at 1 and monotone on [lo, inf).
template <class Pred>
double smallest_true(Pred pred, double lo) {
    double hi = std::max(2.0, 2.0 * lo);
    while (!pred(hi)) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) {
            return kInf;
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (pred(mid) ? hi : lo) = mid;
    }
    return hi;
}

double fit_lower_bracket(double prob, double t) {
    if (prob <= 0.0) {
        return kInf;
    }
    auto ok = [&](double l) { return std::exp(-l * t) / l <= prob; };
    return ok(1.0) ? 1.0 : smallest_true(ok, 1.0);
}

double fit_upper_bracket(double prob, double t) {
    auto ok = [&](double l) { return prob <= l * std::exp(-t / l); };
    return ok(1.0) ? 1.0 : smallest_true(ok, 1.0);
}

/// (1/L) e^{-t/L} <= P: increasing in L up to L = t, decreasing after.
double fit_swapped_lower(double prob, double t) {
    auto ok = [&](double l) { return std::exp(-t / l) / l <= prob; };
    if (ok(1.0)) {
        return 1.0;
    }
    if (prob <= 0.0) {
        return kInf;
    }
    return smallest_true(ok, std::max(1.0, t));
}

/// P <= L e^{-L t}: increasing in L up to L = 1/t, decreasing after.
double fit_swapped_upper(double prob, double t) {
    auto ok = [&](double l) { return prob <= l * std::exp(-l * t); };
    if (ok(1.0)) {
        return 1.0;
    }
    if (t < 1.0 && ok(1.0 / t)) {
        double lo = 1.0;
        double hi = 1.0 / t;
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (ok(mid) ? hi : lo) = mid;
        }
        return hi;
    }
    return kInf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

double default_acceptance(int order) {
    switch (order) {
        case 1:
            return 8.0;
        case 2:
            return 32.0;
        case 3:
            return 64.0;
        default:
            return 128.0;
    }
}

std::string to_string(FixtureFamily f) {
    switch (f) {
        case FixtureFamily::gaussian:
            return "gaussian";
        case FixtureFamily::sparse:
            return "sparse";
        case FixtureFamily::rank_one:
            return "rank-one";
        case FixtureFamily::identity:
            return "identity";
    }
    return "?";
}

FixtureFamily parse_fixture_family(const std::string& name) {
    for (auto f : {FixtureFamily::gaussian, FixtureFamily::sparse, FixtureFamily::rank_one, FixtureFamily::identity}) {
        if (to_string(f) == name) {
            return f;
        }
    }
    throw InvalidInput("family: expected gaussian, sparse, rank-one or identity, got '" + name + "'");
}

Fixture make_fixture(FixtureFamily family, int order, std::size_t n) {
    if (order < 1 || order > kMaxOrder || n == 0) {
        throw InvalidInput("fixture: order must be 1..4 and n positive");
    }
    Stream stream(kFixtureSeed, make_stream_id(StreamTag::fixture, (static_cast<std::uint64_t>(order) << 24) |
                                                                       (static_cast<std::uint64_t>(family) << 16) | n));
    const std::vector<std::size_t> dims(static_cast<std::size_t>(order), n);
    std::vector<double> values;
    switch (family) {
        case FixtureFamily::gaussian:
        case FixtureFamily::sparse: {
            const double keep = family == FixtureFamily::sparse ? 0.1 : 1.0;
            values = flat_values(n, order, stream, keep);
            CoefficientTensor t(dims, values);
            if (order >= 2 && n >= static_cast<std::size_t>(order)) {
                t = symmetrize_and_kill_diagonal(t);
            }
            if (t.is_zero()) {
                // Keep one off-diagonal entry so the fixture is never trivial.
                std::vector<double> one(t.size(), 0.0);
                std::size_t off = 0;
                for (int q = 0; q < order; ++q) {
                    off = off * n + static_cast<std::size_t>(q) % n;
                }
                one[off] = 1.0;
                t = CoefficientTensor(dims, one);
                if (order >= 2 && n >= static_cast<std::size_t>(order)) {
                    t = symmetrize_and_kill_diagonal(t);
                }
            }
            values.assign(t.values().begin(), t.values().end());
            break;
        }
        case FixtureFamily::rank_one: {
            std::vector<double> u(n);
            for (double& e : u) {
                e = stream.gaussian();
            }
            values.assign(1, 1.0);
            for (int q = 0; q < order; ++q) {
                std::vector<double> next;
                next.reserve(values.size() * n);
                for (double v : values) {
                    for (double e : u) {
                        next.push_back(v * e);
                    }
                }
                values = std::move(next);
            }
            break;
        }
        case FixtureFamily::identity: {
            std::size_t step = 0;
            std::size_t power = 1;
            for (int q = 0; q < order; ++q) {
                step += power;
                power *= n;
            }
            values.assign(power, 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                values[i * step] = 1.0;
            }
            break;
        }
    }
    Fixture f{to_string(family) + "-d" + std::to_string(order) + "-n" + std::to_string(n), family,
              CoefficientTensor(dims, std::move(values))};
    return f;
}

std::vector<std::size_t> fixture_sizes(int order) {
    switch (order) {
        case 1:
            return {4, 16, 64};
        case 2:
            return {4, 8, 16};
        case 3:
            return {3, 4, 6};
        case 4:
            return {4};
        default:
            throw InvalidInput("fixture: order must be 1..4");
    }
}

std::vector<Fixture> fixture_ensemble(int order) {
    std::vector<Fixture> out;
    for (auto family : {FixtureFamily::gaussian, FixtureFamily::sparse, FixtureFamily::rank_one,
                        FixtureFamily::identity}) {
        for (std::size_t n : fixture_sizes(order)) {
            out.push_back(make_fixture(family, order, n));
        }
    }
    return out;
}

BoundReport run_two_sided(const CoefficientTensor& a, const DistributionMatrix& dists,
                          const std::vector<double>& p_grid, const MCConfig& config,
                          std::optional<double> acceptance) {
    const auto start = std::chrono::steady_clock::now();
    BoundReport report;
    report.description = describe(a, dists);
    report.dims = a.dims();
    report.dists = dists.describe();
    report.p_grid = p_grid;
    report.regime = classify_regime(a.order(), dists);
    report.theorem_backed = report.regime != Regime::heuristic;
    report.acceptance = acceptance.value_or(default_acceptance(a.order()));
    report.seed = config.seed;
    report.samples = config.samples;
    report.shards = config.shards;
    report.degenerate = a.is_zero();

    const ChaosSpec spec(a, dists, ChaosMode::decoupled);
    const SampleSet samples = draw_samples(spec, config.samples, config.shards, config.seed);
    const double l = report.acceptance;
    for (double p : p_grid) {
        MomentRow row;
        row.p = p;
        try {
            row.bound = bound_total(a, p, dists, config.norm);
            row.moment = moment_from_samples(samples, p);
            const double m = row.moment.estimate;
            const double total = row.bound.total;
            row.ratio = ratio_or_one(m, total);
            row.lower_ok = m + row.moment.half_width >= total / l;
            row.upper_ok = m - row.moment.half_width <= l * total;
            row.within = row.ratio >= 1.0 / l && row.ratio <= l;
        } catch (const InvalidInput&) {
            throw;
        } catch (const std::exception& e) {
            row.error = e.what();
            row.within = row.lower_ok = row.upper_ok = false;
        }
        if (!row.error.empty() || (report.theorem_backed && !row.within)) {
            report.passed = false;
        }
        report.rows.push_back(std::move(row));
    }
    if (config.timing) {
        report.timing_seconds = seconds_since(start);
    }
    return report;
}

TailReport run_tail(const CoefficientTensor& a, const DistributionMatrix& dists, const std::vector<double>& t_grid,
                    const MCConfig& config, double limit) {
    const auto start = std::chrono::steady_clock::now();
    TailReport report;
    report.description = describe(a, dists);
    report.dims = a.dims();
    report.dists = dists.describe();
    report.t_grid = t_grid;
    report.regime = classify_regime(a.order(), dists);
    report.limit = limit;
    report.seed = config.seed;
    report.samples = config.samples;

    const ChaosSpec spec(a, dists, ChaosMode::decoupled);
    const SampleSet samples = draw_samples(spec, config.samples, config.shards, config.seed);
    double running = 0.0;
    std::size_t usable = 0;
    for (double t : t_grid) {
        if (!(t > 0.0) || !std::isfinite(t)) {
            throw InvalidInput("tail: every t must be a positive finite real");
        }
        TailRow row;
        row.t = t;
        row.level = std::max(t, 2.0);
        row.clamped = t < 2.0;
        try {
            running = std::max(running, bound_total(a, row.level, dists, config.norm).total);
            row.threshold = running;
            row.tail = tail_from_samples(samples, row.threshold);
            row.insufficient = row.tail.hits == 0;
            row.fit_lower = fit_lower_bracket(row.tail.probability, t);
            row.fit_upper = fit_upper_bracket(row.tail.probability, t);
            if (!row.insufficient) {
                ++usable;
                report.fitted_lower = std::max(report.fitted_lower, row.fit_lower);
                report.fitted_upper = std::max(report.fitted_upper, row.fit_upper);
                report.swapped_lower =
                    std::max(report.swapped_lower, fit_swapped_lower(row.tail.probability, t));
                report.swapped_upper =
                    std::max(report.swapped_upper, fit_swapped_upper(row.tail.probability, t));
            }
        } catch (const InvalidInput&) {
            throw;
        } catch (const std::exception& e) {
            row.error = e.what();
            report.passed = false;
        }
        report.rows.push_back(std::move(row));
    }
    report.fitted = std::max(report.fitted_lower, report.fitted_upper);
    if (report.regime == Regime::general_d_le_3 && (!(report.fitted <= limit) || usable == 0)) {
        report.passed = false;
    }
    if (config.timing) {
        report.timing_seconds = seconds_since(start);
    }
    return report;
}

RemarkReport run_gaussian_remark(const CoefficientTensor& a, const std::vector<double>& p_grid,
                                 const NormOptions& options, double bracket) {
    const auto dists = DistributionMatrix::iid(normalize(TailFunction::gaussian()), a.dims());
    RemarkReport report;
    report.dims = a.dims();
    report.p_grid = p_grid;
    report.bracket = bracket;
    for (const auto& j : enumerate_partitions(a.order())) {
        const NormValue inj = injective_norm(a, j, options);
        for (double p : p_grid) {
            RemarkRow row;
            row.partition = j;
            row.p = p;
            row.injective = inj;
            row.norm = partition_norm(a, j, p, dists, options);
            row.ratio = ratio_or_one(row.norm.value, std::pow(p, 0.5 * j.block_count()) * inj.value);
            row.within = row.ratio >= 1.0 / bracket && row.ratio <= bracket;
            report.passed = report.passed && row.within;
            report.rows.push_back(std::move(row));
        }
    }
    return report;
}

}  // namespace chaosbound
