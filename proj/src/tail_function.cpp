// SPDX-License-Identifier: MIT
#include "chaosbound/tail_function.hpp"

#include "chaosbound/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace chaosbound {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
const double kSqrt2 = std::numbers::sqrt2;
const double kSqrt2OverPi = std::sqrt(2.0 / std::numbers::pi);

/// exp(z^2) erfc(z) for z >= 0.
double erfcx(double z) {
    if (z < 25.0) {
        return std::exp(z * z) * std::erfc(z);
    }
    const double w = 1.0 / (z * z);
    const double series = 1.0 + w * (-0.5 + w * (0.75 + w * (-1.875 + w * 6.5625)));
    return series / (z * std::sqrt(std::numbers::pi));
}

/// log erfc(z) for z >= 0.
double log_erfc(double z) {
    if (z < 25.0) {
        return std::log(std::erfc(z));
    }
    return std::log(erfcx(z)) - z * z;
}

// Raw gaussian tail exponent -ln P(|g| >= x) and its derivatives.
double gauss_n(double x) { return -log_erfc(x / kSqrt2); }
double gauss_slope(double x) { return kSqrt2OverPi / erfcx(x / kSqrt2); }

/// N and N' together, sharing one erfc evaluation.
void gauss_n_slope(double x, double& n, double& slope) {
    const double z = x / kSqrt2;
    if (z < 25.0) {
        const double e = std::erfc(z);
        n = -std::log(e);
        slope = kSqrt2OverPi * std::exp(-z * z) / e;
        return;
    }
    const double ex = erfcx(z);
    n = z * z - std::log(ex);
    slope = kSqrt2OverPi / ex;
}

/// Pool-adjacent-violators on slopes weighted by segment width.
std::vector<double> isotonic_slopes(const std::vector<double>& slopes, const std::vector<double>& widths) {
    struct Pool {
        double value;
        double weight;
        std::size_t count;
    };
    std::vector<Pool> pools;
    for (std::size_t k = 0; k < slopes.size(); ++k) {
        pools.push_back({slopes[k], widths[k], 1});
        while (pools.size() > 1 && pools[pools.size() - 2].value > pools.back().value) {
            const Pool top = pools.back();
            pools.pop_back();
            Pool& prev = pools.back();
            const double w = prev.weight + top.weight;
            prev.value = (prev.value * prev.weight + top.value * top.weight) / w;
            prev.weight = w;
            prev.count += top.count;
        }
    }
    std::vector<double> out;
    for (const auto& p : pools) {
        out.insert(out.end(), p.count, std::max(0.0, p.value));
    }
    return out;
}

}  // namespace

TailFunction TailFunction::exponential() {
    TailFunction f;
    f.kind_ = TailKind::exponential;
    return f;
}

TailFunction TailFunction::power(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) {
        throw InvalidInput("power tail: exponent r must be a finite real >= 1");
    }
    TailFunction f;
    f.kind_ = TailKind::power;
    f.exponent_ = r;
    return f;
}

TailFunction TailFunction::gaussian() {
    TailFunction f;
    f.kind_ = TailKind::gaussian;
    return f;
}

TailFunction TailFunction::tabulated(std::vector<double> t, std::vector<double> n, std::string label) {
    if (t.size() != n.size() || t.empty()) {
        throw InvalidInput("tabulated tail: need matching, nonempty t and N columns");
    }
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!std::isfinite(t[k]) || !std::isfinite(n[k]) || t[k] < 0.0 || n[k] < 0.0) {
            throw InvalidInput("tabulated tail: entries must be finite and nonnegative");
        }
        if (k > 0 && !(t[k] > t[k - 1])) {
            throw InvalidInput("tabulated tail: t must be strictly increasing");
        }
    }
    if (t.front() == 0.0) {
        if (n.front() != 0.0) {
            throw InvalidInput("tabulated tail: N(0) must be 0");
        }
    } else {
        t.insert(t.begin(), 0.0);
        n.insert(n.begin(), 0.0);
    }
    if (t.size() < 2) {
        throw InvalidInput("tabulated tail: need at least one knot beyond t = 0");
    }
    std::vector<double> slopes, widths;
    for (std::size_t k = 0; k + 1 < t.size(); ++k) {
        widths.push_back(t[k + 1] - t[k]);
        slopes.push_back((n[k + 1] - n[k]) / widths.back());
    }
    slopes = isotonic_slopes(slopes, widths);
    std::vector<double> values{0.0};
    for (std::size_t k = 0; k < slopes.size(); ++k) {
        values.push_back(values.back() + slopes[k] * widths[k]);
    }

    TailFunction f;
    f.kind_ = TailKind::tabulated;
    f.label_ = std::move(label);
    f.knots_ = std::move(t);
    f.values_ = std::move(values);
    f.slopes_ = std::move(slopes);
    return f;
}

std::string TailFunction::spec() const {
    switch (kind_) {
        case TailKind::exponential:
            return "exp";
        case TailKind::power: {
            std::ostringstream os;
            os << "pow:r=" << exponent_;
            return os.str();
        }
        case TailKind::gaussian:
            return "gauss";
        case TailKind::tabulated:
            return "table:" + label_;
    }
    return "?";
}

double TailFunction::raw_n(double x) const {
    switch (kind_) {
        case TailKind::exponential:
            return x;
        case TailKind::power:
            return std::pow(x, exponent_);
        case TailKind::gaussian:
            return gauss_n(x);
        case TailKind::tabulated: {
            if (x > knots_.back()) {
                return kInf;
            }
            const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
            const auto k = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - knots_.begin() - 1, 0));
            if (k + 1 >= knots_.size()) {
                return values_.back();
            }
            return values_[k] + slopes_[k] * (x - knots_[k]);
        }
    }
    return kInf;
}

double TailFunction::raw_slope_right(double x) const {
    switch (kind_) {
        case TailKind::exponential:
            return 1.0;
        case TailKind::power:
            return exponent_ == 1.0 ? 1.0 : exponent_ * std::pow(x, exponent_ - 1.0);
        case TailKind::gaussian:
            return gauss_slope(x);
        case TailKind::tabulated: {
            if (x >= knots_.back()) {
                return kInf;
            }
            const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
            return slopes_[static_cast<std::size_t>(it - knots_.begin() - 1)];
        }
    }
    return kInf;
}

double TailFunction::raw_slope_left(double x) const {
    if (kind_ != TailKind::tabulated) {
        return x <= 0.0 ? 0.0 : raw_slope_right(x);
    }
    if (x <= 0.0) {
        return 0.0;
    }
    if (x > knots_.back()) {
        return kInf;
    }
    const auto it = std::lower_bound(knots_.begin(), knots_.end(), x);
    return slopes_[static_cast<std::size_t>(it - knots_.begin() - 1)];
}

double TailFunction::raw_inverse(double y) const {
    if (y <= 0.0) {
        return 0.0;
    }
    switch (kind_) {
        case TailKind::exponential:
            return y;
        case TailKind::power:
            return std::pow(y, 1.0 / exponent_);
        case TailKind::gaussian: {
            // N is convex increasing with N'(0) > 0, so Newton converges from any
            // start: one overshoot to the right, then monotone. Bisection guards
            // against rounding stalls. The start uses N(x) ~ x^2/2 + ln(x sqrt(pi/2)).
            double lo = 0.0;
            double hi = kInf;
            double x = y < 1.0 ? y * std::sqrt(std::numbers::pi / 2.0)
                               : std::sqrt(std::max(2.0 * y - std::log(std::numbers::pi * y), 1.0));
            for (int iter = 0; iter < 100; ++iter) {
                double nx = 0.0;
                double slope = 0.0;
                gauss_n_slope(x, nx, slope);
                const double f = nx - y;
                (f >= 0.0 ? hi : lo) = x;
                const double step = f / slope;
                if (std::abs(step) <= 1e-13 * std::max(1.0, x)) {
                    x -= step;
                    break;
                }
                double next = x - step;
                if (!(next > lo && next < hi)) {
                    next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x + 1.0;
                }
                x = next;
            }
            return x;
        }
        case TailKind::tabulated: {
            if (y > values_.back()) {
                return knots_.back();
            }
            const auto it = std::lower_bound(values_.begin() + 1, values_.end(), y);
            const auto k = static_cast<std::size_t>(it - values_.begin() - 1);
            return knots_[k] + (y - values_[k]) / slopes_[k];
        }
    }
    return kInf;
}

double TailFunction::raw_slope_inverse(double sigma) const {
    switch (kind_) {
        case TailKind::exponential:
            return sigma <= 1.0 ? 0.0 : kInf;
        case TailKind::power:
            if (exponent_ == 1.0) {
                return sigma <= 1.0 ? 0.0 : kInf;
            }
            return sigma <= 0.0 ? 0.0 : std::pow(sigma / exponent_, 1.0 / (exponent_ - 1.0));
        case TailKind::gaussian: {
            if (sigma <= gauss_slope(0.0)) {
                return 0.0;
            }
            // N' is increasing with N'' = N'(N' - x); Newton with a bisection guard.
            double lo = 0.0;
            double hi = kInf;
            // N'(x) ~ x + 1/x for large x.
            double x = sigma > 2.0 ? sigma - 1.0 / sigma : 0.5 * sigma;
            for (int iter = 0; iter < 100; ++iter) {
                const double s = gauss_slope(x);
                (s >= sigma ? hi : lo) = x;
                const double curvature = s * (s - x);
                if (curvature > 0.0 && std::abs(s - sigma) <= 1e-13 * curvature * std::max(1.0, x)) {
                    x -= (s - sigma) / curvature;
                    break;
                }
                double next = curvature > 0.0 ? x - (s - sigma) / curvature : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) {
                    next = std::isfinite(hi) ? 0.5 * (lo + hi) : 2.0 * x + 1.0;
                }
                x = next;
            }
            return x;
        }
        case TailKind::tabulated: {
            for (std::size_t k = 0; k < slopes_.size(); ++k) {
                if (slopes_[k] >= sigma) {
                    return knots_[k];
                }
            }
            return knots_.back();
        }
    }
    return kInf;
}

double TailFunction::n(double t) const { return raw_n(std::abs(t) / scale_); }

double TailFunction::slope_right(double t) const { return raw_slope_right(t / scale_) / scale_; }

double TailFunction::slope_left(double t) const { return raw_slope_left(t / scale_) / scale_; }

double TailFunction::n_inverse(double y) const { return scale_ * raw_inverse(y); }

bool TailFunction::saturates(double y) const {
    return kind_ == TailKind::tabulated && y > values_.back();
}

double TailFunction::slope_inverse(double sigma) const { return scale_ * raw_slope_inverse(sigma * scale_); }

double TailFunction::finite_limit() const {
    return kind_ == TailKind::tabulated ? scale_ * knots_.back() : kInf;
}

double TailFunction::n_hat(double t) const {
    const double a = std::abs(t);
    return a <= 1.0 ? a * a : n(a);
}

double TailFunction::n_hat_inverse(double y) const {
    if (y <= 0.0) {
        return 0.0;
    }
    if (y <= 1.0) {
        return std::sqrt(y);
    }
    return std::max(1.0, n_inverse(y));
}

double TailFunction::sample(Stream& stream) const {
    if (kind_ == TailKind::gaussian) {
        return scale_ * stream.gaussian();
    }
    const double e = stream.exponential();
    const double s = stream.sign();
    return s * n_inverse(e);
}

TailFunction normalize(const TailFunction& raw) {
    TailFunction f = raw;
    double threshold = 1.0;
    if (raw.kind_ == TailKind::gaussian || raw.kind_ == TailKind::tabulated) {
        if (raw.kind_ == TailKind::tabulated && raw.values_.back() < 1.0) {
            throw InvalidInput("tail function is unnormalizable: N stays below 1 on its finite range");
        }
        threshold = bisect_increasing([&](double x) { return raw.raw_n(x); }, 1.0, 1e-13);
    }
    f.scale_ = 1.0 / threshold;
    f.normalized_ = true;
    return f;
}

TailFunction parse_tail_spec(const std::string& spec) {
    if (spec == "exp") {
        return normalize(TailFunction::exponential());
    }
    if (spec == "gauss") {
        return normalize(TailFunction::gaussian());
    }
    if (spec.rfind("pow:r=", 0) == 0) {
        const std::string num = spec.substr(6);
        std::size_t used = 0;
        double r = 0.0;
        try {
            r = std::stod(num, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != num.size()) {
            throw InvalidInput("distribution '" + spec + "': cannot parse exponent r");
        }
        return normalize(TailFunction::power(r));
    }
    if (spec.rfind("table:", 0) == 0) {
        const std::string path = spec.substr(6);
        std::ifstream in(path);
        if (!in) {
            throw InvalidInput("distribution '" + spec + "': cannot open table file");
        }
        std::vector<double> t, n;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string::npos) {
                line.erase(hash);
            }
            std::istringstream is(line);
            double a, b;
            if (!(is >> a)) {
                continue;
            }
            if (!(is >> b)) {
                throw InvalidInput("distribution '" + spec + "': line " + std::to_string(line_no) +
                                   " needs two numbers");
            }
            t.push_back(a);
            n.push_back(b);
        }
        return normalize(TailFunction::tabulated(std::move(t), std::move(n), path));
    }
    throw InvalidInput("distribution '" + spec + "': expected exp, pow:r=<real>, gauss or table:<path>");
}

DistributionMatrix::DistributionMatrix(std::vector<std::vector<TailFunction>> rows) : rows_(std::move(rows)) {
    if (rows_.empty() || rows_.size() > static_cast<std::size_t>(kMaxOrder)) {
        throw InvalidInput("distribution matrix: need between 1 and 4 rows");
    }
    for (const auto& row : rows_) {
        if (row.empty()) {
            throw InvalidInput("distribution matrix: empty row");
        }
        for (const auto& f : row) {
            if (!f.normalized()) {
                throw InvalidInput("distribution matrix: tail functions must be normalized");
            }
        }
        uniform_.push_back(std::all_of(row.begin(), row.end(), [&](const TailFunction& f) { return f == row.front(); }));
    }
}

DistributionMatrix DistributionMatrix::iid(const TailFunction& f, std::span<const std::size_t> dims) {
    std::vector<std::vector<TailFunction>> rows;
    for (std::size_t n : dims) {
        rows.emplace_back(n, f);
    }
    return DistributionMatrix(std::move(rows));
}

DistributionMatrix DistributionMatrix::per_axis(const std::vector<TailFunction>& fs, std::span<const std::size_t> dims) {
    if (fs.size() != dims.size()) {
        throw InvalidInput("distribution matrix: need one tail function per axis");
    }
    std::vector<std::vector<TailFunction>> rows;
    for (std::size_t j = 0; j < dims.size(); ++j) {
        rows.emplace_back(dims[j], fs[j]);
    }
    return DistributionMatrix(std::move(rows));
}

bool DistributionMatrix::all_of_kind(TailKind kind) const {
    return std::all_of(rows_.begin(), rows_.end(), [&](const auto& row) {
        return std::all_of(row.begin(), row.end(), [&](const TailFunction& f) { return f.kind() == kind; });
    });
}

bool DistributionMatrix::rows_identical() const {
    return std::all_of(rows_.begin(), rows_.end(), [&](const auto& row) { return row == rows_.front(); });
}

void DistributionMatrix::check_matches(const CoefficientTensor& a) const {
    if (order() != a.order()) {
        throw InvalidInput("distribution matrix has " + std::to_string(order()) + " rows but the tensor has order " +
                           std::to_string(a.order()));
    }
    for (int j = 0; j < order(); ++j) {
        if (row(j).size() != a.dim(j)) {
            throw InvalidInput("distribution row " + std::to_string(j + 1) + " has length " +
                               std::to_string(row(j).size()) + " but tensor dim is " + std::to_string(a.dim(j)));
        }
    }
}

std::string DistributionMatrix::describe() const {
    std::vector<std::string> per_row;
    for (std::size_t j = 0; j < rows_.size(); ++j) {
        per_row.push_back(uniform_[j] ? rows_[j].front().spec() : std::string("mixed"));
    }
    if (std::all_of(per_row.begin(), per_row.end(), [&](const std::string& s) { return s == per_row.front(); })) {
        return per_row.front();
    }
    std::string out;
    for (std::size_t j = 0; j < per_row.size(); ++j) {
        out += (j ? "," : "") + per_row[j];
    }
    return out;
}

}  // namespace chaosbound
