// SPDX-License-Identifier: MIT
//
// One symmetric generator described by its tail exponent N(t) = -ln P(|X| >= t),
// convex and nondecreasing with N(0) = 0. Normalization rescales the argument
// so that inf{t : N(t) >= 1} = 1; N-hat is t^2 on [0,1] and N beyond.
#pragma once

#include "chaosbound/coeff_tensor.hpp"
#include "chaosbound/rng.hpp"

#include <span>
#include <string>
#include <vector>

namespace chaosbound {

enum class TailKind { exponential, power, gaussian, tabulated };

class TailFunction {
public:
    /// Raw (unnormalized) constructors; pass through normalize() before use.
    static TailFunction exponential();
    static TailFunction power(double r);
    /// N(t) = -ln P(|g| >= t) for a standard normal g.
    static TailFunction gaussian();
    /// Piecewise linear through (t, N) pairs, slopes projected onto the
    /// nondecreasing nonnegative cone (weighted by segment width). N is +inf
    /// past the last knot. A (0, 0) knot is prepended when missing.
    static TailFunction tabulated(std::vector<double> t, std::vector<double> n, std::string label = "table");

    [[nodiscard]] TailKind kind() const { return kind_; }
    [[nodiscard]] double exponent() const { return exponent_; }
    /// Argument scale s in N(t) = N_raw(t / s).
    [[nodiscard]] double scale() const { return scale_; }
    [[nodiscard]] bool normalized() const { return normalized_; }
    /// CLI spec string: exp, pow:r=<r>, gauss, table:<label>.
    [[nodiscard]] std::string spec() const;

    [[nodiscard]] double n(double t) const;
    [[nodiscard]] double slope_right(double t) const;
    [[nodiscard]] double slope_left(double t) const;
    /// Smallest t >= 0 with N(t) >= y. Past the finite range of a tabulated N
    /// this returns the right endpoint; saturates(y) reports that case.
    [[nodiscard]] double n_inverse(double y) const;
    [[nodiscard]] bool saturates(double y) const;
    /// Smallest t >= 0 with N'_+(t) >= sigma, or +inf when the slope never gets there.
    [[nodiscard]] double slope_inverse(double sigma) const;
    /// Right end of the set where N is finite (+inf for analytic kinds).
    [[nodiscard]] double finite_limit() const;

    [[nodiscard]] double n_hat(double t) const;
    [[nodiscard]] double n_hat_inverse(double y) const;

    /// sign * N^{-1}(E) with E unit exponential; scale * g for the Gaussian kind.
    [[nodiscard]] double sample(Stream& stream) const;

    friend bool operator==(const TailFunction&, const TailFunction&) = default;

private:
    friend TailFunction normalize(const TailFunction& raw);

    [[nodiscard]] double raw_n(double x) const;
    [[nodiscard]] double raw_slope_right(double x) const;
    [[nodiscard]] double raw_slope_left(double x) const;
    [[nodiscard]] double raw_inverse(double y) const;
    [[nodiscard]] double raw_slope_inverse(double sigma) const;

    TailKind kind_ = TailKind::exponential;
    double exponent_ = 1.0;
    double scale_ = 1.0;
    bool normalized_ = false;
    std::string label_;
    std::vector<double> knots_;
    std::vector<double> values_;
    std::vector<double> slopes_;
};

/// Rescales the argument so that inf{t : N(t) >= 1} = 1, found by bisection to
/// 1e-12 (exact for exponential and power kinds). Throws InvalidInput when N
/// never reaches 1.
[[nodiscard]] TailFunction normalize(const TailFunction& raw);

/// Smallest x >= 0 with f(x) >= target for nondecreasing f, by bracket doubling
/// then bisection to `tol`. Returns `cap` if f stays below target up to `cap`.
template <class F>
[[nodiscard]] double bisect_increasing(F&& f, double target, double tol = 1e-12, double cap = 1e300) {
    if (f(0.0) >= target) {
        return 0.0;
    }
    double lo = 0.0;
    double hi = 1.0;
    while (f(hi) < target) {
        lo = hi;
        hi *= 2.0;
        if (hi >= cap) {
            return cap;
        }
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        (f(mid) >= target ? hi : lo) = mid;
    }
    return hi;
}

/// Parses exp | pow:r=<real> | gauss | table:<path> and returns the normalized
/// tail function. Table files hold whitespace-separated "t N" lines; '#' starts
/// a comment.
[[nodiscard]] TailFunction parse_tail_spec(const std::string& spec);

/// Grid of tail functions, one per generator X_i^j: row j (axis) has one entry
/// per index i along that axis.
class DistributionMatrix {
public:
    explicit DistributionMatrix(std::vector<std::vector<TailFunction>> rows);

    static DistributionMatrix iid(const TailFunction& f, std::span<const std::size_t> dims);
    /// One tail function per axis, shared along the axis.
    static DistributionMatrix per_axis(const std::vector<TailFunction>& fs, std::span<const std::size_t> dims);

    [[nodiscard]] int order() const { return static_cast<int>(rows_.size()); }
    [[nodiscard]] std::span<const TailFunction> row(int axis) const { return rows_[static_cast<std::size_t>(axis)]; }
    [[nodiscard]] const TailFunction& at(int axis, std::size_t i) const {
        return rows_[static_cast<std::size_t>(axis)][i];
    }
    [[nodiscard]] bool row_uniform(int axis) const { return uniform_[static_cast<std::size_t>(axis)]; }
    [[nodiscard]] bool all_of_kind(TailKind kind) const;
    [[nodiscard]] bool rows_identical() const;

    /// Throws InvalidInput unless one row per axis with matching lengths.
    void check_matches(const CoefficientTensor& a) const;

    /// "exp" when every generator shares one spec, else per-axis specs joined by ','.
    [[nodiscard]] std::string describe() const;

private:
    std::vector<std::vector<TailFunction>> rows_;
    std::vector<bool> uniform_;
};

}  // namespace chaosbound
