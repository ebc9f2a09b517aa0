// SPDX-License-Identifier: MIT
#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

namespace chaosbound {

inline constexpr int kMaxOrder = 4;

/// A subset of tensor axes {0, ..., kMaxOrder-1}, stored as a bitmask.
/// Axes are 0-based internally; text forms use 1-based labels.
class AxisSet {
public:
    constexpr AxisSet() = default;
    constexpr explicit AxisSet(std::uint8_t mask) : mask_(mask) {}

    static AxisSet of(std::initializer_list<int> axes) {
        AxisSet s;
        for (int a : axes) {
            s.insert(a);
        }
        return s;
    }
    static constexpr AxisSet first_n(int n) { return AxisSet(static_cast<std::uint8_t>((1u << n) - 1u)); }

    [[nodiscard]] constexpr std::uint8_t mask() const { return mask_; }
    [[nodiscard]] constexpr bool empty() const { return mask_ == 0; }
    [[nodiscard]] constexpr int size() const { return std::popcount(mask_); }
    [[nodiscard]] constexpr bool contains(int axis) const { return (mask_ >> axis) & 1u; }
    [[nodiscard]] constexpr int min() const { return std::countr_zero(mask_); }

    constexpr void insert(int axis) { mask_ = static_cast<std::uint8_t>(mask_ | (1u << axis)); }

    [[nodiscard]] constexpr AxisSet operator|(AxisSet o) const { return AxisSet(static_cast<std::uint8_t>(mask_ | o.mask_)); }
    [[nodiscard]] constexpr AxisSet operator&(AxisSet o) const { return AxisSet(static_cast<std::uint8_t>(mask_ & o.mask_)); }
    [[nodiscard]] constexpr AxisSet minus(AxisSet o) const { return AxisSet(static_cast<std::uint8_t>(mask_ & ~o.mask_)); }
    [[nodiscard]] constexpr bool subset_of(AxisSet o) const { return (mask_ & ~o.mask_) == 0; }
    [[nodiscard]] constexpr bool disjoint(AxisSet o) const { return (mask_ & o.mask_) == 0; }

    /// Ascending list of member axes.
    [[nodiscard]] std::vector<int> axes() const {
        std::vector<int> out;
        for (int a = 0; a < 8; ++a) {
            if (contains(a)) {
                out.push_back(a);
            }
        }
        return out;
    }

    /// 1-based digits, e.g. {0,1} -> "12". Empty set -> "".
    [[nodiscard]] std::string label() const {
        std::string s;
        for (int a : axes()) {
            s.push_back(static_cast<char>('1' + a));
        }
        return s;
    }

    friend constexpr bool operator==(AxisSet, AxisSet) = default;
    friend constexpr auto operator<=>(AxisSet a, AxisSet b) { return a.mask_ <=> b.mask_; }

private:
    std::uint8_t mask_ = 0;
};

}  // namespace chaosbound
