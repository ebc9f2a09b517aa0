// SPDX-License-Identifier: MIT
#pragma once

#include "chaosbound/axis_set.hpp"

#include <string>
#include <vector>

namespace chaosbound {

/// A set partition of a ground set of axes. Blocks are nonempty, pairwise
/// disjoint, cover the ground set and are kept sorted by their smallest
/// element, so structural equality is partition equality.
class Partition {
public:
    Partition() = default;

    /// Throws InvalidInput if the blocks are empty, overlap, or do not cover `ground`.
    Partition(AxisSet ground, std::vector<AxisSet> blocks);

    /// Partition of {0..d-1}; shorthand for the common case.
    static Partition of_first(int d, std::vector<AxisSet> blocks) {
        return Partition(AxisSet::first_n(d), std::move(blocks));
    }
    static Partition singletons(AxisSet ground);
    static Partition single_block(AxisSet ground);

    [[nodiscard]] AxisSet ground() const { return ground_; }
    [[nodiscard]] const std::vector<AxisSet>& blocks() const { return blocks_; }
    [[nodiscard]] int block_count() const { return static_cast<int>(blocks_.size()); }

    /// Relabels the ground set onto {0..|ground|-1} preserving order.
    [[nodiscard]] Partition compacted() const;

    /// `12|3` for {{1,2},{3}}; the empty partition prints as `-`.
    [[nodiscard]] std::string text() const;

    friend bool operator==(const Partition&, const Partition&) = default;

private:
    AxisSet ground_;
    std::vector<AxisSet> blocks_;
};

/// Parses `12|3` over the ground set {1..d}. Throws InvalidInput.
[[nodiscard]] Partition parse_partition(const std::string& text, int d);

/// All partitions of {0..d-1} for 1 <= d <= 4, Bell(d) of them, in a fixed order.
[[nodiscard]] std::vector<Partition> enumerate_partitions(int d);

[[nodiscard]] int bell_number(int d);

/// Subsets I of the ground set such that each block of J meets I^c in at most
/// one element.
[[nodiscard]] std::vector<AxisSet> q_family(const Partition& j);

/// The partition of I obtained by intersecting every block of J with I and
/// dropping empties. Throws InvalidInput when I is not in q_family(J).
[[nodiscard]] Partition induced_partition(const Partition& j, AxisSet subset);

}  // namespace chaosbound
