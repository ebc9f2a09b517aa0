// SPDX-License-Identifier: MIT
#include "chaosbound/partition.hpp"

#include "chaosbound/errors.hpp"

#include <algorithm>

namespace chaosbound {

Partition::Partition(AxisSet ground, std::vector<AxisSet> blocks) : ground_(ground), blocks_(std::move(blocks)) {
    AxisSet covered;
    for (AxisSet b : blocks_) {
        if (b.empty()) {
            throw InvalidInput("partition: empty block");
        }
        if (!b.disjoint(covered)) {
            throw InvalidInput("partition: blocks overlap");
        }
        covered = covered | b;
    }
    if (covered != ground_) {
        throw InvalidInput("partition: blocks do not cover the ground set");
    }
    std::sort(blocks_.begin(), blocks_.end(), [](AxisSet a, AxisSet b) { return a.min() < b.min(); });
}

Partition Partition::singletons(AxisSet ground) {
    std::vector<AxisSet> blocks;
    for (int a : ground.axes()) {
        blocks.push_back(AxisSet::of({a}));
    }
    return Partition(ground, std::move(blocks));
}

Partition Partition::single_block(AxisSet ground) {
    if (ground.empty()) {
        return Partition();
    }
    return Partition(ground, {ground});
}

Partition Partition::compacted() const {
    const auto members = ground_.axes();
    auto relabel = [&](AxisSet s) {
        AxisSet out;
        for (int a : s.axes()) {
            out.insert(static_cast<int>(std::find(members.begin(), members.end(), a) - members.begin()));
        }
        return out;
    };
    std::vector<AxisSet> blocks;
    for (AxisSet b : blocks_) {
        blocks.push_back(relabel(b));
    }
    return Partition(AxisSet::first_n(static_cast<int>(members.size())), std::move(blocks));
}

std::string Partition::text() const {
    if (blocks_.empty()) {
        return "-";
    }
    std::string out;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
        if (k > 0) {
            out.push_back('|');
        }
        out += blocks_[k].label();
    }
    return out;
}

Partition parse_partition(const std::string& text, int d) {
    if (d < 1 || d > kMaxOrder) {
        throw InvalidInput("partition: order must be between 1 and 4");
    }
    std::vector<AxisSet> blocks;
    AxisSet current;
    for (char ch : text) {
        if (ch == '|') {
            blocks.push_back(current);
            current = AxisSet{};
        } else if (ch >= '1' && ch <= '0' + d) {
            const int axis = ch - '1';
            if (current.contains(axis)) {
                throw InvalidInput("partition '" + text + "': repeated label");
            }
            current.insert(axis);
        } else if (ch != ' ') {
            throw InvalidInput("partition '" + text + "': unexpected character '" + std::string(1, ch) + "'");
        }
    }
    blocks.push_back(current);
    try {
        return Partition::of_first(d, std::move(blocks));
    } catch (const InvalidInput& e) {
        throw InvalidInput("partition '" + text + "': " + e.what());
    }
}

int bell_number(int d) {
    // Bell triangle.
    std::vector<int> row{1};
    for (int k = 1; k <= d; ++k) {
        std::vector<int> next{row.back()};
        for (int v : row) {
            next.push_back(next.back() + v);
        }
        row = std::move(next);
    }
    return row.front();
}

std::vector<Partition> enumerate_partitions(int d) {
    if (d < 1 || d > kMaxOrder) {
        throw InvalidInput("enumerate_partitions: d must be between 1 and 4, got " + std::to_string(d));
    }
    // Restricted growth strings: label[0] = 0, label[k] <= 1 + max(label[0..k-1]).
    std::vector<Partition> out;
    std::vector<int> label(static_cast<std::size_t>(d), 0);
    auto emit = [&] {
        const int blocks = *std::max_element(label.begin(), label.end()) + 1;
        std::vector<AxisSet> sets(static_cast<std::size_t>(blocks));
        for (int axis = 0; axis < d; ++axis) {
            sets[static_cast<std::size_t>(label[static_cast<std::size_t>(axis)])].insert(axis);
        }
        out.emplace_back(AxisSet::first_n(d), std::move(sets));
    };
    auto recurse = [&](auto&& self, int pos, int max_label) -> void {
        if (pos == d) {
            emit();
            return;
        }
        for (int l = 0; l <= max_label + 1; ++l) {
            label[static_cast<std::size_t>(pos)] = l;
            self(self, pos + 1, std::max(max_label, l));
        }
    };
    recurse(recurse, 1, 0);
    return out;
}

std::vector<AxisSet> q_family(const Partition& j) {
    const AxisSet ground = j.ground();
    std::vector<AxisSet> out;
    // Larger subsets first: I = ground comes out first.
    for (int mask = (1 << kMaxOrder) - 1; mask >= 0; --mask) {
        const AxisSet subset(static_cast<std::uint8_t>(mask));
        if (!subset.subset_of(ground)) {
            continue;
        }
        const AxisSet complement = ground.minus(subset);
        const bool ok = std::all_of(j.blocks().begin(), j.blocks().end(),
                                    [&](AxisSet b) { return (b & complement).size() <= 1; });
        if (ok) {
            out.push_back(subset);
        }
    }
    return out;
}

Partition induced_partition(const Partition& j, AxisSet subset) {
    const auto family = q_family(j);
    if (std::find(family.begin(), family.end(), subset) == family.end()) {
        throw InvalidInput("induced_partition: {" + subset.label() + "} is not in Q(" + j.text() + ")");
    }
    std::vector<AxisSet> blocks;
    for (AxisSet b : j.blocks()) {
        const AxisSet kept = b & subset;
        if (!kept.empty()) {
            blocks.push_back(kept);
        }
    }
    return Partition(subset, std::move(blocks));
}

}  // namespace chaosbound
