// SPDX-License-Identifier: MIT
#include "chaosbound/errors.hpp"
#include "chaosbound/norm_engine.hpp"
#include "chaosbound/oracle.hpp"
#include "chaosbound/waterfill.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chaosbound;
using chaosbound::testing::exp_tail;
using chaosbound::testing::gauss_tail;
using chaosbound::testing::iid;
using chaosbound::testing::random_tensor;

namespace {

double sum_sq(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) {
        s += x * x;
    }
    return s;
}

}  // namespace

TEST(PartitionNorm, OrderOneIsWaterfill) {
    const auto a = random_tensor({7}, 1);
    std::vector<double> c(a.values().begin(), a.values().end());
    for (double& x : c) {
        x = std::abs(x);
    }
    const auto dists = iid(exp_tail(), a);
    const auto j = parse_partition("1", 1);
    for (double p : {2.0, 5.0, 9.0}) {
        EXPECT_NEAR(partition_norm(a, j, p, dists).value, waterfill_sup(c, dists.row(0), p).value.value, 1e-12);
    }
}

TEST(PartitionNorm, UnitVectorOrderOne) {
    const CoefficientTensor a({5}, {1, 0, 0, 0, 0});
    EXPECT_NEAR(partition_norm(a, parse_partition("1", 1), 9.0, iid(exp_tail(), a)).value, 9.0, 1e-12);
}

TEST(PartitionNorm, ZeroTensor) {
    const auto a = CoefficientTensor::zeros({3, 3, 3});
    for (const auto& j : enumerate_partitions(3)) {
        EXPECT_EQ(partition_norm(a, j, 4.0, iid(exp_tail(), a)).value, 0.0);
    }
}

TEST(PartitionNorm, RejectsBadInput) {
    const auto a = random_tensor({3, 3}, 2);
    EXPECT_THROW((void)partition_norm(a, parse_partition("1|2", 2), 1.0, iid(exp_tail(), a)), InvalidInput);
    EXPECT_THROW((void)partition_norm(a, parse_partition("1|2|3", 3), 2.0, iid(exp_tail(), a)), InvalidInput);
    const auto wrong = CoefficientTensor::zeros({3, 4});
    EXPECT_THROW((void)partition_norm(a, parse_partition("12", 2), 2.0, iid(exp_tail(), wrong)), InvalidInput);
}

TEST(PartitionNorm, Homogeneous) {
    const auto a = random_tensor({3, 4, 2}, 3);
    const auto dists = iid(exp_tail(), a);
    for (const auto& j : enumerate_partitions(3)) {
        const double base = partition_norm(a, j, 4.0, dists).value;
        for (double lambda : {-2.5, 0.3, 7.0}) {
            const double scaled = partition_norm(a.scaled(lambda), j, 4.0, dists).value;
            EXPECT_NEAR(scaled, std::abs(lambda) * base, 1e-10 * std::abs(lambda) * base) << j.text();
        }
    }
}

TEST(PartitionNorm, MonotoneInP) {
    const auto a = random_tensor({4, 4}, 4);
    for (const TailFunction* f : {&exp_tail(), &gauss_tail()}) {
        const auto dists = iid(*f, a);
        for (const auto& j : enumerate_partitions(2)) {
            double prev = 0.0;
            for (double p : {2.0, 3.0, 4.0, 8.0, 16.0}) {
                const double v = partition_norm(a, j, p, dists).value;
                EXPECT_GE(v, prev * (1 - 1e-9)) << j.text() << " p=" << p;
                prev = v;
            }
        }
    }
}

TEST(PartitionNorm, ScalingInP) {
    const auto a = random_tensor({3, 3, 3}, 5);
    const auto dists = iid(exp_tail(), a);
    for (const auto& j : enumerate_partitions(3)) {
        const double base = partition_norm(a, j, 2.0, dists).value;
        for (double t : {2.0, 4.0}) {
            const double v = partition_norm(a, j, t * 2.0, dists).value;
            EXPECT_LE(v, std::pow(t, j.block_count()) * base * (1 + 1e-8)) << j.text();
        }
    }
}

TEST(PartitionNorm, SingleBlockExact) {
    const auto a = random_tensor({2, 2, 2}, 6);
    const auto v = partition_norm(a, parse_partition("123", 3), 4.0, iid(exp_tail(), a));
    EXPECT_EQ(v.status, NormStatus::exact);
    EXPECT_LE(v.diagnostics.duality_gap, 1e-8);
}

TEST(PartitionNorm, MultiBlockIsLocalSearch) {
    const auto a = random_tensor({3, 3}, 7);
    const auto v = partition_norm(a, parse_partition("1|2", 2), 4.0, iid(exp_tail(), a));
    EXPECT_EQ(v.status, NormStatus::local_search_lower_bound);
    EXPECT_EQ(v.diagnostics.restarts, NormOptions{}.restarts + 1);
}

TEST(PartitionNorm, MaximizerIsFeasibleAndAttainsValue) {
    const auto a = random_tensor({3, 2, 3}, 8);
    const auto dists = iid(gauss_tail(), a);
    for (const auto& j : enumerate_partitions(3)) {
        for (const auto& choice : designated_choices(j)) {
            const auto sup = choice_sup(a, j, choice, 4.0, dists);
            ASSERT_EQ(sup.maximizer.size(), static_cast<std::size_t>(j.block_count()));
            for (std::size_t l = 0; l < sup.maximizer.size(); ++l) {
                EXPECT_LE(block_constraint(a, sup.maximizer[l], choice[l], dists.row(choice[l])), 4.0 * (1 + 1e-9));
            }
            const double form = std::get<double>(contract(a, sup.maximizer));
            EXPECT_NEAR(form, sup.value.value, 1e-9 * std::max(1.0, sup.value.value)) << j.text();
        }
    }
}

TEST(DesignatedChoices, CountsAreProductsOfBlockSizes) {
    EXPECT_EQ(designated_choices(parse_partition("123", 3)).size(), 3u);
    EXPECT_EQ(designated_choices(parse_partition("12|3", 3)).size(), 2u);
    EXPECT_EQ(designated_choices(parse_partition("12|34", 4)).size(), 4u);
    EXPECT_EQ(designated_choices(parse_partition("1|2|3|4", 4)).size(), 1u);
}

TEST(ChoiceSup, SingleBlockMatchesOracle) {
    for (std::uint64_t seed = 10; seed < 13; ++seed) {
        const auto a = random_tensor({2, 2, 2}, seed);
        const auto dists = iid(exp_tail(), a);
        const auto j = parse_partition("123", 3);
        for (const auto& choice : designated_choices(j)) {
            const double solver = choice_sup(a, j, choice, 4.0, dists).value.value;
            OracleOptions o;
            o.random_points = 20000;
            const double oracle = brute_force_sup(a, j, choice, 4.0, dists, o).value;
            EXPECT_NEAR(solver, oracle, 1e-2 * std::max(1.0, solver));
            EXPECT_GE(solver, oracle - 1e-9);
        }
    }
}

TEST(ChoiceSup, TwoBlocksMatchOracle) {
    const auto a = random_tensor({2, 3}, 14);
    const auto dists = iid(gauss_tail(), a);
    const auto j = parse_partition("1|2", 2);
    const std::vector<int> choice{0, 1};
    const double solver = choice_sup(a, j, choice, 4.0, dists).value.value;
    OracleOptions o;
    o.random_points = 20000;
    const double oracle = brute_force_sup(a, j, choice, 4.0, dists, o).value;
    EXPECT_NEAR(solver, oracle, 1e-2 * std::max(1.0, solver));
}

TEST(InjectiveNorm, DiagonalMatrix) {
    const CoefficientTensor a({2, 2}, {3, 0, 0, 1});
    const auto v = injective_norm(a, parse_partition("1|2", 2));
    EXPECT_NEAR(v.value, 3.0, 1e-12);
    EXPECT_EQ(v.status, NormStatus::exact);
}

TEST(InjectiveNorm, SingleBlockIsFrobenius) {
    const auto a = random_tensor({3, 2, 2}, 15);
    EXPECT_NEAR(injective_norm(a, parse_partition("123", 3)).value, a.frobenius_norm(), 1e-12);
}

TEST(InjectiveNorm, RankOne) {
    const auto u = random_tensor({3}, 16), v = random_tensor({4}, 17), w = random_tensor({2}, 18);
    std::vector<double> vals;
    for (double x : u.values()) {
        for (double y : v.values()) {
            for (double z : w.values()) {
                vals.push_back(x * y * z);
            }
        }
    }
    const CoefficientTensor a({3, 4, 2}, vals);
    const double expect = std::sqrt(sum_sq(u.values()) * sum_sq(v.values()) * sum_sq(w.values()));
    EXPECT_NEAR(injective_norm(a, parse_partition("1|2|3", 3)).value, expect, 1e-9 * expect);
    EXPECT_NEAR(injective_norm(a, parse_partition("12|3", 3)).value, expect, 1e-9 * expect);
}

TEST(InjectiveNorm, MatchesSphereGrid) {
    // Angles on the three unit circles at resolution 0.05 radians, refined by
    // a finer local grid around the best point.
    const auto a = random_tensor({2, 2, 2}, 19);
    auto form = [&](double t1, double t2, double t3) {
        const std::vector<BlockVector> b{{AxisSet::of({0}), {std::cos(t1), std::sin(t1)}},
                                         {AxisSet::of({1}), {std::cos(t2), std::sin(t2)}},
                                         {AxisSet::of({2}), {std::cos(t3), std::sin(t3)}}};
        return std::get<double>(contract(a, b));
    };
    double best = 0.0;
    const double pi = std::acos(-1.0);
    for (double t1 = 0; t1 < 2 * pi; t1 += 0.05) {
        for (double t2 = 0; t2 < pi; t2 += 0.05) {
            for (double t3 = 0; t3 < pi; t3 += 0.05) {
                best = std::max(best, std::abs(form(t1, t2, t3)));
            }
        }
    }
    const double solver = injective_norm(a, parse_partition("1|2|3", 3)).value;
    EXPECT_NEAR(solver, best, 2e-2);
    EXPECT_GE(solver, best - 1e-9);
}

TEST(ClosedForm, OrderOneIdentity) {
    for (std::uint64_t seed = 20; seed < 25; ++seed) {
        const auto a = random_tensor({9}, seed);
        for (double p : {2.0, 4.0, 8.0, 13.0}) {
            const double expect = std::sqrt(p) * a.frobenius_norm() + p * a.max_abs();
            EXPECT_NEAR(exponential_closed_form(a, parse_partition("1", 1), p).value, expect, 1e-12 * expect);
        }
    }
}

TEST(ClosedForm, SingleUnitEntry) {
    const CoefficientTensor a({4}, {1, 0, 0, 0});
    EXPECT_NEAR(exponential_closed_form(a, parse_partition("1", 1), 9.0).value, 12.0, 1e-12);
}

TEST(ClosedForm, ZeroTensor) {
    const auto a = CoefficientTensor::zeros({3, 3});
    for (const auto& j : enumerate_partitions(2)) {
        EXPECT_EQ(exponential_closed_form(a, j, 4.0).value, 0.0);
    }
}

TEST(ClosedForm, OrderTwoSingletonsByHand) {
    // Q = {12, 1, 2, {}}: p * ||A||_op + p^{3/2} (max row + max column norm) + p^2 max|a|.
    const auto a = random_tensor({4, 4}, 26);
    const double p = 4.0;
    const double op = injective_norm(a, parse_partition("1|2", 2)).value;
    const auto rows = slice_norms(a, AxisSet::of({1}));
    const auto cols = slice_norms(a, AxisSet::of({0}));
    const double expect = p * op + std::pow(p, 1.5) * (*std::max_element(rows.begin(), rows.end()) +
                                                       *std::max_element(cols.begin(), cols.end())) +
                          p * p * a.max_abs();
    EXPECT_NEAR(exponential_closed_form(a, parse_partition("1|2", 2), p).value, expect, 1e-9 * expect);
}

TEST(ClosedForm, ComparableToPartitionNorm) {
    const auto a = random_tensor({4, 4}, 27);
    const auto j = parse_partition("1|2", 2);
    const double closed = exponential_closed_form(a, j, 4.0).value;
    const double norm = partition_norm(a, j, 4.0, iid(exp_tail(), a)).value;
    EXPECT_GE(closed / norm, 1.0 / 32);
    EXPECT_LE(closed / norm, 32.0);
}

TEST(BoundTotal, OrderOneSingleTerm) {
    const auto a = random_tensor({6}, 28);
    const auto dists = iid(exp_tail(), a);
    const auto total = bound_total(a, 4.0, dists);
    ASSERT_EQ(total.terms.size(), 1u);
    EXPECT_EQ(total.total, partition_norm(a, parse_partition("1", 1), 4.0, dists).value);
}

TEST(BoundTotal, CoversEveryPartition) {
    const auto a = random_tensor({3, 3, 3}, 29);
    const auto total = bound_total(a, 2.0, iid(gauss_tail(), a));
    ASSERT_EQ(total.terms.size(), 5u);
    double sum = 0.0;
    for (const auto& t : total.terms) {
        sum += t.norm.value;
    }
    EXPECT_NEAR(total.total, sum, 1e-12 * sum);
    EXPECT_EQ(total.regime, Regime::general_d_le_3);
    EXPECT_EQ(total.status, NormStatus::local_search_lower_bound);
}

TEST(BoundTotal, IdentityAgainstClosedForms) {
    std::vector<double> v(64, 0.0);
    for (int i = 0; i < 8; ++i) {
        v[static_cast<std::size_t>(i * 9)] = 1.0;
    }
    const CoefficientTensor a({8, 8}, v);
    const auto total = bound_total(a, 4.0, iid(exp_tail(), a));
    double closed = 0.0;
    for (const auto& j : enumerate_partitions(2)) {
        closed += exponential_closed_form(a, j, 4.0).value;
    }
    EXPECT_GE(total.total / closed, 1.0 / 32);
    EXPECT_LE(total.total / closed, 32.0);
}

TEST(Regime, Classification) {
    const auto a4 = CoefficientTensor::zeros({2, 2, 2, 2});
    EXPECT_EQ(classify_regime(3, iid(gauss_tail(), CoefficientTensor::zeros({2, 2, 2}))), Regime::general_d_le_3);
    EXPECT_EQ(classify_regime(4, iid(exp_tail(), a4)), Regime::exponential_any_d);
    EXPECT_EQ(classify_regime(4, iid(gauss_tail(), a4)), Regime::heuristic);
    EXPECT_EQ(to_string(Regime::general_d_le_3), "general-d<=3");
    EXPECT_EQ(to_string(Regime::exponential_any_d), "exponential-any-d");
    EXPECT_EQ(to_string(Regime::heuristic), "heuristic");
}

TEST(NormEngine, DeterministicForFixedSeed) {
    const auto a = random_tensor({3, 3, 3}, 30);
    const auto dists = iid(exp_tail(), a);
    const auto j = parse_partition("1|2|3", 3);
    EXPECT_EQ(partition_norm(a, j, 4.0, dists).value, partition_norm(a, j, 4.0, dists).value);
}
