// SPDX-License-Identifier: MIT
#include "chaosbound/errors.hpp"
#include "chaosbound/sampler.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace chaosbound;
using chaosbound::testing::exp_tail;
using chaosbound::testing::gauss_tail;
using chaosbound::testing::iid;
using chaosbound::testing::random_tensor;

namespace {

ChaosSpec decoupled(const CoefficientTensor& a, const TailFunction& f) {
    return ChaosSpec(a, iid(f, a), ChaosMode::decoupled);
}

}  // namespace

TEST(SampleChaos, OrderOneTailAtOne) {
    const CoefficientTensor a({1}, {1.0});
    const auto set = draw_samples(decoupled(a, exp_tail()), 400000, 8, 1);
    const auto tail = tail_from_samples(set, 1.0);
    const double se = std::sqrt(tail.probability * (1 - tail.probability) / 400000.0);
    EXPECT_NEAR(tail.probability, std::exp(-1.0), 4 * se);
}

TEST(SampleChaos, ProductOfTwoExponentialsSecondMoment) {
    const CoefficientTensor a({1, 1}, {1.0});
    const auto set = draw_samples(decoupled(a, exp_tail()), 400000, 8, 2);
    double sum = 0.0, sum2 = 0.0;
    for (const auto& shard : set.shards) {
        for (double v : shard) {
            sum += v * v;
            sum2 += v * v * v * v;
        }
    }
    const double n = 400000.0;
    const double mean = sum / n;
    // E S^4 = 24^2, so the standard error is about sqrt(576 - 16) / sqrt(n).
    EXPECT_NEAR(mean, 4.0, 4 * std::sqrt((sum2 / n - mean * mean) / n));
}

TEST(SampleChaos, ZeroTensorIsZero) {
    const auto a = CoefficientTensor::zeros({3, 3});
    Stream s(1, 1);
    EXPECT_EQ(sample_chaos(decoupled(a, exp_tail()), s), 0.0);
    const auto m = estimate_moment(decoupled(a, exp_tail()), 4.0, 10000, 8, 1);
    EXPECT_EQ(m.estimate, 0.0);
    EXPECT_EQ(estimate_tail(decoupled(a, exp_tail()), 0.5, 10000, 1).probability, 0.0);
}

TEST(EstimateMoment, ExponentialFourthMoment) {
    const CoefficientTensor a({1}, {1.0});
    const auto m = estimate_moment(decoupled(a, exp_tail()), 4.0, 1'000'000, 32, 3);
    EXPECT_NEAR(m.estimate, std::pow(24.0, 0.25), m.half_width);
    EXPECT_LE(m.half_width, 0.02 * m.estimate);
}

TEST(EstimateMoment, GaussianFourthMoment) {
    const CoefficientTensor a({1}, {1.0});
    const auto m = estimate_moment(decoupled(a, gauss_tail()), 4.0, 1'000'000, 32, 4);
    EXPECT_NEAR(m.estimate, gauss_tail().scale() * std::pow(3.0, 0.25), m.half_width);
}

TEST(EstimateMoment, ProductSecondMoment) {
    const CoefficientTensor a({1, 1}, {1.0});
    const auto m = estimate_moment(decoupled(a, exp_tail()), 2.0, 1'000'000, 32, 5);
    EXPECT_NEAR(m.estimate, 2.0, m.half_width);
}

TEST(EstimateMoment, RejectsBadArguments) {
    const CoefficientTensor a({1}, {1.0});
    EXPECT_THROW((void)estimate_moment(decoupled(a, exp_tail()), 0.5, 10000, 8, 1), InvalidInput);
    EXPECT_THROW((void)estimate_moment(decoupled(a, exp_tail()), 2.0, 9999, 8, 1), InvalidInput);
    EXPECT_THROW((void)estimate_moment(decoupled(a, exp_tail()), 2.0, 10000, 7, 1), InvalidInput);
}

TEST(EstimateMoment, OverflowIsUnstable) {
    const CoefficientTensor a({1}, {1e300});
    const auto set = draw_samples(decoupled(a, exp_tail()), 1000, 8, 1);
    try {
        (void)moment_from_samples(set, 16.0);
        FAIL() << "expected overflow";
    } catch (const EstimatorUnstable& e) {
        EXPECT_EQ(e.p(), 16.0);
    }
}

TEST(EstimateMoment, ReproducibleAndScaleEquivariant) {
    const auto a = random_tensor({4, 4}, 60);
    const auto m1 = estimate_moment(decoupled(a, exp_tail()), 4.0, 20000, 8, 11);
    const auto m2 = estimate_moment(decoupled(a, exp_tail()), 4.0, 20000, 8, 11);
    EXPECT_EQ(m1.estimate, m2.estimate);
    EXPECT_EQ(m1.half_width, m2.half_width);
    const auto m3 = estimate_moment(decoupled(a.scaled(-2.0), exp_tail()), 4.0, 20000, 8, 11);
    EXPECT_NEAR(m3.estimate, 2.0 * m1.estimate, 1e-12 * m1.estimate);
    const auto other = estimate_moment(decoupled(a, exp_tail()), 4.0, 20000, 8, 12);
    EXPECT_NE(m1.estimate, other.estimate);
}

TEST(EstimateMoment, MonotoneInPOnFixedSamples) {
    const auto a = random_tensor({3, 3, 3}, 61);
    const auto set = draw_samples(decoupled(a, exp_tail()), 40000, 16, 13);
    double prev = 0.0;
    for (double p = 1.0; p <= 16.0; p += 0.5) {
        const double v = moment_from_samples(set, p).estimate;
        EXPECT_GE(v, prev) << "p=" << p;
        prev = v;
    }
}

TEST(SampleChaos, SymmetricAroundZero) {
    const auto a = random_tensor({3, 3}, 62);
    const auto set = draw_samples(decoupled(a, gauss_tail()), 200000, 8, 14);
    double sum = 0.0, sq = 0.0;
    for (const auto& shard : set.shards) {
        for (double v : shard) {
            sum += v;
            sq += v * v;
        }
    }
    const double n = static_cast<double>(set.size());
    EXPECT_NEAR(sum / n, 0.0, 4 * std::sqrt(sq / n / n));
}

TEST(SampleChaos, ShardLayoutIsFixed) {
    // Shards are independent streams; the first shard of a larger run equals
    // the first shard of a run with the same per-shard count.
    const auto a = random_tensor({3}, 63);
    const auto big = draw_samples(decoupled(a, exp_tail()), 1600, 16, 15);
    const auto small = draw_samples(decoupled(a, exp_tail()), 200, 2, 15);
    EXPECT_EQ(big.shards[0], small.shards[0]);
    EXPECT_EQ(big.shards[1], small.shards[1]);
}

TEST(EstimateTail, ExponentialAtTwo) {
    const CoefficientTensor a({1}, {1.0});
    const auto t = estimate_tail(decoupled(a, exp_tail()), 2.0, 1'000'000, 16);
    EXPECT_LE(t.lower, std::exp(-2.0));
    EXPECT_GE(t.upper, std::exp(-2.0));
    EXPECT_EQ(estimate_tail(decoupled(a, exp_tail()), 0.0, 10000, 16).probability, 1.0);
}

TEST(ChaosSpec, UndecoupledNeedsTetrahedralTensor) {
    const CoefficientTensor bad({2, 2}, {1, 1, 1, 0});
    EXPECT_THROW(ChaosSpec(bad, iid(exp_tail(), bad), ChaosMode::undecoupled), InvalidInput);
    const CoefficientTensor good({2, 2}, {0, 1, 1, 0});
    const auto mixed = DistributionMatrix({{exp_tail(), exp_tail()}, {gauss_tail(), gauss_tail()}});
    EXPECT_THROW(ChaosSpec(good, mixed, ChaosMode::undecoupled), InvalidInput);
    EXPECT_NO_THROW(ChaosSpec(good, iid(exp_tail(), good), ChaosMode::undecoupled));
}

TEST(DecoupleCompare, HandOracleRatio) {
    const CoefficientTensor a({2, 2}, {0, 1, 1, 0});
    const auto r = decouple_compare(a, iid(exp_tail(), a), 2.0, 1'000'000, 21);
    EXPECT_NEAR(r.undecoupled.estimate, 4.0, r.undecoupled.half_width);
    EXPECT_NEAR(r.decoupled.estimate, std::sqrt(8.0), r.decoupled.half_width);
    EXPECT_NEAR(r.ratio, std::sqrt(2.0), r.ratio_half_width);
}

TEST(DecoupleCompare, ZeroTensorRatioIsOne) {
    const auto a = CoefficientTensor::zeros({3, 3});
    const auto r = decouple_compare(a, iid(exp_tail(), a), 2.0, 10000, 1);
    EXPECT_EQ(r.ratio, 1.0);
    EXPECT_EQ(r.undecoupled.estimate, 0.0);
}

TEST(DecoupleCompare, RandomOrderThreeWithinBracket) {
    const auto a = symmetrize_and_kill_diagonal(random_tensor({4, 4, 4}, 64));
    const auto r = decouple_compare(a, iid(exp_tail(), a), 4.0, 100000, 22);
    EXPECT_GE(r.ratio, 1.0 / 20);
    EXPECT_LE(r.ratio, 20.0);
}

TEST(Tetrahedral, ConstantPlusLinear) {
    const CoefficientTensor lin({4}, {1, 0, 0, 0});
    const std::vector<CoefficientTensor> parts{lin};
    const std::vector<TailFunction> row(4, exp_tail());
    const auto r = tetrahedral_eval_and_split(1.0, parts, row, 2.0, 1'000'000, 23);
    ASSERT_EQ(r.parts.size(), 2u);
    EXPECT_EQ(r.parts[0].estimate, 1.0);
    EXPECT_NEAR(r.parts[1].estimate, std::sqrt(2.0), r.parts[1].half_width);
    EXPECT_NEAR(r.whole.estimate, std::sqrt(3.0), r.whole.half_width);
}

TEST(Tetrahedral, SingleDegreeRatioIsOne) {
    const auto quad = symmetrize_and_kill_diagonal(random_tensor({4, 4}, 65));
    const std::vector<CoefficientTensor> parts{CoefficientTensor::zeros({4}), quad};
    const std::vector<TailFunction> row(4, exp_tail());
    const auto r = tetrahedral_eval_and_split(0.0, parts, row, 4.0, 20000, 24);
    EXPECT_EQ(r.ratio, 1.0);
}

TEST(Tetrahedral, RandomMixedDegreeInequality) {
    const auto lin = random_tensor({5}, 66);
    const auto quad = symmetrize_and_kill_diagonal(random_tensor({5, 5}, 67));
    const std::vector<CoefficientTensor> parts{lin, quad};
    const std::vector<TailFunction> row(5, exp_tail());
    const auto r = tetrahedral_eval_and_split(0.5, parts, row, 4.0, 200000, 25);
    EXPECT_LE(r.parts_sum, 10.0 * r.whole.estimate);
}

TEST(Tetrahedral, RejectsNonTetrahedralParts) {
    const std::vector<CoefficientTensor> parts{CoefficientTensor::zeros({3}), CoefficientTensor({3, 3}, {1, 0, 0, 0, 0, 0, 0, 0, 0})};
    const std::vector<TailFunction> row(3, exp_tail());
    EXPECT_THROW((void)tetrahedral_eval_and_split(0.0, parts, row, 2.0, 1000, 1, 8), InvalidInput);
    const std::vector<CoefficientTensor> wrong_order{CoefficientTensor::zeros({3, 3})};
    EXPECT_THROW((void)tetrahedral_eval_and_split(0.0, wrong_order, row, 2.0, 1000, 1, 8), InvalidInput);
}
