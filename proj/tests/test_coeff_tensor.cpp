// SPDX-License-Identifier: MIT
#include "chaosbound/coeff_tensor.hpp"
#include "chaosbound/errors.hpp"
#include "chaosbound/rng.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

using namespace chaosbound;

namespace {

CoefficientTensor random_tensor(std::vector<std::size_t> dims, std::uint64_t seed) {
    Stream s(seed, 0);
    std::size_t size = std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
    std::vector<double> v(size);
    for (double& e : v) {
        e = s.gaussian();
    }
    return CoefficientTensor(std::move(dims), std::move(v));
}

std::vector<double> random_vector(std::size_t n, Stream& s) {
    std::vector<double> v(n);
    for (double& e : v) {
        e = s.gaussian();
    }
    return v;
}

}  // namespace

TEST(CoefficientTensor, RejectsBadShapes) {
    EXPECT_THROW(CoefficientTensor({}, {}), InvalidInput);
    EXPECT_THROW(CoefficientTensor({2, 0}, {}), InvalidInput);
    EXPECT_THROW(CoefficientTensor({2, 2}, {1, 2, 3}), InvalidInput);
    EXPECT_THROW(CoefficientTensor({2, 2, 2, 2, 2}, std::vector<double>(32)), InvalidInput);
    EXPECT_THROW(CoefficientTensor({1}, {std::nan("")}), InvalidInput);
    EXPECT_THROW(CoefficientTensor({1}, {INFINITY}), InvalidInput);
}

TEST(Contract, IdentityAgainstUnitVector) {
    const CoefficientTensor id({2, 2}, {1, 0, 0, 1});
    const std::vector<BlockVector> blocks{{AxisSet::of({1}), {1, 0}}};
    const auto r = std::get<CoefficientTensor>(contract(id, blocks));
    EXPECT_EQ(r.dims(), std::vector<std::size_t>{2});
    EXPECT_EQ(r.values()[0], 1.0);
    EXPECT_EQ(r.values()[1], 0.0);
}

TEST(Contract, ZeroTensorGivesZero) {
    const auto z = CoefficientTensor::zeros({3, 2});
    const std::vector<BlockVector> blocks{{AxisSet::of({0}), {1, 2, 3}}, {AxisSet::of({1}), {4, 5}}};
    EXPECT_EQ(std::get<double>(contract(z, blocks)), 0.0);
}

TEST(Contract, TripleSumMatchesNestedLoops) {
    const auto a = random_tensor({2, 2, 2}, 11);
    Stream s(12, 0);
    const auto x = random_vector(2, s), y = random_vector(2, s), z = random_vector(2, s);
    double expect = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            for (std::size_t k = 0; k < 2; ++k) {
                const std::array<std::size_t, 3> idx{i, j, k};
                expect += a.at(idx) * x[i] * y[j] * z[k];
            }
        }
    }
    const std::vector<BlockVector> blocks{{AxisSet::of({0}), x}, {AxisSet::of({1}), y}, {AxisSet::of({2}), z}};
    EXPECT_NEAR(std::get<double>(contract(a, blocks)), expect, 1e-14);

    std::vector<double> scratch;
    const std::vector<std::span<const double>> views{x, y, z};
    EXPECT_NEAR(contract_vectors(a, views, scratch), expect, 1e-14);
}

TEST(Contract, MultiAxisBlockAgainstLoops) {
    const auto a = random_tensor({2, 3, 2}, 21);
    Stream s(22, 0);
    const auto w = random_vector(4, s);  // over axes {0, 2}, row-major
    const std::vector<BlockVector> blocks{{AxisSet::of({0, 2}), w}};
    const auto r = std::get<CoefficientTensor>(contract(a, blocks));
    for (std::size_t j = 0; j < 3; ++j) {
        double expect = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t k = 0; k < 2; ++k) {
                const std::array<std::size_t, 3> idx{i, j, k};
                expect += a.at(idx) * w[i * 2 + k];
            }
        }
        EXPECT_NEAR(r.values()[j], expect, 1e-14);
    }
}

TEST(Contract, RejectsOverlapAndShapeMismatch) {
    const auto a = random_tensor({2, 3}, 1);
    const std::vector<BlockVector> overlap{{AxisSet::of({0}), {1, 1}}, {AxisSet::of({0, 1}), std::vector<double>(6)}};
    EXPECT_THROW((void)contract(a, overlap), InvalidInput);
    const std::vector<BlockVector> wrong{{AxisSet::of({1}), {1, 1}}};
    EXPECT_THROW((void)contract(a, wrong), InvalidInput);
    const std::vector<BlockVector> out_of_range{{AxisSet::of({2}), {1}}};
    EXPECT_THROW((void)contract(a, out_of_range), InvalidInput);
}

TEST(Contract, IsMultilinear) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = random_tensor({3, 2, 4}, 100 + seed);
        Stream s(200 + seed, 0);
        const auto x = random_vector(3, s), y1 = random_vector(2, s), y2 = random_vector(2, s),
                   z = random_vector(4, s);
        const double alpha = s.gaussian(), beta = s.gaussian();
        std::vector<double> mix(2);
        for (int i = 0; i < 2; ++i) {
            mix[i] = alpha * y1[i] + beta * y2[i];
        }
        auto eval = [&](const std::vector<double>& y) {
            const std::vector<BlockVector> b{{AxisSet::of({0}), x}, {AxisSet::of({1}), y}, {AxisSet::of({2}), z}};
            return std::get<double>(contract(a, b));
        };
        const double lhs = eval(mix);
        const double rhs = alpha * eval(y1) + beta * eval(y2);
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
    }
}

TEST(Symmetrize, TwoByTwoExample) {
    const CoefficientTensor a({2, 2}, {1, 2, 4, 1});
    const auto s = symmetrize_and_kill_diagonal(a);
    EXPECT_EQ(std::vector<double>(s.values().begin(), s.values().end()), (std::vector<double>{0, 3, 3, 0}));
}

TEST(Symmetrize, IdempotentOnSymmetricZeroDiagonal) {
    const CoefficientTensor a({3, 3}, {0, 1, 2, 1, 0, -1, 2, -1, 0});
    EXPECT_EQ(symmetrize_and_kill_diagonal(a), a);
    const auto b = symmetrize_and_kill_diagonal(random_tensor({3, 3, 3}, 5));
    EXPECT_EQ(symmetrize_and_kill_diagonal(b), b);
}

TEST(Symmetrize, OrderThreeExhaustiveScan) {
    const auto s = symmetrize_and_kill_diagonal(random_tensor({3, 3, 3}, 31));
    std::array<std::size_t, 3> idx{};
    for (idx[0] = 0; idx[0] < 3; ++idx[0]) {
        for (idx[1] = 0; idx[1] < 3; ++idx[1]) {
            for (idx[2] = 0; idx[2] < 3; ++idx[2]) {
                const double v = s.at(idx);
                if (idx[0] == idx[1] || idx[1] == idx[2] || idx[0] == idx[2]) {
                    EXPECT_EQ(v, 0.0);
                }
                auto perm = idx;
                std::sort(perm.begin(), perm.end());
                do {
                    EXPECT_NEAR(s.at(perm), v, 1e-15);
                } while (std::next_permutation(perm.begin(), perm.end()));
            }
        }
    }
    EXPECT_TRUE(s.is_symmetric_tetrahedral());
}

TEST(Symmetrize, RejectsUnequalDims) {
    EXPECT_THROW((void)symmetrize_and_kill_diagonal(random_tensor({2, 3}, 1)), InvalidInput);
}

TEST(SliceNorms, ThreeFourFiveRow) {
    const CoefficientTensor a({2, 2}, {3, 4, 0, 0});
    EXPECT_EQ(slice_norms(a, AxisSet::of({1})), (std::vector<double>{5, 0}));
}

TEST(SliceNorms, AllAxesIsFrobenius) {
    const auto a = random_tensor({2, 3, 2}, 41);
    long double sq = 0.0L;
    for (double v : a.values()) {
        sq += static_cast<long double>(v) * v;
    }
    const auto r = slice_norms(a, a.all_axes());
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0], std::sqrt(static_cast<double>(sq)), 1e-14);
    EXPECT_NEAR(a.frobenius_norm(), r[0], 1e-14);
}

TEST(SliceNorms, OuterAxesAgainstExplicitSums) {
    const auto a = random_tensor({2, 2, 2}, 51);
    const auto r = slice_norms(a, AxisSet::of({0, 2}));
    ASSERT_EQ(r.size(), 2u);
    for (std::size_t j = 0; j < 2; ++j) {
        double sq = 0.0;
        for (std::size_t i = 0; i < 2; ++i) {
            for (std::size_t k = 0; k < 2; ++k) {
                const std::array<std::size_t, 3> idx{i, j, k};
                sq += a.at(idx) * a.at(idx);
            }
        }
        EXPECT_NEAR(r[j], std::sqrt(sq), 1e-14);
    }
}

TEST(SliceNorms, EmptyAxisSetRejected) {
    EXPECT_THROW((void)slice_norms(random_tensor({2, 2}, 1), AxisSet{}), InvalidInput);
}

TEST(Slice, FixesComplementaryAxes) {
    const auto a = random_tensor({2, 3, 4}, 61);
    const std::array<std::size_t, 1> fixed{2};
    const auto s = slice(a, AxisSet::of({0, 2}), fixed);
    EXPECT_EQ(s.dims(), (std::vector<std::size_t>{2, 4}));
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t k = 0; k < 4; ++k) {
            const std::array<std::size_t, 3> idx{i, 2, k};
            const std::array<std::size_t, 2> sidx{i, k};
            EXPECT_EQ(s.at(sidx), a.at(idx));
        }
    }
}

TEST(TensorFile, RoundTrip) {
    const auto a = symmetrize_and_kill_diagonal(random_tensor({3, 3, 3}, 71));
    const auto doc = format_tensor_document(a, true);
    const auto back = parse_tensor_document(doc);
    EXPECT_TRUE(back.symmetric);
    EXPECT_EQ(back.tensor, a);
}

TEST(TensorFile, ErrorsNameTheField) {
    auto message = [](const std::string& doc) {
        try {
            (void)parse_tensor_document(doc);
        } catch (const InvalidInput& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    EXPECT_NE(message(R"({"dims":[2],"values":[1,2]})").find("order"), std::string::npos);
    EXPECT_NE(message(R"({"order":1,"values":[1,2]})").find("dims"), std::string::npos);
    EXPECT_NE(message(R"({"order":1,"dims":[2],"values":[1]})").find("values"), std::string::npos);
    EXPECT_NE(message(R"({"order":2,"dims":[2],"values":[1,2]})").find("order"), std::string::npos);
    EXPECT_NE(message(R"({"order":2,"dims":[2,2],"values":[0,1,2,0],"symmetric":true})").find("symmetric"),
              std::string::npos);
    EXPECT_FALSE(message("not json").empty());
}
