// SPDX-License-Identifier: MIT
//
// Dense row-major coefficient arrays of order 1..4 and the handful of
// multilinear operations the norm engine and the samplers need.
#pragma once

#include "chaosbound/axis_set.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace chaosbound {

class CoefficientTensor {
public:
    /// Throws InvalidInput unless 1 <= dims.size() <= 4, all dims > 0,
    /// values.size() == prod(dims) and every value is finite.
    CoefficientTensor(std::vector<std::size_t> dims, std::vector<double> values);

    static CoefficientTensor zeros(std::vector<std::size_t> dims);

    [[nodiscard]] int order() const { return static_cast<int>(dims_.size()); }
    [[nodiscard]] const std::vector<std::size_t>& dims() const { return dims_; }
    [[nodiscard]] std::size_t dim(int axis) const { return dims_[static_cast<std::size_t>(axis)]; }
    [[nodiscard]] std::span<const double> values() const { return values_; }
    [[nodiscard]] std::size_t size() const { return values_.size(); }
    [[nodiscard]] AxisSet all_axes() const { return AxisSet::first_n(order()); }

    [[nodiscard]] double at(std::span<const std::size_t> index) const;
    [[nodiscard]] std::size_t offset(std::span<const std::size_t> index) const;

    [[nodiscard]] bool has_equal_dims() const;
    [[nodiscard]] bool is_zero() const;
    [[nodiscard]] double frobenius_norm() const;
    [[nodiscard]] double max_abs() const;
    [[nodiscard]] CoefficientTensor scaled(double factor) const;

    /// Permutation invariant and zero on every index with a repeated coordinate,
    /// up to an absolute tolerance.
    [[nodiscard]] bool is_symmetric_tetrahedral(double tol = 1e-12) const;

    friend bool operator==(const CoefficientTensor&, const CoefficientTensor&) = default;

private:
    std::vector<std::size_t> dims_;
    std::vector<double> values_;
};

/// Values over a set of axes, row-major with the axes in ascending order.
struct BlockVector {
    AxisSet axes;
    std::vector<double> values;
};

using ContractionResult = std::variant<double, CoefficientTensor>;

/// Sums a_i * prod_l x^l_{i_{I_l}} over the block axes. Returns the tensor over
/// the untouched axes, or a scalar when every axis is consumed.
/// Throws InvalidInput on overlapping blocks or shape mismatch.
[[nodiscard]] ContractionResult contract(const CoefficientTensor& a, std::span<const BlockVector> blocks);

/// Same contraction, returned flat (row-major, ascending axes) over `keep`.
/// `keep` and the block axes must together partition the axes of A.
[[nodiscard]] std::vector<double> contract_keep(const CoefficientTensor& a, std::span<const BlockVector> blocks,
                                                AxisSet keep);

/// Full contraction against one vector per axis, reducing the last axis first.
/// `scratch` is reused between calls to avoid allocation in sampling loops.
[[nodiscard]] double contract_vectors(const CoefficientTensor& a, std::span<const std::span<const double>> vectors,
                                      std::vector<double>& scratch);

/// Average over all index permutations, then zero every repeated-coordinate entry.
[[nodiscard]] CoefficientTensor symmetrize_and_kill_diagonal(const CoefficientTensor& a);

/// Euclidean norms of the slices (a_i)_{i_I}, indexed row-major by the
/// complementary axes. Returns a single entry when I covers every axis.
[[nodiscard]] std::vector<double> slice_norms(const CoefficientTensor& a, AxisSet axes);

/// The sub-array over `free_axes` with the remaining axes fixed at `fixed_index`
/// (given in ascending axis order). `free_axes` must be nonempty.
[[nodiscard]] CoefficientTensor slice(const CoefficientTensor& a, AxisSet free_axes,
                                      std::span<const std::size_t> fixed_index);

/// Product of the dims of the given axes (1 for the empty set).
[[nodiscard]] std::size_t extent(const CoefficientTensor& a, AxisSet axes);

struct TensorFile {
    CoefficientTensor tensor;
    bool symmetric = false;
};

/// JSON document {"order", "dims", "values", optional "symmetric"}.
[[nodiscard]] TensorFile parse_tensor_document(const std::string& text);
[[nodiscard]] TensorFile read_tensor_file(const std::filesystem::path& path);
[[nodiscard]] std::string format_tensor_document(const CoefficientTensor& a, bool symmetric);
void write_tensor_file(const std::filesystem::path& path, const CoefficientTensor& a, bool symmetric);

}  // namespace chaosbound
