// SPDX-License-Identifier: MIT
#include "chaosbound/coeff_tensor.hpp"

#include "chaosbound/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace chaosbound {

namespace {

std::size_t product(const std::vector<std::size_t>& dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>{});
}

/// Row-major strides for `axes` (ascending) of A, indexed by axis; 0 for
/// axes outside the set.
std::array<std::size_t, kMaxOrder> strides_for(const CoefficientTensor& a, AxisSet axes) {
    std::array<std::size_t, kMaxOrder> strides{};
    std::size_t stride = 1;
    for (int axis = a.order() - 1; axis >= 0; --axis) {
        if (axes.contains(axis)) {
            strides[static_cast<std::size_t>(axis)] = stride;
            stride *= a.dim(axis);
        }
    }
    return strides;
}

/// Advances a row-major multi-index; returns false after the last entry.
bool advance(std::array<std::size_t, kMaxOrder>& index, const std::vector<std::size_t>& dims) {
    for (int axis = static_cast<int>(dims.size()) - 1; axis >= 0; --axis) {
        auto& i = index[static_cast<std::size_t>(axis)];
        if (++i < dims[static_cast<std::size_t>(axis)]) {
            return true;
        }
        i = 0;
    }
    return false;
}

void validate_blocks(const CoefficientTensor& a, std::span<const BlockVector> blocks, AxisSet& covered) {
    covered = AxisSet{};
    for (const auto& block : blocks) {
        if (block.axes.empty()) {
            throw InvalidInput("contract: empty block axis set");
        }
        if (!block.axes.subset_of(a.all_axes())) {
            throw InvalidInput("contract: block names an axis beyond the tensor order");
        }
        if (!block.axes.disjoint(covered)) {
            throw InvalidInput("contract: overlapping block axis sets");
        }
        if (block.values.size() != extent(a, block.axes)) {
            throw InvalidInput("contract: block " + block.axes.label() + " has " +
                               std::to_string(block.values.size()) + " values, expected " +
                               std::to_string(extent(a, block.axes)));
        }
        covered = covered | block.axes;
    }
}

}  // namespace

CoefficientTensor::CoefficientTensor(std::vector<std::size_t> dims, std::vector<double> values)
    : dims_(std::move(dims)), values_(std::move(values)) {
    if (dims_.empty() || dims_.size() > static_cast<std::size_t>(kMaxOrder)) {
        throw InvalidInput("tensor order must be between 1 and 4, got " + std::to_string(dims_.size()));
    }
    if (std::any_of(dims_.begin(), dims_.end(), [](std::size_t n) { return n == 0; })) {
        throw InvalidInput("tensor dims must be positive");
    }
    if (values_.size() != product(dims_)) {
        throw InvalidInput("tensor values length " + std::to_string(values_.size()) +
                           " does not match prod(dims) = " + std::to_string(product(dims_)));
    }
    if (std::any_of(values_.begin(), values_.end(), [](double v) { return !std::isfinite(v); })) {
        throw InvalidInput("tensor values must be finite");
    }
}

CoefficientTensor CoefficientTensor::zeros(std::vector<std::size_t> dims) {
    const std::size_t n = product(dims);
    return CoefficientTensor(std::move(dims), std::vector<double>(n, 0.0));
}

std::size_t CoefficientTensor::offset(std::span<const std::size_t> index) const {
    if (index.size() != dims_.size()) {
        throw InvalidInput("index rank does not match tensor order");
    }
    std::size_t off = 0;
    for (std::size_t axis = 0; axis < dims_.size(); ++axis) {
        if (index[axis] >= dims_[axis]) {
            throw InvalidInput("index out of range");
        }
        off = off * dims_[axis] + index[axis];
    }
    return off;
}

double CoefficientTensor::at(std::span<const std::size_t> index) const {
    return values_[offset(index)];
}

bool CoefficientTensor::has_equal_dims() const {
    return std::all_of(dims_.begin(), dims_.end(), [&](std::size_t n) { return n == dims_.front(); });
}

bool CoefficientTensor::is_zero() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

double CoefficientTensor::frobenius_norm() const {
    long double sum = 0.0L;
    for (double v : values_) {
        sum += static_cast<long double>(v) * v;
    }
    return static_cast<double>(std::sqrt(sum));
}

double CoefficientTensor::max_abs() const {
    double m = 0.0;
    for (double v : values_) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

CoefficientTensor CoefficientTensor::scaled(double factor) const {
    std::vector<double> v(values_);
    for (double& x : v) {
        x *= factor;
    }
    return CoefficientTensor(dims_, std::move(v));
}

bool CoefficientTensor::is_symmetric_tetrahedral(double tol) const {
    if (!has_equal_dims()) {
        return false;
    }
    std::array<std::size_t, kMaxOrder> index{};
    std::array<std::size_t, kMaxOrder> perm{};
    const auto d = dims_.size();
    std::size_t flat = 0;
    do {
        const double v = values_[flat++];
        bool repeated = false;
        for (std::size_t k = 0; k < d && !repeated; ++k) {
            for (std::size_t l = k + 1; l < d; ++l) {
                if (index[k] == index[l]) {
                    repeated = true;
                    break;
                }
            }
        }
        if (repeated) {
            if (std::abs(v) > tol) {
                return false;
            }
            continue;
        }
        std::array<std::size_t, kMaxOrder> order{0, 1, 2, 3};
        do {
            for (std::size_t k = 0; k < d; ++k) {
                perm[k] = index[order[k]];
            }
            if (std::abs(at(std::span<const std::size_t>(perm.data(), d)) - v) > tol) {
                return false;
            }
        } while (std::next_permutation(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(d)));
    } while (advance(index, dims_));
    return true;
}

std::size_t extent(const CoefficientTensor& a, AxisSet axes) {
    std::size_t n = 1;
    for (int axis : axes.axes()) {
        n *= a.dim(axis);
    }
    return n;
}

std::vector<double> contract_keep(const CoefficientTensor& a, std::span<const BlockVector> blocks, AxisSet keep) {
    AxisSet covered;
    validate_blocks(a, blocks, covered);
    if (!keep.disjoint(covered) || (keep | covered) != a.all_axes()) {
        throw InvalidInput("contract: kept axes and block axes must partition the tensor axes");
    }

    const auto keep_strides = strides_for(a, keep);
    std::vector<std::array<std::size_t, kMaxOrder>> block_strides;
    block_strides.reserve(blocks.size());
    for (const auto& block : blocks) {
        block_strides.push_back(strides_for(a, block.axes));
    }

    std::vector<double> out(extent(a, keep), 0.0);
    std::array<std::size_t, kMaxOrder> index{};
    const auto d = static_cast<std::size_t>(a.order());
    const auto values = a.values();
    std::size_t flat = 0;
    do {
        const double v = values[flat++];
        if (v == 0.0) {
            continue;
        }
        double weight = v;
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            std::size_t off = 0;
            for (std::size_t axis = 0; axis < d; ++axis) {
                off += index[axis] * block_strides[b][axis];
            }
            weight *= blocks[b].values[off];
        }
        std::size_t out_off = 0;
        for (std::size_t axis = 0; axis < d; ++axis) {
            out_off += index[axis] * keep_strides[axis];
        }
        out[out_off] += weight;
    } while (advance(index, a.dims()));
    return out;
}

ContractionResult contract(const CoefficientTensor& a, std::span<const BlockVector> blocks) {
    AxisSet covered;
    validate_blocks(a, blocks, covered);
    const AxisSet keep = a.all_axes().minus(covered);
    auto flat = contract_keep(a, blocks, keep);
    if (keep.empty()) {
        return flat.front();
    }
    std::vector<std::size_t> dims;
    for (int axis : keep.axes()) {
        dims.push_back(a.dim(axis));
    }
    return CoefficientTensor(std::move(dims), std::move(flat));
}

double contract_vectors(const CoefficientTensor& a, std::span<const std::span<const double>> vectors,
                        std::vector<double>& scratch) {
    const int d = a.order();
    const auto& dims = a.dims();
    const auto values = a.values();
    std::size_t len = values.size() / dims.back();
    scratch.resize(len);

    // Last axis first: the inner loop is a contiguous dot product.
    {
        const auto& x = vectors[static_cast<std::size_t>(d - 1)];
        const std::size_t n = dims.back();
        for (std::size_t r = 0; r < len; ++r) {
            const double* row = values.data() + r * n;
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                s += row[j] * x[j];
            }
            scratch[r] = s;
        }
    }
    for (int axis = d - 2; axis >= 0; --axis) {
        const auto& x = vectors[static_cast<std::size_t>(axis)];
        const std::size_t n = dims[static_cast<std::size_t>(axis)];
        const std::size_t next = len / n;
        for (std::size_t r = 0; r < next; ++r) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                s += scratch[r * n + j] * x[j];
            }
            scratch[r] = s;
        }
        len = next;
    }
    return scratch[0];
}

CoefficientTensor symmetrize_and_kill_diagonal(const CoefficientTensor& a) {
    if (!a.has_equal_dims()) {
        throw InvalidInput("symmetrize: all dims must be equal");
    }
    const auto d = static_cast<std::size_t>(a.order());
    std::vector<double> out(a.size(), 0.0);
    std::array<std::size_t, kMaxOrder> index{};
    std::array<std::size_t, kMaxOrder> perm{};
    std::size_t flat = 0;
    do {
        const std::size_t here = flat++;
        bool repeated = false;
        for (std::size_t k = 0; k < d; ++k) {
            for (std::size_t l = k + 1; l < d; ++l) {
                repeated = repeated || index[k] == index[l];
            }
        }
        if (repeated) {
            continue;
        }
        std::array<std::size_t, kMaxOrder> order{0, 1, 2, 3};
        double sum = 0.0;
        int count = 0;
        do {
            for (std::size_t k = 0; k < d; ++k) {
                perm[k] = index[order[k]];
            }
            sum += a.at(std::span<const std::size_t>(perm.data(), d));
            ++count;
        } while (std::next_permutation(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(d)));
        out[here] = sum / count;
    } while (advance(index, a.dims()));
    return CoefficientTensor(a.dims(), std::move(out));
}

std::vector<double> slice_norms(const CoefficientTensor& a, AxisSet axes) {
    if (axes.empty()) {
        throw InvalidInput("slice_norms: axis set must be nonempty");
    }
    if (!axes.subset_of(a.all_axes())) {
        throw InvalidInput("slice_norms: axis beyond tensor order");
    }
    const AxisSet rest = a.all_axes().minus(axes);
    const auto rest_strides = strides_for(a, rest);
    std::vector<double> sums(extent(a, rest), 0.0);
    std::array<std::size_t, kMaxOrder> index{};
    const auto d = static_cast<std::size_t>(a.order());
    std::size_t flat = 0;
    do {
        const double v = a.values()[flat++];
        std::size_t off = 0;
        for (std::size_t axis = 0; axis < d; ++axis) {
            off += index[axis] * rest_strides[axis];
        }
        sums[off] += v * v;
    } while (advance(index, a.dims()));
    for (double& s : sums) {
        s = std::sqrt(s);
    }
    return sums;
}

CoefficientTensor slice(const CoefficientTensor& a, AxisSet free_axes, std::span<const std::size_t> fixed_index) {
    if (free_axes.empty() || !free_axes.subset_of(a.all_axes())) {
        throw InvalidInput("slice: free axes must be a nonempty subset of the tensor axes");
    }
    const AxisSet fixed = a.all_axes().minus(free_axes);
    if (fixed_index.size() != static_cast<std::size_t>(fixed.size())) {
        throw InvalidInput("slice: fixed index has the wrong length");
    }
    std::vector<std::size_t> dims;
    for (int axis : free_axes.axes()) {
        dims.push_back(a.dim(axis));
    }
    std::vector<double> out;
    out.reserve(extent(a, free_axes));

    std::array<std::size_t, kMaxOrder> full{};
    std::size_t k = 0;
    for (int axis : fixed.axes()) {
        if (fixed_index[k] >= a.dim(axis)) {
            throw InvalidInput("slice: fixed index out of range");
        }
        full[static_cast<std::size_t>(axis)] = fixed_index[k++];
    }
    const auto free_list = free_axes.axes();
    std::array<std::size_t, kMaxOrder> sub{};
    std::vector<std::size_t> sub_dims(dims);
    do {
        for (std::size_t j = 0; j < free_list.size(); ++j) {
            full[static_cast<std::size_t>(free_list[j])] = sub[j];
        }
        out.push_back(a.at(std::span<const std::size_t>(full.data(), static_cast<std::size_t>(a.order()))));
    } while (advance(sub, sub_dims));
    return CoefficientTensor(std::move(dims), std::move(out));
}

TensorFile parse_tensor_document(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidInput(std::string("tensor file: not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) {
        throw InvalidInput("tensor file: top level must be an object");
    }
    for (const char* field : {"order", "dims", "values"}) {
        if (!doc.contains(field)) {
            throw InvalidInput(std::string("tensor file: missing field '") + field + "'");
        }
    }
    if (!doc["order"].is_number_integer()) {
        throw InvalidInput("tensor file: field 'order' must be an integer");
    }
    if (!doc["dims"].is_array() || !doc["values"].is_array()) {
        throw InvalidInput("tensor file: fields 'dims' and 'values' must be arrays");
    }
    const auto order = doc["order"].get<long long>();
    std::vector<std::size_t> dims;
    for (const auto& n : doc["dims"]) {
        if (!n.is_number_integer() || n.get<long long>() <= 0) {
            throw InvalidInput("tensor file: field 'dims' must hold positive integers");
        }
        dims.push_back(n.get<std::size_t>());
    }
    if (static_cast<long long>(dims.size()) != order) {
        throw InvalidInput("tensor file: field 'order' disagrees with the length of 'dims'");
    }
    std::vector<double> values;
    values.reserve(doc["values"].size());
    for (const auto& v : doc["values"]) {
        if (!v.is_number()) {
            throw InvalidInput("tensor file: field 'values' must hold numbers");
        }
        values.push_back(v.get<double>());
    }
    bool symmetric = false;
    if (doc.contains("symmetric")) {
        if (!doc["symmetric"].is_boolean()) {
            throw InvalidInput("tensor file: field 'symmetric' must be a boolean");
        }
        symmetric = doc["symmetric"].get<bool>();
    }
    TensorFile file{CoefficientTensor(std::move(dims), std::move(values)), symmetric};
    if (symmetric && !file.tensor.is_symmetric_tetrahedral(1e-12)) {
        throw InvalidInput("tensor file: field 'symmetric' is set but the values are not symmetric with zero diagonal");
    }
    return file;
}

TensorFile read_tensor_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidInput("tensor file: cannot open " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_tensor_document(buffer.str());
}

std::string format_tensor_document(const CoefficientTensor& a, bool symmetric) {
    nlohmann::json doc;
    doc["order"] = a.order();
    doc["dims"] = a.dims();
    doc["values"] = std::vector<double>(a.values().begin(), a.values().end());
    if (symmetric) {
        doc["symmetric"] = true;
    }
    return doc.dump();
}

void write_tensor_file(const std::filesystem::path& path, const CoefficientTensor& a, bool symmetric) {
    std::ofstream out(path);
    if (!out) {
        throw InvalidInput("tensor file: cannot write " + path.string());
    }
    out << format_tensor_document(a, symmetric) << '\n';
}

}  // namespace chaosbound
