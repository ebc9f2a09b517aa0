// SPDX-License-Identifier: MIT
#pragma once

#include <string>

namespace chaosbound {

enum class NormStatus {
    exact,                     ///< water-filling, SVD, Frobenius or a closed form
    certified_oracle,          ///< brute-force search with an error bound
    local_search_lower_bound,  ///< best of several alternating-maximization runs
};

[[nodiscard]] inline std::string to_string(NormStatus s) {
    switch (s) {
        case NormStatus::exact:
            return "exact";
        case NormStatus::certified_oracle:
            return "certified-oracle";
        case NormStatus::local_search_lower_bound:
            return "local-search-lower-bound";
    }
    return "?";
}

struct SolverDiagnostics {
    int iterations = 0;
    int restarts = 0;
    int best_start = -1;
    /// Largest relative gap between dual bound and primal value among the
    /// water-filling calls that produced this value.
    double duality_gap = 0.0;
    /// Oracle only: resolution times a local Lipschitz estimate.
    double error_bound = 0.0;
};

struct NormValue {
    double value = 0.0;
    NormStatus status = NormStatus::exact;
    SolverDiagnostics diagnostics;
};

/// Status of a sum: exact only when every term is.
[[nodiscard]] inline NormStatus combine(NormStatus a, NormStatus b) {
    if (a == NormStatus::local_search_lower_bound || b == NormStatus::local_search_lower_bound) {
        return NormStatus::local_search_lower_bound;
    }
    if (a == NormStatus::certified_oracle || b == NormStatus::certified_oracle) {
        return NormStatus::certified_oracle;
    }
    return NormStatus::exact;
}

}  // namespace chaosbound
