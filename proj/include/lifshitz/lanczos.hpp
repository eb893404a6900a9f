#pragma once

#include "lifshitz/torus.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace lifshitz {

struct EigenOptions {
    int max_matvec = 5000;
    bool want_vectors = false;
};

struct EigenResult {
    std::vector<double> values;    // ascending, with multiplicity
    std::vector<double> residuals; // explicit ||H x - lambda x||_2 per pair
    std::vector<std::vector<double>> vectors;
    int matvecs = 0;
};

// Restarted block Lanczos (block size 2 for the systematically degenerate
// +-k pairs) with full reorthogonalization.  Every returned pair is
// certified: ||H x - lambda x||_2 <= tol * max(lambda, 1).
EigenResult lowest_eigenpairs(const SchrodingerOperator& op, int K, double tol,
                              std::uint64_t seed, const EigenOptions& opts = {});

std::vector<double> lowest_eigenvalues(const SchrodingerOperator& op, int K, double tol,
                                       std::uint64_t seed);

std::pair<double, std::vector<double>> ground_state(const SchrodingerOperator& op, double tol,
                                                    std::uint64_t seed);

// (sum_{k<=K} exp(-t lambda_k), worst-case remainder (N^d - K) exp(-t lambda_K)).
// The caller checks remainder <= tol * leading and raises K if not.
std::pair<double, double> heat_trace(const SchrodingerOperator& op, double t, int K, double tol,
                                     std::uint64_t seed);

} // namespace lifshitz
