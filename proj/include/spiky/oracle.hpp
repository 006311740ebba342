#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spiky/matrix.hpp"
#include "spiky/types.hpp"

namespace spiky::oracle {

// Exhaustive ground-truth solvers at tiny scale. The heavy searches run
// their outer loops under OpenMP; reference.hpp keeps plain serial twins.

/// Every nonzero blocky support of the given shape exactly once, blocks
/// ordered by least row. Hard-capped at nrows, ncols <= 4.
std::vector<BlockyPattern> enumerate_blocky_patterns(int nrows, int ncols);

/// Least r <= r_max such that some r patterns admit real coefficients with
/// max residual below 1e-9 against m; nullopt if none. Dims <= 4, r_max <= 4.
std::optional<int> exact_blocky_rank_real(const Matrix& m, int r_max,
                                          std::vector<BlockyTerm>* witness = nullptr);

/// Least r <= r_max such that some r blocky supports XOR to m. Over GF2 a
/// rank-one block is all-ones, so spiky and blocky coincide and the search
/// is exact. Dims <= 4, r_max <= 4.
std::optional<int> exact_spiky_rank_gf2(const Matrix& m, int r_max,
                                        std::vector<BlockyPattern>* witness = nullptr);

/// One-sided certificate search: alternating least squares on the factor
/// pairs over candidate pattern tuples (with repetition, supports inside
/// the target's). A returned decomposition is verified; absence proves
/// nothing. Dims <= 6, r <= 3.
std::optional<Decomposition> heuristic_spiky_upper_real(const Matrix& m, int r, int restarts,
                                                        std::uint64_t seed);

/// Least number of entry flips bringing the GF2 rank down to r, by scanning
/// flip sets in increasing size. Dims <= 4.
int exact_rigidity_gf2(const Matrix& m, int r,
                       std::vector<std::pair<int, int>>* flips = nullptr);

/// Largest k such that some k rows are shattered by the columns. Requires
/// nrows <= 16.
int exact_vc(const Matrix& m, std::vector<int>* shattered_rows = nullptr);

} // namespace spiky::oracle
