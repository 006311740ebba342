#pragma once

#include <cstdint>
#include <vector>

#include "spiky/matrix.hpp"

namespace spiky::ref {

// Straightforward serial implementations, independent of the tuned kernels.
// Tests use them as ground-truth oracles and the bench target compares the
// two sides.

/// GF2 rank by plain elimination over int vectors (no bit packing).
int rank_gf2(const Matrix& m);

/// Minimum number of blocky supports XOR-summing to each mask, for every
/// 0/1 matrix of the given shape at once, by breadth-first search over the
/// 2^(nrows*ncols) state space. Requires nrows*ncols <= 20. Index = row-major
/// support mask, value = GF2 spiky rank (over GF2 spiky terms are exactly
/// blocky supports).
std::vector<int> spr_gf2_table_bfs(int nrows, int ncols);

/// GF2 rigidity by enumerating every matrix of rank <= r and taking the
/// minimum Hamming distance. Requires nrows*ncols <= 20.
int rigidity_gf2_lowrank_scan(const Matrix& m, int r);

/// Largest shattered row set, plain serial scan over all row subsets.
int vc_dimension(const Matrix& m);

/// Serial twin of bounds::check_p1* (exhaustive over subsets of size <= s,
/// or sampled); returns the worst ratio spar / (k*(|S|+|T|)).
double p1_worst_ratio_exhaustive(const Matrix& m, int s, double k);
double p1_worst_ratio_sampled(const Matrix& m, int s, double k, int samples,
                              std::uint64_t seed);

/// All blocky support masks of the given shape, by filtering every support
/// through the complete-bipartite test. Requires nrows*ncols <= 20.
std::vector<std::uint32_t> blocky_support_masks(int nrows, int ncols);

} // namespace spiky::ref
