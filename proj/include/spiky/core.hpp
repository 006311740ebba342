#pragma once

#include <optional>
#include <vector>

#include "spiky/matrix.hpp"
#include "spiky/types.hpp"

namespace spiky {

/// Numerical rank via elimination with pivot threshold tol (Real) or exact
/// elimination over packed bit rows (GF2, tol ignored).
int rank(const Matrix& m, double tol = 1e-9);

/// Number of nonzero entries.
int sparsity(const Matrix& m);

/// Present iff the support decomposes into disjoint rectangles with every
/// covered entry equal to 1. The zero matrix counts as blocky with an empty
/// pattern.
std::optional<BlockyPattern> is_blocky(const Matrix& m);

/// Present iff the support is blocky and each block has rank <= 1 as a
/// submatrix; factors are glued block by block, uncovered coordinates 0.
std::optional<SpikyTerm> is_spiky(const Matrix& m);

/// Entrywise sum of term evaluations (BlockyCover: entrywise OR;
/// GF2: XOR-sum). Throws on dimension mismatch among terms.
Matrix eval_decomposition(const Decomposition& d);

/// Structural checks on every term plus the value check appropriate to the
/// kind. Problems are reported inside the result, never thrown.
VerificationReport verify_decomposition(const Decomposition& d, const Matrix& target,
                                        double tol = 1e-9);

/// Submatrix in the given index order. Throws on out-of-range indices.
Matrix restrict(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols);

/// Restriction of every term to (rows, cols); empty blocks and empty terms
/// are dropped, so the result has at most the same term count.
Decomposition restrict_decomposition(const Decomposition& d, const std::vector<int>& rows,
                                     const std::vector<int>& cols);

/// Concatenation witnessing subadditivity: the result claims A's target
/// plus B's target.
Decomposition concat_decompositions(const Decomposition& a, const Decomposition& b);

/// Multiplies every term by c (coefficients for blocky terms, the u factor
/// for spiky terms).
Decomposition scale_decomposition(const Decomposition& d, double c);

} // namespace spiky
