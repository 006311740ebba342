#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "spiky/matrix.hpp"

namespace spiky {

/// A collection of combinatorial rectangles with pairwise-disjoint row sets
/// and pairwise-disjoint column sets.
struct BlockyPattern {
    struct Block {
        std::vector<int> rows; // sorted ascending
        std::vector<int> cols; // sorted ascending
    };

    int nrows = 0;
    int ncols = 0;
    std::vector<Block> blocks;

    BlockyPattern() = default;
    BlockyPattern(int nrows_, int ncols_) : nrows(nrows_), ncols(ncols_) {}

    bool empty() const { return blocks.empty(); }
    int cell_count() const;
    bool covers(int i, int j) const;

    /// 0/1 indicator of the covered cells, row-major.
    std::vector<std::uint8_t> indicator() const;

    /// Sorts rows/cols inside each block and orders blocks by least row.
    void canonicalize();

    /// Throws std::invalid_argument on out-of-range indices, empty blocks,
    /// or overlapping row/column sets.
    void validate() const;
};

/// Reconstructs the unique block structure of a blocky 0/1 support, or
/// nullopt when some connected component is not complete bipartite.
std::optional<BlockyPattern> pattern_from_support(const std::vector<std::uint8_t>& support,
                                                  int nrows, int ncols);

/// Support intersection of blocky patterns, which is itself blocky.
BlockyPattern intersect_patterns(const BlockyPattern& a, const BlockyPattern& b);

/// Pattern restricted to the given index sets, reindexed in their order.
/// Empty blocks are dropped.
BlockyPattern restrict_pattern(const BlockyPattern& p, const std::vector<int>& rows,
                               const std::vector<int>& cols);

struct BlockyTerm {
    BlockyPattern pattern;
    double coeff = 1.0;
};

/// Blocky pattern with a global rank-one factor; the value at a covered
/// cell (i,j) is u[i]*v[j], uncovered cells are 0.
struct SpikyTerm {
    BlockyPattern pattern;
    std::vector<double> u;
    std::vector<double> v;

    double value(int i, int j) const { return pattern.covers(i, j) ? u[i] * v[j] : 0.0; }
};

enum class DecompKind { BlockySum, SpikySum, BlockyCover, SignSum, ApproxSum };

std::string kind_name(DecompKind k);
DecompKind kind_from_name(const std::string& name);

/// A typed list of terms claiming to represent a target matrix. Blocky-style
/// kinds carry blocky_terms, SpikySum carries spiky_terms.
struct Decomposition {
    DecompKind kind = DecompKind::BlockySum;
    int nrows = 0;
    int ncols = 0;
    Field field = Field::Real;
    std::vector<BlockyTerm> blocky_terms;
    std::vector<SpikyTerm> spiky_terms;
    double epsilon = 0.0; // ApproxSum only
    std::string algo;
    std::map<std::string, double> metadata;

    int term_count() const { return int(blocky_terms.size() + spiky_terms.size()); }
};

struct VerificationReport {
    struct Failure {
        int row = 0;
        int col = 0;
        double expected = 0.0;
        double got = 0.0;
    };

    bool ok = false;
    double max_residual = 0.0;
    std::vector<Failure> failures;
    int term_count = 0;
    std::vector<std::string> structural_errors;
};

} // namespace spiky
