#include "spiky/types.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace spiky {

int BlockyPattern::cell_count() const {
    int total = 0;
    for (const auto& b : blocks) total += int(b.rows.size() * b.cols.size());
    return total;
}

bool BlockyPattern::covers(int i, int j) const {
    for (const auto& b : blocks) {
        if (std::binary_search(b.rows.begin(), b.rows.end(), i) &&
            std::binary_search(b.cols.begin(), b.cols.end(), j))
            return true;
    }
    return false;
}

std::vector<std::uint8_t> BlockyPattern::indicator() const {
    std::vector<std::uint8_t> ind(std::size_t(nrows) * ncols, 0);
    for (const auto& b : blocks)
        for (int i : b.rows)
            for (int j : b.cols) ind[std::size_t(i) * ncols + j] = 1;
    return ind;
}

void BlockyPattern::canonicalize() {
    for (auto& b : blocks) {
        std::sort(b.rows.begin(), b.rows.end());
        std::sort(b.cols.begin(), b.cols.end());
    }
    std::sort(blocks.begin(), blocks.end(),
              [](const Block& a, const Block& b) { return a.rows.front() < b.rows.front(); });
}

void BlockyPattern::validate() const {
    std::vector<std::uint8_t> row_used(nrows, 0), col_used(ncols, 0);
    for (const auto& b : blocks) {
        if (b.rows.empty() || b.cols.empty()) throw std::invalid_argument("empty block");
        for (int i : b.rows) {
            if (i < 0 || i >= nrows) throw std::invalid_argument("block row out of range");
            if (row_used[i]) throw std::invalid_argument("overlapping block row sets");
            row_used[i] = 1;
        }
        for (int j : b.cols) {
            if (j < 0 || j >= ncols) throw std::invalid_argument("block col out of range");
            if (col_used[j]) throw std::invalid_argument("overlapping block col sets");
            col_used[j] = 1;
        }
    }
}

std::optional<BlockyPattern> pattern_from_support(const std::vector<std::uint8_t>& support,
                                                  int nrows, int ncols) {
    // union-find over rows (0..nrows-1) and cols (nrows..nrows+ncols-1)
    std::vector<int> parent(nrows + ncols);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        return a;
    };
    auto unite = [&](int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[a] = b;
    };

    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j)
            if (support[std::size_t(i) * ncols + j]) unite(i, nrows + j);

    std::map<int, BlockyPattern::Block> comps;
    for (int i = 0; i < nrows; ++i) {
        bool nonzero = false;
        for (int j = 0; j < ncols; ++j)
            if (support[std::size_t(i) * ncols + j]) nonzero = true;
        if (nonzero) comps[find(i)].rows.push_back(i);
    }
    for (int j = 0; j < ncols; ++j) {
        bool nonzero = false;
        for (int i = 0; i < nrows; ++i)
            if (support[std::size_t(i) * ncols + j]) nonzero = true;
        if (nonzero) comps[find(nrows + j)].cols.push_back(j);
    }

    BlockyPattern pat(nrows, ncols);
    for (auto& [root, block] : comps) {
        for (int i : block.rows)
            for (int j : block.cols)
                if (!support[std::size_t(i) * ncols + j]) return std::nullopt;
        pat.blocks.push_back(std::move(block));
    }
    pat.canonicalize();
    return pat;
}

BlockyPattern intersect_patterns(const BlockyPattern& a, const BlockyPattern& b) {
    if (a.nrows != b.nrows || a.ncols != b.ncols)
        throw std::invalid_argument("intersect_patterns: dimension mismatch");
    auto ia = a.indicator();
    auto ib = b.indicator();
    for (std::size_t t = 0; t < ia.size(); ++t) ia[t] = ia[t] & ib[t];
    auto pat = pattern_from_support(ia, a.nrows, a.ncols);
    if (!pat) throw std::logic_error("intersection of blocky supports must be blocky");
    return *pat;
}

BlockyPattern restrict_pattern(const BlockyPattern& p, const std::vector<int>& rows,
                               const std::vector<int>& cols) {
    std::vector<int> row_pos(p.nrows, -1), col_pos(p.ncols, -1);
    for (std::size_t t = 0; t < rows.size(); ++t) row_pos[rows[t]] = int(t);
    for (std::size_t t = 0; t < cols.size(); ++t) col_pos[cols[t]] = int(t);

    BlockyPattern out(int(rows.size()), int(cols.size()));
    for (const auto& b : p.blocks) {
        BlockyPattern::Block nb;
        for (int i : b.rows)
            if (row_pos[i] >= 0) nb.rows.push_back(row_pos[i]);
        for (int j : b.cols)
            if (col_pos[j] >= 0) nb.cols.push_back(col_pos[j]);
        if (!nb.rows.empty() && !nb.cols.empty()) out.blocks.push_back(std::move(nb));
    }
    out.canonicalize();
    return out;
}

std::string kind_name(DecompKind k) {
    switch (k) {
        case DecompKind::BlockySum: return "BlockySum";
        case DecompKind::SpikySum: return "SpikySum";
        case DecompKind::BlockyCover: return "BlockyCover";
        case DecompKind::SignSum: return "SignSum";
        case DecompKind::ApproxSum: return "ApproxSum";
    }
    throw std::logic_error("bad kind");
}

DecompKind kind_from_name(const std::string& name) {
    if (name == "BlockySum") return DecompKind::BlockySum;
    if (name == "SpikySum") return DecompKind::SpikySum;
    if (name == "BlockyCover") return DecompKind::BlockyCover;
    if (name == "SignSum") return DecompKind::SignSum;
    if (name == "ApproxSum") return DecompKind::ApproxSum;
    throw std::invalid_argument("unknown decomposition kind: " + name);
}

} // namespace spiky
