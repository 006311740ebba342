#include "spiky/decomp.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace spiky {

namespace {

double dot_bits(const std::vector<double>& w, int x) {
    double s = 0.0;
    for (std::size_t t = 0; t < w.size(); ++t)
        if (x & (1 << t)) s += w[t];
    return s;
}

int ceil_sqrt(int m) { return m <= 0 ? 0 : int(std::ceil(std::sqrt(double(m)))); }

} // namespace

Matrix relu_matrix(const ReLUGate& g) {
    if (g.n < 0 || g.n > 14) throw std::invalid_argument("relu_matrix: n out of range");
    int N = 1 << g.n;
    Matrix m(N, N);
    for (int x = 0; x < N; ++x) {
        double ax = dot_bits(g.w1, x);
        for (int y = 0; y < N; ++y)
            m.at(x, y) = std::max(0.0, ax + dot_bits(g.w2, y) + g.alpha);
    }
    return m;
}

Matrix relu_linear_matrix(const ReLUGate& g) {
    int N = 1 << g.n;
    Matrix m(N, N);
    for (int x = 0; x < N; ++x) {
        double ax = dot_bits(g.w1, x);
        for (int y = 0; y < N; ++y) m.at(x, y) = ax + dot_bits(g.w2, y) + g.alpha;
    }
    return m;
}

// ---------------------------------------------------------------------------
// sparse_to_spiky

Decomposition sparse_to_spiky(const Matrix& m) {
    m.validate();
    Decomposition d;
    d.kind = DecompKind::SpikySum;
    d.nrows = m.nrows();
    d.ncols = m.ncols();
    d.field = m.field();
    d.algo = "sparse-spiky";

    int total = sparsity(m);
    d.metadata["claimedBound"] = 2.0 * ceil_sqrt(total);
    if (total == 0) return d;

    std::vector<double> work(m.data());
    auto at = [&](int i, int j) -> double& { return work[std::size_t(i) * m.ncols() + j]; };
    double threshold = std::sqrt(double(total));

    // phase 1: columns with more than sqrt(m) nonzeros, one block each
    for (int j = 0; j < m.ncols(); ++j) {
        std::vector<int> rows;
        for (int i = 0; i < m.nrows(); ++i)
            if (at(i, j) != 0.0) rows.push_back(i);
        if (double(rows.size()) <= threshold) continue;

        SpikyTerm t;
        t.pattern = BlockyPattern(m.nrows(), m.ncols());
        t.pattern.blocks.push_back({rows, {j}});
        t.u.assign(m.nrows(), 0.0);
        t.v.assign(m.ncols(), 0.0);
        t.v[j] = 1.0;
        for (int i : rows) {
            t.u[i] = at(i, j);
            at(i, j) = 0.0;
        }
        d.spiky_terms.push_back(std::move(t));
    }

    // phase 2: sweeps removing one entry per nonempty column, blocks grouped
    // by the entry's row so the pattern stays disjoint
    std::vector<int> cursor(m.ncols(), 0);
    while (true) {
        std::map<int, std::vector<int>> by_row; // row -> cols taken this sweep
        for (int j = 0; j < m.ncols(); ++j) {
            int i = cursor[j];
            while (i < m.nrows() && at(i, j) == 0.0) ++i;
            cursor[j] = i;
            if (i < m.nrows()) by_row[i].push_back(j);
        }
        if (by_row.empty()) break;

        SpikyTerm t;
        t.pattern = BlockyPattern(m.nrows(), m.ncols());
        t.u.assign(m.nrows(), 0.0);
        t.v.assign(m.ncols(), 0.0);
        for (auto& [row, cols] : by_row) {
            t.pattern.blocks.push_back({{row}, cols});
            t.u[row] = 1.0;
            for (int j : cols) {
                t.v[j] = at(row, j);
                at(row, j) = 0.0;
            }
        }
        d.spiky_terms.push_back(std::move(t));
    }

    assert(d.term_count() <= 2 * ceil_sqrt(total));
    d.metadata["termCount"] = d.term_count();
    return d;
}

// ---------------------------------------------------------------------------
// hd1_blocky

Decomposition hd1_blocky(int n) {
    if (n < 1 || n > 14) throw std::invalid_argument("hd1_blocky: n out of range");
    int N = 1 << n;
    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = N;
    d.ncols = N;
    d.algo = "hd1-blocky";
    d.metadata["claimedBound"] = n;

    for (int i = 0; i < n; ++i) {
        BlockyTerm t;
        t.coeff = 1.0;
        t.pattern = BlockyPattern(N, N);
        for (int x = 0; x < N; ++x) t.pattern.blocks.push_back({{x}, {x ^ (1 << i)}});
        d.blocky_terms.push_back(std::move(t));
    }
    d.metadata["termCount"] = d.term_count();
    return d;
}

// ---------------------------------------------------------------------------
// cover_to_blocky

Decomposition cover_to_blocky(const std::vector<BlockyPattern>& cover) {
    int t = int(cover.size());
    if (t < 1 || t > 20) throw std::invalid_argument("cover_to_blocky: need 1..20 patterns");
    for (const auto& p : cover) {
        p.validate();
        if (p.nrows != cover[0].nrows || p.ncols != cover[0].ncols)
            throw std::invalid_argument("cover_to_blocky: pattern dimension mismatch");
    }

    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = cover[0].nrows;
    d.ncols = cover[0].ncols;
    d.algo = "cover-blocky";
    d.metadata["claimedBound"] = std::pow(2.0, t) - 1.0;

    for (std::uint32_t subset = 1; subset < (1u << t); ++subset) {
        std::optional<BlockyPattern> inter;
        for (int i = 0; i < t && (!inter || !inter->empty()); ++i)
            if (subset & (1u << i)) inter = inter ? intersect_patterns(*inter, cover[i]) : cover[i];
        if (inter->empty()) continue;
        double coeff = std::popcount(subset) % 2 == 1 ? 1.0 : -1.0;
        d.blocky_terms.push_back({std::move(*inter), coeff});
    }
    d.metadata["termCount"] = d.term_count();
    return d;
}

// ---------------------------------------------------------------------------
// threshold_to_blocky / relu_to_spiky / circuit_to_spiky

std::vector<BlockyPattern> threshold_to_blocky(const ReLUGate& g) {
    if (g.n < 1 || g.n > 10) throw std::invalid_argument("threshold_to_blocky: n out of range");
    if (int(g.w1.size()) != g.n || int(g.w2.size()) != g.n)
        throw std::invalid_argument("threshold_to_blocky: weight length mismatch");
    int N = 1 << g.n;

    std::vector<double> a(N), b(N);
    for (int x = 0; x < N; ++x) a[x] = dot_bits(g.w1, x);
    for (int y = 0; y < N; ++y) b[y] = dot_bits(g.w2, y) + g.alpha;

    // rows ordered by decreasing margin, ties broken by index
    std::vector<int> row_order(N);
    for (int x = 0; x < N; ++x) row_order[x] = x;
    std::stable_sort(row_order.begin(), row_order.end(),
                     [&](int x, int y) { return a[x] > a[y]; });

    // the support of each column is a prefix of the ordered rows
    std::vector<int> prefix(N, 0);
    for (int y = 0; y < N; ++y) {
        int p = 0;
        while (p < N && a[row_order[p]] + b[y] > 0.0) ++p;
        prefix[y] = p;
    }

    // carve the staircase into dyadic prefix pieces, one pattern per bit
    std::vector<BlockyPattern> patterns;
    for (int k = 0; k <= g.n; ++k) {
        std::map<int, std::vector<int>> by_base; // dyadic interval start -> columns
        for (int y = 0; y < N; ++y)
            if (prefix[y] & (1 << k)) by_base[(prefix[y] >> (k + 1)) << (k + 1)].push_back(y);
        if (by_base.empty()) continue;

        BlockyPattern pat(N, N);
        for (auto& [base, cols] : by_base) {
            BlockyPattern::Block blk;
            for (int p = base; p < base + (1 << k); ++p) blk.rows.push_back(row_order[p]);
            blk.cols = cols;
            pat.blocks.push_back(std::move(blk));
        }
        pat.canonicalize();
        patterns.push_back(std::move(pat));
    }
    return patterns;
}

namespace {

std::optional<SpikyTerm> masked_term(const BlockyPattern& pat, const std::vector<double>& ufull,
                                     const std::vector<double>& vfull) {
    bool nonzero = false;
    for (const auto& b : pat.blocks) {
        for (int i : b.rows)
            for (int j : b.cols)
                if (ufull[i] * vfull[j] != 0.0) nonzero = true;
        if (nonzero) break;
    }
    if (!nonzero) return std::nullopt;

    SpikyTerm t;
    t.pattern = pat;
    t.u.assign(ufull.size(), 0.0);
    t.v.assign(vfull.size(), 0.0);
    for (const auto& b : pat.blocks) {
        for (int i : b.rows) t.u[i] = ufull[i];
        for (int j : b.cols) t.v[j] = vfull[j];
    }
    return t;
}

} // namespace

Decomposition relu_to_spiky(const ReLUGate& g) {
    int N = 1 << g.n;
    Decomposition d;
    d.kind = DecompKind::SpikySum;
    d.nrows = N;
    d.ncols = N;
    d.algo = "relu-spiky";
    d.metadata["claimedBound"] = 3.0 * (g.n + 1);

    std::vector<double> a(N), b(N), ones(N, 1.0), alpha_vec(N, g.alpha);
    for (int x = 0; x < N; ++x) a[x] = dot_bits(g.w1, x);
    for (int y = 0; y < N; ++y) b[y] = dot_bits(g.w2, y);

    for (const auto& pat : threshold_to_blocky(g)) {
        if (auto t = masked_term(pat, a, ones)) d.spiky_terms.push_back(std::move(*t));
        if (auto t = masked_term(pat, ones, b)) d.spiky_terms.push_back(std::move(*t));
        if (auto t = masked_term(pat, ones, alpha_vec)) d.spiky_terms.push_back(std::move(*t));
    }
    d.metadata["termCount"] = d.term_count();
    return d;
}

Decomposition circuit_to_spiky(const std::vector<ReLUGate>& gates) {
    return circuit_to_spiky(gates, std::vector<double>(gates.size(), 1.0));
}

Decomposition circuit_to_spiky(const std::vector<ReLUGate>& gates,
                               const std::vector<double>& weights) {
    if (gates.empty()) throw std::invalid_argument("circuit_to_spiky: no gates");
    if (weights.size() != gates.size())
        throw std::invalid_argument("circuit_to_spiky: weight count mismatch");
    for (const auto& g : gates)
        if (g.n != gates[0].n) throw std::invalid_argument("circuit_to_spiky: mismatched n");

    Decomposition out = scale_decomposition(relu_to_spiky(gates[0]), weights[0]);
    for (std::size_t i = 1; i < gates.size(); ++i)
        out = concat_decompositions(out, scale_decomposition(relu_to_spiky(gates[i]), weights[i]));
    out.algo = "circuit-spiky";
    out.metadata["claimedBound"] = 3.0 * (gates[0].n + 1) * double(gates.size());
    out.metadata["termCount"] = out.term_count();
    return out;
}

// ---------------------------------------------------------------------------
// brcompl

double brcompl_cap(int r, int t) {
    double cap = std::pow(2.0, r);
    for (int i = 1; i <= t; ++i) cap = double(r) * i * cap + std::pow(2.0, r);
    return cap;
}

namespace {

constexpr double kBoolTol = 1e-9;

bool near(double a, double b) { return std::fabs(a - b) <= kBoolTol; }

// pivot columns of L restricted to (rows, cols), as indices into cols
std::vector<int> basis_columns(const Matrix& L, const std::vector<int>& rows,
                               const std::vector<int>& cols) {
    int nr = int(rows.size()), nc = int(cols.size());
    std::vector<double> a(std::size_t(nr) * nc);
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) a[std::size_t(i) * nc + j] = L(rows[i], cols[j]);

    std::vector<int> basis;
    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        int piv = -1;
        double best = 1e-9;
        for (int i = r; i < nr; ++i)
            if (std::fabs(a[std::size_t(i) * nc + c]) > best) {
                best = std::fabs(a[std::size_t(i) * nc + c]);
                piv = i;
            }
        if (piv < 0) continue;
        for (int j = 0; j < nc; ++j) std::swap(a[std::size_t(r) * nc + j], a[std::size_t(piv) * nc + j]);
        double p = a[std::size_t(r) * nc + c];
        for (int i = 0; i < nr; ++i) {
            if (i == r) continue;
            double f = a[std::size_t(i) * nc + c] / p;
            if (f == 0.0) continue;
            for (int j = c; j < nc; ++j) a[std::size_t(i) * nc + j] -= f * a[std::size_t(r) * nc + j];
        }
        basis.push_back(c);
        ++r;
    }
    return basis;
}

int find_block(const BlockyPattern& p, int i, int j) {
    for (std::size_t b = 0; b < p.blocks.size(); ++b)
        if (std::binary_search(p.blocks[b].rows.begin(), p.blocks[b].rows.end(), i) &&
            std::binary_search(p.blocks[b].cols.begin(), p.blocks[b].cols.end(), j))
            return int(b);
    return -1;
}

// one single-block +1 term per distinct-row group, covering the 1-columns
void emit_row_groups(const Matrix& L, const std::vector<int>& rows, const std::vector<int>& cols,
                     std::vector<BlockyTerm>& out) {
    std::map<std::vector<double>, std::vector<int>> groups;
    for (int x : rows) {
        std::vector<double> key;
        key.reserve(cols.size());
        for (int c : cols) key.push_back(L(x, c));
        groups[std::move(key)].push_back(x);
    }
    for (auto& [key, group_rows] : groups) {
        std::vector<int> one_cols;
        for (std::size_t t = 0; t < cols.size(); ++t)
            if (near(key[t], 1.0)) one_cols.push_back(cols[t]);
        if (one_cols.empty()) continue;
        BlockyTerm term;
        term.coeff = 1.0;
        term.pattern = BlockyPattern(L.nrows(), L.ncols());
        term.pattern.blocks.push_back({group_rows, one_cols});
        out.push_back(std::move(term));
    }
}

void brcompl_rec(const Matrix& L, const std::vector<int>& rows, const std::vector<int>& cols,
                 const std::vector<const BlockyPattern*>& covers, std::vector<BlockyTerm>& out) {
    if (rows.empty() || cols.empty()) return;
    std::vector<int> basis_local = basis_columns(L, rows, cols);
    std::vector<int> basis;
    for (int c : basis_local) basis.push_back(cols[c]);

    // spoiled rows: some basis entry falls inside a cover block; class key is
    // (cover index, block index) of the first hit
    std::map<std::pair<int, int>, std::vector<int>> classes;
    std::vector<int> unspoiled;
    for (int x : rows) {
        std::pair<int, int> hit{-1, -1};
        for (std::size_t ci = 0; ci < covers.size() && hit.first < 0; ++ci)
            for (int c : basis) {
                int b = find_block(*covers[ci], x, c);
                if (b >= 0) {
                    hit = {int(ci), b};
                    break;
                }
            }
        if (hit.first < 0)
            unspoiled.push_back(x);
        else
            classes[hit].push_back(x);
    }

    emit_row_groups(L, unspoiled, cols, out);

    for (auto& [key, class_rows] : classes) {
        const BlockyPattern& cover = *covers[key.first];
        const auto& block = cover.blocks[key.second];
        std::vector<int> reduced_cols;
        for (int c : cols)
            if (!std::binary_search(block.cols.begin(), block.cols.end(), c))
                reduced_cols.push_back(c);
        std::vector<const BlockyPattern*> reduced_covers;
        for (std::size_t ci = 0; ci < covers.size(); ++ci)
            if (int(ci) != key.first) reduced_covers.push_back(covers[ci]);
        brcompl_rec(L, class_rows, reduced_cols, reduced_covers, out);
    }
}

} // namespace

std::vector<BlockyTerm> brcompl(const Matrix& L, const std::vector<BlockyPattern>& covers) {
    if (L.field() != Field::Real) throw std::invalid_argument("brcompl: L must be real");
    int t = int(covers.size());
    if (t > 4) throw std::invalid_argument("brcompl: too many covers");
    int r = rank(L, 1e-9);
    if (r > 4) throw std::invalid_argument("brcompl: rank exceeds cap");
    for (const auto& p : covers) {
        p.validate();
        if (p.nrows != L.nrows() || p.ncols != L.ncols())
            throw std::invalid_argument("brcompl: cover dimension mismatch");
    }

    // L must be Boolean off the union of the covers
    std::vector<std::uint8_t> covered(std::size_t(L.nrows()) * L.ncols(), 0);
    for (const auto& p : covers) {
        auto ind = p.indicator();
        for (std::size_t i = 0; i < ind.size(); ++i) covered[i] |= ind[i];
    }
    for (int i = 0; i < L.nrows(); ++i)
        for (int j = 0; j < L.ncols(); ++j)
            if (!covered[std::size_t(i) * L.ncols() + j]) {
                double v = L(i, j);
                if (!near(v, 0.0) && !near(v, 1.0))
                    throw std::invalid_argument("brcompl: L is not Boolean off the covers");
            }

    std::vector<int> rows(L.nrows()), cols(L.ncols());
    for (int i = 0; i < L.nrows(); ++i) rows[i] = i;
    for (int j = 0; j < L.ncols(); ++j) cols[j] = j;
    std::vector<const BlockyPattern*> cover_ptrs;
    for (const auto& p : covers) cover_ptrs.push_back(&p);

    std::vector<BlockyTerm> out;
    brcompl_rec(L, rows, cols, cover_ptrs, out);
    assert(double(out.size()) <= brcompl_cap(std::max(r, 1), t));
    return out;
}

// ---------------------------------------------------------------------------
// spiky_to_blocky

namespace {

std::vector<std::uint8_t> value_support(const SpikyTerm& t, int nrows, int ncols) {
    std::vector<std::uint8_t> sup(std::size_t(nrows) * ncols, 0);
    for (const auto& b : t.pattern.blocks)
        for (int i : b.rows)
            for (int j : b.cols)
                if (t.u[i] * t.v[j] != 0.0) sup[std::size_t(i) * ncols + j] = 1;
    return sup;
}

} // namespace

Decomposition spiky_to_blocky(const Matrix& m, const Decomposition& spiky_sum) {
    if (m.field() != Field::Real || !m.is_boolean())
        throw std::invalid_argument("spiky_to_blocky: target must be a Boolean real matrix");
    if (spiky_sum.kind != DecompKind::SpikySum)
        throw std::invalid_argument("spiky_to_blocky: expected a SpikySum");
    int k = spiky_sum.term_count();
    if (k < 1 || k > 4) throw std::invalid_argument("spiky_to_blocky: term count must be 1..4");
    if (!verify_decomposition(spiky_sum, m, 1e-9).ok)
        throw std::invalid_argument("spiky_to_blocky: decomposition does not verify");

    int nr = m.nrows(), nc = m.ncols();
    std::vector<std::vector<std::uint8_t>> supports;
    std::vector<BlockyPattern> support_patterns;
    for (const auto& t : spiky_sum.spiky_terms) {
        supports.push_back(value_support(t, nr, nc));
        auto pat = pattern_from_support(supports.back(), nr, nc);
        if (!pat) throw std::logic_error("spiky term support must be blocky");
        support_patterns.push_back(std::move(*pat));
    }

    Decomposition out;
    out.kind = DecompKind::BlockySum;
    out.nrows = nr;
    out.ncols = nc;
    out.algo = "spiky-blocky";
    out.metadata["k"] = k;
    out.metadata["claimedBound"] =
        std::pow(2.0, k) * brcompl_cap(k, k) * std::pow(2.0, k);

    for (std::uint32_t type = 1; type < (1u << k); ++type) {
        std::vector<int> P, Z;
        for (int i = 0; i < k; ++i) (type & (1u << i) ? P : Z).push_back(i);

        // intersection of the active supports
        std::vector<std::uint8_t> inter(std::size_t(nr) * nc, 1);
        for (int i : P)
            for (std::size_t c = 0; c < inter.size(); ++c) inter[c] &= supports[i][c];
        bool any = false;
        for (auto v : inter) any |= v != 0;
        if (!any) continue;

        auto inter_pat = pattern_from_support(inter, nr, nc);
        if (!inter_pat) throw std::logic_error("support intersection must be blocky");

        // per-coefficient pattern slots, merged across the disjoint blocks
        std::map<double, std::vector<BlockyPattern>> slots;

        for (const auto& block : inter_pat->blocks) {
            const auto& RD = block.rows;
            const auto& CD = block.cols;
            int bnr = int(RD.size()), bnc = int(CD.size());

            // local sum of the active terms and local covers from the rest
            Matrix L(bnr, bnc, Field::Real);
            for (int a = 0; a < bnr; ++a)
                for (int b = 0; b < bnc; ++b) {
                    double s = 0.0;
                    for (int i : P) s += spiky_sum.spiky_terms[i].value(RD[a], CD[b]);
                    L.at(a, b) = s;
                }
            std::vector<BlockyPattern> covers_local;
            for (int i : Z) {
                auto rp = restrict_pattern(support_patterns[i], RD, CD);
                if (!rp.empty()) covers_local.push_back(std::move(rp));
            }

            // skip blocks where this type contributes nothing
            std::vector<std::uint8_t> cover_ind(std::size_t(bnr) * bnc, 0);
            for (const auto& p : covers_local) {
                auto ind = p.indicator();
                for (std::size_t c = 0; c < ind.size(); ++c) cover_ind[c] |= ind[c];
            }
            bool live = false;
            for (int a = 0; a < bnr && !live; ++a)
                for (int b = 0; b < bnc; ++b)
                    if (!cover_ind[std::size_t(a) * bnc + b] && m(RD[a], CD[b]) != 0.0) {
                        live = true;
                        break;
                    }
            if (!live) continue;

            auto agree_terms = brcompl(L, covers_local);

            // signed indicator of the type cells: full block minus the cover
            // union, by inclusion-exclusion
            std::vector<std::pair<BlockyPattern, double>> mask_terms;
            {
                BlockyPattern full(bnr, bnc);
                BlockyPattern::Block fb;
                for (int a = 0; a < bnr; ++a) fb.rows.push_back(a);
                for (int b = 0; b < bnc; ++b) fb.cols.push_back(b);
                full.blocks.push_back(std::move(fb));
                mask_terms.push_back({std::move(full), 1.0});
            }
            int z = int(covers_local.size());
            for (std::uint32_t sub = 1; sub < (1u << z); ++sub) {
                std::optional<BlockyPattern> ip;
                for (int i = 0; i < z && (!ip || !ip->empty()); ++i)
                    if (sub & (1u << i))
                        ip = ip ? intersect_patterns(*ip, covers_local[i]) : covers_local[i];
                if (ip->empty()) continue;
                mask_terms.push_back({std::move(*ip), std::popcount(sub) % 2 ? -1.0 : 1.0});
            }

            // expand (sum of agree terms) * (signed mask), coalescing equal
            // patterns within this block
            std::map<std::vector<std::uint8_t>, std::pair<BlockyPattern, double>> coalesced;
            for (const auto& at : agree_terms)
                for (const auto& [mp, mc] : mask_terms) {
                    BlockyPattern prod = intersect_patterns(at.pattern, mp);
                    if (prod.empty()) continue;
                    auto key = prod.indicator();
                    auto it = coalesced.find(key);
                    if (it == coalesced.end())
                        coalesced.emplace(std::move(key), std::make_pair(std::move(prod), at.coeff * mc));
                    else
                        it->second.second += at.coeff * mc;
                }

            // lift to global coordinates and file into per-coefficient slots
            std::map<double, int> used;
            for (auto& [key, pc] : coalesced) {
                if (pc.second == 0.0) continue;
                BlockyPattern lifted(nr, nc);
                for (const auto& pb : pc.first.blocks) {
                    BlockyPattern::Block gb;
                    for (int a : pb.rows) gb.rows.push_back(RD[a]);
                    for (int b : pb.cols) gb.cols.push_back(CD[b]);
                    lifted.blocks.push_back(std::move(gb));
                }
                lifted.canonicalize();
                auto& slot_list = slots[pc.second];
                int idx = used[pc.second]++;
                if (idx >= int(slot_list.size())) slot_list.push_back(std::move(lifted));
                else {
                    for (auto& gb : lifted.blocks) slot_list[idx].blocks.push_back(std::move(gb));
                    slot_list[idx].canonicalize();
                }
            }
        }

        for (auto& [coeff, patterns] : slots)
            for (auto& p : patterns) out.blocky_terms.push_back({std::move(p), coeff});
    }

    out.metadata["termCount"] = out.term_count();
    return out;
}

// ---------------------------------------------------------------------------
// find_one_rectangle

namespace {

using Bits = std::vector<std::uint64_t>;

int bits_count(const Bits& b) {
    int c = 0;
    for (auto w : b) c += std::popcount(w);
    return c;
}

Bits bits_and(const Bits& a, const Bits& b) {
    Bits out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] & b[i];
    return out;
}

std::vector<int> bits_to_cols(const Bits& b) {
    std::vector<int> cols;
    for (std::size_t w = 0; w < b.size(); ++w)
        for (std::uint64_t x = b[w]; x; x &= x - 1)
            cols.push_back(int(w * 64 + std::countr_zero(x)));
    return cols;
}

} // namespace

std::optional<std::pair<std::vector<int>, std::vector<int>>>
find_one_rectangle(const Matrix& m, int k, int l) {
    if (k < 1 || l < 1) throw std::invalid_argument("find_one_rectangle: k, l must be >= 1");
    if (!m.is_boolean()) throw std::invalid_argument("find_one_rectangle: matrix must be Boolean");
    int nr = m.nrows(), nc = m.ncols();
    if (k > nr || l > nc) return std::nullopt;

    int words = (nc + 63) / 64;
    std::vector<Bits> rows(nr, Bits(words, 0));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j)
            if (m(i, j) != 0.0) rows[i][j / 64] |= 1ULL << (j % 64);

    std::vector<int> order(nr);
    for (int i = 0; i < nr; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return bits_count(rows[a]) > bits_count(rows[b]); });

    auto result = [&](std::vector<int> chosen, const Bits& common)
        -> std::optional<std::pair<std::vector<int>, std::vector<int>>> {
        std::sort(chosen.begin(), chosen.end());
        return std::make_pair(std::move(chosen), bits_to_cols(common));
    };

    if (k <= 3) {
        // complete enumeration with prefix pruning
        std::vector<int> chosen;
        std::vector<Bits> stack;
        auto rec = [&](auto&& self, int start) -> std::optional<std::pair<std::vector<int>, std::vector<int>>> {
            if (int(chosen.size()) == k) {
                if (bits_count(stack.back()) >= l) return result(chosen, stack.back());
                return std::nullopt;
            }
            for (int t = start; t < nr; ++t) {
                int row = order[t];
                Bits next = stack.empty() ? rows[row] : bits_and(stack.back(), rows[row]);
                if (bits_count(next) < l) continue;
                chosen.push_back(row);
                stack.push_back(std::move(next));
                if (auto res = self(self, t + 1)) return res;
                stack.pop_back();
                chosen.pop_back();
            }
            return std::nullopt;
        };
        return rec(rec, 0);
    }

    // heuristic beyond k = 3: greedy completion from each seed row
    for (int seed = 0; seed < nr; ++seed) {
        std::vector<int> chosen{order[seed]};
        Bits common = rows[order[seed]];
        std::vector<bool> used(nr, false);
        used[order[seed]] = true;
        while (int(chosen.size()) < k) {
            int best = -1, best_count = l - 1;
            for (int i = 0; i < nr; ++i) {
                if (used[i]) continue;
                int c = bits_count(bits_and(common, rows[i]));
                if (c > best_count) {
                    best_count = c;
                    best = i;
                }
            }
            if (best < 0) break;
            used[best] = true;
            chosen.push_back(best);
            common = bits_and(common, rows[best]);
        }
        if (int(chosen.size()) == k && bits_count(common) >= l) return result(chosen, common);
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// sparse_boolean_to_blocky

namespace {

struct PartitionBuilder {
    int nr, nc;
    std::vector<BlockyPattern> out;

    explicit PartitionBuilder(int nrows, int ncols) : nr(nrows), nc(ncols) {}

    static int budget(int m) { return m <= 0 ? 0 : 2 * ceil_sqrt(m); }

    int count(const std::vector<std::uint8_t>& w) const {
        int c = 0;
        for (auto v : w) c += v;
        return c;
    }

    int row_weight(const std::vector<std::uint8_t>& w, int i) const {
        int c = 0;
        for (int j = 0; j < nc; ++j) c += w[std::size_t(i) * nc + j];
        return c;
    }

    int col_weight(const std::vector<std::uint8_t>& w, int j) const {
        int c = 0;
        for (int i = 0; i < nr; ++i) c += w[std::size_t(i) * nc + j];
        return c;
    }

    int nonzero_rows(const std::vector<std::uint8_t>& w) const {
        int c = 0;
        for (int i = 0; i < nr; ++i)
            if (row_weight(w, i) > 0) ++c;
        return c;
    }

    int nonzero_cols(const std::vector<std::uint8_t>& w) const {
        int c = 0;
        for (int j = 0; j < nc; ++j)
            if (col_weight(w, j) > 0) ++c;
        return c;
    }

    void emit(std::vector<std::uint8_t>& w, BlockyPattern pat) {
        for (const auto& b : pat.blocks)
            for (int i : b.rows)
                for (int j : b.cols) w[std::size_t(i) * nc + j] = 0;
        pat.canonicalize();
        out.push_back(std::move(pat));
    }

    BlockyPattern single_row_pattern(const std::vector<std::uint8_t>& w, int i) const {
        BlockyPattern pat(nr, nc);
        BlockyPattern::Block b;
        b.rows.push_back(i);
        for (int j = 0; j < nc; ++j)
            if (w[std::size_t(i) * nc + j]) b.cols.push_back(j);
        if (!b.cols.empty()) pat.blocks.push_back(std::move(b));
        return pat;
    }

    BlockyPattern single_col_pattern(const std::vector<std::uint8_t>& w, int j) const {
        BlockyPattern pat(nr, nc);
        BlockyPattern::Block b;
        b.cols.push_back(j);
        for (int i = 0; i < nr; ++i)
            if (w[std::size_t(i) * nc + j]) b.rows.push_back(i);
        if (!b.rows.empty()) pat.blocks.push_back(std::move(b));
        return pat;
    }

    // first-fit merge of single-block pieces into disjoint patterns
    std::vector<BlockyPattern> merge_blocks(std::vector<BlockyPattern::Block> blocks) const {
        std::vector<BlockyPattern> merged;
        std::vector<std::vector<std::uint8_t>> used_rows, used_cols;
        for (auto& blk : blocks) {
            bool placed = false;
            for (std::size_t p = 0; p < merged.size() && !placed; ++p) {
                bool conflict = false;
                for (int i : blk.rows)
                    if (used_rows[p][i]) conflict = true;
                for (int j : blk.cols)
                    if (used_cols[p][j]) conflict = true;
                if (conflict) continue;
                for (int i : blk.rows) used_rows[p][i] = 1;
                for (int j : blk.cols) used_cols[p][j] = 1;
                merged[p].blocks.push_back(blk);
                placed = true;
            }
            if (!placed) {
                merged.emplace_back(nr, nc);
                used_rows.emplace_back(nr, 0);
                used_cols.emplace_back(nc, 0);
                for (int i : blk.rows) used_rows.back()[i] = 1;
                for (int j : blk.cols) used_cols.back()[j] = 1;
                merged.back().blocks.push_back(blk);
            }
        }
        return merged;
    }

    void fallback_sweeps(std::vector<std::uint8_t>& w) {
        int mw = count(w);
        if (mw == 0) return;
        double threshold = std::sqrt(double(mw));
        for (int j = 0; j < nc; ++j)
            if (double(col_weight(w, j)) > threshold) emit(w, single_col_pattern(w, j));
        while (count(w) > 0) {
            std::map<int, std::vector<int>> by_row;
            for (int j = 0; j < nc; ++j)
                for (int i = 0; i < nr; ++i)
                    if (w[std::size_t(i) * nc + j]) {
                        by_row[i].push_back(j);
                        break;
                    }
            BlockyPattern pat(nr, nc);
            for (auto& [i, cols] : by_row) pat.blocks.push_back({{i}, cols});
            emit(w, std::move(pat));
        }
    }

    void row_type_terminal(std::vector<std::uint8_t>& w) {
        std::map<std::vector<std::uint8_t>, std::vector<int>> types;
        for (int i = 0; i < nr; ++i) {
            if (row_weight(w, i) == 0) continue;
            std::vector<std::uint8_t> key(w.begin() + std::size_t(i) * nc,
                                          w.begin() + std::size_t(i + 1) * nc);
            types[std::move(key)].push_back(i);
        }
        std::vector<BlockyPattern::Block> blocks;
        for (auto& [key, rows] : types) {
            BlockyPattern::Block b;
            b.rows = rows;
            for (int j = 0; j < nc; ++j)
                if (key[j]) b.cols.push_back(j);
            blocks.push_back(std::move(b));
        }
        for (auto& pat : merge_blocks(std::move(blocks))) emit(w, std::move(pat));
    }

    Matrix grid_to_matrix(const std::vector<std::uint8_t>& w) const {
        Matrix m(nr, nc, Field::Real);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j)
                if (w[std::size_t(i) * nc + j]) m.at(i, j) = 1.0;
        return m;
    }

    void decompose(std::vector<std::uint8_t> w, int depth) {
        int m0 = count(w);
        if (m0 == 0) return;
        if (depth > 16) {
            fallback_sweeps(w);
            return;
        }
        double sqm = std::sqrt(double(m0));
        double logm = std::log2(double(std::max(m0, 2)));

        // strip the densest line while a dimension is oversized; every strip
        // must pay for itself against the 2*ceil(sqrt(m)) budget
        while (double(nonzero_rows(w)) > sqm * logm || double(nonzero_cols(w)) > sqm * logm) {
            int best_col = -1, best_cw = 0, best_row = -1, best_rw = 0;
            for (int j = 0; j < nc; ++j)
                if (col_weight(w, j) > best_cw) {
                    best_cw = col_weight(w, j);
                    best_col = j;
                }
            for (int i = 0; i < nr; ++i)
                if (row_weight(w, i) > best_rw) {
                    best_rw = row_weight(w, i);
                    best_row = i;
                }
            int mw = count(w);
            int weight = std::max(best_cw, best_rw);
            if (weight == 0 || budget(mw) - budget(mw - weight) < 1) break;
            if (best_cw >= best_rw)
                emit(w, single_col_pattern(w, best_col));
            else
                emit(w, single_row_pattern(w, best_row));
        }

        // rectangle extraction rounds; each round halves the column count or
        // splits off spoiled rows plus a sparse tail
        int rounds = int(std::ceil(2.0 * std::log2(std::max(2.0, logm))));
        int k_param = std::max(1, int(std::log2(double(std::max(m0, 2))) /
                                      (100.0 * std::max(1.0, std::log2(std::max(2.0, logm))))));
        int l_param = std::max(1, int(std::pow(double(m0), 0.25)));
        double guard = double(m0) / std::pow(logm, 4.0);

        for (int round = 0; round < rounds; ++round) {
            int mw = count(w);
            if (mw == 0) return;

            std::vector<std::uint8_t> row_masked(nr, 0), col_masked(nc, 0);
            std::vector<BlockyPattern::Block> rects;
            while (true) {
                // remaining submatrix below/right of the extracted staircase
                std::vector<int> live_rows, live_cols;
                for (int i = 0; i < nr; ++i)
                    if (!row_masked[i]) live_rows.push_back(i);
                for (int j = 0; j < nc; ++j)
                    if (!col_masked[j]) live_cols.push_back(j);
                if (int(live_rows.size()) < k_param || int(live_cols.size()) < l_param) break;

                Matrix sub(int(live_rows.size()), int(live_cols.size()), Field::Real);
                int live_count = 0;
                for (std::size_t a = 0; a < live_rows.size(); ++a)
                    for (std::size_t b = 0; b < live_cols.size(); ++b)
                        if (w[std::size_t(live_rows[a]) * nc + live_cols[b]]) {
                            sub.at(int(a), int(b)) = 1.0;
                            ++live_count;
                        }
                if (double(live_count) < guard || live_count == 0) break;

                auto rect = find_one_rectangle(sub, k_param, l_param);
                if (!rect) break;

                // expand to a maximal all-ones rectangle inside the live region
                std::vector<int> cols_local = rect->second;
                std::vector<int> rows_local;
                for (std::size_t a = 0; a < live_rows.size(); ++a) {
                    bool all = true;
                    for (int b : cols_local)
                        if (sub(int(a), b) == 0.0) {
                            all = false;
                            break;
                        }
                    if (all) rows_local.push_back(int(a));
                }
                std::vector<int> cols_ext;
                for (std::size_t b = 0; b < live_cols.size(); ++b) {
                    bool all = true;
                    for (int a : rows_local)
                        if (sub(a, int(b)) == 0.0) {
                            all = false;
                            break;
                        }
                    if (all) cols_ext.push_back(int(b));
                }

                BlockyPattern::Block blk;
                for (int a : rows_local) blk.rows.push_back(live_rows[a]);
                for (int b : cols_ext) blk.cols.push_back(live_cols[b]);
                for (int i : blk.rows) row_masked[i] = 1;
                for (int j : blk.cols) col_masked[j] = 1;
                rects.push_back(std::move(blk));
            }

            if (rects.empty()) break;
            int t_found = int(rects.size());
            int extracted_cols = 0;
            for (const auto& r : rects) extracted_cols += int(r.cols.size());
            int ct = nonzero_cols(w);

            if (extracted_cols * 2 >= ct) {
                BlockyPattern pat(nr, nc);
                pat.blocks = rects;
                int removed = pat.cell_count();
                if (budget(mw) - budget(mw - removed) < 1) break;
                emit(w, std::move(pat));
                (void)t_found;
                continue;
            }

            // spoiled rows + sparse tail; the rest of the matrix keeps only
            // the extracted columns and is at most half as wide
            std::vector<BlockyPattern::Block> spoiled_blocks;
            int spoiled_cells = 0;
            for (int i = 0; i < nr; ++i) {
                if (!row_masked[i] || row_weight(w, i) == 0) continue;
                BlockyPattern::Block b;
                b.rows.push_back(i);
                for (int j = 0; j < nc; ++j)
                    if (w[std::size_t(i) * nc + j]) b.cols.push_back(j);
                spoiled_cells += int(b.cols.size());
                spoiled_blocks.push_back(std::move(b));
            }
            auto spoiled_patterns = merge_blocks(spoiled_blocks);

            int tail_cells = 0;
            for (int i = 0; i < nr; ++i) {
                if (row_masked[i]) continue;
                for (int j = 0; j < nc; ++j)
                    if (!col_masked[j] && w[std::size_t(i) * nc + j]) ++tail_cells;
            }
            int remaining = mw - spoiled_cells - tail_cells;
            int cost = int(spoiled_patterns.size()) + budget(tail_cells);
            if (budget(mw) - budget(remaining) < cost) break;

            for (auto& pat : spoiled_patterns) emit(w, std::move(pat));
            std::vector<std::uint8_t> tail(std::size_t(nr) * nc, 0);
            for (int i = 0; i < nr; ++i) {
                if (row_masked[i]) continue;
                for (int j = 0; j < nc; ++j)
                    if (!col_masked[j] && w[std::size_t(i) * nc + j]) {
                        tail[std::size_t(i) * nc + j] = 1;
                        w[std::size_t(i) * nc + j] = 0;
                    }
            }
            decompose(std::move(tail), depth + 1);
        }

        int mw = count(w);
        if (mw == 0) return;
        int dim_cap = ceil_sqrt(mw);
        if (nonzero_rows(w) <= dim_cap && nonzero_cols(w) <= dim_cap)
            row_type_terminal(w);
        else
            fallback_sweeps(w);
    }
};

} // namespace

Decomposition sparse_boolean_to_blocky(const Matrix& m) {
    if (!m.is_boolean()) throw std::invalid_argument("sparse_boolean_to_blocky: matrix must be Boolean");
    int total = sparsity(m);

    PartitionBuilder builder(m.nrows(), m.ncols());
    std::vector<std::uint8_t> w(std::size_t(m.nrows()) * m.ncols(), 0);
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j)
            if (m(i, j) != 0.0) w[std::size_t(i) * m.ncols() + j] = 1;
    builder.decompose(std::move(w), 0);

    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = m.nrows();
    d.ncols = m.ncols();
    d.field = m.field();
    d.algo = "sparse-boolean-blocky";
    d.metadata["claimedBound"] = 2.0 * ceil_sqrt(total);
    for (auto& pat : builder.out) d.blocky_terms.push_back({std::move(pat), 1.0});
    assert(d.term_count() <= 2 * ceil_sqrt(total));
    d.metadata["termCount"] = d.term_count();
    return d;
}

// ---------------------------------------------------------------------------
// sign_hd1

Decomposition sign_hd1(int n) {
    if (n < 1 || n > 12 || (n & (n - 1)) != 0)
        throw std::invalid_argument("sign_hd1: n must be a power of 2, at most 12");
    int k = 0;
    while ((1 << k) < n) ++k; // k = log2(n)
    int N = 1 << n;

    Decomposition d;
    d.kind = DecompKind::SignSum;
    d.nrows = N;
    d.ncols = N;
    d.algo = "sign-hd1";

    // one equality matrix per coordinate class: positions t whose bit i of t
    // equals j; entries agree iff x and y coincide on the whole class
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < 2; ++j) {
            int pos_mask = 0;
            for (int t = 0; t < n; ++t)
                if (((t >> i) & 1) == j) pos_mask |= 1 << t;
            std::map<int, std::vector<int>> groups;
            for (int x = 0; x < N; ++x) groups[x & pos_mask].push_back(x);

            BlockyTerm term;
            term.coeff = 1.0;
            term.pattern = BlockyPattern(N, N);
            for (auto& [key, members] : groups) term.pattern.blocks.push_back({members, members});
            term.pattern.canonicalize();
            d.blocky_terms.push_back(std::move(term));
        }

    BlockyTerm ident;
    ident.coeff = -(double(k) + 1.0);
    ident.pattern = BlockyPattern(N, N);
    for (int x = 0; x < N; ++x) ident.pattern.blocks.push_back({{x}, {x}});
    d.blocky_terms.push_back(std::move(ident));

    BlockyTerm ones;
    ones.coeff = 0.5 - double(k);
    ones.pattern = BlockyPattern(N, N);
    BlockyPattern::Block full;
    for (int x = 0; x < N; ++x) {
        full.rows.push_back(x);
        full.cols.push_back(x);
    }
    ones.pattern.blocks.push_back(std::move(full));
    d.blocky_terms.push_back(std::move(ones));

    // both accountings: equality terms merged into the all-ones coefficient,
    // or each class matrix expanded as J-minus-equality
    d.metadata["termCount"] = 2.0 * k + 2.0;
    d.metadata["termCountExpanded"] = 4.0 * k + 2.0;
    d.metadata["claimedBound"] = 2.0 * k + 2.0;
    return d;
}

// ---------------------------------------------------------------------------
// greedy_code / approx_hd1

std::optional<Code> greedy_code(int count, int length, double distance) {
    if (count < 1 || length < 1 || length > 62)
        throw std::invalid_argument("greedy_code: bad parameters");
    Code code;
    code.count = count;
    code.length = length;
    for (std::uint64_t w = 0; w < (1ULL << length) && int(code.words.size()) < count; ++w) {
        bool ok = true;
        for (std::uint64_t kept : code.words)
            if (double(std::popcount(w ^ kept)) < distance) {
                ok = false;
                break;
            }
        if (ok) code.words.push_back(w);
    }
    if (int(code.words.size()) < count) return std::nullopt;

    code.min_distance = length;
    for (std::size_t a = 0; a < code.words.size(); ++a)
        for (std::size_t b = a + 1; b < code.words.size(); ++b)
            code.min_distance =
                std::min(code.min_distance, std::popcount(code.words[a] ^ code.words[b]));
    return code;
}

ApproxHd1Result approx_hd1(int n, int K) {
    if (n < 2 || n > 12 || (n & (n - 1)) != 0)
        throw std::invalid_argument("approx_hd1: n must be a power of 2 in [2, 12]");
    if (K < 1) throw std::invalid_argument("approx_hd1: K must be >= 1");
    int g = 0;
    while ((1 << g) < n) ++g;
    int L = K * g;
    auto code = greedy_code(n, L, double(L) / 5.0);
    if (!code) throw std::runtime_error("approx_hd1: code construction failed (K too small)");
    int d_code = code->min_distance;

    int N = 1 << n;
    double denom = 2.0 * L;
    double ones_coeff = 2.0 * L + d_code / 2.0;

    Matrix approx(N, N);
    double max_err = 0.0;
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) {
            int diff = x ^ y;
            int mp = 0;
            if (diff != 0) {
                for (int i = 0; i < L; ++i)
                    for (int j = 0; j < 2; ++j) {
                        bool hit = false;
                        for (int t = 0; t < n; ++t)
                            if (((diff >> t) & 1) && int((code->words[t] >> i) & 1) == j) {
                                hit = true;
                                break;
                            }
                        if (hit) ++mp;
                    }
            }
            double val = (-double(mp) - (x == y ? ones_coeff : 0.0) + ones_coeff) / denom;
            approx.at(x, y) = val;
            double want = std::popcount(unsigned(diff)) == 1 ? 1.0 : 0.0;
            max_err = std::max(max_err, std::fabs(want - val));
        }

    ApproxHd1Result res;
    res.approx = std::move(approx);
    res.epsilon = max_err;
    res.k_param = K;
    res.code_distance = d_code;
    res.bound = 0.5 - 1.0 / (10.0 * K);
    return res;
}

int approx_hd1_min_feasible_k(int n) {
    int g = 0;
    while ((1 << g) < n) ++g;
    for (int K = 1; K <= 16; ++K) {
        int L = K * g;
        auto code = greedy_code(n, L, double(L) / 5.0);
        if (!code) continue;
        // the construction's error is 1/2 - d/(4L); the bound needs d >= 2g/5
        if (5.0 * code->min_distance >= 2.0 * g) return K;
    }
    return 0;
}

// ---------------------------------------------------------------------------
// amplify_eval / poly_compose_blocky

double amplify_eval(double x, int k) {
    if (k < 2 || k > 200 || k % 2 != 0)
        throw std::invalid_argument("amplify_eval: k must be even in [2, 200]");
    double binom = 1.0; // C(k, 0)
    double sum = 0.0;
    for (int i = 0; i <= k; ++i) {
        if (i >= k / 2) {
            double term = binom * std::pow(x, i) * std::pow(1.0 - x, k - i);
            sum += term;
        }
        binom = binom * double(k - i) / double(i + 1);
    }
    return sum;
}

Decomposition poly_compose_blocky(const Decomposition& d, const std::vector<double>& coeffs) {
    if (d.kind != DecompKind::BlockySum || d.field != Field::Real)
        throw std::invalid_argument("poly_compose_blocky: expected a real BlockySum");
    if (coeffs.empty()) throw std::invalid_argument("poly_compose_blocky: empty polynomial");
    int deg = int(coeffs.size()) - 1;
    int br = int(d.blocky_terms.size());
    double size_est = double(deg) * std::pow(double(std::max(br, 1)), double(std::max(deg, 1)));
    if (size_est > 1e5) throw std::invalid_argument("poly_compose_blocky: size cap exceeded");

    Decomposition out;
    out.kind = DecompKind::BlockySum;
    out.nrows = d.nrows;
    out.ncols = d.ncols;
    out.algo = "poly-compose";

    if (coeffs[0] != 0.0) {
        BlockyPattern full(d.nrows, d.ncols);
        BlockyPattern::Block fb;
        for (int i = 0; i < d.nrows; ++i) fb.rows.push_back(i);
        for (int j = 0; j < d.ncols; ++j) fb.cols.push_back(j);
        full.blocks.push_back(std::move(fb));
        out.blocky_terms.push_back({std::move(full), coeffs[0]});
    }

    for (int dd = 1; dd <= deg; ++dd) {
        if (coeffs[dd] == 0.0) continue;
        std::vector<int> tuple(dd, 0);
        while (true) {
            std::optional<BlockyPattern> prod;
            double coeff = coeffs[dd];
            for (int t = 0; t < dd && (!prod || !prod->empty()); ++t) {
                const auto& term = d.blocky_terms[tuple[t]];
                coeff *= term.coeff;
                prod = prod ? intersect_patterns(*prod, term.pattern) : term.pattern;
            }
            if (!prod->empty() && coeff != 0.0)
                out.blocky_terms.push_back({std::move(*prod), coeff});

            int pos = dd - 1;
            while (pos >= 0 && tuple[pos] == br - 1) tuple[pos--] = 0;
            if (pos < 0) break;
            ++tuple[pos];
        }
    }
    out.metadata["termCount"] = out.term_count();
    return out;
}

Matrix apply_poly(const Matrix& m, const std::vector<double>& coeffs) {
    Matrix out(m.nrows(), m.ncols(), Field::Real);
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j) {
            double x = m(i, j), pw = 1.0, s = 0.0;
            for (double c : coeffs) {
                s += c * pw;
                pw *= x;
            }
            out.at(i, j) = s;
        }
    return out;
}

} // namespace spiky
