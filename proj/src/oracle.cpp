#include "spiky/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "spiky/core.hpp"
#include "spiky/util.hpp"

namespace spiky::oracle {

namespace {

void require_dims(const Matrix& m, int cap, const char* who) {
    if (m.nrows() < 1 || m.ncols() < 1 || m.nrows() > cap || m.ncols() > cap)
        throw std::invalid_argument(std::string(who) + ": dimensions exceed the hard cap");
}

// Constructive enumeration of blocky supports as bitmasks: blocks are added
// in increasing least-row order, so each support appears exactly once.
void enumerate_masks_rec(int nrows, int ncols, int min_row, std::uint64_t avail_rows,
                         std::uint64_t avail_cols, std::uint64_t cur,
                         std::vector<std::uint64_t>& out) {
    for (int r = min_row; r < nrows; ++r) {
        if (!(avail_rows & (1ULL << r))) continue;
        std::uint64_t rest = avail_rows & ~((2ULL << r) - 1); // rows above r
        std::uint64_t sub = 0;
        while (true) { // all subsets of rest, including empty
            std::uint64_t rows = sub | (1ULL << r);
            std::uint64_t tsub = avail_cols;
            while (tsub) { // all nonempty subsets of available columns
                std::uint64_t cells = 0;
                for (int i = 0; i < nrows; ++i)
                    if (rows & (1ULL << i))
                        for (int j = 0; j < ncols; ++j)
                            if (tsub & (1ULL << j)) cells |= 1ULL << (i * ncols + j);
                std::uint64_t next = cur | cells;
                out.push_back(next);
                enumerate_masks_rec(nrows, ncols, r + 1, avail_rows & ~rows,
                                    avail_cols & ~tsub, next, out);
                tsub = (tsub - 1) & avail_cols;
            }
            if (sub == rest) break;
            sub = (sub - rest) & rest; // next subset of rest
        }
    }
}

std::vector<std::uint64_t> enumerate_blocky_masks(int nrows, int ncols) {
    std::vector<std::uint64_t> out;
    enumerate_masks_rec(nrows, ncols, 0, (1ULL << nrows) - 1, (1ULL << ncols) - 1, 0, out);
    return out;
}

BlockyPattern pattern_from_mask(std::uint64_t mask, int nrows, int ncols) {
    std::vector<std::uint8_t> sup(std::size_t(nrows) * ncols, 0);
    for (int t = 0; t < nrows * ncols; ++t)
        if (mask & (1ULL << t)) sup[t] = 1;
    auto pat = pattern_from_support(sup, nrows, ncols);
    if (!pat) throw std::logic_error("enumerated mask is not blocky");
    return *pat;
}

std::uint64_t support_mask(const Matrix& m) {
    std::uint64_t mask = 0;
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j)
            if (m(i, j) != 0.0) mask |= 1ULL << (i * m.ncols() + j);
    return mask;
}

} // namespace

std::vector<BlockyPattern> enumerate_blocky_patterns(int nrows, int ncols) {
    if (nrows < 1 || ncols < 1 || nrows > 4 || ncols > 4)
        throw std::invalid_argument("enumerate_blocky_patterns: dimensions exceed the hard cap");
    std::vector<BlockyPattern> out;
    for (std::uint64_t mask : enumerate_blocky_masks(nrows, ncols))
        out.push_back(pattern_from_mask(mask, nrows, ncols));
    return out;
}

// ---------------------------------------------------------------------------
// exact blocky rank over the reals

namespace {

// least-squares fit of coefficients for a fixed pattern tuple; returns the
// max abs residual or a large value when the Gram system is degenerate
double fit_coeffs(const std::vector<std::uint64_t>& masks, const std::vector<int>& tuple,
                  const Matrix& m, std::vector<double>& alpha) {
    int r = int(tuple.size());
    int cells = m.nrows() * m.ncols();
    double gram[4][4] = {};
    double rhs[4] = {};
    for (int a = 0; a < r; ++a) {
        for (int b = 0; b < r; ++b)
            gram[a][b] = double(std::popcount(masks[tuple[a]] & masks[tuple[b]]));
        double s = 0.0;
        for (int t = 0; t < cells; ++t)
            if (masks[tuple[a]] & (1ULL << t)) s += m.data()[t];
        rhs[a] = s;
    }

    // Gaussian elimination with partial pivoting
    double a[4][5];
    for (int i = 0; i < r; ++i) {
        for (int j = 0; j < r; ++j) a[i][j] = gram[i][j];
        a[i][r] = rhs[i];
    }
    for (int c = 0; c < r; ++c) {
        int piv = c;
        for (int i = c + 1; i < r; ++i)
            if (std::fabs(a[i][c]) > std::fabs(a[piv][c])) piv = i;
        if (std::fabs(a[piv][c]) < 1e-12) return 1e18; // dependent patterns
        for (int j = 0; j <= r; ++j) std::swap(a[c][j], a[piv][j]);
        for (int i = 0; i < r; ++i) {
            if (i == c) continue;
            double f = a[i][c] / a[c][c];
            for (int j = c; j <= r; ++j) a[i][j] -= f * a[c][j];
        }
    }
    alpha.assign(r, 0.0);
    for (int i = 0; i < r; ++i) alpha[i] = a[i][r] / a[i][i];

    double resid = 0.0;
    for (int t = 0; t < cells; ++t) {
        double v = 0.0;
        for (int i = 0; i < r; ++i)
            if (masks[tuple[i]] & (1ULL << t)) v += alpha[i];
        resid = std::max(resid, std::fabs(v - m.data()[t]));
    }
    return resid;
}

} // namespace

std::optional<int> exact_blocky_rank_real(const Matrix& m, int r_max,
                                          std::vector<BlockyTerm>* witness) {
    require_dims(m, 4, "exact_blocky_rank_real");
    if (r_max < 1 || r_max > 4) throw std::invalid_argument("exact_blocky_rank_real: bad r_max");
    if (m.is_zero()) {
        if (witness) witness->clear();
        return 0;
    }

    auto masks = enumerate_blocky_masks(m.nrows(), m.ncols());
    int p = int(masks.size());
    std::uint64_t target = support_mask(m);

    // suffix unions for coverage pruning
    std::vector<std::uint64_t> suffix_or(p + 1, 0);
    for (int i = p - 1; i >= 0; --i) suffix_or[i] = suffix_or[i + 1] | masks[i];

    for (int r = 1; r <= r_max; ++r) {
        // lexicographically least successful tuple, found in parallel over
        // the first index
        std::vector<int> best_tuple;
        std::vector<double> best_alpha;
        bool found = false;

#pragma omp parallel for schedule(dynamic)
        for (int i0 = 0; i0 < p; ++i0) {
            std::vector<int> tuple(r);
            tuple[0] = i0;
            std::vector<double> alpha;
            std::vector<int> local_best;
            std::vector<double> local_alpha;

            auto rec = [&](auto&& self, int depth, std::uint64_t covered) -> bool {
                if (depth == r) {
                    if ((covered & target) != target) return false;
                    if (fit_coeffs(masks, tuple, m, alpha) < 1e-9) {
                        local_best = tuple;
                        local_alpha = alpha;
                        return true;
                    }
                    return false;
                }
                for (int i = tuple[depth - 1] + 1; i < p; ++i) {
                    if (((covered | suffix_or[i]) & target) != target) break;
                    tuple[depth] = i;
                    if (self(self, depth + 1, covered | masks[i])) return true;
                }
                return false;
            };

            bool hit;
            if (r == 1) {
                hit = (masks[i0] & target) == target && fit_coeffs(masks, tuple, m, alpha) < 1e-9;
                if (hit) {
                    local_best = tuple;
                    local_alpha = alpha;
                }
            } else {
                hit = rec(rec, 1, masks[i0]);
            }
            if (hit) {
#pragma omp critical
                {
                    if (!found || local_best < best_tuple) {
                        found = true;
                        best_tuple = local_best;
                        best_alpha = local_alpha;
                    }
                }
            }
        }

        if (found) {
            if (witness) {
                witness->clear();
                for (int i = 0; i < r; ++i)
                    witness->push_back(
                        {pattern_from_mask(masks[best_tuple[i]], m.nrows(), m.ncols()),
                         best_alpha[i]});
            }
            return r;
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// exact spiky rank over GF2

std::optional<int> exact_spiky_rank_gf2(const Matrix& m, int r_max,
                                        std::vector<BlockyPattern>* witness) {
    require_dims(m, 4, "exact_spiky_rank_gf2");
    if (m.field() != Field::GF2)
        throw std::invalid_argument("exact_spiky_rank_gf2: expected a GF2 matrix");
    if (r_max < 1 || r_max > 4) throw std::invalid_argument("exact_spiky_rank_gf2: bad r_max");

    std::uint64_t target = support_mask(m);
    if (target == 0) {
        if (witness) witness->clear();
        return 0;
    }

    auto masks = enumerate_blocky_masks(m.nrows(), m.ncols());
    int p = int(masks.size());
    std::unordered_map<std::uint64_t, int> index_of;
    for (int i = 0; i < p; ++i) index_of.emplace(masks[i], i);

    auto emit = [&](std::vector<int> idx) -> int {
        if (witness) {
            witness->clear();
            for (int i : idx) witness->push_back(pattern_from_mask(masks[i], m.nrows(), m.ncols()));
        }
        return int(idx.size());
    };

    // r = 1
    if (auto it = index_of.find(target); it != index_of.end()) return emit({it->second});
    if (r_max < 2) return std::nullopt;

    // r = 2
    for (int i = 0; i < p; ++i) {
        auto it = index_of.find(target ^ masks[i]);
        if (it != index_of.end() && it->second > i) return emit({i, it->second});
    }
    if (r_max < 3) return std::nullopt;

    // r = 3: a hit with a repeated index would collapse to r <= 1, which was
    // already ruled out
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            auto it = index_of.find(target ^ masks[i] ^ masks[j]);
            if (it != index_of.end() && it->second > j) return emit({i, j, it->second});
        }
    if (r_max < 4) return std::nullopt;

    // r = 4 via meet-in-the-middle on pair XORs
    std::unordered_map<std::uint64_t, std::vector<std::pair<int, int>>> pair_xor;
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) pair_xor[masks[i] ^ masks[j]].push_back({i, j});
    for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j) {
            auto it = pair_xor.find(target ^ masks[i] ^ masks[j]);
            if (it == pair_xor.end()) continue;
            for (auto [k, l] : it->second)
                if (k > j) return emit({i, j, k, l});
        }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// heuristic spiky upper bound over the reals

namespace {

struct AlsProblem {
    const Matrix& m;
    std::vector<std::uint64_t> masks; // tuple patterns, row-major cell bits

    bool covers(int t, int i, int j) const {
        return masks[t] & (1ULL << (i * m.ncols() + j));
    }
};

bool solve_small(double a[3][3], double b[3], int n, double out[3]) {
    double w[3][4];
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) w[i][j] = a[i][j];
        w[i][n] = b[i];
        w[i][i] += 1e-12; // ridge
    }
    for (int c = 0; c < n; ++c) {
        int piv = c;
        for (int i = c + 1; i < n; ++i)
            if (std::fabs(w[i][c]) > std::fabs(w[piv][c])) piv = i;
        if (std::fabs(w[piv][c]) < 1e-300) return false;
        for (int j = 0; j <= n; ++j) std::swap(w[c][j], w[piv][j]);
        for (int i = 0; i < n; ++i) {
            if (i == c) continue;
            double f = w[i][c] / w[c][c];
            for (int j = c; j <= n; ++j) w[i][j] -= f * w[c][j];
        }
    }
    for (int i = 0; i < n; ++i) out[i] = w[i][n] / w[i][i];
    return true;
}

double als_residual(const AlsProblem& prob, const std::vector<std::vector<double>>& u,
                    const std::vector<std::vector<double>>& v) {
    int r = int(prob.masks.size());
    double worst = 0.0;
    for (int i = 0; i < prob.m.nrows(); ++i)
        for (int j = 0; j < prob.m.ncols(); ++j) {
            double s = 0.0;
            for (int t = 0; t < r; ++t)
                if (prob.covers(t, i, j)) s += u[t][i] * v[t][j];
            worst = std::max(worst, std::fabs(s - prob.m(i, j)));
        }
    return worst;
}

bool als_attempt(const AlsProblem& prob, Rng& rng, std::vector<std::vector<double>>& u,
                 std::vector<std::vector<double>>& v) {
    int r = int(prob.masks.size());
    int nr = prob.m.nrows(), nc = prob.m.ncols();
    u.assign(r, std::vector<double>(nr, 0.0));
    v.assign(r, std::vector<double>(nc, 0.0));
    for (int t = 0; t < r; ++t) {
        for (int i = 0; i < nr; ++i) u[t][i] = 2.0 * rng.next_double() - 1.0;
        for (int j = 0; j < nc; ++j) v[t][j] = 2.0 * rng.next_double() - 1.0;
    }

    for (int iter = 0; iter < 80; ++iter) {
        // rows: solve for u[.][i] jointly
        for (int i = 0; i < nr; ++i) {
            double a[3][3] = {}, b[3] = {}, sol[3];
            for (int t1 = 0; t1 < r; ++t1)
                for (int j = 0; j < nc; ++j) {
                    if (!prob.covers(t1, i, j)) continue;
                    b[t1] += v[t1][j] * prob.m(i, j);
                    for (int t2 = 0; t2 < r; ++t2)
                        if (prob.covers(t2, i, j)) a[t1][t2] += v[t1][j] * v[t2][j];
                }
            if (solve_small(a, b, r, sol))
                for (int t = 0; t < r; ++t) u[t][i] = sol[t];
        }
        // columns: solve for v[.][j]
        for (int j = 0; j < nc; ++j) {
            double a[3][3] = {}, b[3] = {}, sol[3];
            for (int t1 = 0; t1 < r; ++t1)
                for (int i = 0; i < nr; ++i) {
                    if (!prob.covers(t1, i, j)) continue;
                    b[t1] += u[t1][i] * prob.m(i, j);
                    for (int t2 = 0; t2 < r; ++t2)
                        if (prob.covers(t2, i, j)) a[t1][t2] += u[t1][i] * u[t2][i];
                }
            if (solve_small(a, b, r, sol))
                for (int t = 0; t < r; ++t) v[t][j] = sol[t];
        }
        if (als_residual(prob, u, v) < 1e-9) return true;
    }
    return als_residual(prob, u, v) < 1e-9;
}

} // namespace

std::optional<Decomposition> heuristic_spiky_upper_real(const Matrix& m, int r, int restarts,
                                                        std::uint64_t seed) {
    require_dims(m, 6, "heuristic_spiky_upper_real");
    if (m.field() != Field::Real)
        throw std::invalid_argument("heuristic_spiky_upper_real: expected a real matrix");
    if (r < 1 || r > 3) throw std::invalid_argument("heuristic_spiky_upper_real: r must be 1..3");

    Decomposition d;
    d.kind = DecompKind::SpikySum;
    d.nrows = m.nrows();
    d.ncols = m.ncols();
    d.algo = "heuristic-spiky";
    d.metadata["oneSided"] = 1.0; // absence is not a lower-bound proof
    if (m.is_zero()) return d;

    std::uint64_t target = support_mask(m);
    std::vector<std::uint64_t> candidates;
    for (std::uint64_t mask : enumerate_blocky_masks(m.nrows(), m.ncols()))
        if ((mask & target) == mask) candidates.push_back(mask); // supports inside the target
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](std::uint64_t a, std::uint64_t b) {
                         return std::popcount(a) > std::popcount(b);
                     });
    int p = int(candidates.size());
    if (p == 0) return std::nullopt;

    const long long tuple_cap = 300000;
    long long tried = 0;
    std::vector<int> tuple(r, 0);

    while (true) {
        std::uint64_t covered = 0;
        for (int t = 0; t < r; ++t) covered |= candidates[tuple[t]];
        if (covered == target) {
            AlsProblem prob{m, {}};
            for (int t = 0; t < r; ++t) prob.masks.push_back(candidates[tuple[t]]);
            Rng rng(seed ^ (0x51c5ULL * (tried + 1)));
            std::vector<std::vector<double>> u, v;
            for (int attempt = 0; attempt < std::max(1, restarts); ++attempt) {
                if (!als_attempt(prob, rng, u, v)) continue;
                for (int t = 0; t < r; ++t) {
                    SpikyTerm term;
                    term.pattern = pattern_from_mask(prob.masks[t], m.nrows(), m.ncols());
                    term.u = u[t];
                    term.v = v[t];
                    // zero the unused coordinates
                    std::vector<std::uint8_t> row_used(m.nrows(), 0), col_used(m.ncols(), 0);
                    for (const auto& blk : term.pattern.blocks) {
                        for (int i : blk.rows) row_used[i] = 1;
                        for (int j : blk.cols) col_used[j] = 1;
                    }
                    for (int i = 0; i < m.nrows(); ++i)
                        if (!row_used[i]) term.u[i] = 0.0;
                    for (int j = 0; j < m.ncols(); ++j)
                        if (!col_used[j]) term.v[j] = 0.0;
                    d.spiky_terms.push_back(std::move(term));
                }
                if (verify_decomposition(d, m, 1e-9).ok) return d;
                d.spiky_terms.clear();
            }
        }
        if (++tried > tuple_cap) return std::nullopt;

        // next multiset tuple i0 <= i1 <= ... (repetition allowed)
        int pos = r - 1;
        while (pos >= 0 && tuple[pos] == p - 1) --pos;
        if (pos < 0) return std::nullopt;
        ++tuple[pos];
        for (int t = pos + 1; t < r; ++t) tuple[t] = tuple[pos];
    }
}

// ---------------------------------------------------------------------------
// exact GF2 rigidity

namespace {

int rank_of_mask(std::uint32_t mask, int nr, int nc) {
    std::uint32_t rows[4];
    for (int i = 0; i < nr; ++i) rows[i] = (mask >> (i * nc)) & ((1u << nc) - 1);
    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        int piv = -1;
        for (int i = r; i < nr; ++i)
            if (rows[i] & (1u << c)) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[r], rows[piv]);
        for (int i = 0; i < nr; ++i)
            if (i != r && (rows[i] & (1u << c))) rows[i] ^= rows[r];
        ++r;
    }
    return r;
}

} // namespace

int exact_rigidity_gf2(const Matrix& m, int r, std::vector<std::pair<int, int>>* flips) {
    require_dims(m, 4, "exact_rigidity_gf2");
    if (m.field() != Field::GF2)
        throw std::invalid_argument("exact_rigidity_gf2: expected a GF2 matrix");
    if (r < 0) throw std::invalid_argument("exact_rigidity_gf2: r must be >= 0");

    int nr = m.nrows(), nc = m.ncols();
    int cells = nr * nc;
    std::uint32_t target = std::uint32_t(support_mask(m));

    // flip masks grouped by popcount, scanned in increasing size
    std::vector<std::vector<std::uint32_t>> by_size(cells + 1);
    for (std::uint32_t d = 0; d < (1u << cells); ++d) by_size[std::popcount(d)].push_back(d);

    for (int s = 0; s <= cells; ++s) {
        const auto& group = by_size[s];
        std::uint32_t best = UINT32_MAX;
#pragma omp parallel for schedule(static) reduction(min : best)
        for (long long idx = 0; idx < (long long)group.size(); ++idx) {
            std::uint32_t d = group[idx];
            if (rank_of_mask(target ^ d, nr, nc) <= r) best = std::min(best, d);
        }
        if (best != UINT32_MAX) {
            if (flips) {
                flips->clear();
                for (int t = 0; t < cells; ++t)
                    if (best & (1u << t)) flips->push_back({t / nc, t % nc});
            }
            return s;
        }
    }
    return cells; // unreachable: flipping everything yields the zero matrix
}

// ---------------------------------------------------------------------------
// exact VC dimension

int exact_vc(const Matrix& m, std::vector<int>* shattered_rows) {
    int nr = m.nrows(), nc = m.ncols();
    if (nr < 1 || nr > 16) throw std::invalid_argument("exact_vc: too many rows");

    int kmax = 0;
    while ((1 << (kmax + 1)) <= nc && kmax + 1 <= nr) ++kmax;

    std::vector<std::vector<std::uint32_t>> by_size(nr + 1);
    for (std::uint32_t sub = 1; sub < (1u << nr); ++sub) {
        int pc = std::popcount(sub);
        if (pc <= kmax) by_size[pc].push_back(sub);
    }

    // ascending chunks keep the result deterministic (lexicographically
    // least subset) while allowing early exit and parallel scanning
    const long long chunk = 8192;
    for (int k = kmax; k >= 1; --k) {
        const auto& group = by_size[k];
        for (long long start = 0; start < (long long)group.size(); start += chunk) {
            long long stop = std::min<long long>(group.size(), start + chunk);
            std::uint32_t best = UINT32_MAX;
#pragma omp parallel for schedule(dynamic, 64) reduction(min : best)
            for (long long idx = start; idx < stop; ++idx) {
                std::uint32_t sub = group[idx];
                const double* rows[16];
                int t = 0;
                for (int i = 0; i < nr; ++i)
                    if (sub & (1u << i)) rows[t++] = m.data().data() + std::size_t(i) * nc;
                int total = 1 << k;
                std::uint64_t seen[1024]; // 2^16 pattern bits for k <= 16
                int words = (total + 63) / 64;
                for (int w = 0; w < words; ++w) seen[w] = 0;
                int distinct = 0;
                for (int j = 0; j < nc && distinct < total; ++j) {
                    int pat = 0;
                    for (int a = 0; a < k; ++a)
                        if (rows[a][j] != 0.0) pat |= 1 << a;
                    if (!(seen[pat >> 6] & (1ULL << (pat & 63)))) {
                        seen[pat >> 6] |= 1ULL << (pat & 63);
                        ++distinct;
                    }
                }
                if (distinct == total) best = std::min(best, sub);
            }
            if (best != UINT32_MAX) {
                if (shattered_rows) {
                    shattered_rows->clear();
                    for (int i = 0; i < nr; ++i)
                        if (best & (1u << i)) shattered_rows->push_back(i);
                }
                return k;
            }
        }
    }
    if (shattered_rows) shattered_rows->clear();
    return 0;
}

} // namespace spiky::oracle
