#include "spiky/reference.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <stdexcept>

#include "spiky/core.hpp"
#include "spiky/types.hpp"
#include "spiky/util.hpp"

namespace spiky::ref {

int rank_gf2(const Matrix& m) {
    int nr = m.nrows(), nc = m.ncols();
    std::vector<std::vector<int>> rows(nr, std::vector<int>(nc, 0));
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < nc; ++j) rows[i][j] = m(i, j) != 0.0 ? 1 : 0;

    int r = 0;
    for (int c = 0; c < nc && r < nr; ++c) {
        int piv = -1;
        for (int i = r; i < nr; ++i)
            if (rows[i][c]) {
                piv = i;
                break;
            }
        if (piv < 0) continue;
        std::swap(rows[r], rows[piv]);
        for (int i = 0; i < nr; ++i)
            if (i != r && rows[i][c])
                for (int j = 0; j < nc; ++j) rows[i][j] ^= rows[r][j];
        ++r;
    }
    return r;
}

namespace {

void require_small(int nrows, int ncols, const char* who) {
    if (nrows < 1 || ncols < 1 || nrows * ncols > 20)
        throw std::invalid_argument(std::string(who) + ": shape too large for enumeration");
}

std::uint32_t support_mask(const Matrix& m) {
    std::uint32_t mask = 0;
    for (int i = 0; i < m.nrows(); ++i)
        for (int j = 0; j < m.ncols(); ++j)
            if (m(i, j) != 0.0) mask |= 1u << (i * m.ncols() + j);
    return mask;
}

Matrix from_mask(std::uint32_t mask, int nrows, int ncols) {
    Matrix m(nrows, ncols, Field::GF2);
    for (int i = 0; i < nrows; ++i)
        for (int j = 0; j < ncols; ++j)
            if (mask & (1u << (i * ncols + j))) m.at(i, j) = 1.0;
    return m;
}

} // namespace

std::vector<std::uint32_t> blocky_support_masks(int nrows, int ncols) {
    require_small(nrows, ncols, "blocky_support_masks");
    std::vector<std::uint32_t> out;
    std::uint32_t total = 1u << (nrows * ncols);
    for (std::uint32_t mask = 1; mask < total; ++mask) {
        std::vector<std::uint8_t> sup(std::size_t(nrows) * ncols, 0);
        for (int t = 0; t < nrows * ncols; ++t)
            if (mask & (1u << t)) sup[t] = 1;
        if (pattern_from_support(sup, nrows, ncols)) out.push_back(mask);
    }
    return out;
}

std::vector<int> spr_gf2_table_bfs(int nrows, int ncols) {
    require_small(nrows, ncols, "spr_gf2_table_bfs");
    auto patterns = blocky_support_masks(nrows, ncols);
    std::uint32_t total = 1u << (nrows * ncols);
    std::vector<int> dist(total, -1);
    dist[0] = 0;
    std::deque<std::uint32_t> queue{0};
    while (!queue.empty()) {
        std::uint32_t x = queue.front();
        queue.pop_front();
        for (std::uint32_t p : patterns) {
            std::uint32_t y = x ^ p;
            if (dist[y] < 0) {
                dist[y] = dist[x] + 1;
                queue.push_back(y);
            }
        }
    }
    return dist;
}

int rigidity_gf2_lowrank_scan(const Matrix& m, int r) {
    require_small(m.nrows(), m.ncols(), "rigidity_gf2_lowrank_scan");
    if (m.field() != Field::GF2) throw std::invalid_argument("expected a GF2 matrix");
    std::uint32_t target = support_mask(m);
    std::uint32_t total = 1u << (m.nrows() * m.ncols());
    int best = m.nrows() * m.ncols();
    for (std::uint32_t a = 0; a < total; ++a) {
        if (rank_gf2(from_mask(a, m.nrows(), m.ncols())) > r) continue;
        int dist = std::popcount(target ^ a);
        best = std::min(best, dist);
    }
    return best;
}

int vc_dimension(const Matrix& m) {
    int nr = m.nrows(), nc = m.ncols();
    if (nr > 16) throw std::invalid_argument("vc_dimension: too many rows");
    int kmax = 0;
    while ((1 << (kmax + 1)) <= nc && kmax + 1 <= nr) ++kmax;

    for (int k = kmax; k >= 1; --k) {
        std::vector<int> comb(k);
        for (int i = 0; i < k; ++i) comb[i] = i;
        while (true) {
            std::vector<bool> seen(std::size_t(1) << k, false);
            int distinct = 0;
            for (int j = 0; j < nc && distinct < (1 << k); ++j) {
                int pat = 0;
                for (int t = 0; t < k; ++t)
                    if (m(comb[t], j) != 0.0) pat |= 1 << t;
                if (!seen[pat]) {
                    seen[pat] = true;
                    ++distinct;
                }
            }
            if (distinct == (1 << k)) return k;
            int i = k - 1;
            while (i >= 0 && comb[i] == nr - k + i) --i;
            if (i < 0) break;
            ++comb[i];
            for (int t = i + 1; t < k; ++t) comb[t] = comb[t - 1] + 1;
        }
    }
    return 0;
}

namespace {

int spar_restricted(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    int count = 0;
    for (int i : rows)
        for (int j : cols)
            if (m(i, j) != 0.0) ++count;
    return count;
}

void subsets_up_to(int n, int s, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    // iterative enumeration of all nonempty subsets of size <= s
    auto rec = [&](auto&& self, int start) -> void {
        if (!cur.empty()) out.push_back(cur);
        if (int(cur.size()) == s) return;
        for (int i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

} // namespace

double p1_worst_ratio_exhaustive(const Matrix& m, int s, double k) {
    std::vector<std::vector<int>> subs;
    subsets_up_to(m.nrows(), s, subs);
    std::vector<std::vector<int>> csubs;
    if (m.nrows() == m.ncols())
        csubs = subs;
    else
        subsets_up_to(m.ncols(), s, csubs);

    double worst = 0.0;
    for (const auto& S : subs)
        for (const auto& T : csubs) {
            double spar = spar_restricted(m, S, T);
            double ratio = spar / (k * double(S.size() + T.size()));
            worst = std::max(worst, ratio);
        }
    return worst;
}

double p1_worst_ratio_sampled(const Matrix& m, int s, double k, int samples,
                              std::uint64_t seed) {
    double worst = 0.0;
    for (int t = 0; t < samples; ++t) {
        // per-sample generator, matching the parallel kernel's stream
        Rng rng(seed + 0x9e37ULL * std::uint64_t(t + 1));
        int ssz = 1 + rng.next_below(s);
        int tsz = 1 + rng.next_below(s);
        std::vector<int> S, T;
        while (int(S.size()) < ssz) {
            int v = rng.next_below(m.nrows());
            if (std::find(S.begin(), S.end(), v) == S.end()) S.push_back(v);
        }
        while (int(T.size()) < tsz) {
            int v = rng.next_below(m.ncols());
            if (std::find(T.begin(), T.end(), v) == T.end()) T.push_back(v);
        }
        double spar = spar_restricted(m, S, T);
        worst = std::max(worst, spar / (k * double(ssz + tsz)));
    }
    return worst;
}

} // namespace spiky::ref
