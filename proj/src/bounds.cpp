#include "spiky/bounds.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "spiky/core.hpp"
#include "spiky/oracle.hpp"
#include "spiky/util.hpp"

namespace spiky::bounds {

std::string format_report(const BoundReport& r) {
    std::ostringstream out;
    out << "bound " << r.name << "\n";
    out << "valid " << (r.valid ? "true" : "false") << "\n";
    out << "value " << r.value << "\n";
    for (const auto& [key, val] : r.inputs) out << "input " << key << " " << val << "\n";
    for (const auto& note : r.notes) out << "note " << note << "\n";
    return out.str();
}

double rigidity_lower_from_spr(double spr_lb, double r) {
    if (r <= 0 || r > spr_lb)
        throw std::invalid_argument("rigidity_lower_from_spr: need 0 < r <= spr_lb");
    double diff = spr_lb - r;
    return diff * diff / 4.0;
}

BoundReport rigidity_lower_report(double spr_lb, double r) {
    BoundReport rep;
    rep.name = "rigidity-lower";
    rep.inputs["spr_lb"] = spr_lb;
    rep.inputs["r"] = r;
    rep.value = rigidity_lower_from_spr(spr_lb, r);
    rep.valid = true;
    rep.notes.push_back("rigidity at target rank r is at least (spr - r)^2 / 4");
    rep.notes.push_back("taking r = spr/2 gives the symbolic form spr^2/16");
    return rep;
}

BoundReport framework_bound(const FrameworkParams& p, long long spar, long long N) {
    BoundReport rep;
    rep.name = "framework";
    rep.inputs["s"] = double(p.s);
    rep.inputs["k"] = p.k;
    rep.inputs["D"] = double(p.D);
    rep.inputs["gamma"] = p.gamma;
    rep.inputs["spar"] = double(spar);
    rep.inputs["N"] = double(N);
    if (p.s < 1 || p.D < 1 || p.k <= 0 || p.gamma <= 0 || p.gamma >= 1 || N < 1) {
        rep.notes.push_back("degenerate parameters");
        return rep;
    }

    double first = p.gamma * double(spar) / (2.0 * p.k * double(N));
    double ratio = double(p.D) * double(p.s) / (2.0 * double(N));
    double second = 0.25 * std::log2(ratio);
    rep.value = std::floor(std::min(first, second)) + 1.0;
    rep.inputs["thinTerm"] = first;
    rep.inputs["logTerm"] = second;
    rep.valid = ratio > 1.0;
    if (!rep.valid) rep.notes.push_back("D*s <= 2N: no contradiction available");
    rep.notes.push_back("conditional on the thinness (P1) and matching (P2) conditions");
    return rep;
}

namespace {

int spar_restricted(const Matrix& m, const std::vector<int>& rows, const std::vector<int>& cols) {
    int count = 0;
    for (int i : rows)
        for (int j : cols)
            if (m(i, j) != 0.0) ++count;
    return count;
}

std::vector<std::vector<int>> subsets_up_to(int n, int s) {
    std::vector<std::vector<int>> out;
    std::vector<int> cur;
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
    return out;
}

} // namespace

BoundReport check_p1_exhaustive(const Matrix& m, int s, double k) {
    if (m.nrows() > 12 || m.ncols() > 12 || s > 4)
        throw std::invalid_argument("check_p1_exhaustive: capped at N <= 12, s <= 4");
    if (s < 1 || k <= 0) throw std::invalid_argument("check_p1_exhaustive: bad parameters");

    auto row_subs = subsets_up_to(m.nrows(), s);
    auto col_subs = m.nrows() == m.ncols() ? row_subs : subsets_up_to(m.ncols(), s);

    double worst = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : worst)
    for (long long a = 0; a < (long long)row_subs.size(); ++a)
        for (const auto& T : col_subs) {
            double spar = spar_restricted(m, row_subs[a], T);
            double ratio = spar / (k * double(row_subs[a].size() + T.size()));
            worst = std::max(worst, ratio);
        }

    BoundReport rep;
    rep.name = "p1-thinness";
    rep.inputs["s"] = s;
    rep.inputs["k"] = k;
    rep.inputs["pairs"] = double(row_subs.size()) * double(col_subs.size());
    rep.value = worst;
    rep.valid = worst <= 1.0;
    rep.notes.push_back("exhaustive over all index sets of size <= s");
    return rep;
}

BoundReport check_p1_sampled(const Matrix& m, int s, double k, int samples, std::uint64_t seed) {
    if (s < 1 || k <= 0 || samples < 1)
        throw std::invalid_argument("check_p1_sampled: bad parameters");

    // one generator per sample index keeps the result independent of the
    // thread count
    double worst = 0.0;
#pragma omp parallel for schedule(static) reduction(max : worst)
    for (int t = 0; t < samples; ++t) {
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

    BoundReport rep;
    rep.name = "p1-thinness";
    rep.inputs["s"] = s;
    rep.inputs["k"] = k;
    rep.inputs["samples"] = samples;
    rep.value = worst;
    rep.valid = worst <= 1.0;
    rep.notes.push_back("sampled, not exhaustive");
    return rep;
}

std::pair<std::vector<int>, std::vector<int>>
find_permutation_submatrix_greedy(const Matrix& m) {
    int nr = m.nrows(), nc = m.ncols();
    std::vector<std::uint8_t> row_dead(nr, 0), col_dead(nc, 0);
    std::vector<int> rows, cols;
    for (int i = 0; i < nr; ++i) {
        if (row_dead[i]) continue;
        for (int j = 0; j < nc; ++j) {
            if (col_dead[j] || m(i, j) == 0.0) continue;
            // keep (i,j); discard everything sharing its row or column
            rows.push_back(i);
            cols.push_back(j);
            for (int jj = 0; jj < nc; ++jj)
                if (jj != j && m(i, jj) != 0.0) col_dead[jj] = 1;
            for (int ii = 0; ii < nr; ++ii)
                if (ii != i && m(ii, j) != 0.0) row_dead[ii] = 1;
            row_dead[i] = 1;
            col_dead[j] = 1;
            break;
        }
    }
    return {rows, cols};
}

std::pair<std::vector<int>, std::vector<int>>
hd1_permutation_submatrix(const Matrix& damaged, int n) {
    if (n < 1 || n > 14) throw std::invalid_argument("hd1_permutation_submatrix: n out of range");
    int N = 1 << n;
    if (damaged.nrows() != N || damaged.ncols() != N)
        throw std::invalid_argument("hd1_permutation_submatrix: dimension mismatch");

    long long surviving = 0;
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) {
            double v = damaged(x, y);
            if (v == 0.0) continue;
            if (v != 1.0 || std::popcount(unsigned(x ^ y)) != 1)
                throw std::invalid_argument("hd1_permutation_submatrix: entry outside hd1(n)");
            ++surviving;
        }
    long long full = (long long)n << n; // n * 2^n
    if (2 * surviving < full)
        throw std::invalid_argument("hd1_permutation_submatrix: fewer than half the ones survive");

    // classes indexed by (coordinate, side): entries (x, x^e_i) with x_i = j
    int best_i = -1, best_j = -1;
    long long best_count = -1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < 2; ++j) {
            long long count = 0;
            for (int x = 0; x < N; ++x)
                if (((x >> i) & 1) == j && damaged(x, x ^ (1 << i)) != 0.0) ++count;
            if (count > best_count) {
                best_count = count;
                best_i = i;
                best_j = j;
            }
        }

    std::vector<int> rows, cols;
    for (int x = 0; x < N; ++x)
        if (((x >> best_i) & 1) == best_j && damaged(x, x ^ (1 << best_i)) != 0.0) {
            rows.push_back(x);
            cols.push_back(x ^ (1 << best_i));
        }
    return {rows, cols};
}

std::vector<int> shrink_avoiding_blocky(const BlockyPattern& b, int N, std::uint64_t seed) {
    b.validate();
    if (b.nrows != N || b.ncols != N)
        throw std::invalid_argument("shrink_avoiding_blocky: pattern is not N x N");
    for (const auto& blk : b.blocks)
        for (int i : blk.rows)
            if (std::binary_search(blk.cols.begin(), blk.cols.end(), i))
                throw std::invalid_argument("shrink_avoiding_blocky: support touches the diagonal");

    Rng rng(seed);
    const int max_retries = 10000;
    for (int attempt = 0; attempt < max_retries; ++attempt) {
        std::vector<std::uint8_t> in_s(N, 1), in_t(N, 1);
        for (const auto& blk : b.blocks) {
            if (rng.next_bool()) {
                for (int j : blk.cols) in_t[j] = 0; // coin 1: drop the column side
            } else {
                for (int i : blk.rows) in_s[i] = 0; // coin 0: drop the row side
            }
        }
        std::vector<int> v;
        for (int i = 0; i < N; ++i)
            if (in_s[i] && in_t[i]) v.push_back(i);
        if (4 * int(v.size()) >= N) return v;
    }
    throw std::runtime_error("shrink_avoiding_blocky: retry cap exceeded");
}

BoundReport expander_mixing_check(const Graph& g, double lambda, int samples,
                                  std::uint64_t seed) {
    if (!g.is_regular()) throw std::invalid_argument("expander_mixing_check: graph must be regular");
    if (samples < 1) throw std::invalid_argument("expander_mixing_check: samples must be >= 1");
    int n = g.n;
    int d = n > 0 ? g.degrees[0] : 0;

    double max_slack = -1e300;
    int violations = 0;
#pragma omp parallel for schedule(static) reduction(max : max_slack) reduction(+ : violations)
    for (int t = 0; t < samples; ++t) {
        Rng rng(seed + 0x9e37ULL * std::uint64_t(t + 1));
        std::vector<int> S, T;
        for (int v = 0; v < n; ++v) {
            if (rng.next_bool()) S.push_back(v);
            if (rng.next_bool()) T.push_back(v);
        }
        if (S.empty() || T.empty()) continue;
        long long e = 0;
        for (int u : S)
            for (int v : T)
                if (g.edge(u, v)) ++e;
        double bound = double(d) * double(S.size()) * double(T.size()) / double(n) +
                       lambda * std::sqrt(double(S.size()) * double(T.size()));
        double slack = double(e) - bound;
        max_slack = std::max(max_slack, slack);
        if (slack > 0) ++violations;
    }

    BoundReport rep;
    rep.name = "expander-mixing";
    rep.inputs["lambda"] = lambda;
    rep.inputs["samples"] = samples;
    rep.inputs["violations"] = violations;
    rep.value = max_slack;
    rep.valid = violations == 0;
    rep.notes.push_back("e(S,T) <= d|S||T|/N + lambda*sqrt(|S||T|) on sampled pairs");
    return rep;
}

FrameworkParams expander_framework_params(long long N, long long d, double lambda) {
    FrameworkParams p;
    p.s = std::max(1, int(std::floor(double(N) * lambda / (10.0 * double(d)))));
    p.k = lambda;
    p.D = std::max(1, int(N / (4 * d)));
    p.gamma = 0.5;
    return p;
}

FrameworkParams hd1_framework_params(int n) {
    FrameworkParams p;
    p.s = std::max(1, int(std::floor(std::pow(2.0, std::sqrt(double(n))))));
    p.k = 2.0 * std::sqrt(double(n));
    p.D = std::max(1, (1 << n) / 4);
    p.gamma = 0.5;
    return p;
}

BoundReport vc_sign_spr_lower(const Matrix& m, int supplied_vc) {
    int vc = supplied_vc;
    if (vc < 0) vc = oracle::exact_vc(m);
    BoundReport rep;
    rep.name = "vc-sign-spr";
    rep.inputs["vc"] = vc;
    if (vc >= 2) {
        rep.value = double(vc) / (12.0 * std::log2(double(vc)));
        rep.valid = true;
    } else {
        rep.value = 0.0;
        rep.valid = true;
        rep.notes.push_back("vc < 2 gives no usable bound; value reported as 0");
    }
    rep.notes.push_back("lower bound on the sign variant, via restriction monotonicity");
    return rep;
}

double warren_count_log(long long N, long long r) {
    if (N < 2) throw std::invalid_argument("warren_count_log: N must be >= 2");
    return 6.0 * double(r) * double(N) * std::log2(double(N));
}

double random_lb_threshold(long long N) {
    if (N < 2) throw std::invalid_argument("random_lb_threshold: N must be >= 2");
    return double(N) / (12.0 * std::log2(double(N)));
}

double gamma2_trivial_upper(const Matrix& m) {
    double max_row = 0.0, max_col = 0.0;
    for (int i = 0; i < m.nrows(); ++i) {
        double s = 0.0;
        for (int j = 0; j < m.ncols(); ++j) s += m(i, j) * m(i, j);
        max_row = std::max(max_row, std::sqrt(s));
    }
    for (int j = 0; j < m.ncols(); ++j) {
        double s = 0.0;
        for (int i = 0; i < m.nrows(); ++i) s += m(i, j) * m(i, j);
        max_col = std::max(max_col, std::sqrt(s));
    }
    return std::min(max_row, max_col);
}

} // namespace spiky::bounds
