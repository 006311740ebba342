#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "spiky/gen.hpp"
#include "spiky/matrix.hpp"
#include "spiky/types.hpp"

namespace spiky::bounds {

/// Parameters of the thinness/induced-matching lower-bound framework.
struct FrameworkParams {
    int s = 1;          // small/big block cutoff
    double k = 1.0;     // thinness factor
    int D = 1;          // permutation submatrix size
    double gamma = 0.5; // surviving-ones fraction, in (0,1)
};

struct BoundReport {
    std::string name;
    std::map<std::string, double> inputs;
    double value = 0.0;
    bool valid = false;
    std::vector<std::string> notes;
};

std::string format_report(const BoundReport& r);

/// (spr_lb - r)^2 / 4; requires 0 < r <= spr_lb.
double rigidity_lower_from_spr(double spr_lb, double r);
BoundReport rigidity_lower_report(double spr_lb, double r);

/// floor(min(gamma*spar/(2kN), (1/4)log2(D*s/(2N)))) + 1, a conditional
/// lower bound valid only when D*s > 2N and the thinness/matching
/// conditions hold (recorded in the notes).
BoundReport framework_bound(const FrameworkParams& p, long long spar, long long N);

/// Thinness condition: spar(M|SxT) <= k*(|S|+|T|) for all (exhaustive,
/// requires N <= 12 and s <= 4) or sampled index sets of size <= s.
BoundReport check_p1_exhaustive(const Matrix& m, int s, double k);
BoundReport check_p1_sampled(const Matrix& m, int s, double k, int samples, std::uint64_t seed);

/// Greedy induced matching: picking an entry discards every row sharing its
/// column and every column sharing its row.
std::pair<std::vector<int>, std::vector<int>>
find_permutation_submatrix_greedy(const Matrix& m);

/// Largest surviving coordinate-direction class of a damaged hd1(n) matrix,
/// which is a permutation submatrix of size >= 2^(n-2) whenever at least
/// half the ones survive.
std::pair<std::vector<int>, std::vector<int>>
hd1_permutation_submatrix(const Matrix& damaged, int n);

/// Random coordinate subset V with |V| >= N/4 and B zero on V x V, for a
/// blocky pattern avoiding the diagonal. Retries with fresh coins until the
/// size bound holds.
std::vector<int> shrink_avoiding_blocky(const BlockyPattern& b, int N, std::uint64_t seed);

/// e(S,T) <= d|S||T|/N + lambda*sqrt(|S||T|) on sampled vertex subsets.
BoundReport expander_mixing_check(const Graph& g, double lambda, int samples,
                                  std::uint64_t seed);

/// s = N*lambda/(10d), k = lambda, D = N/(4d), gamma = 1/2.
FrameworkParams expander_framework_params(long long N, long long d, double lambda);

/// s = 2^sqrt(n), k = 2*sqrt(n), D = 2^n/4, gamma = 1/2 for hd1(n).
FrameworkParams hd1_framework_params(int n);

/// value = vc/(12*log2(vc)); vc computed exactly when not supplied
/// (requires nrows <= 16 then).
BoundReport vc_sign_spr_lower(const Matrix& m, int supplied_vc = -1);

/// Bit count 6*r*N*log2(N) of the sign-pattern counting argument.
double warren_count_log(long long N, long long r);

/// N / (12*log2(N)), the high-probability random-matrix threshold.
double random_lb_threshold(long long N);

/// min(max row l2 norm, max column l2 norm), an upper bound on the
/// factorization norm via the trivial factorizations (M, I) and (I, M).
double gamma2_trivial_upper(const Matrix& m);

} // namespace spiky::bounds
