#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "spiky/core.hpp"
#include "spiky/matrix.hpp"
#include "spiky/types.hpp"

namespace spiky {

/// Two-party ReLU gate on n-bit inputs:
/// L(x,y) = max{0, <w1,x> + <w2,y> + alpha}.
struct ReLUGate {
    int n = 0;
    std::vector<double> w1;
    std::vector<double> w2;
    double alpha = 0.0;
};

/// The 2^n x 2^n matrix of gate values.
Matrix relu_matrix(const ReLUGate& g);
/// The underlying affine part <w1,x> + <w2,y> + alpha, without the max.
Matrix relu_linear_matrix(const ReLUGate& g);

/// Binary code with a distance guarantee.
struct Code {
    int count = 0;
    int length = 0;
    std::vector<std::uint64_t> words;
    int min_distance = 0;
};

/// Column-stripping decomposition: heavy columns become single-block terms,
/// the rest is cleared one entry per column per sweep. At most
/// 2*ceil(sqrt(sparsity)) spiky terms, exact reconstruction.
Decomposition sparse_to_spiky(const Matrix& m);

/// The n permutation matrices that flip one coordinate of the cube; their
/// sum is hd1(n).
Decomposition hd1_blocky(int n);

/// Inclusion-exclusion over a blocky cover: one signed term per nonempty
/// subset (at most 2^t - 1), evaluating to the entrywise OR of the cover.
Decomposition cover_to_blocky(const std::vector<BlockyPattern>& cover);

/// Support of the strict threshold {(x,y) : <w1,x> + <w2,y> + alpha > 0}
/// split into at most n+1 pairwise-disjoint blocky patterns, by sorting the
/// row and column margins and carving the resulting staircase into dyadic
/// prefix groups.
std::vector<BlockyPattern> threshold_to_blocky(const ReLUGate& g);

/// At most 3(n+1) spiky terms reproducing the gate matrix exactly: each
/// threshold pattern carries the row part, the column part, and the
/// constant part of the affine form as separate rank-one factors.
Decomposition relu_to_spiky(const ReLUGate& g);

/// Concatenation of per-gate decompositions; evaluates to the sum of the
/// gate matrices. Optional per-gate weights scale the terms.
Decomposition circuit_to_spiky(const std::vector<ReLUGate>& gates);
Decomposition circuit_to_spiky(const std::vector<ReLUGate>& gates,
                               const std::vector<double>& weights);

/// Cap T_t = r*t*T_{t-1} + 2^r with T_0 = 2^r on the brcompl term count.
double brcompl_cap(int r, int t);

/// Signed blocky terms (coefficients +-1) agreeing with L on the complement
/// of the covers' union. L must be real with rank(L) <= 4, at most 4 covers,
/// and L Boolean on that complement.
std::vector<BlockyTerm> brcompl(const Matrix& L, const std::vector<BlockyPattern>& covers);

/// Converts a verified spiky decomposition (k = term count <= 4) of a
/// Boolean matrix into a verified blocky decomposition by splitting entries
/// into 2^k types and completing each type from the rank-k sum of its
/// active terms.
Decomposition spiky_to_blocky(const Matrix& m, const Decomposition& spiky_sum);

/// A k x (>= l) all-ones submatrix if the search finds one. Complete for
/// k <= 3 (all row k-subsets are tried in density-descending order with
/// pruning); a bounded greedy heuristic beyond that.
std::optional<std::pair<std::vector<int>, std::vector<int>>>
find_one_rectangle(const Matrix& m, int k, int l);

/// Blocky-partition decomposition of a Boolean matrix (disjoint supports,
/// all coefficients 1): dense-line strips, all-ones rectangle extraction
/// rounds, and a row-type terminal stage, with every step budget-checked so
/// the total never exceeds 2*ceil(sqrt(sparsity)).
Decomposition sparse_boolean_to_blocky(const Matrix& m);

/// Sign representation of hd1(n) as 2*log2(n) + 2 signed blocky terms:
/// coordinate-class equality matrices, the identity, and the all-ones
/// matrix. Requires n a power of two, n <= 12.
Decomposition sign_hd1(int n);

/// Greedy lexicographic code: scans words in increasing value, keeping
/// those at Hamming distance >= distance from everything kept so far.
std::optional<Code> greedy_code(int count, int length, double distance);

struct ApproxHd1Result {
    Matrix approx;      // real matrix close to hd1(n) entrywise
    double epsilon;     // measured max entrywise error
    int k_param = 0;    // the K used
    int code_distance = 0;
    double bound = 0.0; // 1/2 - 1/(10K)
};

/// Entrywise approximation of hd1(n) built from a greedy code with
/// distance K*log2(n)/5. Requires n a power of two in [2, 12] and the code
/// construction to succeed.
ApproxHd1Result approx_hd1(int n, int K);

/// Smallest K >= 1 whose greedy code exists and provably meets the
/// 1/2 - 1/(10K) error bound, or 0 if none up to the search cap.
int approx_hd1_min_feasible_k(int n);

/// Binomial tail A_k(x) = sum_{i=k/2}^k C(k,i) x^i (1-x)^(k-i); k even,
/// 2 <= k <= 200.
double amplify_eval(double x, int k);

/// Entrywise polynomial image of a blocky sum, expanded monomial by
/// monomial into Hadamard products of the terms. coeffs[d] multiplies x^d.
Decomposition poly_compose_blocky(const Decomposition& d, const std::vector<double>& coeffs);

/// Entrywise p(M) for checking poly_compose_blocky.
Matrix apply_poly(const Matrix& m, const std::vector<double>& coeffs);

} // namespace spiky
