#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "spiky/certificate.hpp"
#include "spiky/core.hpp"
#include "spiky/decomp.hpp"
#include "spiky/gen.hpp"
#include "spiky/reference.hpp"
#include "spiky/util.hpp"

using namespace spiky;

TEST_CASE("matrix text format round-trips exactly") {
    Matrix m = Matrix::from_rows({{1.0, 0.5, 0.123456}, {-2.0, 0.0, 1e-06}});
    std::string text = format_matrix(m);
    CHECK(parse_matrix(text) == m);
    CHECK(text.substr(0, 12) == "matrix 2 3 r");

    Matrix g = to_gf2(random_boolean(5, 0.4, 3));
    CHECK(parse_matrix(format_matrix(g)) == g);
    CHECK(matrix_hash(g) == matrix_hash(parse_matrix(format_matrix(g))));
    CHECK(matrix_hash(g) != matrix_hash(identity(5)));
}

TEST_CASE("field conversions enforce 0/1 entries") {
    CHECK_THROWS(to_gf2(diagonal({1, 2, 3})));
    CHECK(to_gf2(identity(3)).field() == Field::GF2);
    CHECK_THROWS(Matrix::from_rows({{0.0, 2.0}}, Field::GF2));
}

TEST_CASE("rank: identity, zero, and the GF2 second-elimination cross-check") {
    CHECK(rank(identity(4), 1e-9) == 4);
    CHECK(rank(Matrix(3, 5)) == 0);

    // two independent elimination routes must agree; the cube adjacency on
    // 3 bits is full rank over GF2
    Matrix h3 = to_gf2(hd1(3));
    CHECK(rank(h3) == ref::rank_gf2(h3));
    CHECK(rank(h3) == 8);

    Rng rng(21);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix m = to_gf2(random_boolean(6, 0.3 + 0.1 * (trial % 5), rng.next_u64()));
        CHECK(rank(m) == ref::rank_gf2(m));
    }
}

TEST_CASE("sparsity counts nonzeros") {
    CHECK(sparsity(identity(7)) == 7);
    Matrix ones(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ones.at(i, j) = 1.0;
    CHECK(sparsity(ones) == 16);

    for (int n = 1; n <= 6; ++n) {
        Matrix h = hd1(n);
        int direct = 0;
        for (int x = 0; x < h.nrows(); ++x)
            for (int y = 0; y < h.ncols(); ++y)
                if (h(x, y) != 0.0) ++direct;
        CHECK(sparsity(h) == direct);
        CHECK(sparsity(h) == n * (1 << n));
    }
}

TEST_CASE("is_blocky recognizes patterns and rejects non-blocky supports") {
    auto pat = is_blocky(identity(5));
    REQUIRE(pat.has_value());
    CHECK(pat->blocks.size() == 5);
    for (const auto& b : pat->blocks) {
        CHECK(b.rows.size() == 1);
        CHECK(b.cols.size() == 1);
    }

    CHECK_FALSE(is_blocky(Matrix::from_rows({{1, 1}, {1, 0}})).has_value());
    CHECK_FALSE(is_blocky(diagonal({1, 2, 3})).has_value()); // entries not all 1

    auto zero = is_blocky(Matrix(3, 4));
    REQUIRE(zero.has_value());
    CHECK(zero->empty());
}

TEST_CASE("is_spiky recognizes rank-one blocks") {
    for (int n = 1; n <= 6; ++n) {
        std::vector<double> vals;
        for (int i = 1; i <= n; ++i) vals.push_back(i);
        auto term = is_spiky(diagonal(vals));
        REQUIRE(term.has_value());
        CHECK(term->pattern.blocks.size() == std::size_t(n));
    }

    // dense rank-one matrix: a single full block
    Matrix r1(3, 4);
    std::vector<double> u{1, 2, 3}, v{1, 0.5, 2, 4};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) r1.at(i, j) = u[i] * v[j];
    auto term = is_spiky(r1);
    REQUIRE(term.has_value());
    CHECK(term->pattern.blocks.size() == 1);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 4; ++j) CHECK(term->value(i, j) == doctest::Approx(r1(i, j)));

    CHECK_FALSE(is_spiky(Matrix::from_rows({{1, 2}, {2, 1}})).has_value());
}

TEST_CASE("is_spiky implies its own term verifies") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        // build a random spiky matrix from a random pattern and factors
        int n = 3 + rng.next_below(4);
        Matrix m(n, n);
        std::vector<int> rows(n), cols(n);
        for (int i = 0; i < n; ++i) rows[i] = cols[i] = i;
        for (int i = n - 1; i > 0; --i) {
            std::swap(rows[i], rows[rng.next_below(i + 1)]);
            std::swap(cols[i], cols[rng.next_below(i + 1)]);
        }
        int pos = 0;
        while (pos < n) {
            int len = 1 + rng.next_below(n - pos);
            for (int a = pos; a < pos + len; ++a)
                for (int b = pos; b < pos + len; ++b)
                    m.at(rows[a], cols[b]) = double(1 + rng.next_below(5)) *
                                             double(1 + rng.next_below(5));
            pos += len;
        }
        // force rank one inside each block
        auto term = is_spiky(m);
        if (!term) continue; // random values may break rank-one; skip those
        Decomposition d;
        d.kind = DecompKind::SpikySum;
        d.nrows = n;
        d.ncols = n;
        d.spiky_terms.push_back(*term);
        CHECK(verify_decomposition(d, m, 1e-12).ok);
    }
}

TEST_CASE("eval: full block, hd1 decomposition, sparse round-trip") {
    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = 3;
    d.ncols = 3;
    BlockyPattern full(3, 3);
    full.blocks.push_back({{0, 1, 2}, {0, 1, 2}});
    d.blocky_terms.push_back({full, 1.0});
    Matrix ones(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) ones.at(i, j) = 1.0;
    CHECK(eval_decomposition(d) == ones);

    CHECK(eval_decomposition(hd1_blocky(3)) == hd1(3));

    Matrix m = random_boolean(6, 0.4, 99);
    CHECK(eval_decomposition(sparse_to_spiky(m)) == m);
}

TEST_CASE("verify: perturbing one coefficient fails at that block") {
    Decomposition d = hd1_blocky(3);
    Matrix target = hd1(3);
    CHECK(verify_decomposition(d, target, 1e-9).ok);

    d.blocky_terms[1].coeff += 1.0;
    auto rep = verify_decomposition(d, target, 1e-9);
    CHECK_FALSE(rep.ok);
    CHECK(rep.failures.size() == std::size_t(d.blocky_terms[1].pattern.cell_count()));
    CHECK(rep.max_residual == doctest::Approx(1.0));
}

TEST_CASE("verify: sign mode checks every entry's sign") {
    Decomposition d = sign_hd1(4);
    CHECK(verify_decomposition(d, hd1(4), 1e-9).ok);

    // breaking the identity coefficient must surface as failures
    d.blocky_terms.back().coeff += 5.0;
    CHECK_FALSE(verify_decomposition(d, hd1(4), 1e-9).ok);
}

TEST_CASE("verify: structural errors are reported, not thrown") {
    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = 2;
    d.ncols = 2;
    BlockyPattern bad(2, 2);
    bad.blocks.push_back({{0, 1}, {0}});
    bad.blocks.push_back({{1}, {1}}); // row 1 reused
    d.blocky_terms.push_back({bad, 1.0});
    auto rep = verify_decomposition(d, identity(2), 1e-9);
    CHECK_FALSE(rep.ok);
    CHECK_FALSE(rep.structural_errors.empty());
}

TEST_CASE("restrict: identity cases and the hd1 halves") {
    Matrix m = random_real(5, 4);
    std::vector<int> all{0, 1, 2, 3, 4};
    CHECK(restrict(m, all, all) == m);
    CHECK(restrict(m, {}, all).nrows() == 0);
    CHECK(restrict(m, {}, all).ncols() == 5);
    CHECK_THROWS_AS((void)restrict(m, {7}, all), std::out_of_range);

    // split hd1(3) by coordinate 1: rows with the bit set, columns without;
    // only that coordinate can differ, leaving a permutation matrix
    Matrix h = hd1(3);
    std::vector<int> rows, cols;
    for (int x = 0; x < 8; ++x) ((x >> 1) & 1 ? rows : cols).push_back(x);
    Matrix sub = restrict(h, rows, cols);
    CHECK(sub.nrows() == 4);
    int total = 0;
    for (int i = 0; i < 4; ++i) {
        int row_sum = 0, col_sum = 0;
        for (int j = 0; j < 4; ++j) {
            row_sum += int(sub(i, j));
            col_sum += int(sub(j, i));
        }
        CHECK(row_sum == 1);
        CHECK(col_sum == 1);
        total += row_sum;
    }
    CHECK(total == 4);
}

TEST_CASE("restriction monotonicity: restricted decompositions still verify") {
    Rng rng(123);
    for (int trial = 0; trial < 60; ++trial) {
        Matrix m = random_boolean(8, 0.35, rng.next_u64());
        Decomposition d = sparse_to_spiky(m);
        std::vector<int> rows, cols;
        for (int i = 0; i < 8; ++i) {
            if (rng.next_bool()) rows.push_back(i);
            if (rng.next_bool()) cols.push_back(i);
        }
        Decomposition rd = restrict_decomposition(d, rows, cols);
        CHECK(rd.term_count() <= d.term_count());
        auto rep = verify_decomposition(rd, restrict(m, rows, cols), 1e-9);
        CHECK(rep.ok);
    }
}

TEST_CASE("GF2 evaluation is exact XOR arithmetic") {
    Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Matrix m = to_gf2(random_boolean(7, 0.5, rng.next_u64()));
        Decomposition d = sparse_to_spiky(m);
        CHECK(d.field == Field::GF2);
        auto rep = verify_decomposition(d, m, 0.0);
        CHECK(rep.ok);
        CHECK(rep.max_residual == 0.0);
    }
}

TEST_CASE("subadditivity witness: concatenation verifies against the sum") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        Matrix a = random_boolean(6, 0.3, rng.next_u64());
        Matrix b = random_boolean(6, 0.3, rng.next_u64());
        Matrix sum(6, 6);
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j) sum.at(i, j) = a(i, j) + b(i, j);
        Decomposition d = concat_decompositions(sparse_to_spiky(a), sparse_to_spiky(b));
        CHECK(verify_decomposition(d, sum, 1e-9).ok);
    }
}

TEST_CASE("eval rejects terms with mismatched dimensions") {
    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = 3;
    d.ncols = 3;
    BlockyPattern wrong(2, 2);
    wrong.blocks.push_back({{0}, {0}});
    d.blocky_terms.push_back({wrong, 1.0});
    CHECK_THROWS((void)eval_decomposition(d));
}

TEST_CASE("zero matrix: empty decomposition is valid") {
    Matrix z(4, 4);
    Decomposition d = sparse_to_spiky(z);
    CHECK(d.term_count() == 0);
    CHECK(verify_decomposition(d, z, 1e-9).ok);
    // but an empty decomposition of a nonzero target is rejected
    CHECK_FALSE(verify_decomposition(d, identity(4), 1e-9).ok);
}

TEST_CASE("certificates round-trip through json") {
    Matrix m = random_boolean(6, 0.4, 17);
    Decomposition d = sparse_to_spiky(m);
    std::string json_text = certificate_to_json(d, matrix_hash(m));
    Certificate cert = certificate_from_json(json_text);
    CHECK(cert.target_hash == matrix_hash(m));
    CHECK(cert.decomposition.kind == DecompKind::SpikySum);
    CHECK(cert.decomposition.term_count() == d.term_count());
    CHECK(verify_decomposition(cert.decomposition, m, 1e-9).ok);

    Decomposition s = sign_hd1(2);
    Certificate cert2 = certificate_from_json(certificate_to_json(s, matrix_hash(hd1(2))));
    CHECK(verify_decomposition(cert2.decomposition, hd1(2), 1e-9).ok);
    CHECK(cert2.decomposition.metadata.at("termCount") == 4.0);
}
