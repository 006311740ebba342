#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <bit>
#include <set>

#include "spiky/core.hpp"
#include "spiky/gen.hpp"
#include "spiky/oracle.hpp"
#include "spiky/reference.hpp"
#include "spiky/util.hpp"

using namespace spiky;

namespace {

Matrix gf2_from_mask(std::uint32_t mask, int nr, int nc) {
    Matrix m(nr, nc, Field::GF2);
    for (int t = 0; t < nr * nc; ++t)
        if (mask & (1u << t)) m.at(t / nc, t % nc) = 1.0;
    return m;
}

std::uint32_t mask_of_pattern(const BlockyPattern& p) {
    std::uint32_t mask = 0;
    for (const auto& b : p.blocks)
        for (int i : b.rows)
            for (int j : b.cols) mask |= 1u << (i * p.ncols + j);
    return mask;
}

} // namespace

TEST_CASE("enumerate_blocky_patterns matches the filter-all-supports oracle") {
    CHECK(oracle::enumerate_blocky_patterns(1, 1).size() == 1);

    for (auto [nr, nc] : std::vector<std::pair<int, int>>{{2, 2}, {3, 3}, {2, 4}, {4, 4}}) {
        auto patterns = oracle::enumerate_blocky_patterns(nr, nc);
        auto expected = ref::blocky_support_masks(nr, nc);

        std::set<std::uint32_t> seen;
        for (const auto& p : patterns) {
            p.validate();
            CHECK(seen.insert(mask_of_pattern(p)).second); // exactly once
            // canonical order inside each pattern
            for (std::size_t b = 1; b < p.blocks.size(); ++b)
                CHECK(p.blocks[b - 1].rows.front() < p.blocks[b].rows.front());
        }
        CHECK(seen == std::set<std::uint32_t>(expected.begin(), expected.end()));
    }

    CHECK(oracle::enumerate_blocky_patterns(3, 3).size() == 127);
    CHECK(oracle::enumerate_blocky_patterns(2, 2).size() == 11);
    CHECK_THROWS(oracle::enumerate_blocky_patterns(5, 2));
}

TEST_CASE("exact_blocky_rank_real fixed points") {
    std::vector<BlockyTerm> witness;
    auto r1 = oracle::exact_blocky_rank_real(identity(3), 4, &witness);
    REQUIRE(r1.has_value());
    CHECK(*r1 == 1);
    CHECK(witness.size() == 1);

    // additive structure on the diagonal collapses the count:
    // diag(1,2,3) = 1*B{(0,0),(2,2)} + 2*B{(1,1),(2,2)}
    auto r3 = oracle::exact_blocky_rank_real(diagonal({1, 2, 3}), 4, &witness);
    REQUIRE(r3.has_value());
    CHECK(*r3 == 2);

    // without subset-sum coincidences the count equals the dimension
    CHECK(oracle::exact_blocky_rank_real(diagonal({1, 2, 4}), 4) == 3);
    CHECK(oracle::exact_blocky_rank_real(diagonal({1, 3, 7}), 4) == 3);

    Matrix ones(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) ones.at(i, j) = 1.0;
    CHECK(oracle::exact_blocky_rank_real(ones, 2) == 1);

    // witnesses actually evaluate to the target
    auto rd = oracle::exact_blocky_rank_real(diagonal({1, 2, 3}), 4, &witness);
    Decomposition d;
    d.kind = DecompKind::BlockySum;
    d.nrows = d.ncols = 3;
    d.blocky_terms = witness;
    CHECK(verify_decomposition(d, diagonal({1, 2, 3}), 1e-9).ok);
    CHECK(rd == r3);
}

TEST_CASE("exact_spiky_rank_gf2 agrees with the BFS reference") {
    std::vector<BlockyPattern> witness;
    auto r = oracle::exact_spiky_rank_gf2(to_gf2(identity(4)), 4, &witness);
    REQUIRE(r.has_value());
    CHECK(*r == 1);

    auto r2 = oracle::exact_spiky_rank_gf2(to_gf2(Matrix::from_rows({{1, 1}, {1, 0}})), 4);
    REQUIRE(r2.has_value());
    CHECK(*r2 == 2);

    auto table = ref::spr_gf2_table_bfs(3, 3);
    for (std::uint32_t mask = 0; mask < 512; ++mask) {
        Matrix m = gf2_from_mask(mask, 3, 3);
        if (mask == 0) {
            CHECK(oracle::exact_spiky_rank_gf2(m, 4) == 0);
            continue;
        }
        auto got = oracle::exact_spiky_rank_gf2(m, 4, &witness);
        REQUIRE(got.has_value());
        CHECK(*got == table[mask]);
        // witness XORs back to the target
        std::uint32_t acc = 0;
        for (const auto& p : witness) acc ^= mask_of_pattern(p);
        CHECK(acc == mask);
    }

    // a 4x4 restriction of the cube adjacency, cross-checked against BFS
    Matrix h = to_gf2(restrict(hd1(2), {0, 1, 2, 3}, {0, 1, 2, 3}));
    auto table4 = ref::spr_gf2_table_bfs(4, 4);
    std::uint32_t hmask = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (h(i, j) != 0.0) hmask |= 1u << (i * 4 + j);
    auto hr = oracle::exact_spiky_rank_gf2(h, 4);
    REQUIRE(hr.has_value());
    CHECK(*hr == table4[hmask]);
}

TEST_CASE("heuristic_spiky_upper_real: found certificates and honest absences") {
    // any spiky matrix at r=1 matches is_spiky
    Rng rng(50);
    for (int trial = 0; trial < 10; ++trial) {
        Matrix m(4, 4);
        // one random block with rank-one values
        std::vector<double> u{1, 2, 0.5, 3}, v{2, 1, 4, 0.25};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 3; ++j) m.at(i, j) = u[i] * v[j];
        auto found = oracle::heuristic_spiky_upper_real(m, 1, 8, rng.next_u64());
        REQUIRE(found.has_value());
        CHECK(verify_decomposition(*found, m, 1e-9).ok);
        CHECK(is_spiky(m).has_value());
    }

    // rank-2 target built from known full-support factors
    Rng rng2(51);
    Matrix m2(4, 4);
    std::vector<double> a{1, 2, 3, 4}, b{1, 1, 2, 1}, c{2, 1, 1, 1}, e{1, 3, 1, 2};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m2.at(i, j) = a[i] * b[j] + c[i] * e[j];
    auto found2 = oracle::heuristic_spiky_upper_real(m2, 2, 12, 99);
    REQUIRE(found2.has_value());
    CHECK(verify_decomposition(*found2, m2, 1e-9).ok);

    // full-support rank-2 target cannot be a single spiky term
    CHECK_FALSE(
        oracle::heuristic_spiky_upper_real(Matrix::from_rows({{1, 2}, {2, 1}}), 1, 10, 3)
            .has_value());
}

TEST_CASE("exact_rigidity_gf2: identity targets and the low-rank-scan cross-check") {
    Matrix id = to_gf2(identity(4));
    CHECK(oracle::exact_rigidity_gf2(id, 0) == 4);
    CHECK(oracle::exact_rigidity_gf2(id, 2) == 2);
    CHECK(oracle::exact_rigidity_gf2(id, 4) == 0);

    std::vector<std::pair<int, int>> flips;
    int val = oracle::exact_rigidity_gf2(id, 2, &flips);
    CHECK(int(flips.size()) == val);

    Rng rng(60);
    for (int trial = 0; trial < 15; ++trial) {
        Matrix m = to_gf2(random_boolean(4, 0.5, rng.next_u64()));
        CHECK(oracle::exact_rigidity_gf2(m, 1) == ref::rigidity_gf2_lowrank_scan(m, 1));
        CHECK(oracle::exact_rigidity_gf2(m, 2) == ref::rigidity_gf2_lowrank_scan(m, 2));
    }

    // dimension caps are hard errors, not silent truncation
    CHECK_THROWS(oracle::exact_rigidity_gf2(to_gf2(identity(5)), 1));
    CHECK_THROWS(oracle::exact_blocky_rank_real(identity(5), 2));
    CHECK_THROWS(oracle::exact_spiky_rank_gf2(to_gf2(identity(5)), 2));
}

TEST_CASE("exact_vc: fixed points and the serial reference") {
    Matrix ones(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) ones.at(i, j) = 1.0;
    CHECK(oracle::exact_vc(ones) == 0);
    CHECK(oracle::exact_vc(identity(4)) == 1);

    std::vector<int> rows;
    CHECK(oracle::exact_vc(ip(3), &rows) == 3);
    CHECK(rows.size() == 3);

    Rng rng(70);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix m = random_boolean(10, 0.5, rng.next_u64());
        CHECK(oracle::exact_vc(m) == ref::vc_dimension(m));
    }

    CHECK_THROWS(oracle::exact_vc(random_boolean(17, 0.5, 1)));
}

TEST_CASE("oracle sandwich: heuristic spiky never above exact blocky rank") {
    Rng rng(80);
    for (int trial = 0; trial < 25; ++trial) {
        Matrix m = random_boolean(3, 0.5, rng.next_u64());
        if (m.is_zero()) continue;
        auto br = oracle::exact_blocky_rank_real(m, 4);
        REQUIRE(br.has_value()); // every Boolean 3x3 has br <= 4: row types
        for (int r = 1; r <= std::min(3, *br); ++r) {
            auto spr = oracle::heuristic_spiky_upper_real(m, r, 6, rng.next_u64());
            if (spr) {
                CHECK(r <= *br);
                CHECK(verify_decomposition(*spr, m, 1e-9).ok);
            }
        }
    }
}

TEST_CASE("3x3 exhaustive: spiky rank at most 2 sqrt(sparsity) over GF2") {
    auto table = ref::spr_gf2_table_bfs(3, 3);
    for (std::uint32_t mask = 1; mask < 512; ++mask) {
        int spar = std::popcount(mask);
        CHECK(double(table[mask]) <= 2.0 * std::sqrt(double(spar)));
        CHECK(table[mask] <= ref::rank_gf2(gf2_from_mask(mask, 3, 3)));
    }
}
