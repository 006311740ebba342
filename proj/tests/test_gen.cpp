#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <sstream>

#include "spiky/core.hpp"
#include "spiky/gen.hpp"
#include "spiky/util.hpp"

using namespace spiky;

TEST_CASE("identity and diagonal") {
    CHECK(identity(1) == Matrix::from_rows({{1}}));
    CHECK(diagonal({1, 2, 3})(1, 1) == 2.0);
    CHECK(diagonal({1, 1, 1, 1}) == identity(4));
    CHECK_THROWS(identity(0));
}

TEST_CASE("hd1: adjacency of the cube") {
    CHECK(hd1(1) == Matrix::from_rows({{0, 1}, {1, 0}}));
    CHECK_THROWS(hd1(15));

    for (int n = 1; n <= 6; ++n) CHECK(sparsity(hd1(n)) == n * (1 << n));

    // 2-regular and symmetric at n = 2
    Matrix h = hd1(2);
    for (int x = 0; x < 4; ++x) {
        int deg = 0;
        for (int y = 0; y < 4; ++y) {
            CHECK(h(x, y) == h(y, x));
            deg += int(h(x, y));
        }
        CHECK(deg == 2);
    }
}

TEST_CASE("ip, disj, gt small cases") {
    CHECK(ip(1) == Matrix::from_rows({{0, 0}, {0, 1}}));
    CHECK(disj(1) == Matrix::from_rows({{1, 1}, {1, 0}}));

    // the row at a basis vector shows the complement of that bit
    for (int n = 2; n <= 5; ++n) {
        Matrix d = disj(n);
        for (int i = 0; i < n; ++i) {
            int row = 1 << i;
            for (int y = 0; y < (1 << n); ++y)
                CHECK(d(row, y) == 1.0 - double((y >> i) & 1));
        }
    }

    Matrix g = gt(3);
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) CHECK(g(x, y) == (x > y ? 1.0 : 0.0));

    CHECK_THROWS(ip(14));
    CHECK_THROWS(disj(0));
}

TEST_CASE("random matrices are seed-deterministic") {
    CHECK(random_boolean(16, 0.5, 42) == random_boolean(16, 0.5, 42));
    CHECK(random_boolean(16, 0.5, 42) != random_boolean(16, 0.5, 43));
    CHECK(random_real(8, 1) == random_real(8, 1));

    CHECK(sparsity(random_boolean(16, 0.0, 9)) == 0);

    // density 0.5 at n=32: binomial mean 512, sd 16; stay within 4 sd
    int s = sparsity(random_boolean(32, 0.5, 7));
    CHECK(s >= 512 - 64);
    CHECK(s <= 512 + 64);

    // 1e-6 grid means exact text round-trips
    Matrix r = random_real(6, 3);
    CHECK(parse_matrix(format_matrix(r)) == r);
}

TEST_CASE("random regular graphs") {
    Graph g = random_regular(20, 3, 11);
    CHECK(g.is_regular());
    CHECK(g.degrees[0] == 3);
    for (int u = 0; u < g.n; ++u) CHECK_FALSE(g.edge(u, u));

    CHECK_THROWS(random_regular(5, 3, 1)); // odd n*d

    Graph same = random_regular(20, 3, 11);
    CHECK(same.adj == g.adj);
}

TEST_CASE("spectral lambda: complete graph, cycle, random regular") {
    // K_n has spectrum {n-1, -1, ...}
    CHECK(spectral_lambda(complete_graph(8)) == doctest::Approx(1.0).epsilon(1e-6));

    // C_n eigenvalues are 2cos(2 pi k / n); for n=4 that is {2, 0, 0, -2}
    CHECK(spectral_lambda(cycle_graph(4)) == doctest::Approx(2.0).epsilon(1e-6));
    double expect6 = 0.0;
    for (int k = 1; k < 6; ++k)
        expect6 = std::max(expect6, std::fabs(2.0 * std::cos(2.0 * M_PI * k / 6.0)));
    CHECK(spectral_lambda(cycle_graph(6)) == doctest::Approx(expect6).epsilon(1e-6));

    double lambda = spectral_lambda(random_regular(100, 3, 5));
    CHECK(lambda < 3.0);
    CHECK(lambda > 0.0);
}

TEST_CASE("vc witnesses: ip and disj restricted to basis rows") {
    for (int n = 2; n <= 4; ++n) {
        Matrix m = ip(n);
        std::vector<int> basis;
        for (int i = 0; i < n; ++i) basis.push_back(1 << i);
        std::vector<int> all_cols;
        for (int y = 0; y < (1 << n); ++y) all_cols.push_back(y);
        Matrix sub = restrict(m, basis, all_cols);

        // every column pattern distinct (and equal to the column index bits)
        for (int y = 0; y < (1 << n); ++y)
            for (int i = 0; i < n; ++i) CHECK(sub(i, y) == double((y >> i) & 1));

        Matrix md = disj(n);
        Matrix subd = restrict(md, basis, all_cols);
        for (int y = 0; y < (1 << n); ++y)
            for (int i = 0; i < n; ++i) CHECK(subd(i, y) == 1.0 - double((y >> i) & 1));
    }
}

TEST_CASE("graph text format round-trips") {
    Graph g = random_regular(12, 4, 2);
    std::string text = format_graph(g);
    std::istringstream in(text);
    Graph back = parse_graph(in);
    CHECK(back.n == g.n);
    CHECK(back.adj == g.adj);
}
