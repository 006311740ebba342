#include "spiky/gen.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "spiky/util.hpp"

namespace spiky {

void Graph::add_edge(int u, int v) {
    if (u == v) throw std::invalid_argument("self-loop");
    if (adj[std::size_t(u) * n + v]) return;
    adj[std::size_t(u) * n + v] = 1;
    adj[std::size_t(v) * n + u] = 1;
    ++degrees[u];
    ++degrees[v];
}

bool Graph::is_regular() const {
    for (int d : degrees)
        if (d != degrees[0]) return false;
    return true;
}

Matrix identity(int n) {
    if (n < 1) throw std::invalid_argument("identity: n must be >= 1");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

Matrix diagonal(const std::vector<double>& values) {
    int n = int(values.size());
    if (n < 1) throw std::invalid_argument("diagonal: need at least one value");
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.at(i, i) = values[i];
    m.validate();
    return m;
}

namespace {

int pow2_dim(int n, int cap, const char* who) {
    if (n < 1 || n > cap)
        throw std::invalid_argument(std::string(who) + ": n out of supported range");
    return 1 << n;
}

} // namespace

Matrix hd1(int n) {
    int N = pow2_dim(n, 14, "hd1");
    Matrix m(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y)
            if (std::popcount(unsigned(x ^ y)) == 1) m.at(x, y) = 1.0;
    return m;
}

Matrix ip(int n) {
    int N = pow2_dim(n, 13, "ip");
    Matrix m(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) m.at(x, y) = std::popcount(unsigned(x & y)) % 2;
    return m;
}

Matrix disj(int n) {
    int N = pow2_dim(n, 13, "disj");
    Matrix m(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) m.at(x, y) = (x & y) == 0 ? 1.0 : 0.0;
    return m;
}

Matrix gt(int n) {
    int N = pow2_dim(n, 13, "gt");
    Matrix m(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) m.at(x, y) = x > y ? 1.0 : 0.0;
    return m;
}

Matrix random_boolean(int n, double density, std::uint64_t seed) {
    if (density < 0.0 || density > 1.0)
        throw std::invalid_argument("random_boolean: density outside [0,1]");
    Rng rng(seed);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m.at(i, j) = rng.next_double() < density ? 1.0 : 0.0;
    return m;
}

Matrix random_real(int n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            m.at(i, j) = std::round(rng.next_double() * 1e6) / 1e6;
    return m;
}

Graph random_regular(int n, int d, std::uint64_t seed) {
    if (d < 0 || d >= n) throw std::invalid_argument("random_regular: need 0 <= d < n");
    if ((std::int64_t(n) * d) % 2 != 0)
        throw std::invalid_argument("random_regular: n*d must be even");
    Rng rng(seed);

    const int max_attempts = 1000;
    for (int attempt = 0; attempt < max_attempts; ++attempt) {
        std::vector<int> stubs(std::size_t(n) * d);
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < d; ++k) stubs[std::size_t(v) * d + k] = v;
        for (int i = int(stubs.size()) - 1; i > 0; --i)
            std::swap(stubs[i], stubs[rng.next_below(i + 1)]);

        Graph g;
        g.n = n;
        g.adj.assign(std::size_t(n) * n, 0);
        g.degrees.assign(n, 0);
        bool simple = true;
        for (std::size_t i = 0; i + 1 < stubs.size() && simple; i += 2) {
            int u = stubs[i], v = stubs[i + 1];
            if (u == v || g.edge(u, v)) {
                simple = false;
                break;
            }
            g.add_edge(u, v);
        }
        if (simple) return g;
    }
    throw std::runtime_error("random_regular: no simple pairing found");
}

double spectral_lambda(const Graph& g, double tol) {
    if (!g.is_regular()) throw std::invalid_argument("spectral_lambda: graph must be regular");
    int n = g.n;
    if (n <= 1) return 0.0;

    auto project = [&](std::vector<double>& x) {
        double mean = 0.0;
        for (double v : x) mean += v;
        mean /= n;
        for (double& v : x) v -= mean;
    };
    auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
        for (int u = 0; u < n; ++u) {
            double s = 0.0;
            const std::uint8_t* row = &g.adj[std::size_t(u) * n];
            for (int v = 0; v < n; ++v)
                if (row[v]) s += x[v];
            y[u] = s;
        }
    };

    Rng rng(0x5eedULL);
    std::vector<double> x(n), y(n), z(n);
    for (double& v : x) v = rng.next_double() - 0.5;
    project(x);

    double prev = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
        // one step of power iteration on the deflated A^2
        apply(x, y);
        project(y);
        apply(y, z);
        project(z);
        double xx = 0.0, xz = 0.0;
        for (int i = 0; i < n; ++i) {
            xx += x[i] * x[i];
            xz += x[i] * z[i];
        }
        if (xx < 1e-300) return 0.0;
        double lambda_sq = xz / xx;
        double lambda = lambda_sq > 0 ? std::sqrt(lambda_sq) : 0.0;

        double norm = 0.0;
        for (double v : z) norm += v * v;
        norm = std::sqrt(norm);
        if (norm < 1e-300) return 0.0;
        for (int i = 0; i < n; ++i) x[i] = z[i] / norm;

        if (iter > 2 && std::fabs(lambda - prev) <= tol * std::max(1.0, lambda)) return lambda;
        prev = lambda;
    }
    return prev;
}

Matrix adjacency_matrix(const Graph& g, Field field) {
    Matrix m(g.n, g.n, field);
    for (int u = 0; u < g.n; ++u)
        for (int v = 0; v < g.n; ++v) m.at(u, v) = g.edge(u, v) ? 1.0 : 0.0;
    return m;
}

Graph complete_graph(int n) {
    Graph g;
    g.n = n;
    g.adj.assign(std::size_t(n) * n, 0);
    g.degrees.assign(n, 0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.add_edge(u, v);
    return g;
}

Graph cycle_graph(int n) {
    if (n < 3) throw std::invalid_argument("cycle_graph: n must be >= 3");
    Graph g;
    g.n = n;
    g.adj.assign(std::size_t(n) * n, 0);
    g.degrees.assign(n, 0);
    for (int u = 0; u < n; ++u) g.add_edge(u, (u + 1) % n);
    return g;
}

std::string format_graph(const Graph& g) {
    std::string out = "graph " + std::to_string(g.n) + "\n";
    for (int u = 0; u < g.n; ++u)
        for (int v = u + 1; v < g.n; ++v)
            if (g.edge(u, v)) out += std::to_string(u) + " " + std::to_string(v) + "\n";
    return out;
}

Graph parse_graph(std::istream& in) {
    std::string tag;
    in >> tag;
    if (tag != "graph") throw std::invalid_argument("expected 'graph' header");
    int n;
    if (!(in >> n) || n < 0) throw std::invalid_argument("bad graph header");
    Graph g;
    g.n = n;
    g.adj.assign(std::size_t(n) * n, 0);
    g.degrees.assign(n, 0);
    int u, v;
    while (in >> u >> v) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("edge endpoint out of range");
        g.add_edge(u, v);
    }
    return g;
}

void save_graph(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << format_graph(g);
}

Graph load_graph(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return parse_graph(in);
}

} // namespace spiky
