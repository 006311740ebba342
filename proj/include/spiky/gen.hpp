#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spiky/matrix.hpp"

namespace spiky {

/// Simple undirected graph with a dense symmetric adjacency and cached
/// degree sequence.
struct Graph {
    int n = 0;
    std::vector<std::uint8_t> adj; // n*n, symmetric, zero diagonal
    std::vector<int> degrees;

    bool edge(int u, int v) const { return adj[std::size_t(u) * n + v] != 0; }
    void add_edge(int u, int v);
    bool is_regular() const;
};

Matrix identity(int n);
Matrix diagonal(const std::vector<double>& values);

/// Adjacency matrix of the n-dimensional Hamming cube: 1 iff the row and
/// column index differ in exactly one bit. Size 2^n, requires 1 <= n <= 14.
Matrix hd1(int n);

/// ip(n)[x,y] = <x,y> mod 2; disj(n)[x,y] = 1 iff x and y share no 1-bit;
/// gt(n)[x,y] = 1 iff x > y as integers. Size 2^n, requires 1 <= n <= 13.
Matrix ip(int n);
Matrix disj(int n);
Matrix gt(int n);

Matrix random_boolean(int n, double density, std::uint64_t seed);

/// Uniform entries in [0,1] snapped to a 1e-6 grid so certificates
/// round-trip through the text format exactly.
Matrix random_real(int n, std::uint64_t seed);

/// Pairing-model random d-regular graph, resampled until simple. Requires
/// n*d even and d < n; throws after bounded retries.
Graph random_regular(int n, int d, std::uint64_t seed);

/// Second-largest absolute adjacency eigenvalue of a regular graph, via
/// power iteration on the complement of the all-ones eigenvector.
double spectral_lambda(const Graph& g, double tol = 1e-8);

Matrix adjacency_matrix(const Graph& g, Field field = Field::Real);

Graph complete_graph(int n);
Graph cycle_graph(int n);

/// Edge-list text format: `graph <n>` then one `u v` line per edge, u < v.
std::string format_graph(const Graph& g);
Graph parse_graph(std::istream& in);
void save_graph(const Graph& g, const std::string& path);
Graph load_graph(const std::string& path);

} // namespace spiky
