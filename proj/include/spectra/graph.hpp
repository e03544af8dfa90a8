#ifndef SPECTRA_GRAPH_HPP
#define SPECTRA_GRAPH_HPP

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace spectra {

// Error taxonomy; the CLI maps these onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};
class ParseError : public Error {
public:
    using Error::Error;
};
class ValidationError : public Error {
public:
    using Error::Error;
};
class ResourceError : public Error {
public:
    using Error::Error;
};
class NumericError : public Error {
public:
    using Error::Error;
};

struct Edge {
    int u = 0;
    int v = 0;  // u != v
    double a = 0.0;
};

struct Loop {
    int v = 0;
    double a = 0.0;
};

/// Finite weighted multigraph with vertex potentials. A whole-loop acts on the
/// diagonal with multiplicity 2 and contributes 2 to the degree; a half-loop
/// acts with multiplicity 1 and contributes 1.
struct JacobiGraph {
    int n = 0;
    std::vector<double> b;           // size n, defaults 0
    std::vector<Edge> edges;         // non-loop, multi-edges allowed
    std::vector<Loop> whole_loops;
    std::vector<Loop> half_loops;

    bool has_half_loops() const { return !half_loops.empty(); }
    bool all_potentials_zero() const;
};

/// Structural checks: n >= 1, indices in range, nonzero finite coefficients,
/// no self-edges in `edges`. Does not require connectivity.
void validate_local(const JacobiGraph& g);

/// validate_local plus connectivity of the underlying undirected graph.
void validate(const JacobiGraph& g);

bool is_connected(const JacobiGraph& g);

JacobiGraph parse_graph(std::istream& in);
JacobiGraph parse_graph(const std::string& text);
JacobiGraph parse_graph_file(const std::string& path);

void serialize_graph(const JacobiGraph& g, std::ostream& out);
std::string serialize_graph(const JacobiGraph& g);

/// deg(v) = non-loop endpoints + 2 * whole-loops + half-loops at v.
std::vector<int> degree_profile(const JacobiGraph& g);

/// Dense symmetric row-major matrix.
struct DenseMatrix {
    int n = 0;
    std::vector<double> a;

    DenseMatrix() = default;
    explicit DenseMatrix(int size) : n(size), a(std::size_t(size) * size, 0.0) {}
    double& at(int i, int j) { return a[std::size_t(i) * n + j]; }
    double at(int i, int j) const { return a[std::size_t(i) * n + j]; }
};

DenseMatrix dense_operator(const JacobiGraph& g);

/// max_u (b_u + sum of |a| row weights); upper bound for the right spectral
/// edge of the operator on the universal cover.
double row_sum_bound(const JacobiGraph& g);

/// Flips the sign of every a and b.
JacobiGraph negate(const JacobiGraph& g);

/// Directed-edge view. A non-loop edge contributes two mutually-reverse
/// arcs, a whole-loop two arcs that reverse to each other, a half-loop a
/// single self-reverse arc.
struct DirectedEdge {
    int from = 0;
    int to = 0;
    double a = 0.0;
    int reverse = 0;  // index of the reversal arc (may be itself)
};

struct DirectedEdgeSet {
    std::vector<DirectedEdge> arcs;
    std::vector<std::vector<int>> out;  // per-vertex arc ids, deterministic order
};

DirectedEdgeSet directed_edges(const JacobiGraph& g);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double x);

/// Equality on the multiset representation (edge order ignored).
bool graphs_equal(const JacobiGraph& lhs, const JacobiGraph& rhs);

}  // namespace spectra

#endif
