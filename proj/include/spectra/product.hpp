#ifndef SPECTRA_PRODUCT_HPP
#define SPECTRA_PRODUCT_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

struct ColoredEdge {
    int u = 0;
    int v = 0;  // u == v for loops
    std::string color;
    double a = 1.0;
};

/// Rooted weighted-adjacency graph (all potentials zero) with colored edges.
struct ColoredGraph {
    int n = 0;
    int root = 0;
    std::vector<ColoredEdge> edges;
};

struct AmalgamSpec {
    ColoredGraph relator;
    std::vector<std::string> factor_names;
    std::vector<ColoredGraph> factors;
    std::vector<std::string> warnings;  // filled by validate_amalgam
};

/// Checks: factor color sets pairwise disjoint, every relator color present
/// in exactly one factor, indices in range. Flags relator-loop colors that
/// also sit on factor loops (an edge-rule case no worked example exercises).
void validate_amalgam(AmalgamSpec& spec);

AmalgamSpec parse_amalgam(std::istream& in);
AmalgamSpec parse_amalgam(const std::string& text);
AmalgamSpec parse_amalgam_file(const std::string& path);
void serialize_amalgam(const AmalgamSpec& spec, std::ostream& out);

/// Truncated core of the amalgamated free product: the component of the root
/// (relator root, empty word), cut at graph distance `radius`. Vertex labels
/// are (relator vertex, alternating word over the factors' non-root
/// vertices); edge coefficients are relator a times factor a.
struct ProductCore {
    JacobiGraph graph;  // all b = 0
    int root = 0;
    std::vector<int> relator_vertex;
    std::vector<std::string> labels;  // "(i|f:v.f:v...)"
    std::vector<int> depth;
    int radius = 0;
};

struct ProductLimits {
    std::size_t max_vertices = 5'000'000;
};

ProductCore build_product_core(const AmalgamSpec& spec, int radius,
                               const ProductLimits& limits = {});

/// Spec whose product core is the universal cover of g: relator is g with
/// each whole-loop split into two loops, every element uniquely colored and
/// carrying the original coefficient; one unit-weight two-vertex factor per
/// color. Requires all potentials zero.
AmalgamSpec cover_as_product(const JacobiGraph& g, int root);

void serialize_product_core(const ProductCore& core, std::ostream& out);

// ---- Finite group data for the Cayley construction ----

/// Multiplication table, element 0 is the identity.
struct FiniteGroup {
    std::string name;
    int order = 0;
    std::vector<int> mul;  // row-major order x order

    int times(int a, int b) const { return mul[std::size_t(a) * order + b]; }
};

struct CayleyData {
    std::vector<FiniteGroup> groups;
    std::vector<std::vector<int>> embed;  // per group: H index -> element
    std::vector<std::vector<int>> gens;   // per group: symmetric generating set
    int h_order = 0;
};

/// Validates group axioms, embeddings (injective homomorphisms inducing the
/// same subgroup structure in every factor), and generator symmetry.
void validate_cayley(const CayleyData& data);

CayleyData parse_cayley(std::istream& in);
CayleyData parse_cayley(const std::string& text);
CayleyData parse_cayley_file(const std::string& path);

/// Amalgam spec whose product core is the Cayley graph of the amalgamated
/// free product with generating set union S_i. Relator vertices are the
/// subgroup elements; factor i vertices are the lexicographically least
/// right-coset representatives, identity first.
AmalgamSpec cayley_spec(const CayleyData& data);

}  // namespace spectra

#endif
