#ifndef SPECTRA_COVER_HPP
#define SPECTRA_COVER_HPP

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

/// Ball of radius `radius` in the universal covering tree, rooted at cover
/// vertex 0. Coefficients are lifted from the base: a per covered edge, b per
/// fiber vertex.
struct TruncatedCover {
    JacobiGraph graph;  // always a tree
    int root = 0;
    std::vector<int> fiber;  // cover vertex -> base vertex
    std::vector<int> depth;
    int radius = 0;
};

struct CoverLimits {
    std::size_t max_vertices = 5'000'000;
    int max_radius = 64;
};

/// Vertices are the non-backtracking walks of length <= radius from `root`.
/// A half-loop arc is its own reversal; a whole-loop contributes two arcs,
/// each the reversal of the other.
TruncatedCover build_cover_ball(const JacobiGraph& g, int root, int radius,
                                const CoverLimits& limits = {});

/// <delta_root, A_T^k delta_root> computed exactly on a ball of radius
/// ceil(k/2)+1 by repeated sparse application.
double walk_moment(const JacobiGraph& g, int root, int k, const CoverLimits& limits = {});

/// Mean of walk_moment over one representative per base vertex.
double dos_moment(const JacobiGraph& g, int k, const CoverLimits& limits = {});

/// Canonical form for rooted trees with (a, b) labels; labels are rounded to
/// 12 significant digits before comparison. Equal strings iff rooted-labeled
/// isomorphic. Throws ValidationError on non-tree input.
std::string rooted_tree_canonical(const JacobiGraph& tree, int root);
std::string rooted_tree_canonical(const TruncatedCover& cover);

void serialize_cover(const TruncatedCover& cover, std::ostream& out);

/// Sparse symmetric operator in CSR-ish form for repeated application.
struct SparseOperator {
    int n = 0;
    std::vector<double> diag;
    std::vector<int> row_start;   // size n+1
    std::vector<int> col;
    std::vector<double> val;

    void apply(const std::vector<double>& x, std::vector<double>& y) const;
};

SparseOperator sparse_operator(const JacobiGraph& g);

namespace ref {
/// Plain serial application, kept as the reference for the parallel kernel.
void sparse_apply(const SparseOperator& op, const std::vector<double>& x, std::vector<double>& y);
}  // namespace ref

}  // namespace spectra

#endif
