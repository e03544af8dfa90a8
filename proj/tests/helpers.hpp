#ifndef SPECTRA_TESTS_HELPERS_HPP
#define SPECTRA_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "spectra/graph.hpp"
#include "spectra/lift.hpp"

namespace spectra::testing {

inline JacobiGraph complete_graph(int n, double a = 1.0) {
    JacobiGraph g;
    g.n = n;
    g.b.assign(n, 0.0);
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) g.edges.push_back(Edge{u, v, a});
    return g;
}

inline JacobiGraph path_graph(int n, double a = 1.0) {
    JacobiGraph g;
    g.n = n;
    g.b.assign(n, 0.0);
    for (int v = 0; v + 1 < n; ++v) g.edges.push_back(Edge{v, v + 1, a});
    return g;
}

inline JacobiGraph cycle_graph(int n, double a = 1.0) {
    JacobiGraph g = path_graph(n, a);
    g.edges.push_back(Edge{n - 1, 0, a});
    return g;
}

inline JacobiGraph bouquet_whole(int loops, double a = 1.0) {
    JacobiGraph g;
    g.n = 1;
    g.b.assign(1, 0.0);
    for (int i = 0; i < loops; ++i) g.whole_loops.push_back(Loop{0, a});
    return g;
}

inline JacobiGraph bouquet_half(int loops, double a = 1.0) {
    JacobiGraph g;
    g.n = 1;
    g.b.assign(1, 0.0);
    for (int i = 0; i < loops; ++i) g.half_loops.push_back(Loop{0, a});
    return g;
}

inline JacobiGraph complete_bipartite(int c, int d, double a = 1.0) {
    JacobiGraph g;
    g.n = c + d;
    g.b.assign(g.n, 0.0);
    for (int u = 0; u < c; ++u)
        for (int v = 0; v < d; ++v) g.edges.push_back(Edge{u, c + v, a});
    return g;
}

inline JacobiGraph two_vertex_parallel(const std::vector<double>& weights) {
    JacobiGraph g;
    g.n = 2;
    g.b.assign(2, 0.0);
    for (double a : weights) g.edges.push_back(Edge{0, 1, a});
    return g;
}

/// Connected random multigraph; optional whole/half loops, weights in
/// +-[0.5, 2] or exactly 1.
inline JacobiGraph random_connected_graph(Xorshift64Star& rng, int max_n, int max_m,
                                          bool allow_loops, bool allow_half,
                                          bool unit_weights, bool allow_negative = false) {
    int n = 1 + int(rng.bounded(max_n));
    JacobiGraph g;
    g.n = n;
    g.b.assign(n, 0.0);
    auto weight = [&]() {
        if (unit_weights) return 1.0;
        double w = 0.5 + double(rng.bounded(1500)) / 1000.0;
        if (allow_negative && rng.bounded(4) == 0) w = -w;
        return w;
    };
    for (int v = 1; v < n; ++v) {
        int u = int(rng.bounded(v));  // spanning tree keeps it connected
        g.edges.push_back(Edge{u, v, weight()});
    }
    int extra = int(rng.bounded(std::max(1, max_m - n + 1)));
    for (int k = 0; k < extra; ++k) {
        int kind = allow_loops ? int(rng.bounded(allow_half ? 3 : 2)) : 0;
        if (kind == 2) {
            g.half_loops.push_back(Loop{int(rng.bounded(n)), weight()});
        } else if (kind == 1) {
            g.whole_loops.push_back(Loop{int(rng.bounded(n)), weight()});
        } else if (n >= 2) {
            int u = int(rng.bounded(n));
            int v = int(rng.bounded(n));
            if (u == v) v = (v + 1) % n;
            g.edges.push_back(Edge{u, v, weight()});
        } else if (allow_loops) {
            g.whole_loops.push_back(Loop{0, weight()});
        }
    }
    // avoid the degenerate zero operator
    if (g.n == 1 && g.edges.empty() && g.whole_loops.empty() && g.half_loops.empty() &&
        allow_loops)
        g.whole_loops.push_back(Loop{0, weight()});
    return g;
}

/// Largest lift eigenvalue after removing one copy of each base eigenvalue
/// (base eigenvectors pull back to every lift, so the base spectrum is always
/// inherited; only the remaining, new eigenvalues track the covering tree).
inline double largest_new_eigenvalue(std::vector<double> lift_eigs,
                                     const std::vector<double>& base_eigs) {
    for (double lam : base_eigs) {
        std::size_t best = 0;
        for (std::size_t i = 1; i < lift_eigs.size(); ++i)
            if (std::abs(lift_eigs[i] - lam) < std::abs(lift_eigs[best] - lam)) best = i;
        lift_eigs.erase(lift_eigs.begin() + best);
    }
    double top = lift_eigs.front();
    for (double lam : lift_eigs) top = std::max(top, lam);
    return top;
}

}  // namespace spectra::testing

#endif
