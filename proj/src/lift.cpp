#include "spectra/lift.hpp"

#include <utility>

namespace spectra {

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = (seed ^ index) + 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t Xorshift64Star::bounded(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~0ull - ~0ull % n;
    std::uint64_t x;
    do {
        x = next();
    } while (x >= limit);
    return x % n;
}

std::vector<int> random_permutation(int d, Xorshift64Star& rng) {
    std::vector<int> p(d);
    for (int i = 0; i < d; ++i) p[i] = i;
    for (int i = d - 1; i >= 1; --i) {
        int j = int(rng.bounded(std::uint64_t(i) + 1));
        std::swap(p[i], p[j]);
    }
    return p;
}

std::vector<int> random_matching(int d, Xorshift64Star& rng) {
    std::vector<int> order = random_permutation(d, rng);
    std::vector<int> m(d);
    for (int i = 0; i < d; i += 2) {
        m[order[i]] = order[i + 1];
        m[order[i + 1]] = order[i];
    }
    return m;
}

namespace {

LiftInstance make_instance_impl(const JacobiGraph& g, int d, std::uint64_t seed, bool parallel) {
    validate_local(g);
    if (d < 1) throw ValidationError("sheet count must be positive");
    if (g.has_half_loops() && d % 2 != 0)
        throw ValidationError("half-loops require an even sheet count");

    LiftInstance inst;
    inst.d = d;
    inst.seed = seed;
    inst.edge_perm.resize(g.edges.size());
    inst.whole_loop_perm.resize(g.whole_loops.size());
    inst.half_loop_match.resize(g.half_loops.size());

    const std::uint64_t n_edges = g.edges.size();
    const std::uint64_t n_whole = g.whole_loops.size();
    const std::int64_t total = std::int64_t(n_edges + n_whole + g.half_loops.size());

    // Each object draws from its own substream, so the result is identical
    // for any iteration order or thread count.
#pragma omp parallel for schedule(static) if (parallel)
    for (std::int64_t i = 0; i < total; ++i) {
        Xorshift64Star rng(substream_seed(seed, std::uint64_t(i)));
        if (std::uint64_t(i) < n_edges)
            inst.edge_perm[i] = random_permutation(d, rng);
        else if (std::uint64_t(i) < n_edges + n_whole)
            inst.whole_loop_perm[i - n_edges] = random_permutation(d, rng);
        else
            inst.half_loop_match[i - n_edges - n_whole] = random_matching(d, rng);
    }
    return inst;
}

}  // namespace

LiftInstance make_lift_instance(const JacobiGraph& g, int d, std::uint64_t seed) {
    return make_instance_impl(g, d, seed, true);
}

namespace ref {
LiftInstance make_lift_instance(const JacobiGraph& g, int d, std::uint64_t seed) {
    return make_instance_impl(g, d, seed, false);
}
}  // namespace ref

JacobiGraph assemble_lift(const JacobiGraph& g, const LiftInstance& inst) {
    const int d = inst.d;
    JacobiGraph lift;
    lift.n = g.n * d;
    lift.b.resize(lift.n);
    for (int v = 0; v < g.n; ++v)
        for (int s = 0; s < d; ++s) lift.b[v * d + s] = g.b[v];

    for (std::size_t k = 0; k < g.edges.size(); ++k) {
        const Edge& e = g.edges[k];
        const std::vector<int>& p = inst.edge_perm[k];
        for (int s = 0; s < d; ++s) lift.edges.push_back(Edge{e.u * d + s, e.v * d + p[s], e.a});
    }
    for (std::size_t k = 0; k < g.whole_loops.size(); ++k) {
        const Loop& l = g.whole_loops[k];
        const std::vector<int>& p = inst.whole_loop_perm[k];
        for (int s = 0; s < d; ++s) {
            if (p[s] == s)
                lift.whole_loops.push_back(Loop{l.v * d + s, l.a});
            else
                lift.edges.push_back(Edge{l.v * d + s, l.v * d + p[s], l.a});
        }
    }
    for (std::size_t k = 0; k < g.half_loops.size(); ++k) {
        const Loop& l = g.half_loops[k];
        const std::vector<int>& m = inst.half_loop_match[k];
        for (int s = 0; s < d; ++s)
            if (s < m[s]) lift.edges.push_back(Edge{l.v * d + s, l.v * d + m[s], l.a});
    }
    validate_local(lift);  // lifts may be disconnected
    return lift;
}

JacobiGraph sample_lift(const JacobiGraph& g, int d, std::uint64_t seed) {
    return assemble_lift(g, make_lift_instance(g, d, seed));
}

}  // namespace spectra
