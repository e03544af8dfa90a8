#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "spectra/aomoto.hpp"
#include "spectra/cover.hpp"
#include "spectra/eigensolver.hpp"
#include "spectra/lift.hpp"

using namespace spectra;
using namespace spectra::testing;

TEST_CASE("substream seeding is deterministic and collision-free") {
    CHECK(substream_seed(12345, 17) == substream_seed(12345, 17));
    CHECK(substream_seed(12345, 17) != substream_seed(12345, 18));
    // golden value of the documented mixer
    CHECK(substream_seed(0, 0) == 16294208416658607535ull);

    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(substream_seed(99, i));
    CHECK(seen.size() == 100000);
}

TEST_CASE("permutations and matchings are well-formed") {
    Xorshift64Star rng(substream_seed(5, 0));
    std::vector<int> p = random_permutation(50, rng);
    std::vector<int> sorted = p;
    std::sort(sorted.begin(), sorted.end());
    for (int i = 0; i < 50; ++i) CHECK(sorted[i] == i);

    std::vector<int> m = random_matching(50, rng);
    for (int i = 0; i < 50; ++i) {
        CHECK(m[i] != i);
        CHECK(m[m[i]] == i);
    }
}

TEST_CASE("d=1 lift of a loop-free graph is the graph itself") {
    JacobiGraph g = complete_graph(4);
    g.b = {0.5, -1.0, 0.0, 2.0};
    CHECK(graphs_equal(sample_lift(g, 1, 7), g));
}

TEST_CASE("lift size and degree preservation") {
    Xorshift64Star rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        JacobiGraph g = random_connected_graph(rng, 5, 8, true, true, false);
        int d = 2 * (1 + int(rng.bounded(4)));
        JacobiGraph lift = sample_lift(g, d, substream_seed(1000, trial));
        CHECK(lift.n == g.n * d);
        std::vector<int> base_deg = degree_profile(g);
        std::vector<int> lift_deg = degree_profile(lift);
        for (int v = 0; v < g.n; ++v)
            for (int s = 0; s < d; ++s) CHECK(lift_deg[v * d + s] == base_deg[v]);
        for (int v = 0; v < g.n; ++v)
            for (int s = 0; s < d; ++s) CHECK(lift.b[v * d + s] == g.b[v]);
    }
}

TEST_CASE("whole-loop lifting: fixed points become loops, 2-cycles doubled edges") {
    JacobiGraph g = bouquet_whole(1, 1.5);
    for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
        LiftInstance inst = make_lift_instance(g, 6, seed);
        JacobiGraph lift = assemble_lift(g, inst);
        const std::vector<int>& p = inst.whole_loop_perm[0];
        int fixed = 0;
        for (int s = 0; s < 6; ++s)
            if (p[s] == s) ++fixed;
        CHECK(int(lift.whole_loops.size()) == fixed);
        CHECK(int(lift.edges.size()) == 6 - fixed);
        std::vector<int> deg = degree_profile(lift);
        for (int s = 0; s < 6; ++s) CHECK(deg[s] == 2);
    }
}

TEST_CASE("half-loops need even d") {
    JacobiGraph g = bouquet_half(3);
    CHECK_THROWS_AS(sample_lift(g, 5, 1), ValidationError);
    JacobiGraph lift = sample_lift(g, 6, 1);
    CHECK(lift.whole_loops.empty());
    CHECK(lift.edges.size() == 9);  // 3 matchings, 3 pairs each
}

TEST_CASE("same seed, same lift; parallel equals serial") {
    JacobiGraph g = complete_graph(5);
    g.whole_loops.push_back(Loop{0, 2.0});
    g.half_loops.push_back(Loop{3, -1.0});
    JacobiGraph a = sample_lift(g, 8, 555);
    JacobiGraph b = sample_lift(g, 8, 555);
    CHECK(serialize_graph(a) == serialize_graph(b));

    LiftInstance par = make_lift_instance(g, 8, 555);
    LiftInstance ser = ref::make_lift_instance(g, 8, 555);
    CHECK(par.edge_perm == ser.edge_perm);
    CHECK(par.whole_loop_perm == ser.whole_loop_perm);
    CHECK(par.half_loop_match == ser.half_loop_match);
}

TEST_CASE("K4 fourth moment near the tree value at d=200") {
    JacobiGraph k4 = complete_graph(4);
    double acc = 0.0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        JacobiGraph lift = sample_lift(k4, 200, seed);
        SpectrumSample s = sym_eigenvalues(dense_operator(lift));
        acc += empirical_moment(s, 4);
    }
    CHECK(std::abs(acc / 20.0 - 15.0) < 0.5);
}

TEST_CASE("lift histogram and transform curve agree in total variation") {
    JacobiGraph k4 = complete_graph(4);
    const int bins = 128;
    const double lo = -3.5, hi = 3.5;
    JacobiGraph lift = sample_lift(k4, 800, 2026);
    SpectrumSample s = sym_eigenvalues(dense_operator(lift));
    Histogram h = histogram(s, bins, lo, hi);

    double width = (hi - lo) / bins;
    DensityCurve curve = dos_curve(k4, lo, hi, width / 4.0, 1e-3);
    double tv = 0.0;
    for (int b = 0; b < bins; ++b) {
        double mass = 0.0;
        for (int j = 4 * b; j < 4 * b + 4; ++j)
            mass += 0.5 * (curve.density[j] + curve.density[j + 1]) * (width / 4.0);
        tv += std::abs(mass - h.mass[b]);
    }
    CHECK(tv / 2.0 <= 0.08);
}

TEST_CASE("moment error shrinks as d grows") {
    JacobiGraph g = two_vertex_parallel({1.0, 1.0, 2.0});
    std::vector<double> exact;
    for (int k = 0; k <= 6; ++k) exact.push_back(dos_moment(g, k));

    auto median_err = [&](int d) {
        std::vector<double> errs;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            JacobiGraph lift = sample_lift(g, d, seed);
            SpectrumSample s = sym_eigenvalues(dense_operator(lift));
            double worst = 0.0;
            for (int k = 2; k <= 6; ++k)
                worst = std::max(worst, std::abs(empirical_moment(s, k) - exact[k]));
            errs.push_back(worst);
        }
        std::sort(errs.begin(), errs.end());
        return errs[errs.size() / 2];
    };

    double e50 = median_err(50);
    double e400 = median_err(400);
    CHECK(e400 < e50);
    CHECK(e400 < 0.5 * e50 + 1e-9);
}
