#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spectra/bands.hpp"
#include "spectra/edges.hpp"

using namespace spectra;
using namespace spectra::testing;

namespace {

DensityCurve full_curve(const JacobiGraph& g, double step = 0.004, double eta = 1e-3) {
    double r = row_sum_bound(g) + 0.5;
    return dos_curve(g, -r, r, step, eta);
}

}  // namespace

TEST_CASE("K4: one band around the Kesten interval") {
    JacobiGraph k4 = complete_graph(4);
    DensityCurve curve = full_curve(k4, 0.01);
    BandReport rep = detect_bands(curve);
    REQUIRE(rep.bands.size() == 1);
    double rho = 2.0 * std::sqrt(2.0);
    // threshold crossing happens in the Lorentzian tail, ~0.45 beyond the edge
    CHECK(rep.bands[0].left == doctest::Approx(-rho).epsilon(0.2));
    CHECK(rep.bands[0].right == doctest::Approx(rho).epsilon(0.2));
    band_masses(curve, k4, rep);
    CHECK(rep.bands[0].mass == doctest::Approx(1.0).epsilon(0.01));
    CHECK(rep.denom == 4);
    CHECK(rep.quantization_ok);
}

TEST_CASE("two-vertex parallel weights: (2,1,1) splits, (1,1,1) does not") {
    JacobiGraph split = two_vertex_parallel({2.0, 1.0, 1.0});
    DensityCurve sc = full_curve(split, 0.01);
    BandReport sr = detect_bands(sc);
    REQUIRE(sr.bands.size() == 2);
    band_masses(sc, split, sr);
    CHECK(sr.bands[0].mass == doctest::Approx(0.5).epsilon(0.04));
    CHECK(sr.bands[1].mass == doctest::Approx(0.5).epsilon(0.04));
    CHECK(sr.quantization_ok);
    CHECK(sr.bands[0].left == doctest::Approx(-sr.bands[1].right).epsilon(1e-6));

    JacobiGraph merged = two_vertex_parallel({1.0, 1.0, 1.0});
    BandReport mr = detect_bands(full_curve(merged, 0.01));
    CHECK(mr.bands.size() == 1);
}

TEST_CASE("band count stays within the quantization bound on a corpus") {
    Xorshift64Star rng(71);
    for (int trial = 0; trial < 8; ++trial) {
        JacobiGraph g = random_connected_graph(rng, 4, 6, true, true, false);
        // step at most eta/2 so that point masses are resolved by the grid
        DensityCurve curve = full_curve(g, 0.005, 0.01);
        BandReport rep = detect_bands(curve);
        band_masses(curve, g, rep);
        int bound = g.has_half_loops() ? 2 * g.n : g.n;
        CHECK(int(rep.bands.size()) <= bound);
        double total = 0.0;
        for (const Band& b : rep.bands) total += b.mass;
        CHECK(total >= 0.9);
        CHECK(total <= 1.01);
    }
}

TEST_CASE("detect_bands refuses curves with too many failed points") {
    DensityCurve curve;
    curve.eta = 1e-3;
    for (int i = 0; i < 100; ++i) {
        curve.x.push_back(i * 0.01);
        curve.density.push_back(0.5);
        curve.converged.push_back(i < 95 ? 1 : 0);
    }
    CHECK_THROWS_AS(detect_bands(curve), NumericError);
}

TEST_CASE("gap criterion for parallel-edge weights") {
    CHECK(fts_zero_in_spectrum({1.0, 1.0, 1.0}));
    CHECK(!fts_zero_in_spectrum({2.0, 1.0, 1.0}));
    CHECK(fts_zero_in_spectrum({5.0, 3.0, 4.0}));  // equality case
    CHECK_THROWS_AS(fts_zero_in_spectrum({1.0}), ValidationError);
    CHECK_THROWS_AS(fts_zero_in_spectrum({1.0, -1.0}), ValidationError);
}

TEST_CASE("two-band template predictions") {
    JacobiGraph distinct_b = two_vertex_parallel({1.0, 1.0, 1.0});
    distinct_b.b = {1.0, -1.0};
    TwoBandVerdict v1 = two_band_checks(distinct_b);
    REQUIRE(v1.applicable);
    CHECK(v1.shape == "two_vertex_parallel");
    CHECK(v1.predicted_bands == 2);

    JacobiGraph loopy;
    loopy.n = 2;
    loopy.b = {0.0, 0.0};
    loopy.whole_loops = {Loop{0, 1.0}};
    loopy.edges = {Edge{0, 1, 1.0}, Edge{0, 1, 1.0}};
    TwoBandVerdict v2 = two_band_checks(loopy);
    REQUIRE(v2.applicable);
    CHECK(v2.shape == "loop_plus_two_parallel");
    CHECK(v2.predicted_bands == 1);

    loopy.edges[0].a = 2.0;
    TwoBandVerdict v3 = two_band_checks(loopy);
    CHECK(v3.predicted_bands == 2);

    TwoBandVerdict v4 = two_band_checks(complete_graph(4));
    CHECK(!v4.applicable);
}

TEST_CASE("two-band template verdicts agree with detection") {
    JacobiGraph loopy;
    loopy.n = 2;
    loopy.b = {0.0, 0.0};
    loopy.whole_loops = {Loop{0, 1.0}};
    loopy.edges = {Edge{0, 1, 1.0}, Edge{0, 1, 1.0}};
    CHECK(int(detect_bands(full_curve(loopy, 0.01)).bands.size()) ==
          two_band_checks(loopy).predicted_bands);

    loopy.edges[0].a = 2.0;
    CHECK(int(detect_bands(full_curve(loopy, 0.01)).bands.size()) ==
          two_band_checks(loopy).predicted_bands);

    // distinct potentials split the spectrum even with equalized weights
    JacobiGraph distinct_b = two_vertex_parallel({1.0, 1.0, 1.0});
    distinct_b.b = {1.0, -1.0};
    CHECK(int(detect_bands(full_curve(distinct_b, 0.01)).bands.size()) ==
          two_band_checks(distinct_b).predicted_bands);
}

TEST_CASE("gap verdict matches the weight criterion on random weight vectors") {
    // weight vectors kept away from the criterion boundary; near-critical
    // gaps are narrower than the eta resolution
    Xorshift64Star rng(73);
    int done = 0;
    while (done < 50) {
        int d = 2 + int(rng.bounded(3));
        std::vector<double> w(d);
        for (double& x : w) x = 0.5 + double(rng.bounded(2000)) / 1000.0;
        double top = 0.0, rest = 0.0;
        for (double x : w) top = std::max(top, x * x);
        for (double x : w) rest += x * x;
        rest -= top;
        if (std::abs(top - rest) < 0.3 * (top + rest)) continue;
        ++done;
        JacobiGraph g = two_vertex_parallel(w);
        DensityCurve at0 = dos_curve(g, 0.0, 0.0, 1.0, 1e-3);
        REQUIRE(at0.converged[0] == 1);
        if (fts_zero_in_spectrum(w))
            CHECK(at0.density[0] > 3e-3);
        else
            CHECK(at0.density[0] < 3e-3);
    }
}

TEST_CASE("density decreases toward the right edge") {
    EdgeVanishing bouquet = edge_vanishing_check(bouquet_whole(2));
    CHECK(bouquet.positive);
    CHECK(bouquet.monotone);
    CHECK(bouquet.last_below_008);
    CHECK(bouquet.density.back() ==
          doctest::Approx(kesten_mckay_density(4, bouquet.rho_r - 0.02)).epsilon(0.05));

    EdgeVanishing k4 = edge_vanishing_check(complete_graph(4));
    CHECK(k4.positive);
    CHECK(k4.monotone);
    // the 3-regular Kesten density at rho - 0.02 sits near 0.1441
    CHECK(k4.density.back() ==
          doctest::Approx(kesten_mckay_density(3, k4.rho_r - 0.02)).epsilon(0.05));
    CHECK(!k4.last_below_008);
}

TEST_CASE("band report csv") {
    JacobiGraph split = two_vertex_parallel({2.0, 1.0, 1.0});
    DensityCurve curve = full_curve(split, 0.01);
    BandReport rep = detect_bands(curve);
    band_masses(curve, split, rep);
    std::ostringstream out;
    write_band_csv(rep, out);
    std::string text = out.str();
    CHECK(text.rfind("band_index,left,right,mass,nearest_k_over_n,deviation\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 3);
}
