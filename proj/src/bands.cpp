#include "spectra/bands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "spectra/edges.hpp"

namespace spectra {

BandReport detect_bands(const DensityCurve& curve, double threshold) {
    const std::size_t npts = curve.x.size();
    if (npts == 0) throw ValidationError("empty curve");
    std::size_t bad = 0;
    for (std::uint8_t c : curve.converged)
        if (!c) ++bad;
    if (double(bad) > 0.01 * double(npts))
        throw NumericError("too many unconverged points (" + std::to_string(bad) + "/" +
                           std::to_string(npts) + ")");

    BandReport report;
    report.threshold = threshold;

    // Runs above threshold.
    std::vector<std::pair<std::size_t, std::size_t>> runs;
    std::size_t i = 0;
    while (i < npts) {
        if (curve.density[i] > threshold) {
            std::size_t j = i;
            while (j + 1 < npts && curve.density[j + 1] > threshold) ++j;
            runs.push_back({i, j});
            i = j + 1;
        } else {
            ++i;
        }
    }
    // Merge across gaps shorter than 3 eta.
    std::vector<std::pair<std::size_t, std::size_t>> merged;
    for (auto run : runs) {
        if (!merged.empty() && curve.x[run.first] - curve.x[merged.back().second] < 3.0 * curve.eta)
            merged.back().second = run.second;
        else
            merged.push_back(run);
    }
    for (auto [a, b] : merged) {
        Band band;
        band.left = curve.x[a];
        band.right = curve.x[b];
        report.bands.push_back(band);
    }
    return report;
}

void band_masses(const DensityCurve& curve, const JacobiGraph& g, BandReport& report,
                 double quantization_tol) {
    report.n_base = g.n;
    report.denom = g.has_half_loops() ? 2 * g.n : g.n;
    bool ok = true;
    for (Band& band : report.bands) {
        double mass = 0.0;
        for (std::size_t i = 0; i + 1 < curve.x.size(); ++i) {
            if (curve.x[i] < band.left - 1e-12 || curve.x[i + 1] > band.right + 1e-12) continue;
            mass += 0.5 * (curve.density[i] + curve.density[i + 1]) * (curve.x[i + 1] - curve.x[i]);
        }
        band.mass = mass;
        band.nearest_k = std::max(1, int(std::lround(mass * report.denom)));
        band.nearest = double(band.nearest_k) / report.denom;
        band.deviation = std::abs(band.mass - band.nearest);
        if (band.deviation > quantization_tol) ok = false;
    }
    report.quantization_ok = ok && !report.bands.empty();
}

bool fts_zero_in_spectrum(std::vector<double> weights) {
    if (weights.size() < 2) throw ValidationError("need at least two parallel edges");
    for (double w : weights)
        if (!(w > 0.0)) throw ValidationError("weights must be positive");
    std::sort(weights.begin(), weights.end(), std::greater<double>());
    double rest = 0.0;
    for (std::size_t i = 1; i < weights.size(); ++i) rest += weights[i] * weights[i];
    return weights[0] * weights[0] <= rest;
}

TwoBandVerdict two_band_checks(const JacobiGraph& g) {
    TwoBandVerdict verdict;
    if (g.n != 2 || !g.half_loops.empty()) return verdict;

    bool all_between = true;
    for (const Edge& e : g.edges)
        if (e.u == e.v) all_between = false;

    if (g.whole_loops.empty() && all_between && g.edges.size() >= 2) {
        verdict.applicable = true;
        verdict.shape = "two_vertex_parallel";
        if (g.b[0] != g.b[1]) {
            verdict.predicted_bands = 2;
        } else {
            std::vector<double> w;
            for (const Edge& e : g.edges) w.push_back(std::abs(e.a));
            verdict.predicted_bands = fts_zero_in_spectrum(w) ? 1 : 2;
        }
        return verdict;
    }

    // One whole-loop on a vertex plus two parallel edges, zero potentials.
    if (g.whole_loops.size() == 1 && all_between && g.edges.size() == 2 &&
        g.all_potentials_zero()) {
        verdict.applicable = true;
        verdict.shape = "loop_plus_two_parallel";
        double a2 = std::abs(g.edges[0].a), a3 = std::abs(g.edges[1].a);
        verdict.predicted_bands = std::abs(a2 - a3) <= 1e-12 * std::max(a2, a3) ? 1 : 2;
        return verdict;
    }
    return verdict;
}

EdgeVanishing edge_vanishing_check(const JacobiGraph& g, double eta) {
    EdgeVanishing out;
    out.epsilons = {0.16, 0.08, 0.04, 0.02};
    out.rho_r = right_edge(g).rho_r;
    for (double eps : out.epsilons) {
        double x = out.rho_r - eps;
        DensityCurve point = dos_curve(g, x, x, 1.0, eta);
        out.density.push_back(point.density[0]);
    }
    out.positive = std::all_of(out.density.begin(), out.density.end(),
                               [](double d) { return d > 0.0; });
    out.monotone = true;
    for (std::size_t i = 1; i < out.density.size(); ++i)
        if (out.density[i] >= out.density[i - 1]) out.monotone = false;
    out.last_below_008 = out.density.back() < 0.08;
    return out;
}

void write_band_csv(const BandReport& report, std::ostream& out) {
    out << "band_index,left,right,mass,nearest_k_over_n,deviation\n";
    char buf[160];
    for (std::size_t i = 0; i < report.bands.size(); ++i) {
        const Band& b = report.bands[i];
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g\n", i, b.left, b.right,
                      b.mass, b.nearest, b.deviation);
        out << buf;
    }
}

}  // namespace spectra
