#ifndef SPECTRA_BANDS_HPP
#define SPECTRA_BANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include "spectra/aomoto.hpp"
#include "spectra/graph.hpp"

namespace spectra {

struct Band {
    double left = 0.0;
    double right = 0.0;
    double mass = 0.0;
    int nearest_k = 0;       // nearest positive numerator
    double nearest = 0.0;    // nearest_k / denom
    double deviation = 0.0;  // |mass - nearest|
};

struct BandReport {
    std::vector<Band> bands;  // disjoint, sorted
    int n_base = 0;
    int denom = 0;  // n without half-loops, 2n with
    double threshold = 0.0;
    bool quantization_ok = false;
};

/// Maximal grid intervals with density above `threshold`; gaps shorter than
/// 3*eta are merged. Requires >= 99% of grid points converged.
BandReport detect_bands(const DensityCurve& curve, double threshold = 1e-3);

/// Trapezoid mass per band plus nearest-multiple quantization check. The mass
/// granularity is 1/n for loop-only graphs and 1/(2n) when half-loops are
/// present.
void band_masses(const DensityCurve& curve, const JacobiGraph& g, BandReport& report,
                 double quantization_tol = 0.03);

/// Gap criterion for the two-vertex graph with d parallel edges: zero lies in
/// the covering-tree spectrum iff max a^2 <= sum of the remaining a^2.
bool fts_zero_in_spectrum(std::vector<double> weights);

struct TwoBandVerdict {
    bool applicable = false;
    std::string shape;  // "two_vertex_parallel" or "loop_plus_two_parallel"
    int predicted_bands = 0;
};

/// Closed-form band-count predictions for the two template shapes; used to
/// cross-check detect_bands.
TwoBandVerdict two_band_checks(const JacobiGraph& g);

struct EdgeVanishing {
    std::vector<double> epsilons;
    std::vector<double> density;  // at rho_r - eps
    double rho_r = 0.0;
    bool positive = false;
    bool monotone = false;        // decreasing as eps decreases
    bool last_below_008 = false;  // density(rho_r - 0.02) < 0.08
};

/// Density behavior approaching the right edge, sampled at
/// eps in {0.16, 0.08, 0.04, 0.02}.
EdgeVanishing edge_vanishing_check(const JacobiGraph& g, double eta = 1e-3);

/// CSV: `band_index,left,right,mass,nearest_k_over_n,deviation`.
void write_band_csv(const BandReport& report, std::ostream& out);

}  // namespace spectra

#endif
