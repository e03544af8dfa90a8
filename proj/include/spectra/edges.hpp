#ifndef SPECTRA_EDGES_HPP
#define SPECTRA_EDGES_HPP

#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

struct SpectralEdges {
    double rho_l = 0.0;
    double rho_r = 0.0;
    std::vector<double> certificate_y;  // positive equalizer point for rho_r
    double certificate_gap = 0.0;       // max_i g_i - min_i g_i at the certificate
    double tolerance = 0.0;             // |minmax(certificate) - (rho_r + tol)|
    bool certified = false;
};

/// The i-th expression of the variational formula at positive y:
/// b_i + (1/(2 y_i)) (2 - deg(i) + sum sqrt(1 + 4 a^2 y_i y_j)),
/// whole-loops appearing twice and half-loops once in the sum.
std::vector<double> minmax_terms(const JacobiGraph& g, const std::vector<double>& y);

/// max_i of minmax_terms; a rigorous upper bound on the right spectral edge
/// of the covering-tree operator for any positive y.
double minmax_value(const JacobiGraph& g, const std::vector<double>& y);

struct FeasibilityResult {
    bool feasible = false;
    std::vector<double> w;  // all-positive solution when feasible
    int iterations = 0;
};

/// Damped real fixed-point iteration of the square-root system at z = t
/// (cap 1e4), finished by a Newton polish when the iteration stalls near the
/// edge. Feasible iff an all-positive solution is found.
FeasibilityResult edge_feasible(const JacobiGraph& g, double t);

/// Right spectral edge by bisection over t with edge_feasible as the oracle,
/// certified through minmax_value at the returned equalizer point.
SpectralEdges right_edge(const JacobiGraph& g, double tol = 1e-8);

/// -right_edge of the sign-flipped graph.
double left_edge(const JacobiGraph& g, double tol = 1e-8);

/// Both edges plus the rho_r certificate.
SpectralEdges spectral_edges(const JacobiGraph& g, double tol = 1e-8);

struct EqualizerResiduals {
    double mass = 0.0;          // |1 - sum lambda|
    double stationarity = 0.0;  // sup_i of the multiplier equations
    double equalize = 0.0;      // sup_i |t - g_i(y)|
};

/// Residuals of the 2n+1 certificate equations; loops appear twice,
/// half-loops once.
EqualizerResiduals equalizer_residual(const JacobiGraph& g, double t,
                                      const std::vector<double>& y,
                                      const std::vector<double>& lambda);

/// Least-squares multipliers for a given (t, y); verification aid.
std::vector<double> solve_multipliers(const JacobiGraph& g, double t,
                                      const std::vector<double>& y);

struct StructuralBounds {
    bool applicable = false;  // adjacency case only: a = 1, b = 0, no half-loops
    double hoory_lower = 0.0;
    double dmax_upper = 0.0;
    double lambda_max_base = 0.0;
};

StructuralBounds structural_bounds(const JacobiGraph& g);

/// Debug fallback: coordinate descent on log y for the min-max objective.
/// Returns the achieved max_i g_i.
double minmax_descent(const JacobiGraph& g, std::vector<double>& y, int rounds = 60);

}  // namespace spectra

#endif
