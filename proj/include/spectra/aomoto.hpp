#ifndef SPECTRA_AOMOTO_HPP
#define SPECTRA_AOMOTO_HPP

#include <complex>
#include <iosfwd>
#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

using Complex = std::complex<double>;
using ComplexVector = std::vector<Complex>;

/// Componentwise right-hand side of the coupled square-root system for the
/// per-vertex Cauchy transforms of the covering-tree operator. Whole-loops
/// enter with weight 2, half-loops with weight 1; principal square roots.
ComplexVector aomoto_rhs(const JacobiGraph& g, Complex z, const ComplexVector& w);

/// sup-norm defect ||w - rhs(w)||_inf.
double aomoto_residual(const JacobiGraph& g, Complex z, const ComplexVector& w);

struct CauchyOptions {
    double tol = 1e-12;
    double damping = 0.5;   // geometric backoff on half-plane escape
    int max_iter = 100000;  // total budget across restarts
    const ComplexVector* warm_start = nullptr;
    bool cavity_fallback = true;
};

enum class CauchyMethod { aomoto, cavity };

struct CauchyVector {
    Complex z;
    ComplexVector w;
    double residual = 0.0;  // defect of the system solved (see method)
    bool converged = false;
    int iterations = 0;
    CauchyMethod method = CauchyMethod::aomoto;
};

/// Damped fixed-point solve of the square-root system from w_u = 1/(z - b_u)
/// (or a warm start). Iterates escaping the closed lower half-plane trigger a
/// restart with halved damping, up to 6 halvings. If that fails and Im z > 0,
/// falls back to the directed-edge resolvent recursion, which computes the
/// same transforms and preserves the half-plane; such points report
/// method == cavity and the recursion's own defect as residual.
CauchyVector solve_cauchy(const JacobiGraph& g, Complex z, const CauchyOptions& opts = {});

/// Arithmetic mean of w; requires a converged input.
Complex mean_transform(const CauchyVector& cv);

/// Per-arc resolvent recursion on the covering tree: one unknown per directed
/// base edge, m_e = 1/(z - b_head - sum over onward arcs of a^2 m). Exposed
/// for tests.
struct CavityResult {
    ComplexVector m;  // per arc of directed_edges(g)
    ComplexVector w;
    bool converged = false;
    double defect = 0.0;
    int iterations = 0;
};
CavityResult cavity_solve(const JacobiGraph& g, Complex z, double tol = 1e-12,
                          double damping = 0.5, int max_iter = 100000);

struct DensityCurve {
    std::vector<double> x;
    std::vector<double> density;  // eta-smoothed, clamped at 0
    double eta = 1e-3;
    std::vector<std::uint8_t> converged;
};

struct CurveOptions {
    CauchyOptions solve;
    int block_size = 64;  // lateral warm-start chains restart at block edges

    // Warm-started ladder solves converge in a few hundred iterations where
    // the square-root iteration converges at all; a tight budget keeps the
    // per-point fallback cost bounded.
    CurveOptions() { solve.max_iter = 4000; }
};

/// Density of states on a uniform grid: at each x, continuation from
/// Im z = max(1, eta) down to eta by halving, with warm starts down the
/// ladder and laterally along the grid. Failed points are flagged and the
/// curve is still returned.
DensityCurve dos_curve(const JacobiGraph& g, double lo, double hi, double step, double eta,
                       const CurveOptions& opts = {});

/// Point masses appear as O(1/eta) spikes.
bool atom_suspect(const DensityCurve& curve, std::size_t i);

/// CSV: header `x,density,converged`.
void write_dos_csv(const DensityCurve& curve, std::ostream& out);

namespace ref {
/// Serial reference for the block-parallel curve sweep; bit-identical output.
DensityCurve dos_curve(const JacobiGraph& g, double lo, double hi, double step, double eta,
                       const CurveOptions& opts = {});
}  // namespace ref

}  // namespace spectra

#endif
