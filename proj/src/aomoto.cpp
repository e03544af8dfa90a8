#include "spectra/aomoto.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace spectra {

namespace {

constexpr double kEscapeEps = 1e-12;
constexpr double kPi = 3.14159265358979323846;

// Flattened per-vertex view of the system.
struct System {
    std::vector<int> deg;
    std::vector<std::vector<std::pair<int, double>>> nbr;  // (other vertex, a^2)
    std::vector<std::vector<double>> whole;                // a^2 per whole-loop
    std::vector<std::vector<double>> half;                 // a^2 per half-loop

    explicit System(const JacobiGraph& g)
        : deg(degree_profile(g)), nbr(g.n), whole(g.n), half(g.n) {
        for (const Edge& e : g.edges) {
            nbr[e.u].push_back({e.v, e.a * e.a});
            nbr[e.v].push_back({e.u, e.a * e.a});
        }
        for (const Loop& l : g.whole_loops) whole[l.v].push_back(l.a * l.a);
        for (const Loop& l : g.half_loops) half[l.v].push_back(l.a * l.a);
    }

    Complex rhs_at(const JacobiGraph& g, Complex z, const ComplexVector& w, int u) const {
        Complex denom = z - g.b[u];
        if (denom == Complex(0.0, 0.0)) throw NumericError("system singular: z equals a potential");
        Complex acc = Complex(2.0 - deg[u], 0.0);
        for (const auto& [v, a2] : nbr[u]) acc += std::sqrt(1.0 + 4.0 * a2 * w[u] * w[v]);
        Complex wu2 = w[u] * w[u];
        for (double a2 : whole[u]) acc += 2.0 * std::sqrt(1.0 + 4.0 * a2 * wu2);
        for (double a2 : half[u]) acc += std::sqrt(1.0 + 4.0 * a2 * wu2);
        return acc / (2.0 * denom);
    }
};

double sup_abs_diff(const ComplexVector& a, const ComplexVector& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

ComplexVector aomoto_rhs(const JacobiGraph& g, Complex z, const ComplexVector& w) {
    if (int(w.size()) != g.n) throw ValidationError("w length mismatch");
    System sys(g);
    ComplexVector out(g.n);
    for (int u = 0; u < g.n; ++u) out[u] = sys.rhs_at(g, z, w, u);
    return out;
}

double aomoto_residual(const JacobiGraph& g, Complex z, const ComplexVector& w) {
    return sup_abs_diff(w, aomoto_rhs(g, z, w));
}

CavityResult cavity_solve(const JacobiGraph& g, Complex z, double tol, double damping,
                          int max_iter) {
    DirectedEdgeSet des = directed_edges(g);
    const int n_arcs = int(des.arcs.size());
    CavityResult res;
    res.m.assign(n_arcs, Complex(0.0, 0.0));
    ComplexVector next(n_arcs);

    auto update_arc = [&](int e, const ComplexVector& m) {
        const DirectedEdge& arc = des.arcs[e];
        Complex denom = z - g.b[arc.to];
        for (int f : des.out[arc.to]) {
            if (f == arc.reverse) continue;
            const DirectedEdge& onward = des.arcs[f];
            denom -= onward.a * onward.a * m[f];
        }
        return 1.0 / denom;
    };

    bool converged = false;
    int it = 0;
    for (; it < max_iter; ++it) {
        double step = 0.0;
        for (int e = 0; e < n_arcs; ++e) {
            Complex u = update_arc(e, res.m);
            next[e] = (1.0 - damping) * res.m[e] + damping * u;
            step = std::max(step, std::abs(next[e] - res.m[e]));
        }
        res.m.swap(next);
        if (step < tol) {
            converged = true;
            ++it;
            break;
        }
    }
    res.iterations = it;
    res.converged = converged;
    double defect = 0.0;
    for (int e = 0; e < n_arcs; ++e) defect = std::max(defect, std::abs(res.m[e] - update_arc(e, res.m)));
    res.defect = defect;

    res.w.resize(g.n);
    for (int u = 0; u < g.n; ++u) {
        Complex denom = z - g.b[u];
        for (int f : des.out[u]) {
            const DirectedEdge& arc = des.arcs[f];
            denom -= arc.a * arc.a * res.m[f];
        }
        res.w[u] = 1.0 / denom;
    }
    return res;
}

CauchyVector solve_cauchy(const JacobiGraph& g, Complex z, const CauchyOptions& opts) {
    validate(g);
    System sys(g);
    const bool upper = z.imag() > 0.0;

    ComplexVector start(g.n);
    if (opts.warm_start) {
        if (int(opts.warm_start->size()) != g.n) throw ValidationError("warm start length mismatch");
        start = *opts.warm_start;
    } else {
        for (int u = 0; u < g.n; ++u) start[u] = 1.0 / (z - g.b[u]);
    }

    CauchyVector result;
    result.z = z;
    result.w = start;

    int budget = opts.max_iter;
    double theta = opts.damping;
    ComplexVector w, next(g.n);
    for (int attempt = 0; attempt <= 6 && budget > 0; ++attempt, theta *= 0.5) {
        w = start;
        bool escaped = false;
        while (budget > 0) {
            --budget;
            ++result.iterations;
            double step = 0.0;
            for (int u = 0; u < g.n; ++u) {
                Complex r = sys.rhs_at(g, z, w, u);
                next[u] = (1.0 - theta) * w[u] + theta * r;
                step = std::max(step, std::abs(next[u] - w[u]));
            }
            for (int u = 0; u < g.n; ++u) {
                if (!std::isfinite(next[u].real()) || !std::isfinite(next[u].imag())) {
                    escaped = true;  // diverged: same treatment as a half-plane escape
                    break;
                }
                if (upper && next[u].imag() > kEscapeEps) {
                    escaped = true;
                    break;
                }
            }
            if (escaped) break;
            w.swap(next);
            if (step < opts.tol) {
                result.w = w;
                result.residual = aomoto_residual(g, z, w);
                result.converged = true;
                result.method = CauchyMethod::aomoto;
                return result;
            }
        }
        result.w = w;
        if (!escaped) break;  // out of budget rather than escaping: stop restarting
    }

    if (opts.cavity_fallback && upper) {
        // Terminal fallback: the recursion contracts for Im z > 0 but slows to
        // 1 - O(sqrt(eta)) near band edges, so it gets a budget floor.
        int cavity_budget = std::max(opts.max_iter, 50000);
        CavityResult cav = cavity_solve(g, z, opts.tol, opts.damping, cavity_budget);
        result.iterations += cav.iterations;
        if (cav.converged) {
            result.w = std::move(cav.w);
            result.residual = cav.defect;
            result.converged = true;
            result.method = CauchyMethod::cavity;
            return result;
        }
    }

    result.residual = aomoto_residual(g, z, result.w);
    result.converged = false;
    return result;
}

Complex mean_transform(const CauchyVector& cv) {
    if (!cv.converged) throw NumericError("mean_transform of an unconverged point");
    Complex acc(0.0, 0.0);
    for (Complex w : cv.w) acc += w;
    return acc / double(cv.w.size());
}

namespace {

std::vector<double> ladder_levels(double eta) {
    std::vector<double> levels;
    double e = std::max(1.0, eta);
    while (e > eta) {
        levels.push_back(e);
        e *= 0.5;
    }
    levels.push_back(eta);
    return levels;
}

DensityCurve dos_curve_impl(const JacobiGraph& g, double lo, double hi, double step, double eta,
                            const CurveOptions& opts, bool parallel) {
    validate(g);
    if (eta <= 0.0) throw ValidationError("eta must be positive");
    if (step <= 0.0) throw ValidationError("step must be positive");
    if (hi < lo) throw ValidationError("empty grid range");

    const int npts = int((hi - lo) / step + 1e-9) + 1;
    const std::vector<double> levels = ladder_levels(eta);
    const int bs = std::max(1, opts.block_size);
    const int nblocks = (npts + bs - 1) / bs;

    DensityCurve curve;
    curve.eta = eta;
    curve.x.resize(npts);
    curve.density.assign(npts, 0.0);
    curve.converged.assign(npts, 0);

#pragma omp parallel for schedule(dynamic) if (parallel)
    for (int blk = 0; blk < nblocks; ++blk) {
        const int begin = blk * bs;
        const int end = std::min(npts, begin + bs);
        std::vector<ComplexVector> lateral(levels.size());
        std::vector<char> lateral_ok(levels.size(), 0);
        for (int j = begin; j < end; ++j) {
            const double x = lo + step * j;
            curve.x[j] = x;
            ComplexVector prev;
            bool prev_ok = false;
            CauchyVector cv;
            for (std::size_t li = 0; li < levels.size(); ++li) {
                CauchyOptions so = opts.solve;
                if (lateral_ok[li])
                    so.warm_start = &lateral[li];
                else if (prev_ok)
                    so.warm_start = &prev;
                cv = solve_cauchy(g, Complex(x, levels[li]), so);
                if (cv.converged) {
                    lateral[li] = cv.w;
                    lateral_ok[li] = 1;
                } else {
                    lateral_ok[li] = 0;
                }
                prev = cv.w;
                prev_ok = true;
            }
            Complex mean(0.0, 0.0);
            for (Complex w : cv.w) mean += w;
            mean /= double(g.n);
            double dens = -mean.imag() / kPi;
            curve.density[j] = std::isfinite(dens) ? std::max(0.0, dens) : 0.0;
            curve.converged[j] = cv.converged ? 1 : 0;
        }
    }
    return curve;
}

}  // namespace

DensityCurve dos_curve(const JacobiGraph& g, double lo, double hi, double step, double eta,
                       const CurveOptions& opts) {
    return dos_curve_impl(g, lo, hi, step, eta, opts, true);
}

namespace ref {
DensityCurve dos_curve(const JacobiGraph& g, double lo, double hi, double step, double eta,
                       const CurveOptions& opts) {
    return dos_curve_impl(g, lo, hi, step, eta, opts, false);
}
}  // namespace ref

bool atom_suspect(const DensityCurve& curve, std::size_t i) {
    return curve.density[i] * kPi * curve.eta > 0.05;
}

void write_dos_csv(const DensityCurve& curve, std::ostream& out) {
    out << "x,density,converged\n";
    char buf[128];
    for (std::size_t i = 0; i < curve.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%d\n", curve.x[i], curve.density[i],
                      int(curve.converged[i]));
        out << buf;
    }
}

}  // namespace spectra
