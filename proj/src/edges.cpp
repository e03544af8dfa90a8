#include "spectra/edges.hpp"

#include <algorithm>
#include <cmath>

#include "spectra/eigensolver.hpp"

namespace spectra {

namespace {

constexpr double kDivergeBound = 1e6;
constexpr int kIterCap = 10000;
constexpr int kNewtonCap = 80;

struct System {
    std::vector<int> deg;
    std::vector<std::vector<std::pair<int, double>>> nbr;  // (other, a^2), non-loop
    std::vector<std::vector<double>> whole;
    std::vector<std::vector<double>> half;

    explicit System(const JacobiGraph& g)
        : deg(degree_profile(g)), nbr(g.n), whole(g.n), half(g.n) {
        for (const Edge& e : g.edges) {
            nbr[e.u].push_back({e.v, e.a * e.a});
            nbr[e.v].push_back({e.u, e.a * e.a});
        }
        for (const Loop& l : g.whole_loops) whole[l.v].push_back(l.a * l.a);
        for (const Loop& l : g.half_loops) half[l.v].push_back(l.a * l.a);
    }
};

double term_at(const System& sys, const JacobiGraph& g, const std::vector<double>& y, int i) {
    double acc = 2.0 - sys.deg[i];
    for (const auto& [j, a2] : sys.nbr[i]) acc += std::sqrt(1.0 + 4.0 * a2 * y[i] * y[j]);
    double yi2 = y[i] * y[i];
    for (double a2 : sys.whole[i]) acc += 2.0 * std::sqrt(1.0 + 4.0 * a2 * yi2);
    for (double a2 : sys.half[i]) acc += std::sqrt(1.0 + 4.0 * a2 * yi2);
    return g.b[i] + acc / (2.0 * y[i]);
}

// rhs_u(t, w) of the real system; w = rhs(w) is equivalent to g_i(w) = t.
double real_rhs(const System& sys, const JacobiGraph& g, double t, const std::vector<double>& w,
                int u) {
    double acc = 2.0 - sys.deg[u];
    for (const auto& [v, a2] : sys.nbr[u]) acc += std::sqrt(1.0 + 4.0 * a2 * w[u] * w[v]);
    double wu2 = w[u] * w[u];
    for (double a2 : sys.whole[u]) acc += 2.0 * std::sqrt(1.0 + 4.0 * a2 * wu2);
    for (double a2 : sys.half[u]) acc += std::sqrt(1.0 + 4.0 * a2 * wu2);
    return acc / (2.0 * (t - g.b[u]));
}

// Jacobian of real_rhs at w.
DenseMatrix real_jacobian(const System& sys, const JacobiGraph& g, double t,
                          const std::vector<double>& w) {
    const int n = g.n;
    DenseMatrix jac(n);
    for (int u = 0; u < n; ++u) {
        double pref = 1.0 / (2.0 * (t - g.b[u]));
        for (const auto& [v, a2] : sys.nbr[u]) {
            double root = std::sqrt(1.0 + 4.0 * a2 * w[u] * w[v]);
            jac.at(u, v) += pref * 2.0 * a2 * w[u] / root;
            jac.at(u, u) += pref * 2.0 * a2 * w[v] / root;
        }
        double wu2 = w[u] * w[u];
        for (double a2 : sys.whole[u])
            jac.at(u, u) += pref * 8.0 * a2 * w[u] / std::sqrt(1.0 + 4.0 * a2 * wu2);
        for (double a2 : sys.half[u])
            jac.at(u, u) += pref * 4.0 * a2 * w[u] / std::sqrt(1.0 + 4.0 * a2 * wu2);
    }
    return jac;
}

double sup_residual(const System& sys, const JacobiGraph& g, double t,
                    const std::vector<double>& w) {
    double r = 0.0;
    for (int u = 0; u < g.n; ++u) r = std::max(r, std::abs(w[u] - real_rhs(sys, g, t, w, u)));
    return r;
}

bool all_positive_bounded(const std::vector<double>& w) {
    for (double x : w)
        if (!(x > 0.0) || x > kDivergeBound || !std::isfinite(x)) return false;
    return true;
}

// Newton polish from a stalled iterate. The plain iteration contracts at rate
// 1 - O(sqrt(t - rho)) near the edge, far too slow for edge-resolution
// bisection; Newton keeps classification exact down to the bracket width.
bool newton_polish(const System& sys, const JacobiGraph& g, double t, std::vector<double>& w) {
    const int n = g.n;
    for (int it = 0; it < kNewtonCap; ++it) {
        std::vector<double> resid(n);
        double sup = 0.0;
        for (int u = 0; u < n; ++u) {
            resid[u] = real_rhs(sys, g, t, w, u) - w[u];
            sup = std::max(sup, std::abs(resid[u]));
        }
        if (sup < 1e-13) return true;
        DenseMatrix jac = real_jacobian(sys, g, t, w);
        DenseMatrix lhs(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) lhs.at(i, j) = (i == j ? 1.0 : 0.0) - jac.at(i, j);
        std::vector<double> delta;
        try {
            delta = detail::solve_linear(lhs, resid);
        } catch (const NumericError&) {
            return false;
        }
        // Backtracking: keep w positive and the residual decreasing.
        double scale = 1.0;
        bool stepped = false;
        for (int half = 0; half < 30; ++half, scale *= 0.5) {
            std::vector<double> trial(n);
            bool ok = true;
            for (int u = 0; u < n; ++u) {
                trial[u] = w[u] + scale * delta[u];
                if (!(trial[u] > 0.0) || trial[u] > kDivergeBound) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            if (sup_residual(sys, g, t, trial) < sup) {
                w = std::move(trial);
                stepped = true;
                break;
            }
        }
        if (!stepped) return false;
    }
    return sup_residual(sys, g, t, w) < 1e-10;
}

}  // namespace

std::vector<double> minmax_terms(const JacobiGraph& g, const std::vector<double>& y) {
    validate(g);
    if (int(y.size()) != g.n) throw ValidationError("y length mismatch");
    for (double v : y)
        if (!(v > 0.0)) throw ValidationError("y must be positive");
    System sys(g);
    std::vector<double> out(g.n);
    for (int i = 0; i < g.n; ++i) out[i] = term_at(sys, g, y, i);
    return out;
}

double minmax_value(const JacobiGraph& g, const std::vector<double>& y) {
    std::vector<double> terms = minmax_terms(g, y);
    return *std::max_element(terms.begin(), terms.end());
}

FeasibilityResult edge_feasible(const JacobiGraph& g, double t) {
    System sys(g);
    FeasibilityResult res;
    std::vector<double> w(g.n);
    for (int u = 0; u < g.n; ++u) {
        double d = t - g.b[u];
        if (d < 1e-12) return res;  // below a potential: no positive solution
        w[u] = 1.0 / d;
    }

    const double theta = 0.5;
    std::vector<double> next(g.n);
    double step = 0.0;
    for (int it = 0; it < kIterCap; ++it) {
        ++res.iterations;
        step = 0.0;
        for (int u = 0; u < g.n; ++u) {
            next[u] = (1.0 - theta) * w[u] + theta * real_rhs(sys, g, t, w, u);
            step = std::max(step, std::abs(next[u] - w[u]));
        }
        w.swap(next);
        if (!all_positive_bounded(w)) return res;
        if (step < 1e-13) {
            res.feasible = true;
            res.w = std::move(w);
            return res;
        }
    }

    // Iteration capped out while staying positive and bounded: stalled near
    // the edge. Let Newton decide.
    if (newton_polish(sys, g, t, w) && all_positive_bounded(w)) {
        res.feasible = true;
        res.w = std::move(w);
    }
    return res;
}

SpectralEdges right_edge(const JacobiGraph& g, double tol) {
    validate(g);
    if (!(tol > 0.0)) throw ValidationError("tol must be positive");
    double rsb = row_sum_bound(g);
    double upper = rsb + 1.0;
    double lower = *std::min_element(g.b.begin(), g.b.end()) - rsb;
    if (!edge_feasible(g, upper).feasible)
        throw NumericError("bracket failure: system infeasible above the row-sum bound");

    while (upper - lower > tol) {
        double mid = 0.5 * (lower + upper);
        if (edge_feasible(g, mid).feasible)
            upper = mid;
        else
            lower = mid;
    }

    SpectralEdges edges;
    edges.rho_r = 0.5 * (lower + upper);

    double t_cert = edges.rho_r + tol;
    FeasibilityResult cert = edge_feasible(g, t_cert);
    if (cert.feasible) {
        double mm = minmax_value(g, cert.w);
        std::vector<double> terms = minmax_terms(g, cert.w);
        edges.certificate_y = std::move(cert.w);
        edges.certificate_gap = *std::max_element(terms.begin(), terms.end()) -
                                *std::min_element(terms.begin(), terms.end());
        edges.tolerance = std::abs(mm - t_cert);
        edges.certified = edges.tolerance <= 10.0 * tol;
    }
    edges.rho_l = edges.rho_r;  // caller fills via spectral_edges
    return edges;
}

double left_edge(const JacobiGraph& g, double tol) {
    return -right_edge(negate(g), tol).rho_r;
}

SpectralEdges spectral_edges(const JacobiGraph& g, double tol) {
    SpectralEdges edges = right_edge(g, tol);
    edges.rho_l = left_edge(g, tol);
    return edges;
}

EqualizerResiduals equalizer_residual(const JacobiGraph& g, double t, const std::vector<double>& y,
                                      const std::vector<double>& lambda) {
    validate(g);
    if (int(y.size()) != g.n || int(lambda.size()) != g.n)
        throw ValidationError("certificate length mismatch");
    for (double v : y)
        if (!(v > 0.0)) throw ValidationError("y must be positive");
    System sys(g);

    EqualizerResiduals res;
    double mass = 0.0;
    for (double l : lambda) mass += l;
    res.mass = std::abs(1.0 - mass);

    for (int i = 0; i < g.n; ++i) {
        double acc = 0.0;
        for (const auto& [j, a2] : sys.nbr[i])
            acc += a2 * (y[j] * lambda[i] + y[i] * lambda[j]) / std::sqrt(1.0 + 4.0 * a2 * y[i] * y[j]);
        double yi2 = y[i] * y[i];
        // whole-loops appear twice with j = i, half-loops once
        for (double a2 : sys.whole[i])
            acc += 2.0 * a2 * (2.0 * y[i] * lambda[i]) / std::sqrt(1.0 + 4.0 * a2 * yi2);
        for (double a2 : sys.half[i])
            acc += a2 * (2.0 * y[i] * lambda[i]) / std::sqrt(1.0 + 4.0 * a2 * yi2);
        res.stationarity = std::max(res.stationarity, std::abs(lambda[i] * (t - g.b[i]) - acc));
        res.equalize = std::max(res.equalize, std::abs(t - term_at(sys, g, y, i)));
    }
    return res;
}

std::vector<double> solve_multipliers(const JacobiGraph& g, double t,
                                      const std::vector<double>& y) {
    validate(g);
    System sys(g);
    const int n = g.n;
    // Rows of the homogeneous multiplier system M lambda = 0 plus the
    // normalization row; solved via normal equations.
    DenseMatrix m(n);
    for (int i = 0; i < n; ++i) {
        m.at(i, i) += t - g.b[i];
        for (const auto& [j, a2] : sys.nbr[i]) {
            double root = std::sqrt(1.0 + 4.0 * a2 * y[i] * y[j]);
            m.at(i, i) -= a2 * y[j] / root;
            m.at(i, j) -= a2 * y[i] / root;
        }
        double yi2 = y[i] * y[i];
        for (double a2 : sys.whole[i]) m.at(i, i) -= 2.0 * a2 * 2.0 * y[i] / std::sqrt(1.0 + 4.0 * a2 * yi2);
        for (double a2 : sys.half[i]) m.at(i, i) -= a2 * 2.0 * y[i] / std::sqrt(1.0 + 4.0 * a2 * yi2);
    }
    DenseMatrix normal(n);
    std::vector<double> rhs(n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double acc = 1.0;  // normalization row contributes 1 to every entry
            for (int r = 0; r < n; ++r) acc += m.at(r, i) * m.at(r, j);
            normal.at(i, j) = acc;
        }
    for (int i = 0; i < n; ++i) rhs[i] = 1.0;
    return detail::solve_linear(normal, rhs);
}

StructuralBounds structural_bounds(const JacobiGraph& g) {
    validate(g);
    StructuralBounds out;
    if (!g.half_loops.empty() || !g.all_potentials_zero()) return out;
    for (const Edge& e : g.edges)
        if (e.a != 1.0) return out;
    for (const Loop& l : g.whole_loops)
        if (l.a != 1.0) return out;

    std::vector<int> deg = degree_profile(g);
    double sum = 0.0;
    int dmax = 0;
    for (int d : deg) {
        sum += d;
        dmax = std::max(dmax, d);
    }
    double davg = sum / g.n;
    out.applicable = true;
    out.hoory_lower = davg >= 1.0 ? 2.0 * std::sqrt(davg - 1.0) : 0.0;
    // the d-regular tree has radius 2 sqrt(d-1) only for d >= 2; the
    // 1-regular tree is a single edge with radius 1
    if (dmax >= 2)
        out.dmax_upper = 2.0 * std::sqrt(double(dmax) - 1.0);
    else
        out.dmax_upper = double(dmax);
    SpectrumSample s = sym_eigenvalues(dense_operator(g));
    out.lambda_max_base = s.eigenvalues.back();
    return out;
}

double minmax_descent(const JacobiGraph& g, std::vector<double>& y, int rounds) {
    validate(g);
    if (int(y.size()) != g.n) throw ValidationError("y length mismatch");
    System sys(g);
    // Anneal a log-sum-exp smoothing of the max; plain coordinate moves stall
    // where several terms tie at the optimum.
    auto smoothed = [&](const std::vector<double>& point, double beta) {
        double top = -1e300;
        std::vector<double> terms(g.n);
        for (int i = 0; i < g.n; ++i) {
            terms[i] = term_at(sys, g, point, i);
            top = std::max(top, terms[i]);
        }
        double acc = 0.0;
        for (double t : terms) acc += std::exp(beta * (t - top));
        return top + std::log(acc) / beta;
    };
    for (double beta : {8.0, 64.0, 512.0, 4096.0, 32768.0}) {
        double best = smoothed(y, beta);
        for (double step = 0.5; step > 1e-10; step *= 0.5) {
            for (int r = 0; r < rounds; ++r) {
                bool improved = false;
                for (int i = -1; i < g.n; ++i) {
                    for (double dir : {+1.0, -1.0}) {
                        std::vector<double> trial = y;
                        double factor = std::exp(dir * step);
                        if (i < 0)
                            for (double& v : trial) v *= factor;
                        else
                            trial[i] *= factor;
                        double val = smoothed(trial, beta);
                        if (val < best - 1e-15) {
                            best = val;
                            y = std::move(trial);
                            improved = true;
                        }
                    }
                }
                if (!improved) break;
            }
        }
    }
    return minmax_value(g, y);
}

}  // namespace spectra
