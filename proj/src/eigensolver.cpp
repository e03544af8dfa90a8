#include "spectra/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace spectra {

namespace detail {

void check_symmetric(const DenseMatrix& m) {
    double scale = 0.0;
    for (double x : m.a) scale = std::max(scale, std::abs(x));
    if (scale == 0.0) return;
    for (int i = 0; i < m.n; ++i)
        for (int j = i + 1; j < m.n; ++j)
            if (std::abs(m.at(i, j) - m.at(j, i)) > 1e-12 * scale)
                throw ValidationError("matrix is not symmetric");
}

namespace {
inline double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }
}  // namespace

// Householder reduction to tridiagonal form, eigenvalues only. The heavy
// O(N^2)-per-step loops are parallel over rows; every row is accumulated
// serially, so results do not depend on the thread count.
void tridiagonalize_omp(DenseMatrix& m, std::vector<double>& d, std::vector<double>& e) {
    const int n = m.n;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    double* a = m.a.data();
    auto A = [a, n](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };

    for (int i = n - 1; i >= 1; --i) {
        int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;

#pragma omp parallel for schedule(static) if (l > 160)
                for (int j = 0; j <= l; ++j) {
                    double gg = 0.0;
                    for (int k = 0; k <= j; ++k) gg += A(j, k) * A(i, k);
                    for (int k = j + 1; k <= l; ++k) gg += A(k, j) * A(i, k);
                    e[j] = gg / h;
                }
                double f2 = 0.0;
                for (int j = 0; j <= l; ++j) f2 += e[j] * A(i, j);
                double hh = f2 / (h + h);
                for (int j = 0; j <= l; ++j) e[j] -= hh * A(i, j);
#pragma omp parallel for schedule(dynamic, 64) if (l > 160)
                for (int j = 0; j <= l; ++j) {
                    double fj = A(i, j);
                    double gj = e[j];
                    for (int k = 0; k <= j; ++k) A(j, k) -= fj * e[k] + gj * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    for (int i = 0; i < n; ++i) d[i] = A(i, i);
}

void tridiagonalize_serial(DenseMatrix& m, std::vector<double>& d, std::vector<double>& e) {
    const int n = m.n;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    double* a = m.a.data();
    auto A = [a, n](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };

    for (int i = n - 1; i >= 1; --i) {
        int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(A(i, k));
            if (scale == 0.0) {
                e[i] = A(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    A(i, k) /= scale;
                    h += A(i, k) * A(i, k);
                }
                double f = A(i, l);
                double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                A(i, l) = f - g;
                for (int j = 0; j <= l; ++j) {
                    double gg = 0.0;
                    for (int k = 0; k <= j; ++k) gg += A(j, k) * A(i, k);
                    for (int k = j + 1; k <= l; ++k) gg += A(k, j) * A(i, k);
                    e[j] = gg / h;
                }
                double f2 = 0.0;
                for (int j = 0; j <= l; ++j) f2 += e[j] * A(i, j);
                double hh = f2 / (h + h);
                for (int j = 0; j <= l; ++j) e[j] -= hh * A(i, j);
                for (int j = 0; j <= l; ++j) {
                    double fj = A(i, j);
                    double gj = e[j];
                    for (int k = 0; k <= j; ++k) A(j, k) -= fj * e[k] + gj * A(i, k);
                }
            }
        } else {
            e[i] = A(i, l);
        }
        d[i] = h;
    }
    for (int i = 0; i < n; ++i) d[i] = A(i, i);
}

// QL with implicit shifts on a symmetric tridiagonal matrix.
void ql_implicit(std::vector<double>& d, std::vector<double>& e) {
    const int n = int(d.size());
    if (n == 0) return;
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;

    const long max_total = 30L * std::max(n, 1);
    long total_iter = 0;
    for (int l = 0; l < n; ++l) {
        for (;;) {
            int m;
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd) break;
            }
            if (m == l) break;
            if (++total_iter > max_total)
                throw NumericError("eigensolver: QL failed to converge");
            double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            double r = hypot2(g, 1.0);
            g = d[m] - d[l] + e[l] / (g + (g >= 0.0 ? std::abs(r) : -std::abs(r)));
            double s = 1.0, c = 1.0, p = 0.0;
            bool underflow = false;
            for (int i = m - 1; i >= l; --i) {
                double f = s * e[i];
                double b = c * e[i];
                r = hypot2(f, g);
                e[i + 1] = r;
                if (r == 0.0) {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if (underflow) continue;
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}

std::vector<double> solve_linear(DenseMatrix a, std::vector<double> rhs) {
    const int n = a.n;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a.at(r, col)) > std::abs(a.at(piv, col))) piv = r;
        if (std::abs(a.at(piv, col)) < 1e-300) throw NumericError("singular linear system");
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(a.at(piv, c), a.at(col, c));
            std::swap(rhs[piv], rhs[col]);
        }
        for (int r = col + 1; r < n; ++r) {
            double f = a.at(r, col) / a.at(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a.at(r, c) -= f * a.at(col, c);
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int c = r + 1; c < n; ++c) acc -= a.at(r, c) * x[c];
        x[r] = acc / a.at(r, r);
    }
    return x;
}

}  // namespace detail

SpectrumSample sym_eigenvalues(DenseMatrix m) {
    detail::check_symmetric(m);
    std::vector<double> d, e;
    detail::tridiagonalize_omp(m, d, e);
    detail::ql_implicit(d, e);
    std::sort(d.begin(), d.end());
    return SpectrumSample{std::move(d), m.n};
}

namespace ref {
SpectrumSample sym_eigenvalues(DenseMatrix m) {
    detail::check_symmetric(m);
    std::vector<double> d, e;
    detail::tridiagonalize_serial(m, d, e);
    detail::ql_implicit(d, e);
    std::sort(d.begin(), d.end());
    return SpectrumSample{std::move(d), m.n};
}
}  // namespace ref

double empirical_moment(const SpectrumSample& s, int k) {
    if (s.eigenvalues.empty()) throw ValidationError("empty spectrum sample");
    double acc = 0.0;
    for (double lam : s.eigenvalues) {
        double p = 1.0;
        for (int i = 0; i < k; ++i) p *= lam;
        acc += p;
    }
    return acc / double(s.eigenvalues.size());
}

Histogram histogram(const SpectrumSample& s, int bins, double lo, double hi) {
    if (s.eigenvalues.empty()) throw ValidationError("empty spectrum sample");
    if (bins < 1) throw ValidationError("need at least one bin");
    if (!(lo < hi)) throw ValidationError("histogram range is empty");
    Histogram h;
    h.edges.resize(bins + 1);
    double width = (hi - lo) / bins;
    for (int i = 0; i <= bins; ++i) h.edges[i] = lo + width * i;
    h.mass.assign(bins, 0.0);
    double unit = 1.0 / double(s.eigenvalues.size());
    for (double x : s.eigenvalues) {
        int idx = int(std::floor((x - lo) / width));
        idx = std::clamp(idx, 0, bins - 1);
        h.mass[idx] += unit;
    }
    return h;
}

void write_histogram_csv(const Histogram& h, std::ostream& out) {
    out << "x_left,x_right,mass\n";
    char buf[128];
    for (std::size_t i = 0; i < h.mass.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", h.edges[i], h.edges[i + 1],
                      h.mass[i]);
        out << buf;
    }
}

}  // namespace spectra
