// Timings of the parallel kernels against their serial references.

#include <chrono>
#include <cstdio>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "spectra/aomoto.hpp"
#include "spectra/cover.hpp"
#include "spectra/eigensolver.hpp"
#include "spectra/graph.hpp"
#include "spectra/lift.hpp"

using namespace spectra;
using Clock = std::chrono::steady_clock;

namespace {

double ms_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(Clock::now() - t0)
        .count();
}

JacobiGraph k4() {
    JacobiGraph g;
    g.n = 4;
    g.b.assign(4, 0.0);
    for (int u = 0; u < 4; ++u)
        for (int v = u + 1; v < 4; ++v) g.edges.push_back(Edge{u, v, 1.0});
    return g;
}

void report(const char* name, double serial_ms, double parallel_ms) {
    std::printf("%-28s serial %9.1f ms   parallel %9.1f ms   speedup %.2fx\n", name, serial_ms,
                parallel_ms, serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
    int n_eig = argc > 1 ? std::atoi(argv[1]) : 900;
#ifdef _OPENMP
    std::printf("threads: %d\n", omp_get_max_threads());
#else
    std::printf("threads: 1 (OpenMP disabled)\n");
#endif

    {
        JacobiGraph lift = sample_lift(k4(), n_eig / 4, 42);
        DenseMatrix m = dense_operator(lift);
        auto t0 = Clock::now();
        SpectrumSample a = ref::sym_eigenvalues(m);
        double serial = ms_since(t0);
        t0 = Clock::now();
        SpectrumSample b = sym_eigenvalues(m);
        double parallel = ms_since(t0);
        report("eigenvalues", serial, parallel);
        double drift = 0.0;
        for (std::size_t i = 0; i < a.eigenvalues.size(); ++i)
            drift = std::max(drift, std::abs(a.eigenvalues[i] - b.eigenvalues[i]));
        std::printf("  max eigenvalue drift %.2e over N=%d\n", drift, m.n);
    }

    {
        TruncatedCover ball = build_cover_ball(k4(), 0, 16, CoverLimits{2'000'000, 64});
        SparseOperator op = sparse_operator(ball.graph);
        std::vector<double> x(op.n, 1.0), y;
        auto t0 = Clock::now();
        for (int rep = 0; rep < 40; ++rep) {
            ref::sparse_apply(op, x, y);
            x.swap(y);
        }
        double serial = ms_since(t0);
        x.assign(op.n, 1.0);
        t0 = Clock::now();
        for (int rep = 0; rep < 40; ++rep) {
            op.apply(x, y);
            x.swap(y);
        }
        double parallel = ms_since(t0);
        report("cover ball matvec x40", serial, parallel);
        std::printf("  ball vertices %d\n", op.n);
    }

    {
        JacobiGraph g = k4();
        auto t0 = Clock::now();
        DensityCurve a = ref::dos_curve(g, -3.0, 3.0, 0.02, 1e-2);
        double serial = ms_since(t0);
        t0 = Clock::now();
        DensityCurve b = dos_curve(g, -3.0, 3.0, 0.02, 1e-2);
        double parallel = ms_since(t0);
        report("density curve 301 pts", serial, parallel);
        std::printf("  curves identical: %s\n", a.density == b.density ? "yes" : "NO");
    }

    {
        JacobiGraph g = k4();
        auto t0 = Clock::now();
        LiftInstance a = ref::make_lift_instance(g, 400000, 7);
        double serial = ms_since(t0);
        t0 = Clock::now();
        LiftInstance b = make_lift_instance(g, 400000, 7);
        double parallel = ms_since(t0);
        report("lift permutations d=4e5", serial, parallel);
        std::printf("  instances identical: %s\n", a.edge_perm == b.edge_perm ? "yes" : "NO");
    }
    return 0;
}
