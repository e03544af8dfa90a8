#ifndef SPECTRA_EIGENSOLVER_HPP
#define SPECTRA_EIGENSOLVER_HPP

#include <iosfwd>
#include <vector>

#include "spectra/graph.hpp"

namespace spectra {

struct SpectrumSample {
    std::vector<double> eigenvalues;  // ascending
    int source_size = 0;
};

/// All eigenvalues of a symmetric matrix via Householder tridiagonalization
/// (OpenMP inner loops) and implicit-shift QL. Input must be symmetric within
/// 1e-12 relative; throws ValidationError otherwise, NumericError if QL fails
/// to converge within 30*N sweeps.
SpectrumSample sym_eigenvalues(DenseMatrix m);

/// (1/N) sum lambda^k.
double empirical_moment(const SpectrumSample& s, int k);

struct Histogram {
    std::vector<double> edges;  // size bins+1, uniform, strictly increasing
    std::vector<double> mass;   // size bins, sums to 1
};

/// Mass-normalized histogram on [lo, hi]; samples outside the range land in
/// the boundary bins so total mass stays 1. Throws on an empty sample.
Histogram histogram(const SpectrumSample& s, int bins, double lo, double hi);

/// CSV: header `x_left,x_right,mass`, 17-significant-digit decimals.
void write_histogram_csv(const Histogram& h, std::ostream& out);

namespace ref {
/// Serial textbook implementation kept as the test reference.
SpectrumSample sym_eigenvalues(DenseMatrix m);
}  // namespace ref

namespace detail {
void check_symmetric(const DenseMatrix& m);
void tridiagonalize_omp(DenseMatrix& m, std::vector<double>& d, std::vector<double>& e);
void tridiagonalize_serial(DenseMatrix& m, std::vector<double>& d, std::vector<double>& e);
void ql_implicit(std::vector<double>& d, std::vector<double>& e);

/// Gaussian elimination with partial pivoting; solves in place. Throws
/// NumericError on a singular system.
std::vector<double> solve_linear(DenseMatrix a, std::vector<double> rhs);
}  // namespace detail

}  // namespace spectra

#endif
