#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "spectra/aomoto.hpp"
#include "spectra/bands.hpp"
#include "spectra/cover.hpp"
#include "spectra/edges.hpp"
#include "spectra/eigensolver.hpp"
#include "spectra/graph.hpp"
#include "spectra/lift.hpp"
#include "spectra/product.hpp"

namespace {

using namespace spectra;

constexpr const char* kDefaultsFooter =
    "Defaults and pinned constants:\n"
    "  radius bisection tol 1e-8; transform solve tol 1e-12, damping 0.5,\n"
    "  iteration budget 1e5 (4000 per grid solve inside dos sweeps);\n"
    "  eta 1e-3; band threshold 1e-3, gap merge 3*eta; cover/product vertex\n"
    "  cap 5e6, radius cap 64; lift sampling d >= 1 (even with halfloops).\n"
    "PRNG (bit-exact): substream x=(seed^index)+0x9E3779B97F4A7C15,\n"
    "  x=(x^(x>>30))*0xBF58476D1CE4E5B9, x=(x^(x>>27))*0x94D049BB133111EB,\n"
    "  x^=x>>31; stream xorshift64* shifts 12/25/27, mul 0x2545F4914F6CDD1D.\n"
    "Exit codes: 0 ok, 1 usage/input error, 2 numeric (unconverged or\n"
    "  uncertified), 3 resource cap exceeded.";

struct OutputTarget {
    std::string path;  // empty = stdout

    void write(const std::string& content) const {
        if (path.empty()) {
            std::cout << content;
            return;
        }
        std::ofstream f(path, std::ios::binary);
        if (!f) throw ParseError("cannot open output file '" + path + "'");
        f << content;
    }
};

struct GridSpec {
    bool given = false;
    double lo = 0.0, hi = 0.0, step = 0.004;
};

GridSpec parse_grid(const std::string& text) {
    GridSpec g;
    if (text.empty()) return g;
    double lo, hi, step;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3 || step <= 0.0 || hi < lo)
        throw ParseError("bad grid '" + text + "', expected lo:hi:step");
    g.given = true;
    g.lo = lo;
    g.hi = hi;
    g.step = step;
    return g;
}

GridSpec default_grid(const JacobiGraph& g, double step) {
    GridSpec grid;
    double r = row_sum_bound(g);
    double l = -row_sum_bound(negate(g));
    grid.lo = l - 0.5;
    grid.hi = r + 0.5;
    grid.step = step;
    grid.given = true;
    return grid;
}

std::string format8(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8f", x);
    return buf;
}

std::string format17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

int run_radius(const std::string& input, double tol, bool csv, const OutputTarget& out) {
    JacobiGraph g = parse_graph_file(input);
    SpectralEdges edges = spectral_edges(g, tol);
    StructuralBounds bounds = structural_bounds(g);
    std::ostringstream text;
    if (csv) {
        text << "rho_l,rho_r,certificate_gap,hoory_lower,dmax_upper,lambda_max\n";
        text << format17(edges.rho_l) << "," << format17(edges.rho_r) << ","
             << format17(edges.certificate_gap) << ",";
        if (bounds.applicable)
            text << format17(bounds.hoory_lower) << "," << format17(bounds.dmax_upper) << ","
                 << format17(bounds.lambda_max_base);
        else
            text << ",,";
        text << "\n";
    } else {
        text << format8(edges.rho_l) << " " << format8(edges.rho_r) << " "
             << format17(edges.certificate_gap) << "\n";
        if (bounds.applicable)
            text << "bounds: hoory " << format8(bounds.hoory_lower) << " dmax_upper "
                 << format8(bounds.dmax_upper) << " lambda_max "
                 << format8(bounds.lambda_max_base) << "\n";
    }
    out.write(text.str());
    return edges.certified ? 0 : 2;
}

DensityCurve lift_density_curve(const JacobiGraph& g, const GridSpec& grid, int bins, int d,
                                std::uint64_t seed, int trials) {
    std::vector<double> mass(bins, 0.0);
    for (int t = 0; t < trials; ++t) {
        JacobiGraph lift = sample_lift(g, d, seed + std::uint64_t(t));
        SpectrumSample s = sym_eigenvalues(dense_operator(lift));
        Histogram h = histogram(s, bins, grid.lo, grid.hi);
        for (int i = 0; i < bins; ++i) mass[i] += h.mass[i];
    }
    double width = (grid.hi - grid.lo) / bins;
    DensityCurve curve;
    curve.eta = 0.0;
    for (int i = 0; i < bins; ++i) {
        curve.x.push_back(grid.lo + width * (i + 0.5));
        curve.density.push_back(mass[i] / trials / width);
        curve.converged.push_back(1);
    }
    return curve;
}

int run_dos(const std::string& input, const std::string& method, GridSpec grid, double eta,
            int bins, int d, std::uint64_t seed, int trials, const OutputTarget& out) {
    JacobiGraph g = parse_graph_file(input);
    if (!grid.given) grid = default_grid(g, 0.004);
    DensityCurve curve;
    if (method == "aomoto") {
        curve = dos_curve(g, grid.lo, grid.hi, grid.step, eta);
    } else if (method == "lift") {
        curve = lift_density_curve(g, grid, bins, d, seed, trials);
    } else {
        throw ParseError("unknown method '" + method + "'");
    }
    std::ostringstream text;
    write_dos_csv(curve, text);
    out.write(text.str());
    for (auto flag : curve.converged)
        if (!flag) return 2;
    return 0;
}

int run_bands(const std::string& input, GridSpec grid, double eta, double threshold,
              const OutputTarget& out) {
    JacobiGraph g = parse_graph_file(input);
    if (!grid.given) grid = default_grid(g, 0.004);
    DensityCurve curve = dos_curve(g, grid.lo, grid.hi, grid.step, eta);
    BandReport report = detect_bands(curve, threshold);
    band_masses(curve, g, report);
    std::ostringstream text;
    write_band_csv(report, text);
    out.write(text.str());
    return report.quantization_ok ? 0 : 2;
}

int run_cover(const std::string& input, int root, int radius, std::size_t cap,
              const OutputTarget& out) {
    JacobiGraph g = parse_graph_file(input);
    CoverLimits limits;
    limits.max_vertices = cap;
    TruncatedCover cover = build_cover_ball(g, root, radius, limits);
    std::ostringstream text;
    serialize_cover(cover, text);
    out.write(text.str());
    return 0;
}

int run_lift(const std::string& input, int d, std::uint64_t seed, const std::string& eigs_path,
             const OutputTarget& out) {
    JacobiGraph g = parse_graph_file(input);
    JacobiGraph lift = sample_lift(g, d, seed);
    std::ostringstream text;
    serialize_graph(lift, text);
    out.write(text.str());
    if (!eigs_path.empty()) {
        SpectrumSample s = sym_eigenvalues(dense_operator(lift));
        std::ostringstream eigs;
        eigs << "eigenvalue\n";
        for (double lam : s.eigenvalues) eigs << format17(lam) << "\n";
        OutputTarget{eigs_path}.write(eigs.str());
    }
    return 0;
}

int run_moments(const std::string& input, int k_max, int root, const OutputTarget& out) {
    JacobiGraph g = parse_graph_file(input);
    std::ostringstream text;
    text << "k,moment\n";
    for (int k = 0; k <= k_max; ++k) {
        double m = root >= 0 ? walk_moment(g, root, k) : dos_moment(g, k);
        text << k << "," << format17(m) << "\n";
    }
    out.write(text.str());
    return 0;
}

int run_product(const std::string& input, int depth, std::size_t cap, const OutputTarget& out) {
    AmalgamSpec spec = parse_amalgam_file(input);
    for (const std::string& w : spec.warnings) std::cerr << "warning: " << w << "\n";
    ProductLimits limits;
    limits.max_vertices = cap;
    ProductCore core = build_product_core(spec, depth, limits);
    std::ostringstream text;
    serialize_product_core(core, text);
    out.write(text.str());
    return 0;
}

int run_cayley(const std::string& input, const OutputTarget& out) {
    CayleyData data = parse_cayley_file(input);
    AmalgamSpec spec = cayley_spec(data);
    std::ostringstream text;
    serialize_amalgam(spec, text);
    out.write(text.str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectra: Jacobi operators on universal covering trees"};
    app.footer(kDefaultsFooter);
    app.require_subcommand(1);

    int threads = 0;
    app.add_option("--threads", threads, "worker thread count (0: runtime default)");

    std::string input, out_path, grid_text, method = "aomoto", eigs_path;
    double tol = 1e-8, eta = 1e-3, threshold = 1e-3;
    bool csv = false;
    int bins = 128, d = 400, trials = 1, root = 0, radius = 4, k_max = 6, moment_root = -1;
    std::uint64_t seed = 1;
    std::size_t cap = 5'000'000;

    // global flags like --threads may appear after the subcommand
    app.fallthrough();

    CLI::App* radius_cmd = app.add_subcommand("radius", "spectral edges of the covering tree");
    radius_cmd->fallthrough();
    radius_cmd->add_option("input", input)->required();
    radius_cmd->add_option("--tol", tol, "bisection tolerance (1e-8)");
    radius_cmd->add_flag("--csv", csv, "machine-readable output");
    radius_cmd->add_option("--out", out_path);

    CLI::App* dos_cmd = app.add_subcommand("dos", "density of states curve");
    dos_cmd->fallthrough();
    dos_cmd->add_option("input", input)->required();
    dos_cmd->add_option("--method", method, "aomoto | lift (aomoto)");
    dos_cmd->add_option("--grid", grid_text, "lo:hi:step (auto)");
    dos_cmd->add_option("--eta", eta, "smoothing (1e-3)");
    dos_cmd->add_option("--bins", bins, "histogram bins, lift method (128)");
    dos_cmd->add_option("--d", d, "sheets per lift (400)");
    dos_cmd->add_option("--seed", seed, "base seed (1)");
    dos_cmd->add_option("--trials", trials, "lift trials (1)");
    dos_cmd->add_option("--out", out_path);

    CLI::App* bands_cmd = app.add_subcommand("bands", "band intervals and masses");
    bands_cmd->fallthrough();
    bands_cmd->add_option("input", input)->required();
    bands_cmd->add_option("--grid", grid_text, "lo:hi:step (auto)");
    bands_cmd->add_option("--eta", eta, "smoothing (1e-3)");
    bands_cmd->add_option("--threshold", threshold, "density threshold (1e-3)");
    bands_cmd->add_option("--out", out_path);

    CLI::App* cover_cmd = app.add_subcommand("cover", "truncated universal cover");
    cover_cmd->fallthrough();
    cover_cmd->add_option("input", input)->required();
    cover_cmd->add_option("--root", root, "base root vertex (0)");
    cover_cmd->add_option("--radius", radius, "ball radius")->required();
    cover_cmd->add_option("--max-vertices", cap, "vertex cap (5e6)");
    cover_cmd->add_option("--out", out_path);

    CLI::App* lift_cmd = app.add_subcommand("lift", "random permutation lift");
    lift_cmd->fallthrough();
    lift_cmd->add_option("input", input)->required();
    lift_cmd->add_option("--d", d, "sheet count (400)");
    lift_cmd->add_option("--seed", seed, "seed (1)");
    lift_cmd->add_option("--eigs", eigs_path, "also write eigenvalues to this CSV");
    lift_cmd->add_option("--out", out_path);

    CLI::App* moments_cmd = app.add_subcommand("moments", "closed-walk moments");
    moments_cmd->fallthrough();
    moments_cmd->add_option("input", input)->required();
    moments_cmd->add_option("--k", k_max, "largest moment order (6)");
    moments_cmd->add_option("--root", moment_root, "rooted moments (default: averaged)");
    moments_cmd->add_option("--out", out_path);

    CLI::App* product_cmd = app.add_subcommand("product", "amalgamated free product core");
    product_cmd->fallthrough();
    product_cmd->add_option("input", input)->required();
    product_cmd->add_option("--depth", radius, "truncation radius")->required();
    product_cmd->add_option("--max-vertices", cap, "vertex cap (5e6)");
    product_cmd->add_option("--out", out_path);

    CLI::App* cayley_cmd = app.add_subcommand("cayley", "group file to amalgam spec");
    cayley_cmd->fallthrough();
    cayley_cmd->add_option("input", input)->required();
    cayley_cmd->add_option("--out", out_path);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#endif

    OutputTarget out{out_path};
    try {
        if (radius_cmd->parsed()) return run_radius(input, tol, csv, out);
        if (dos_cmd->parsed())
            return run_dos(input, method, parse_grid(grid_text), eta, bins, d, seed, trials, out);
        if (bands_cmd->parsed())
            return run_bands(input, parse_grid(grid_text), eta, threshold, out);
        if (cover_cmd->parsed()) return run_cover(input, root, radius, cap, out);
        if (lift_cmd->parsed()) return run_lift(input, d, seed, eigs_path, out);
        if (moments_cmd->parsed()) return run_moments(input, k_max, moment_root, out);
        if (product_cmd->parsed()) return run_product(input, radius, cap, out);
        if (cayley_cmd->parsed()) return run_cayley(input, out);
    } catch (const ResourceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
