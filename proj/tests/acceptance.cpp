// Acceptance suite: runs every gate criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exits nonzero if any fail.
//
// Usage: acceptance [path-to-spectra-cli]

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "helpers.hpp"
#include "oracles.hpp"
#include "spectra/aomoto.hpp"
#include "spectra/bands.hpp"
#include "spectra/cover.hpp"
#include "spectra/edges.hpp"
#include "spectra/eigensolver.hpp"
#include "spectra/graph.hpp"
#include "spectra/lift.hpp"
#include "spectra/product.hpp"

using namespace spectra;
using namespace spectra::testing;
using Clock = std::chrono::steady_clock;

namespace {

int g_passed = 0;
int g_failed = 0;

void verdict(int index, bool ok, const std::string& name, const std::string& detail) {
    std::printf("[%2d] %s %s: %s\n", index, ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    (ok ? g_passed : g_failed) += 1;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration_cast<std::chrono::duration<double>>(Clock::now() - t0).count();
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

JacobiGraph three_vertex_two_loop() {
    // path u-v-w with two distinct-weight loops at u; with whole-loops the
    // loop operator at u always has zero in its spectrum, so the gapped
    // variant needs half-loops
    JacobiGraph g;
    g.n = 3;
    g.b = {0.0, 0.0, 0.0};
    g.edges = {Edge{0, 1, 1.0}, Edge{1, 2, 1.0}};
    g.half_loops = {Loop{0, 1.0}, Loop{0, 2.0}};
    return g;
}

DensityCurve curve_of(const JacobiGraph& g, double step = 0.004, double eta = 1e-3) {
    double hi = row_sum_bound(g) + 0.5;
    double lo = -row_sum_bound(negate(g)) - 0.5;
    return dos_curve(g, lo, hi, step, eta);
}

double density_at(const JacobiGraph& g, double x, double eta = 1e-3) {
    return dos_curve(g, x, x, 1.0, eta).density[0];
}

// --- criteria ---

void criterion_kesten() {
    struct Case {
        const char* label;
        JacobiGraph g;
        double expect;
    };
    std::vector<Case> cases = {{"K4", complete_graph(4), 2.0 * std::sqrt(2.0)},
                               {"3 half-loops", bouquet_half(3), 2.0 * std::sqrt(2.0)},
                               {"2 whole-loops", bouquet_whole(2), 2.0 * std::sqrt(3.0)}};
    bool ok = true;
    std::string detail;
    for (Case& c : cases) {
        auto t0 = Clock::now();
        SpectralEdges e = right_edge(c.g);
        double secs = seconds_since(t0);
        double err = std::abs(e.rho_r - c.expect);
        if (err > 1e-6 || secs >= 1.0 || !e.certified) ok = false;
        detail += std::string(c.label) + " rho " + fmt(e.rho_r) + " (err " + fmt(err) + ", " +
                  fmt(secs) + " s); ";
    }
    verdict(1, ok, "Kesten regular-tree radius", detail);
}

void criterion_godsil() {
    SpectralEdges e = right_edge(complete_bipartite(2, 3));
    double err = std::abs(e.rho_r - (1.0 + std::sqrt(2.0)));
    verdict(2, err <= 1e-6 && e.certified, "Godsil biregular radius",
            "K23 rho " + fmt(e.rho_r) + " (err " + fmt(err) + ")");
}

void criterion_closed_form_points() {
    auto t0 = Clock::now();
    CauchyVector k4 = solve_cauchy(complete_graph(4), Complex(3.0, 0.0));
    CauchyVector c3 = solve_cauchy(cycle_graph(3), Complex(3.0, 0.0));
    double secs = seconds_since(t0);
    double err_k4 = 0.0, err_c3 = 0.0;
    for (Complex w : k4.w) err_k4 = std::max(err_k4, std::abs(w - Complex(2.0 / 3.0, 0.0)));
    for (Complex w : c3.w)
        err_c3 = std::max(err_c3, std::abs(w - Complex(1.0 / std::sqrt(5.0), 0.0)));
    bool ok = k4.converged && c3.converged && k4.residual <= 1e-11 && c3.residual <= 1e-11 &&
              err_k4 <= 1e-10 && err_c3 <= 1e-10 && secs < 0.2;
    verdict(3, ok, "Aomoto closed-form points",
            "K4 w err " + fmt(err_k4) + ", C3 w err " + fmt(err_c3) + ", residuals " +
                fmt(k4.residual) + "/" + fmt(c3.residual) + ", " + fmt(secs) + " s");
}

void criterion_fts_gap() {
    JacobiGraph gap = two_vertex_parallel({2.0, 1.0, 1.0});
    JacobiGraph full = two_vertex_parallel({1.0, 1.0, 1.0});
    double dg = density_at(gap, 0.0);
    double df = density_at(full, 0.0);
    BandReport gap_bands = detect_bands(curve_of(gap));
    BandReport full_bands = detect_bands(curve_of(full));
    bool ok = dg < 1e-3 && gap_bands.bands.size() == 2 && df > 0.05 &&
              full_bands.bands.size() == 1;
    verdict(4, ok, "FTS gap criterion",
            "(2,1,1): density(0) " + fmt(dg) + ", " + std::to_string(gap_bands.bands.size()) +
                " bands; (1,1,1): density(0) " + fmt(df) + ", " +
                std::to_string(full_bands.bands.size()) + " bands");
}

// Eigenvalue fraction inside each detected band window, averaged over seeds.
std::vector<double> lift_band_masses(const JacobiGraph& g, const BandReport& report, int d,
                                     int seeds) {
    std::vector<double> mass(report.bands.size(), 0.0);
    long total = 0;
    for (int t = 1; t <= seeds; ++t) {
        JacobiGraph lift = sample_lift(g, d, std::uint64_t(t));
        SpectrumSample s = sym_eigenvalues(dense_operator(lift));
        total += long(s.eigenvalues.size());
        for (double lam : s.eigenvalues)
            for (std::size_t b = 0; b < report.bands.size(); ++b)
                if (lam >= report.bands[b].left - 0.05 && lam <= report.bands[b].right + 0.05)
                    mass[b] += 1.0;
    }
    for (double& m : mass) m /= double(total);
    return mass;
}

void criterion_sunada_masses() {
    JacobiGraph g = two_vertex_parallel({2.0, 1.0, 1.0});
    DensityCurve curve = curve_of(g);
    BandReport rep = detect_bands(curve);
    band_masses(curve, g, rep);
    bool ok = rep.bands.size() == 2;
    std::string detail = "(2,1,1) aomoto masses";
    for (const Band& b : rep.bands) {
        detail += " " + fmt(b.mass);
        if (std::abs(b.mass - 0.5) > 0.02) ok = false;
    }

    // lift route: eigenvalue fractions inside the detected intervals
    std::vector<double> lifted = lift_band_masses(g, rep, 500, 5);
    detail += "; lift masses";
    for (double m : lifted) {
        detail += " " + fmt(m);
        if (std::abs(m - 0.5) > 0.03) ok = false;
    }

    JacobiGraph three = three_vertex_two_loop();
    DensityCurve c3curve = curve_of(three);
    BandReport c3rep = detect_bands(c3curve);
    band_masses(c3curve, three, c3rep);
    detail += "; three-vertex masses";
    for (const Band& b : c3rep.bands) {
        detail += " " + fmt(b.mass);
        if (std::abs(b.mass - 0.5) > 0.03) ok = false;
    }
    detail += " (quantized in 1/" + std::to_string(c3rep.denom) +
              (c3rep.quantization_ok ? ", quantization holds)" : ", quantization fails)");
    verdict(5, ok, "Sunada mass quantization", detail);
}

void criterion_lift_moments() {
    auto t0 = Clock::now();
    JacobiGraph k4 = complete_graph(4);
    double m6 = walk_moment(k4, 0, 6);
    TruncatedCover ball = build_cover_ball(k4, 0, 4);
    double m6_dense = dense_walk_count(dense_operator(ball.graph), ball.root, 6);
    bool ok = m6 == 87.0 && std::abs(m6_dense - 87.0) < 1e-9;

    std::vector<double> expect = {3.0, 15.0, 87.0};
    std::vector<std::vector<double>> samples(3);
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        JacobiGraph lift = sample_lift(k4, 400, seed);
        SpectrumSample s = sym_eigenvalues(dense_operator(lift));
        for (int i = 0; i < 3; ++i) samples[i].push_back(empirical_moment(s, 2 * i + 2));
    }
    std::string detail = "walk oracle m6 " + fmt(m6) + " (ball power " + fmt(m6_dense) + ");";
    for (int i = 0; i < 3; ++i) {
        std::sort(samples[i].begin(), samples[i].end());
        double median = samples[i][samples[i].size() / 2];
        double rel = std::abs(median - expect[i]) / expect[i];
        detail += " m" + std::to_string(2 * i + 2) + " " + fmt(median);
        if (rel > 0.05) ok = false;
    }
    double secs = seconds_since(t0);
    detail += " (" + fmt(secs) + " s)";
    if (secs >= 120.0) ok = false;
    verdict(6, ok, "Lift moment convergence", detail);
}

void criterion_product_cover() {
    Xorshift64Star rng(20260808);
    int matched = 0;
    const int trials = 20;
    for (int t = 0; t < trials; ++t) {
        JacobiGraph g = random_connected_graph(rng, 6, 9, true, true, false, true);
        ProductCore core = build_product_core(cover_as_product(g, 0), 5);
        TruncatedCover ball = build_cover_ball(g, 0, 5);
        if (rooted_tree_canonical(core.graph, core.root) == rooted_tree_canonical(ball)) ++matched;
    }
    verdict(7, matched == trials, "Product-cover equivalence",
            std::to_string(matched) + "/" + std::to_string(trials) +
                " rooted-isomorphic at radius 5");
}

std::string cyclic_group_text(const std::string& name, int m) {
    std::string s = "group " + name + " order " + std::to_string(m) + "\n";
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            s += "mul " + std::to_string(i) + " " + std::to_string(j) + " " +
                 std::to_string((i + j) % m) + "\n";
    return s;
}

std::string sl2z_text() {
    std::string s = "cayley v1\n";
    s += cyclic_group_text("Z4", 4);
    s += cyclic_group_text("Z6", 6);
    s += "subgroup Z4 embed 0->0\nsubgroup Z4 embed 1->2\n";
    s += "subgroup Z6 embed 0->0\nsubgroup Z6 embed 1->3\n";
    s += "gens Z4 1 3\ngens Z6 1 5\n";
    return s;
}

void criterion_cayley() {
    CayleyData data = parse_cayley(sl2z_text());
    AmalgamSpec spec = cayley_spec(data);
    ProductCore core = build_product_core(spec, 4);
    std::vector<int> deg = degree_profile(core.graph);
    bool regular = true;
    for (int v = 0; v < core.graph.n; ++v)
        if (core.depth[v] <= 3 && deg[v] != 4) regular = false;

    NormalFormBall oracle = group_ball(data, 2);
    std::size_t ball2 = 0;
    for (int v = 0; v < core.graph.n; ++v)
        if (core.depth[v] <= 2) ++ball2;
    bool ok = regular && ball2 == oracle.total;
    verdict(8, ok, "Cayley construction",
            std::string(regular ? "4-regular within radius 3" : "NOT 4-regular") +
                ", radius-2 ball " + std::to_string(ball2) + " vs normal forms " +
                std::to_string(oracle.total));
}

void criterion_bounds() {
    std::vector<JacobiGraph> corpus;
    for (int n : {3, 4, 5, 6, 7, 8}) corpus.push_back(cycle_graph(n));
    corpus.push_back(complete_graph(4));
    corpus.push_back(complete_graph(5));
    corpus.push_back(complete_bipartite(2, 3));
    corpus.push_back(complete_bipartite(3, 3));
    corpus.push_back(path_graph(2));
    corpus.push_back(path_graph(5));
    corpus.push_back(bouquet_whole(1));
    corpus.push_back(bouquet_whole(3));
    Xorshift64Star rng(424243);
    while (corpus.size() < 50)
        corpus.push_back(random_connected_graph(rng, 6, 9, true, false, true));

    bool bracket_ok = true, cycle_ok = true, gap_ok = true;
    std::string bad;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        const JacobiGraph& g = corpus[i];
        StructuralBounds b = structural_bounds(g);
        if (!b.applicable) {
            bracket_ok = false;
            continue;
        }
        double rho = right_edge(g).rho_r;
        if (!(b.hoory_lower - 1e-6 <= rho && rho <= b.dmax_upper + 1e-6)) {
            bracket_ok = false;
            bad += " bracket@" + std::to_string(i);
        }
        // cycle rank: loops count once
        int cycles = int(g.edges.size()) + int(g.whole_loops.size()) - g.n + 1;
        bool is_cycle = g.whole_loops.empty() && int(g.edges.size()) == g.n &&
                        degree_profile(g) == std::vector<int>(g.n, 2);
        if (is_cycle && std::abs(rho - 2.0) > 1e-6) {
            cycle_ok = false;
            bad += " cycle@" + std::to_string(i);
        }
        if (cycles >= 2 && !(rho < b.lambda_max_base - 1e-4)) {
            gap_ok = false;
            bad += " gap@" + std::to_string(i);
        }
    }
    verdict(9, bracket_ok && cycle_ok && gap_ok, "Bounds and amenability",
            "50-graph corpus: brackets " + std::string(bracket_ok ? "hold" : "violated") +
                ", cycles at 2 " + std::string(cycle_ok ? "hold" : "violated") +
                ", strict gap " + std::string(gap_ok ? "holds" : "violated") + bad);
}

void criterion_edge_vanishing() {
    bool ok = true;
    std::string detail;
    for (auto& [label, g] :
         std::vector<std::pair<std::string, JacobiGraph>>{{"K4", complete_graph(4)},
                                                          {"2-loop bouquet", bouquet_whole(2)}}) {
        EdgeVanishing ev = edge_vanishing_check(g);
        bool this_ok = ev.positive && ev.monotone && ev.last_below_008;
        detail += label + " densities";
        for (double d : ev.density) detail += " " + fmt(d);
        detail += this_ok ? " (ok); " : " (last must be < 0.08); ";
        ok = ok && this_ok;
    }
    verdict(10, ok, "Edge vanishing", detail);
}

// --- determinism across worker counts ---

struct CliRunner {
    std::string binary;
    std::filesystem::path dir;

    std::string run(const std::string& args, const std::string& out_name) const {
        std::filesystem::path out = dir / out_name;
        std::string cmd = binary + " " + args + " --out " + out.string() + " >/dev/null 2>&1";
        int rc = std::system(cmd.c_str());
        if (rc != 0) return "<exit " + std::to_string(rc) + ">";
        std::ifstream f(out, std::ios::binary);
        std::stringstream buf;
        buf << f.rdbuf();
        return buf.str();
    }
};

void criterion_determinism(const std::string& binary) {
    namespace fs = std::filesystem;
    fs::path dir = fs::path("acceptance_tmp");
    fs::create_directories(dir);

    {
        std::ofstream f(dir / "k4.jg");
        serialize_graph(complete_graph(4), f);
    }
    {
        std::ofstream f(dir / "two.jg");
        serialize_graph(two_vertex_parallel({2.0, 1.0, 1.0}), f);
    }
    {
        std::ofstream f(dir / "sl2z.cay");
        f << sl2z_text();
    }
    CliRunner cli{binary, dir};
    cli.run("cayley " + (dir / "sl2z.cay").string(), "sl2z.amg");

    std::vector<std::pair<std::string, std::string>> commands = {
        {"radius " + (dir / "k4.jg").string() + " --csv", "radius.csv"},
        {"dos " + (dir / "k4.jg").string() + " --method aomoto --grid -3.2:3.2:0.02 --eta 1e-3",
         "dos_a.csv"},
        {"dos " + (dir / "k4.jg").string() +
             " --method lift --d 200 --seed 7 --trials 2 --grid -3.5:3.5:0.05 --bins 64",
         "dos_l.csv"},
        {"bands " + (dir / "two.jg").string() + " --grid -4.5:4.5:0.01", "bands.csv"},
        {"cover " + (dir / "k4.jg").string() + " --root 0 --radius 4", "cover.jg"},
        {"lift " + (dir / "k4.jg").string() + " --d 6 --seed 3", "lift.jg"},
        {"moments " + (dir / "k4.jg").string() + " --k 6", "moments.csv"},
        {"product " + (dir / "sl2z.amg").string() + " --depth 3", "core.jg"},
        {"cayley " + (dir / "sl2z.cay").string(), "cayley.amg"},
    };

    bool ok = true;
    std::string detail;
    for (auto& [args, out_name] : commands) {
        std::string first;
        for (int threads : {1, 2, 8}) {
            std::string got = cli.run(args + " --threads " + std::to_string(threads), out_name);
            if (got.rfind("<exit", 0) == 0) {
                ok = false;
                detail += out_name + " " + got + "; ";
                break;
            }
            if (first.empty())
                first = got;
            else if (got != first) {
                ok = false;
                detail += out_name + " differs across threads; ";
            }
        }
        // repeated run with the same thread count must also be identical
        std::string again = cli.run(args + " --threads 2", out_name);
        if (!first.empty() && again != first && again.rfind("<exit", 0) != 0) {
            ok = false;
            detail += out_name + " differs across runs; ";
        }
    }
    if (ok) detail = std::to_string(commands.size()) + " commands byte-identical across 1/2/8 workers";
    verdict(11, ok, "Determinism", detail);
}

}  // namespace

int main(int argc, char** argv) {
    std::string binary = argc > 1 ? argv[1] : "./spectra";
    auto t0 = Clock::now();

    criterion_kesten();
    criterion_godsil();
    criterion_closed_form_points();
    criterion_fts_gap();
    criterion_sunada_masses();
    criterion_lift_moments();
    criterion_product_cover();
    criterion_cayley();
    criterion_bounds();
    criterion_edge_vanishing();
    criterion_determinism(binary);

    std::printf("ACCEPTANCE: %d/%d criteria passed (%.1f s)\n", g_passed, g_passed + g_failed,
                seconds_since(t0));
    return g_failed == 0 ? 0 : 1;
}
