#include "spectra/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <tuple>

namespace spectra {

bool JacobiGraph::all_potentials_zero() const {
    for (double x : b)
        if (x != 0.0) return false;
    return true;
}

namespace {

void check_index(int v, int n, const std::string& what) {
    if (v < 0 || v >= n)
        throw ValidationError(what + " vertex " + std::to_string(v) + " out of range [0, " +
                              std::to_string(n) + ")");
}

void check_coeff(double a, const std::string& what) {
    if (a == 0.0) throw ValidationError(what + " has zero coefficient");
    if (!std::isfinite(a)) throw ValidationError(what + " has non-finite coefficient");
}

}  // namespace

void validate_local(const JacobiGraph& g) {
    if (g.n < 1) throw ValidationError("graph needs at least one vertex");
    if (int(g.b.size()) != g.n) throw ValidationError("potential vector length mismatch");
    for (double x : g.b)
        if (!std::isfinite(x)) throw ValidationError("non-finite potential");
    for (const Edge& e : g.edges) {
        check_index(e.u, g.n, "edge");
        check_index(e.v, g.n, "edge");
        if (e.u == e.v) throw ValidationError("self-edge must be declared loop/halfloop");
        check_coeff(e.a, "edge");
    }
    for (const Loop& l : g.whole_loops) {
        check_index(l.v, g.n, "loop");
        check_coeff(l.a, "loop");
    }
    for (const Loop& l : g.half_loops) {
        check_index(l.v, g.n, "halfloop");
        check_coeff(l.a, "halfloop");
    }
}

bool is_connected(const JacobiGraph& g) {
    if (g.n <= 1) return true;
    std::vector<std::vector<int>> adj(g.n);
    for (const Edge& e : g.edges) {
        adj[e.u].push_back(e.v);
        adj[e.v].push_back(e.u);
    }
    std::vector<char> seen(g.n, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    int count = 1;
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        for (int w : adj[v])
            if (!seen[w]) {
                seen[w] = 1;
                ++count;
                stack.push_back(w);
            }
    }
    return count == g.n;
}

void validate(const JacobiGraph& g) {
    validate_local(g);
    if (!is_connected(g)) throw ValidationError("graph is disconnected");
}

namespace {

struct Tokenizer {
    std::istream& in;
    int line_no = 0;

    // Returns tokens of the next non-empty line, with comments stripped.
    bool next_line(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            tokens.clear();
            std::istringstream ls(line);
            std::string tok;
            while (ls >> tok) tokens.push_back(tok);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_no) + ": " + msg);
    }
};

int parse_int(const std::string& tok, Tokenizer& tz) {
    try {
        size_t pos = 0;
        int v = std::stoi(tok, &pos);
        if (pos != tok.size()) tz.fail("bad integer '" + tok + "'");
        return v;
    } catch (const std::logic_error&) {
        tz.fail("bad integer '" + tok + "'");
    }
}

double parse_float(const std::string& tok, Tokenizer& tz) {
    const char* s = tok.c_str();
    char* end = nullptr;
    double v = std::strtod(s, &end);
    if (end != s + tok.size()) tz.fail("bad float '" + tok + "'");
    return v;
}

}  // namespace

JacobiGraph parse_graph(std::istream& in) {
    Tokenizer tz{in};
    std::vector<std::string> t;
    if (!tz.next_line(t) || t.size() != 2 || t[0] != "jacobi-graph" || t[1] != "v1")
        tz.fail("expected header 'jacobi-graph v1'");

    JacobiGraph g;
    bool have_n = false;
    while (tz.next_line(t)) {
        const std::string& kw = t[0];
        if (kw == "vertices") {
            if (have_n) tz.fail("duplicate 'vertices' line");
            if (t.size() != 2) tz.fail("usage: vertices <n>");
            g.n = parse_int(t[1], tz);
            if (g.n < 1) tz.fail("vertex count must be positive");
            g.b.assign(g.n, 0.0);
            have_n = true;
            continue;
        }
        if (!have_n) tz.fail("'vertices' line must come first");
        if (kw == "b") {
            if (t.size() != 3) tz.fail("usage: b <v> <float>");
            int v = parse_int(t[1], tz);
            if (v < 0 || v >= g.n) tz.fail("vertex out of range");
            g.b[v] = parse_float(t[2], tz);
        } else if (kw == "edge") {
            if (t.size() != 4) tz.fail("usage: edge <u> <v> <float>");
            Edge e{parse_int(t[1], tz), parse_int(t[2], tz), parse_float(t[3], tz)};
            if (e.u < 0 || e.u >= g.n || e.v < 0 || e.v >= g.n) tz.fail("vertex out of range");
            if (e.u == e.v) tz.fail("self-edge must be declared loop/halfloop");
            if (e.a == 0.0) tz.fail("zero coefficient");
            g.edges.push_back(e);
        } else if (kw == "loop" || kw == "halfloop") {
            if (t.size() != 3) tz.fail("usage: " + kw + " <v> <float>");
            Loop l{parse_int(t[1], tz), parse_float(t[2], tz)};
            if (l.v < 0 || l.v >= g.n) tz.fail("vertex out of range");
            if (l.a == 0.0) tz.fail("zero coefficient");
            (kw == "loop" ? g.whole_loops : g.half_loops).push_back(l);
        } else {
            tz.fail("unknown keyword '" + kw + "'");
        }
    }
    if (!have_n) throw ParseError("missing 'vertices' line");
    validate(g);
    return g;
}

JacobiGraph parse_graph(const std::string& text) {
    std::istringstream in(text);
    return parse_graph(in);
}

JacobiGraph parse_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return parse_graph(in);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

std::string format_double(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

void serialize_graph(const JacobiGraph& g, std::ostream& out) {
    out << "jacobi-graph v1\n";
    out << "vertices " << g.n << "\n";
    for (int v = 0; v < g.n; ++v)
        if (g.b[v] != 0.0) out << "b " << v << " " << format_double(g.b[v]) << "\n";
    for (const Edge& e : g.edges)
        out << "edge " << e.u << " " << e.v << " " << format_double(e.a) << "\n";
    for (const Loop& l : g.whole_loops)
        out << "loop " << l.v << " " << format_double(l.a) << "\n";
    for (const Loop& l : g.half_loops)
        out << "halfloop " << l.v << " " << format_double(l.a) << "\n";
}

std::string serialize_graph(const JacobiGraph& g) {
    std::ostringstream out;
    serialize_graph(g, out);
    return out.str();
}

std::vector<int> degree_profile(const JacobiGraph& g) {
    std::vector<int> deg(g.n, 0);
    for (const Edge& e : g.edges) {
        ++deg[e.u];
        ++deg[e.v];
    }
    for (const Loop& l : g.whole_loops) deg[l.v] += 2;
    for (const Loop& l : g.half_loops) deg[l.v] += 1;
    return deg;
}

DenseMatrix dense_operator(const JacobiGraph& g) {
    DenseMatrix m(g.n);
    for (int v = 0; v < g.n; ++v) m.at(v, v) = g.b[v];
    for (const Edge& e : g.edges) {
        m.at(e.u, e.v) += e.a;
        m.at(e.v, e.u) += e.a;
    }
    for (const Loop& l : g.whole_loops) m.at(l.v, l.v) += 2.0 * l.a;
    for (const Loop& l : g.half_loops) m.at(l.v, l.v) += l.a;
    return m;
}

double row_sum_bound(const JacobiGraph& g) {
    std::vector<double> row(g.n, 0.0);
    for (const Edge& e : g.edges) {
        row[e.u] += std::abs(e.a);
        row[e.v] += std::abs(e.a);
    }
    for (const Loop& l : g.whole_loops) row[l.v] += 2.0 * std::abs(l.a);
    for (const Loop& l : g.half_loops) row[l.v] += std::abs(l.a);
    double best = -1e300;
    for (int v = 0; v < g.n; ++v) best = std::max(best, g.b[v] + row[v]);
    return best;
}

JacobiGraph negate(const JacobiGraph& g) {
    JacobiGraph out = g;
    for (double& x : out.b) x = -x;
    for (Edge& e : out.edges) e.a = -e.a;
    for (Loop& l : out.whole_loops) l.a = -l.a;
    for (Loop& l : out.half_loops) l.a = -l.a;
    return out;
}

DirectedEdgeSet directed_edges(const JacobiGraph& g) {
    DirectedEdgeSet s;
    s.out.resize(g.n);
    auto add = [&s](int from, int to, double a) {
        s.arcs.push_back(DirectedEdge{from, to, a, -1});
        s.out[from].push_back(int(s.arcs.size()) - 1);
        return int(s.arcs.size()) - 1;
    };
    for (const Edge& e : g.edges) {
        int f = add(e.u, e.v, e.a);
        int r = add(e.v, e.u, e.a);
        s.arcs[f].reverse = r;
        s.arcs[r].reverse = f;
    }
    for (const Loop& l : g.whole_loops) {
        int f = add(l.v, l.v, l.a);
        int r = add(l.v, l.v, l.a);
        s.arcs[f].reverse = r;
        s.arcs[r].reverse = f;
    }
    for (const Loop& l : g.half_loops) {
        int f = add(l.v, l.v, l.a);
        s.arcs[f].reverse = f;
    }
    return s;
}

bool graphs_equal(const JacobiGraph& lhs, const JacobiGraph& rhs) {
    if (lhs.n != rhs.n || lhs.b != rhs.b) return false;
    auto edge_key = [](const Edge& e) {
        int u = std::min(e.u, e.v), v = std::max(e.u, e.v);
        return std::make_tuple(u, v, e.a);
    };
    auto loop_key = [](const Loop& l) { return std::make_tuple(l.v, l.a); };
    auto sorted_edges = [&edge_key](std::vector<Edge> es) {
        std::vector<std::tuple<int, int, double>> keys;
        keys.reserve(es.size());
        for (const Edge& e : es) keys.push_back(edge_key(e));
        std::sort(keys.begin(), keys.end());
        return keys;
    };
    auto sorted_loops = [&loop_key](std::vector<Loop> ls) {
        std::vector<std::tuple<int, double>> keys;
        keys.reserve(ls.size());
        for (const Loop& l : ls) keys.push_back(loop_key(l));
        std::sort(keys.begin(), keys.end());
        return keys;
    };
    return sorted_edges(lhs.edges) == sorted_edges(rhs.edges) &&
           sorted_loops(lhs.whole_loops) == sorted_loops(rhs.whole_loops) &&
           sorted_loops(lhs.half_loops) == sorted_loops(rhs.half_loops);
}

}  // namespace spectra
