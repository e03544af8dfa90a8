#include "spectra/cover.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace spectra {

TruncatedCover build_cover_ball(const JacobiGraph& g, int root, int radius,
                                const CoverLimits& limits) {
    validate(g);
    if (root < 0 || root >= g.n) throw ValidationError("root out of range");
    if (radius < 0) throw ValidationError("radius must be nonnegative");
    if (radius > limits.max_radius)
        throw ResourceError("radius " + std::to_string(radius) + " exceeds cap " +
                            std::to_string(limits.max_radius));

    DirectedEdgeSet des = directed_edges(g);

    TruncatedCover cover;
    cover.radius = radius;
    cover.fiber.push_back(root);
    cover.depth.push_back(0);
    std::vector<int> banned{-1};  // arc that may not be taken next

    std::vector<Edge> tree_edges;
    // Breadth-first: vertices are created in (depth, discovery) order.
    for (std::size_t cur = 0; cur < cover.fiber.size(); ++cur) {
        if (cover.depth[cur] == radius) continue;
        int base = cover.fiber[cur];
        for (int arc_id : des.out[base]) {
            if (arc_id == banned[cur]) continue;
            const DirectedEdge& arc = des.arcs[arc_id];
            if (cover.fiber.size() >= limits.max_vertices)
                throw ResourceError("cover ball exceeds vertex cap");
            int child = int(cover.fiber.size());
            cover.fiber.push_back(arc.to);
            cover.depth.push_back(cover.depth[cur] + 1);
            banned.push_back(arc.reverse);
            tree_edges.push_back(Edge{int(cur), child, arc.a});
        }
    }

    cover.graph.n = int(cover.fiber.size());
    cover.graph.b.resize(cover.graph.n);
    for (int v = 0; v < cover.graph.n; ++v) cover.graph.b[v] = g.b[cover.fiber[v]];
    cover.graph.edges = std::move(tree_edges);
    return cover;
}

SparseOperator sparse_operator(const JacobiGraph& g) {
    SparseOperator op;
    op.n = g.n;
    op.diag.assign(g.n, 0.0);
    for (int v = 0; v < g.n; ++v) op.diag[v] = g.b[v];
    for (const Loop& l : g.whole_loops) op.diag[l.v] += 2.0 * l.a;
    for (const Loop& l : g.half_loops) op.diag[l.v] += l.a;

    std::vector<int> count(g.n, 0);
    for (const Edge& e : g.edges) {
        ++count[e.u];
        ++count[e.v];
    }
    op.row_start.assign(g.n + 1, 0);
    for (int v = 0; v < g.n; ++v) op.row_start[v + 1] = op.row_start[v] + count[v];
    op.col.resize(op.row_start[g.n]);
    op.val.resize(op.row_start[g.n]);
    std::vector<int> cursor(op.row_start.begin(), op.row_start.end() - 1);
    for (const Edge& e : g.edges) {
        op.col[cursor[e.u]] = e.v;
        op.val[cursor[e.u]++] = e.a;
        op.col[cursor[e.v]] = e.u;
        op.val[cursor[e.v]++] = e.a;
    }
    return op;
}

void SparseOperator::apply(const std::vector<double>& x, std::vector<double>& y) const {
    y.resize(n);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        double acc = diag[i] * x[i];
        for (int k = row_start[i]; k < row_start[i + 1]; ++k) acc += val[k] * x[col[k]];
        y[i] = acc;
    }
}

namespace ref {
void sparse_apply(const SparseOperator& op, const std::vector<double>& x, std::vector<double>& y) {
    y.resize(op.n);
    for (int i = 0; i < op.n; ++i) {
        double acc = op.diag[i] * x[i];
        for (int k = op.row_start[i]; k < op.row_start[i + 1]; ++k)
            acc += op.val[k] * x[op.col[k]];
        y[i] = acc;
    }
}
}  // namespace ref

double walk_moment(const JacobiGraph& g, int root, int k, const CoverLimits& limits) {
    if (k < 0) throw ValidationError("moment order must be nonnegative");
    if (k == 0) return 1.0;
    int radius = (k + 1) / 2 + 1;
    TruncatedCover ball = build_cover_ball(g, root, radius, limits);
    SparseOperator op = sparse_operator(ball.graph);
    std::vector<double> x(op.n, 0.0), y;
    x[ball.root] = 1.0;
    for (int step = 0; step < k; ++step) {
        op.apply(x, y);
        x.swap(y);
    }
    return x[ball.root];
}

double dos_moment(const JacobiGraph& g, int k, const CoverLimits& limits) {
    validate(g);
    double acc = 0.0;
    for (int v = 0; v < g.n; ++v) acc += walk_moment(g, v, k, limits);
    return acc / g.n;
}

namespace {

std::string round12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

}  // namespace

std::string rooted_tree_canonical(const JacobiGraph& tree, int root) {
    validate_local(tree);
    if (root < 0 || root >= tree.n) throw ValidationError("root out of range");
    if (!tree.whole_loops.empty() || !tree.half_loops.empty())
        throw ValidationError("canonical form requires a tree (no loops)");
    if (int(tree.edges.size()) != tree.n - 1 || !is_connected(tree))
        throw ValidationError("canonical form requires a tree");

    std::vector<std::vector<std::pair<int, double>>> adj(tree.n);
    for (const Edge& e : tree.edges) {
        adj[e.u].push_back({e.v, e.a});
        adj[e.v].push_back({e.u, e.a});
    }

    // Iterative post-order with label-sorted child forms.
    std::vector<std::string> form(tree.n);
    struct Frame {
        int v;
        int parent;
        double edge_a;
        std::size_t next = 0;
        std::vector<std::string> children;
    };
    std::vector<Frame> stack;
    stack.push_back(Frame{root, -1, 0.0});
    while (!stack.empty()) {
        Frame& f = stack.back();
        if (f.next < adj[f.v].size()) {
            auto [w, a] = adj[f.v][f.next++];
            if (w != f.parent) stack.push_back(Frame{w, f.v, a});
            continue;
        }
        std::sort(f.children.begin(), f.children.end());
        std::string s = "(" + round12(tree.b[f.v]);
        for (const std::string& c : f.children) s += c;
        s += ")";
        if (f.parent < 0) {
            form[f.v] = std::move(s);
            stack.pop_back();
        } else {
            std::string tagged = "[" + round12(f.edge_a) + s + "]";
            stack.pop_back();
            stack.back().children.push_back(std::move(tagged));
        }
    }
    return form[root];
}

std::string rooted_tree_canonical(const TruncatedCover& cover) {
    return rooted_tree_canonical(cover.graph, cover.root);
}

void serialize_cover(const TruncatedCover& cover, std::ostream& out) {
    serialize_graph(cover.graph, out);
    out << "# root " << cover.root << "\n";
    for (int v = 0; v < cover.graph.n; ++v) out << "# fiber " << v << " " << cover.fiber[v] << "\n";
}

}  // namespace spectra
