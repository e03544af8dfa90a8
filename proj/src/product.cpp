#include "spectra/product.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace spectra {

namespace {

void check_colored_graph(const ColoredGraph& g, const std::string& what) {
    if (g.n < 1) throw ValidationError(what + " needs at least one vertex");
    if (g.root < 0 || g.root >= g.n) throw ValidationError(what + " root out of range");
    for (const ColoredEdge& e : g.edges) {
        if (e.u < 0 || e.u >= g.n || e.v < 0 || e.v >= g.n)
            throw ValidationError(what + " edge vertex out of range");
        if (e.a == 0.0) throw ValidationError(what + " edge has zero coefficient");
        if (e.color.empty()) throw ValidationError(what + " edge missing color");
    }
}

}  // namespace

void validate_amalgam(AmalgamSpec& spec) {
    check_colored_graph(spec.relator, "relator");
    if (spec.factors.size() != spec.factor_names.size())
        throw ValidationError("factor name/graph count mismatch");
    std::map<std::string, int> color_owner;
    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
        check_colored_graph(spec.factors[f], "factor " + spec.factor_names[f]);
        for (const ColoredEdge& e : spec.factors[f].edges) {
            auto [it, fresh] = color_owner.insert({e.color, int(f)});
            if (!fresh && it->second != int(f))
                throw ValidationError("color '" + e.color + "' used by factors " +
                                      spec.factor_names[it->second] + " and " +
                                      spec.factor_names[f]);
        }
    }
    spec.warnings.clear();
    std::set<std::string> warned;
    for (const ColoredEdge& re : spec.relator.edges) {
        auto it = color_owner.find(re.color);
        if (it == color_owner.end())
            throw ValidationError("relator color '" + re.color + "' appears in no factor");
        if (re.u == re.v) {
            for (const ColoredEdge& fe : spec.factors[it->second].edges)
                if (fe.color == re.color && fe.u == fe.v && warned.insert(re.color).second)
                    spec.warnings.push_back("relator loop color '" + re.color +
                                            "' also sits on a factor loop; the edge rule is "
                                            "applied literally");
        }
    }
}

namespace {

struct Tok {
    std::istream& in;
    int line_no = 0;

    bool next(std::vector<std::string>& tokens) {
        std::string line;
        while (std::getline(in, line)) {
            ++line_no;
            auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            tokens.clear();
            std::istringstream ls(line);
            std::string t;
            while (ls >> t) tokens.push_back(t);
            if (!tokens.empty()) return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("line " + std::to_string(line_no) + ": " + msg);
    }

    int to_int(const std::string& s) {
        try {
            size_t pos = 0;
            int v = std::stoi(s, &pos);
            if (pos != s.size()) fail("bad integer '" + s + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("bad integer '" + s + "'");
        }
    }

    double to_float(const std::string& s) {
        const char* c = s.c_str();
        char* end = nullptr;
        double v = std::strtod(c, &end);
        if (end != c + s.size()) fail("bad float '" + s + "'");
        return v;
    }
};

}  // namespace

AmalgamSpec parse_amalgam(std::istream& in) {
    Tok tz{in};
    std::vector<std::string> t;
    if (!tz.next(t) || t.size() != 2 || t[0] != "amalgam" || t[1] != "v1")
        tz.fail("expected header 'amalgam v1'");

    AmalgamSpec spec;
    bool have_relator = false;
    std::map<std::string, int> factor_index;
    while (tz.next(t)) {
        if (t[0] == "relator") {
            if (t.size() >= 2 && t[1] == "vertices") {
                if (have_relator) tz.fail("duplicate relator declaration");
                if (t.size() != 5 || t[3] != "root") tz.fail("usage: relator vertices <k> root <r>");
                spec.relator.n = tz.to_int(t[2]);
                spec.relator.root = tz.to_int(t[4]);
                have_relator = true;
            } else if (t.size() == 8 && t[1] == "edge" && t[4] == "color" && t[6] == "a") {
                spec.relator.edges.push_back(
                    ColoredEdge{tz.to_int(t[2]), tz.to_int(t[3]), t[5], tz.to_float(t[7])});
            } else if (t.size() == 7 && t[1] == "loop" && t[3] == "color" && t[5] == "a") {
                int v = tz.to_int(t[2]);
                spec.relator.edges.push_back(ColoredEdge{v, v, t[4], tz.to_float(t[6])});
            } else {
                tz.fail("bad relator line");
            }
        } else if (t[0] == "factor") {
            if (t.size() >= 3 && t[2] == "vertices") {
                if (t.size() != 6 || t[4] != "root")
                    tz.fail("usage: factor <name> vertices <l> root <e>");
                if (factor_index.count(t[1])) tz.fail("duplicate factor '" + t[1] + "'");
                factor_index[t[1]] = int(spec.factors.size());
                spec.factor_names.push_back(t[1]);
                ColoredGraph f;
                f.n = tz.to_int(t[3]);
                f.root = tz.to_int(t[5]);
                spec.factors.push_back(f);
            } else if (t.size() == 9 && t[2] == "edge" && t[5] == "color" && t[7] == "a") {
                auto it = factor_index.find(t[1]);
                if (it == factor_index.end()) tz.fail("unknown factor '" + t[1] + "'");
                spec.factors[it->second].edges.push_back(
                    ColoredEdge{tz.to_int(t[3]), tz.to_int(t[4]), t[6], tz.to_float(t[8])});
            } else if (t.size() == 8 && t[2] == "loop" && t[4] == "color" && t[6] == "a") {
                auto it = factor_index.find(t[1]);
                if (it == factor_index.end()) tz.fail("unknown factor '" + t[1] + "'");
                int v = tz.to_int(t[3]);
                spec.factors[it->second].edges.push_back(
                    ColoredEdge{v, v, t[5], tz.to_float(t[7])});
            } else {
                tz.fail("bad factor line");
            }
        } else {
            tz.fail("unknown keyword '" + t[0] + "'");
        }
    }
    if (!have_relator) throw ParseError("missing relator declaration");
    validate_amalgam(spec);
    return spec;
}

AmalgamSpec parse_amalgam(const std::string& text) {
    std::istringstream in(text);
    return parse_amalgam(in);
}

AmalgamSpec parse_amalgam_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return parse_amalgam(in);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

void serialize_amalgam(const AmalgamSpec& spec, std::ostream& out) {
    out << "amalgam v1\n";
    out << "relator vertices " << spec.relator.n << " root " << spec.relator.root << "\n";
    for (const ColoredEdge& e : spec.relator.edges) {
        if (e.u == e.v)
            out << "relator loop " << e.u << " color " << e.color << " a " << format_double(e.a)
                << "\n";
        else
            out << "relator edge " << e.u << " " << e.v << " color " << e.color << " a "
                << format_double(e.a) << "\n";
    }
    for (std::size_t f = 0; f < spec.factors.size(); ++f) {
        const ColoredGraph& fg = spec.factors[f];
        const std::string& name = spec.factor_names[f];
        out << "factor " << name << " vertices " << fg.n << " root " << fg.root << "\n";
        for (const ColoredEdge& e : fg.edges) {
            if (e.u == e.v)
                out << "factor " << name << " loop " << e.u << " color " << e.color << " a "
                    << format_double(e.a) << "\n";
            else
                out << "factor " << name << " edge " << e.u << " " << e.v << " color " << e.color
                    << " a " << format_double(e.a) << "\n";
        }
    }
}

// ---- core construction ----

namespace {

using Word = std::vector<std::pair<int, int>>;  // (factor, vertex), front = leftmost letter

struct CoreBuilder {
    const AmalgamSpec& spec;
    std::map<std::string, int> color_factor;

    // relator incidence: per vertex, (edge id, other endpoint); loops once
    std::vector<std::vector<std::pair<int, int>>> rel_at;
    // factor edge ids per color id
    std::map<std::string, std::vector<int>> factor_edges_by_color;

    std::map<Word, int> word_ids;
    std::vector<Word> words;

    std::map<std::pair<int, int>, int> vertex_ids;  // (relator vertex, word id) -> core vertex
    std::vector<std::pair<int, int>> vertex_key;

    explicit CoreBuilder(const AmalgamSpec& s) : spec(s) {
        for (std::size_t f = 0; f < spec.factors.size(); ++f)
            for (const ColoredEdge& e : spec.factors[f].edges) color_factor[e.color] = int(f);
        rel_at.resize(spec.relator.n);
        for (std::size_t id = 0; id < spec.relator.edges.size(); ++id) {
            const ColoredEdge& e = spec.relator.edges[id];
            rel_at[e.u].push_back({int(id), e.v});
            if (e.u != e.v) rel_at[e.v].push_back({int(id), e.u});
        }
        for (std::size_t f = 0; f < spec.factors.size(); ++f)
            for (std::size_t id = 0; id < spec.factors[f].edges.size(); ++id)
                factor_edges_by_color[spec.factors[f].edges[id].color].push_back(int(id));
    }

    int intern_word(const Word& w) {
        auto [it, fresh] = word_ids.insert({w, int(words.size())});
        if (fresh) words.push_back(w);
        return it->second;
    }

    // Neighbor of (i, w) through relator edge `re` (oriented i -> i2) and
    // factor edge `fe` (oriented v -> v2). Returns false when the edge rule
    // does not produce a valid vertex.
    struct Move {
        int i2;
        Word word2;
        int u_id;     // shared suffix word
        int pairing;  // orientation class for deduplication
        double coeff;
    };

    bool apply(int i2, const ColoredEdge& re, const ColoredEdge& fe, int j, int v, int v2,
               const Word& w, Move& out) {
        const int root_j = spec.factors[j].root;
        Word u;
        if (v == root_j) {
            u = w;
            if (v2 != root_j && !w.empty() && w.front().first == j) return false;  // not alternating
        } else {
            if (w.empty() || w.front() != std::make_pair(j, v)) return false;
            u.assign(w.begin() + 1, w.end());
        }
        out.word2 = u;
        if (v2 != root_j) out.word2.insert(out.word2.begin(), {j, v2});
        out.i2 = i2;
        out.u_id = intern_word(u);
        out.coeff = re.a * fe.a;
        if (re.u == re.v || fe.u == fe.v) {
            out.pairing = 0;
        } else {
            int i1 = (i2 == re.u) ? re.v : re.u;  // current side
            int matched_with_re_u = (i1 == re.u) ? v : v2;
            out.pairing = (matched_with_re_u == fe.u) ? 0 : 1;
        }
        return true;
    }
};

}  // namespace

ProductCore build_product_core(const AmalgamSpec& spec, int radius, const ProductLimits& limits) {
    AmalgamSpec checked = spec;
    validate_amalgam(checked);
    if (radius < 0) throw ValidationError("radius must be nonnegative");

    CoreBuilder cb(checked);
    ProductCore core;
    core.radius = radius;

    const Word empty;
    int empty_id = cb.intern_word(empty);
    int root_vertex = 0;
    cb.vertex_ids[{checked.relator.root, empty_id}] = root_vertex;
    cb.vertex_key.push_back({checked.relator.root, empty_id});
    core.relator_vertex.push_back(checked.relator.root);
    core.depth.push_back(0);

    // (relator edge, factor edge, suffix word, pairing) identifies one
    // undirected product edge; both sides regenerate the same key.
    std::set<std::tuple<int, int, int, int>> edge_seen;
    std::vector<Edge> edges;
    std::vector<Loop> loops;

    for (std::size_t cur = 0; cur < cb.vertex_key.size(); ++cur) {
        auto [i, wid] = cb.vertex_key[cur];
        const Word w = cb.words[wid];  // copy: words may reallocate during expansion
        const bool frontier = core.depth[cur] == radius;
        for (auto [re_id, i2] : cb.rel_at[i]) {
            const ColoredEdge& re = checked.relator.edges[re_id];
            auto fit = cb.factor_edges_by_color.find(re.color);
            if (fit == cb.factor_edges_by_color.end()) continue;
            int j = cb.color_factor[re.color];
            for (int fe_id : fit->second) {
                const ColoredEdge& fe = checked.factors[j].edges[fe_id];
                const int n_orient = (fe.u == fe.v) ? 1 : 2;
                for (int o = 0; o < n_orient; ++o) {
                    int v = o == 0 ? fe.u : fe.v;
                    int v2 = o == 0 ? fe.v : fe.u;
                    CoreBuilder::Move mv;
                    if (!cb.apply(i2, re, fe, j, v, v2, w, mv)) continue;
                    int w2id = cb.intern_word(mv.word2);
                    auto key = std::make_pair(mv.i2, w2id);
                    auto vit = cb.vertex_ids.find(key);
                    int target;
                    if (vit == cb.vertex_ids.end()) {
                        if (frontier) continue;  // would exceed the ball
                        if (cb.vertex_key.size() >= limits.max_vertices)
                            throw ResourceError("product core exceeds vertex cap");
                        target = int(cb.vertex_key.size());
                        cb.vertex_ids[key] = target;
                        cb.vertex_key.push_back(key);
                        core.relator_vertex.push_back(mv.i2);
                        core.depth.push_back(core.depth[cur] + 1);
                    } else {
                        target = vit->second;
                    }
                    if (!edge_seen.insert({re_id, fe_id, mv.u_id, mv.pairing}).second) continue;
                    if (target == int(cur))
                        loops.push_back(Loop{int(cur), mv.coeff});
                    else
                        edges.push_back(Edge{int(cur), target, mv.coeff});
                }
            }
        }
    }

    core.graph.n = int(cb.vertex_key.size());
    core.graph.b.assign(core.graph.n, 0.0);
    core.graph.edges = std::move(edges);
    core.graph.whole_loops = std::move(loops);
    core.root = root_vertex;

    core.labels.resize(core.graph.n);
    for (int v = 0; v < core.graph.n; ++v) {
        auto [i, wid] = cb.vertex_key[v];
        std::string s = "(" + std::to_string(i) + "|";
        const Word& w = cb.words[wid];
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (k) s += ".";
            s += std::to_string(w[k].first) + ":" + std::to_string(w[k].second);
        }
        s += ")";
        core.labels[v] = std::move(s);
    }
    return core;
}

AmalgamSpec cover_as_product(const JacobiGraph& g, int root) {
    validate(g);
    if (root < 0 || root >= g.n) throw ValidationError("root out of range");
    if (!g.all_potentials_zero())
        throw ValidationError("the graph product is defined for zero potentials only");

    AmalgamSpec spec;
    spec.relator.n = g.n;
    spec.relator.root = root;
    int counter = 0;
    auto add = [&spec, &counter](int u, int v, double a) {
        std::string color = "c" + std::to_string(counter);
        std::string name = "f" + std::to_string(counter);
        ++counter;
        spec.relator.edges.push_back(ColoredEdge{u, v, color, a});
        ColoredGraph k2;
        k2.n = 2;
        k2.root = 0;
        k2.edges.push_back(ColoredEdge{0, 1, color, 1.0});
        spec.factor_names.push_back(name);
        spec.factors.push_back(k2);
    };
    for (const Edge& e : g.edges) add(e.u, e.v, e.a);
    for (const Loop& l : g.whole_loops) {  // split into two loops
        add(l.v, l.v, l.a);
        add(l.v, l.v, l.a);
    }
    for (const Loop& l : g.half_loops) add(l.v, l.v, l.a);
    validate_amalgam(spec);
    return spec;
}

void serialize_product_core(const ProductCore& core, std::ostream& out) {
    serialize_graph(core.graph, out);
    out << "# root " << core.root << "\n";
    for (int v = 0; v < core.graph.n; ++v)
        out << "# label " << v << " " << core.labels[v] << " depth " << core.depth[v] << "\n";
}

// ---- finite groups ----

namespace {

void check_group(const FiniteGroup& grp) {
    const int m = grp.order;
    if (m < 1) throw ValidationError("group " + grp.name + ": order must be positive");
    if (m > 512) throw ValidationError("group " + grp.name + ": order cap is 512");
    if (int(grp.mul.size()) != m * m)
        throw ValidationError("group " + grp.name + ": incomplete multiplication table");
    for (int v : grp.mul)
        if (v < 0 || v >= m) throw ValidationError("group " + grp.name + ": entry out of range");
    for (int x = 0; x < m; ++x)
        if (grp.times(0, x) != x || grp.times(x, 0) != x)
            throw ValidationError("group " + grp.name + ": element 0 is not the identity");
    // rows and columns must be permutations
    for (int x = 0; x < m; ++x) {
        std::vector<char> row(m, 0), col(m, 0);
        for (int y = 0; y < m; ++y) {
            row[grp.times(x, y)] = 1;
            col[grp.times(y, x)] = 1;
        }
        for (int y = 0; y < m; ++y)
            if (!row[y] || !col[y])
                throw ValidationError("group " + grp.name + ": table is not a latin square");
    }
    for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y)
            for (int z = 0; z < m; ++z)
                if (grp.times(grp.times(x, y), z) != grp.times(x, grp.times(y, z)))
                    throw ValidationError("group " + grp.name + ": multiplication not associative");
}

int group_inverse(const FiniteGroup& grp, int x) {
    for (int y = 0; y < grp.order; ++y)
        if (grp.times(x, y) == 0) return y;
    throw ValidationError("group " + grp.name + ": no inverse for element " + std::to_string(x));
}

// Induced subgroup multiplication through an embedding; throws when the image
// is not closed.
std::vector<int> induced_table(const FiniteGroup& grp, const std::vector<int>& embed) {
    const int h = int(embed.size());
    std::vector<int> back(grp.order, -1);
    for (int i = 0; i < h; ++i) {
        if (embed[i] < 0 || embed[i] >= grp.order)
            throw ValidationError("embedding into " + grp.name + " out of range");
        if (back[embed[i]] != -1)
            throw ValidationError("embedding into " + grp.name + " is not injective");
        back[embed[i]] = i;
    }
    if (embed.empty() || embed[0] != 0)
        throw ValidationError("embedding into " + grp.name + " must send 0 to the identity");
    std::vector<int> table(std::size_t(h) * h);
    for (int i = 0; i < h; ++i)
        for (int j = 0; j < h; ++j) {
            int prod = grp.times(embed[i], embed[j]);
            if (back[prod] == -1)
                throw ValidationError("embedding image in " + grp.name +
                                      " is not closed under multiplication");
            table[std::size_t(i) * h + j] = back[prod];
        }
    return table;
}

}  // namespace

void validate_cayley(const CayleyData& data) {
    if (data.groups.empty()) throw ValidationError("need at least one group");
    if (data.groups.size() != data.embed.size() || data.groups.size() != data.gens.size())
        throw ValidationError("every group needs an embedding and a generating set");
    if (data.h_order < 1) throw ValidationError("subgroup must be nonempty");

    std::vector<int> reference;
    for (std::size_t k = 0; k < data.groups.size(); ++k) {
        const FiniteGroup& grp = data.groups[k];
        check_group(grp);
        if (int(data.embed[k].size()) != data.h_order)
            throw ValidationError("embedding into " + grp.name + " has wrong size");
        std::vector<int> table = induced_table(grp, data.embed[k]);
        if (reference.empty())
            reference = table;
        else if (table != reference)
            throw ValidationError("subgroup structure differs between factors; H is not common");

        const std::vector<int>& s = data.gens[k];
        if (s.empty()) throw ValidationError("group " + grp.name + ": empty generating set");
        std::set<int> sset(s.begin(), s.end());
        if (sset.size() != s.size())
            throw ValidationError("group " + grp.name + ": duplicate generator");
        for (int x : s) {
            if (x <= 0 || x >= grp.order)
                throw ValidationError("group " + grp.name + ": generator out of range (identity excluded)");
            if (!sset.count(group_inverse(grp, x)))
                throw ValidationError("group " + grp.name + ": generating set is not symmetric");
        }
    }
}

CayleyData parse_cayley(std::istream& in) {
    Tok tz{in};
    std::vector<std::string> t;
    if (!tz.next(t) || t.size() != 2 || t[0] != "cayley" || t[1] != "v1")
        tz.fail("expected header 'cayley v1'");

    CayleyData data;
    std::map<std::string, int> index;
    std::vector<int> mul_count;
    auto find_group = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) tz.fail("unknown group '" + name + "'");
        return it->second;
    };
    int current = -1;
    while (tz.next(t)) {
        if (t[0] == "group") {
            if (t.size() != 4 || t[2] != "order") tz.fail("usage: group <name> order <m>");
            if (index.count(t[1])) tz.fail("duplicate group '" + t[1] + "'");
            FiniteGroup grp;
            grp.name = t[1];
            grp.order = tz.to_int(t[3]);
            if (grp.order < 1) tz.fail("order must be positive");
            grp.mul.assign(std::size_t(grp.order) * grp.order, 0);
            index[grp.name] = int(data.groups.size());
            current = int(data.groups.size());
            data.groups.push_back(std::move(grp));
            data.embed.emplace_back();
            data.gens.emplace_back();
            mul_count.push_back(0);
        } else if (t[0] == "mul") {
            if (current < 0) tz.fail("'mul' before any group");
            if (t.size() != 4) tz.fail("usage: mul <i> <j> <k>");
            FiniteGroup& grp = data.groups[current];
            int i = tz.to_int(t[1]), j = tz.to_int(t[2]), k = tz.to_int(t[3]);
            if (i < 0 || i >= grp.order || j < 0 || j >= grp.order || k < 0 || k >= grp.order)
                tz.fail("mul entry out of range");
            grp.mul[std::size_t(i) * grp.order + j] = k;
            ++mul_count[current];
        } else if (t[0] == "subgroup") {
            if (t.size() != 4 || t[2] != "embed") tz.fail("usage: subgroup <group> embed <i>-><j>");
            int gi = find_group(t[1]);
            auto arrow = t[3].find("->");
            if (arrow == std::string::npos) tz.fail("usage: subgroup <group> embed <i>-><j>");
            int from = tz.to_int(t[3].substr(0, arrow));
            int to = tz.to_int(t[3].substr(arrow + 2));
            if (from != int(data.embed[gi].size())) tz.fail("embed rows must be listed in order");
            data.embed[gi].push_back(to);
        } else if (t[0] == "gens") {
            if (t.size() < 3) tz.fail("usage: gens <group> <i> ...");
            int gi = find_group(t[1]);
            for (std::size_t k = 2; k < t.size(); ++k) data.gens[gi].push_back(tz.to_int(t[k]));
        } else {
            tz.fail("unknown keyword '" + t[0] + "'");
        }
    }
    for (std::size_t k = 0; k < data.groups.size(); ++k)
        if (mul_count[k] != data.groups[k].order * data.groups[k].order)
            throw ParseError("group " + data.groups[k].name + ": expected " +
                             std::to_string(data.groups[k].order * data.groups[k].order) +
                             " mul rows, got " + std::to_string(mul_count[k]));
    if (data.embed.empty() || data.embed[0].empty())
        throw ParseError("missing subgroup embedding");
    data.h_order = int(data.embed[0].size());
    validate_cayley(data);
    return data;
}

CayleyData parse_cayley(const std::string& text) {
    std::istringstream in(text);
    return parse_cayley(in);
}

CayleyData parse_cayley_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "'");
    try {
        return parse_cayley(in);
    } catch (const Error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

namespace {

struct FactorTables {
    std::vector<int> reps;        // coset representatives, identity first (ascending)
    std::vector<int> rep_index;   // element -> index of its coset representative
    std::vector<int> h_of;        // element -> H-index of g * rep^{-1}
    std::vector<int> inv;         // element inverses
};

FactorTables factor_tables(const FiniteGroup& grp, const std::vector<int>& embed) {
    const int m = grp.order;
    FactorTables ft;
    ft.inv.resize(m);
    for (int x = 0; x < m; ++x) ft.inv[x] = group_inverse(grp, x);

    std::vector<int> back(m, -1);
    for (std::size_t i = 0; i < embed.size(); ++i) back[embed[i]] = int(i);

    // right coset H*g: representative is its least element
    std::vector<int> rep_of(m, -1);
    for (int g = 0; g < m; ++g) {
        int least = m;
        for (int h : embed) least = std::min(least, grp.times(h, g));
        rep_of[g] = least;
    }
    std::vector<int> reps;
    for (int g = 0; g < m; ++g)
        if (rep_of[g] == g) reps.push_back(g);
    std::sort(reps.begin(), reps.end());
    std::vector<int> rep_pos(m, -1);
    for (std::size_t i = 0; i < reps.size(); ++i) rep_pos[reps[i]] = int(i);

    ft.reps = reps;
    ft.rep_index.resize(m);
    ft.h_of.resize(m);
    for (int g = 0; g < m; ++g) {
        int r = rep_of[g];
        ft.rep_index[g] = rep_pos[r];
        int h_elt = grp.times(g, ft.inv[r]);
        if (back[h_elt] == -1)
            throw ValidationError("group " + grp.name + ": coset decomposition left the subgroup");
        ft.h_of[g] = back[h_elt];
    }
    return ft;
}

}  // namespace

AmalgamSpec cayley_spec(const CayleyData& data) {
    validate_cayley(data);
    const int h = data.h_order;
    const int n_factors = int(data.groups.size());

    std::vector<FactorTables> tables;
    tables.reserve(n_factors);
    for (int k = 0; k < n_factors; ++k) tables.push_back(factor_tables(data.groups[k], data.embed[k]));

    AmalgamSpec spec;
    spec.relator.n = h;
    spec.relator.root = 0;
    for (int k = 0; k < n_factors; ++k) {
        ColoredGraph f;
        f.n = int(tables[k].reps.size());
        f.root = 0;
        spec.factor_names.push_back(data.groups[k].name);
        spec.factors.push_back(f);
    }

    // The product edge rule pairs an undirected relator edge with an
    // undirected factor edge in both orientations, which is exactly the
    // entry set of a symmetric tensor X (x) A. Each color must therefore
    // carry a symmetric 0/1 relator matrix X against one factor edge A, and
    // the generator action is decomposed into such layers: per factor and
    // per coset-letter move {r, r'}, the subgroup-level transition counts
    // form a matrix that splits into symmetric indicator layers.
    for (int k = 0; k < n_factors; ++k) {
        const FiniteGroup& grp = data.groups[k];
        const FactorTables& ft = tables[k];
        const int n_reps = int(ft.reps.size());
        std::vector<int> back(grp.order, -1);
        for (int i = 0; i < h; ++i) back[data.embed[k][i]] = i;

        // block[r1][r2][h1*h + h2]: moves (h1, leading r1) -> (h2, leading r2).
        // Leading rep 0 stands for "no letter of this factor"; subgroup-valued
        // generators act through it on every word shape at once.
        std::vector<std::vector<std::vector<int>>> block(
            n_reps, std::vector<std::vector<int>>(n_reps, std::vector<int>(h * h, 0)));
        for (int s : data.gens[k]) {
            for (int hi = 0; hi < h; ++hi) {
                int sh = grp.times(s, data.embed[k][hi]);
                if (back[sh] != -1) {
                    block[0][0][std::size_t(hi) * h + back[sh]] += 1;
                    continue;
                }
                int h1 = ft.h_of[sh];
                int r = ft.reps[ft.rep_index[sh]];
                for (int r1 = 0; r1 < n_reps; ++r1) {
                    int to_h, to_r;
                    if (r1 == 0) {
                        to_h = h1;
                        to_r = ft.rep_index[sh];
                    } else {
                        int rr1 = grp.times(r, ft.reps[r1]);
                        int h0 = ft.h_of[rr1];
                        int both = grp.times(data.embed[k][h1], data.embed[k][h0]);
                        to_h = back[both];
                        to_r = ft.rep_index[rr1];
                    }
                    block[r1][to_r][std::size_t(hi) * h + to_h] += 1;
                }
            }
        }

        int color_id = 0;
        for (int r1 = 0; r1 < n_reps; ++r1) {
            for (int r2 = r1; r2 < n_reps; ++r2) {
                std::vector<int> counts = block[r1][r2];
                for (int a = 0; a < h; ++a)
                    for (int b = 0; b < h; ++b)
                        if (counts[std::size_t(a) * h + b] !=
                            block[r2][r1][std::size_t(b) * h + a])
                            throw ValidationError("group " + grp.name +
                                                  ": generator moves are not closed under reversal");
                for (int a = 0; a < h; ++a)
                    for (int b = 0; b < h; ++b)
                        if (counts[std::size_t(a) * h + b] != counts[std::size_t(b) * h + a])
                            throw ValidationError(
                                "group " + grp.name +
                                ": generator action admits no undirected colored decomposition");
                for (;;) {
                    bool any = false;
                    for (int v : counts) any = any || v > 0;
                    if (!any) break;
                    std::string color = grp.name + ".r" + std::to_string(r1) + "_" +
                                        std::to_string(r2) + ".l" + std::to_string(color_id++);
                    spec.factors[k].edges.push_back(ColoredEdge{r1, r2, color, 1.0});
                    for (int a = 0; a < h; ++a)
                        for (int b = a; b < h; ++b)
                            if (counts[std::size_t(a) * h + b] > 0) {
                                spec.relator.edges.push_back(ColoredEdge{a, b, color, 1.0});
                                counts[std::size_t(a) * h + b] -= 1;
                                if (a != b) counts[std::size_t(b) * h + a] -= 1;
                            }
                }
            }
        }
    }
    validate_amalgam(spec);
    return spec;
}

}  // namespace spectra
