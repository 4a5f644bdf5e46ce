#include "cubiclab/maps.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/boyer_myrvold_planar_test.hpp>
#include <boost/graph/graph_traits.hpp>

namespace cubiclab {

namespace {

std::vector<int> label_orbits(const std::vector<int>& perm, int* count) {
    std::vector<int> id(perm.size(), -1);
    int next = 0;
    for (std::size_t d = 0; d < perm.size(); ++d) {
        if (id[d] >= 0) continue;
        int x = static_cast<int>(d);
        do {
            id[x] = next;
            x = perm[x];
        } while (x != static_cast<int>(d));
        ++next;
    }
    if (count) *count = next;
    return id;
}

std::vector<int> phi_perm(const CombinatorialMap& m) {
    std::vector<int> p(m.darts());
    for (int d = 0; d < m.darts(); ++d) p[d] = m.phi(d);
    return p;
}

// Builds a map from face permutation and twin involution: sigma = phi∘alpha.
CombinatorialMap from_phi(const std::vector<int>& phi, const std::vector<int>& alpha, int root) {
    CombinatorialMap m;
    m.alpha = alpha;
    m.sigma.resize(alpha.size());
    for (std::size_t d = 0; d < alpha.size(); ++d) m.sigma[d] = phi[alpha[d]];
    m.root = root;
    return m;
}

// Keeps the darts flagged alive, renumbers them densely, returns old->new.
CombinatorialMap compact(const std::vector<int>& phi, const std::vector<int>& alpha,
                         const std::vector<char>& alive, int root, std::vector<int>* old_to_new) {
    std::vector<int> nid(alpha.size(), -1);
    int k = 0;
    for (std::size_t d = 0; d < alpha.size(); ++d)
        if (alive[d]) nid[d] = k++;
    std::vector<int> p(k), a(k);
    for (std::size_t d = 0; d < alpha.size(); ++d) {
        if (!alive[d]) continue;
        p[nid[d]] = nid[phi[d]];
        a[nid[d]] = nid[alpha[d]];
    }
    if (old_to_new) *old_to_new = nid;
    return from_phi(p, a, nid[root]);
}

}  // namespace

std::vector<int> CombinatorialMap::vertex_of() const { return label_orbits(sigma, nullptr); }

std::vector<int> CombinatorialMap::face_of() const { return label_orbits(phi_perm(*this), nullptr); }

int CombinatorialMap::num_vertices() const {
    int c = 0;
    label_orbits(sigma, &c);
    return c;
}

int CombinatorialMap::num_faces() const {
    int c = 0;
    label_orbits(phi_perm(*this), &c);
    return c;
}

std::vector<int> inverse_permutation(const std::vector<int>& p) {
    std::vector<int> q(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) q[p[i]] = static_cast<int>(i);
    return q;
}

std::vector<int> orbit(const std::vector<int>& perm, int d) {
    std::vector<int> out;
    int x = d;
    do {
        out.push_back(x);
        x = perm[x];
    } while (x != d);
    return out;
}

void validate(const CombinatorialMap& m) {
    const int D = m.darts();
    if (D == 0 || D % 2 != 0) throw MapError("dart count must be positive and even");
    if (static_cast<int>(m.sigma.size()) != D) throw MapError("sigma size mismatch");
    if (m.root < 0 || m.root >= D) throw MapError("root dart out of range");
    std::vector<char> seen(D, 0);
    for (int d = 0; d < D; ++d) {
        int a = m.alpha[d];
        if (a < 0 || a >= D) throw MapError("alpha out of range");
        if (a == d) throw MapError("alpha has a fixed point");
        if (m.alpha[a] != d) throw MapError("alpha is not an involution");
        int s = m.sigma[d];
        if (s < 0 || s >= D || seen[s]) throw MapError("sigma is not a permutation");
        seen[s] = 1;
    }
    std::vector<char> vis(D, 0);
    std::vector<int> stack{m.root};
    vis[m.root] = 1;
    int reached = 0;
    while (!stack.empty()) {
        int d = stack.back();
        stack.pop_back();
        ++reached;
        for (int e : {m.alpha[d], m.sigma[d]}) {
            if (!vis[e]) {
                vis[e] = 1;
                stack.push_back(e);
            }
        }
    }
    if (reached != D) throw MapError("map is not connected");
    if (m.num_vertices() - m.edges() + m.num_faces() != 2) throw MapError("Euler characteristic is not 2");
}

std::string to_text(const CombinatorialMap& m) {
    std::ostringstream os;
    os << "MAP v1 " << m.darts() << ' ' << m.root << '\n';
    std::vector<char> done(m.darts(), 0);
    for (int d = 0; d < m.darts(); ++d) {
        if (done[d]) continue;
        bool first = true;
        int x = d;
        do {
            os << (first ? "" : " ") << x;
            first = false;
            done[x] = 1;
            x = m.sigma[x];
        } while (x != d);
        os << '\n';
    }
    for (int d = 0; d < m.darts(); ++d)
        if (d < m.alpha[d]) os << d << ' ' << m.alpha[d] << '\n';
    return os.str();
}

CombinatorialMap from_text(const std::string& text) {
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw MapError("empty map text");
    std::istringstream hs(line);
    std::string tag, ver;
    int D = 0, root = 0;
    if (!(hs >> tag >> ver >> D >> root) || tag != "MAP" || ver != "v1") throw MapError("bad map header");
    if (D <= 0 || D % 2) throw MapError("bad dart count in header");
    CombinatorialMap m;
    m.alpha.assign(D, -1);
    m.sigma.assign(D, -1);
    m.root = root;
    int covered = 0;
    while (covered < D) {
        if (!std::getline(is, line)) throw MapError("truncated vertex section");
        std::istringstream ls(line);
        std::vector<int> ds;
        int x;
        while (ls >> x) {
            if (x < 0 || x >= D || m.sigma[x] != -1) throw MapError("bad dart in vertex line");
            ds.push_back(x);
        }
        if (ds.empty()) throw MapError("empty vertex line");
        for (std::size_t i = 0; i < ds.size(); ++i) m.sigma[ds[i]] = ds[(i + 1) % ds.size()];
        covered += static_cast<int>(ds.size());
    }
    for (int e = 0; e < D / 2; ++e) {
        if (!std::getline(is, line)) throw MapError("truncated edge section");
        std::istringstream ls(line);
        int a, b;
        if (!(ls >> a >> b) || a < 0 || b < 0 || a >= D || b >= D) throw MapError("bad edge line");
        if (m.alpha[a] != -1 || m.alpha[b] != -1) throw MapError("dart used twice in edge lines");
        m.alpha[a] = b;
        m.alpha[b] = a;
    }
    validate(m);
    return m;
}

std::vector<int> canonical_code(const CombinatorialMap& m) {
    const int D = m.darts();
    std::vector<int> lab(D, -1), order;
    order.reserve(D);
    lab[m.root] = 0;
    order.push_back(m.root);
    for (std::size_t i = 0; i < order.size(); ++i) {
        int d = order[i];
        for (int e : {m.sigma[d], m.alpha[d]}) {
            if (lab[e] < 0) {
                lab[e] = static_cast<int>(order.size());
                order.push_back(e);
            }
        }
    }
    std::vector<int> code;
    code.reserve(2 * order.size() + 1);
    code.push_back(static_cast<int>(order.size()));
    for (int d : order) {
        code.push_back(lab[m.sigma[d]]);
        code.push_back(lab[m.alpha[d]]);
    }
    return code;
}

CombinatorialMap canonical_form(const CombinatorialMap& m) {
    auto code = canonical_code(m);
    int D = code[0];
    CombinatorialMap c;
    c.sigma.resize(D);
    c.alpha.resize(D);
    for (int i = 0; i < D; ++i) {
        c.sigma[i] = code[1 + 2 * i];
        c.alpha[i] = code[2 + 2 * i];
    }
    c.root = 0;
    return c;
}

CombinatorialMap reroot(const CombinatorialMap& m, int new_root) {
    CombinatorialMap r = m;
    r.root = new_root;
    return r;
}

CombinatorialMap mirror(const CombinatorialMap& m) {
    CombinatorialMap r = m;
    r.sigma = inverse_permutation(m.sigma);
    return r;
}

CombinatorialMap dual(const CombinatorialMap& m) {
    validate(m);
    CombinatorialMap d;
    d.alpha = m.alpha;
    d.sigma = inverse_permutation(phi_perm(m));
    d.root = m.root;
    return d;
}

std::vector<int> vertex_degrees(const CombinatorialMap& m) {
    int nv = 0;
    auto id = label_orbits(m.sigma, &nv);
    std::vector<int> deg(nv, 0);
    for (int x : id) ++deg[x];
    std::sort(deg.begin(), deg.end());
    return deg;
}

std::vector<int> face_degrees(const CombinatorialMap& m) {
    int nf = 0;
    auto id = label_orbits(phi_perm(m), &nf);
    std::vector<int> deg(nf, 0);
    for (int x : id) ++deg[x];
    std::sort(deg.begin(), deg.end());
    return deg;
}

bool has_loop(const CombinatorialMap& m) {
    auto v = m.vertex_of();
    for (int d = 0; d < m.darts(); ++d)
        if (v[d] == v[m.alpha[d]]) return true;
    return false;
}

bool has_multi_edge(const CombinatorialMap& m) {
    auto v = m.vertex_of();
    std::set<std::pair<int, int>> seen;
    for (int d = 0; d < m.darts(); ++d) {
        if (d > m.alpha[d]) continue;
        int a = v[d], b = v[m.alpha[d]];
        if (a == b) continue;
        if (!seen.insert({std::min(a, b), std::max(a, b)}).second) return true;
    }
    return false;
}

bool is_simple(const CombinatorialMap& m) { return !has_loop(m) && !has_multi_edge(m); }

bool is_triangulation(const CombinatorialMap& m) {
    for (int deg : face_degrees(m))
        if (deg != 3) return false;
    return true;
}

DartIndex::DartIndex(const CombinatorialMap& m) {
    tail = label_orbits(m.sigma, &nv);
    face = label_orbits(phi_perm(m), &nf);
}

// ── polygon triangulations ──

std::vector<int> PolygonTriangulation::boundary_darts() const { return orbit(phi_perm(map), map.root); }

std::vector<int> PolygonTriangulation::boundary_vertices() const {
    auto v = map.vertex_of();
    std::vector<int> out;
    for (int d : boundary_darts()) out.push_back(v[d]);
    return out;
}

void validate_polygon(const PolygonTriangulation& t) {
    validate(t.map);
    DartIndex ix(t.map);
    auto bd = t.boundary_darts();
    if (static_cast<int>(bd.size()) != t.p) throw MapError("root face degree differs from p");
    std::set<int> bv;
    for (int d : bd) bv.insert(ix.tail[d]);
    if (t.p >= 2 && static_cast<int>(bv.size()) != t.p) throw MapError("boundary is not a simple cycle");
    int rf = ix.face[t.map.root];
    std::vector<int> fdeg(ix.nf, 0);
    for (int f : ix.face) ++fdeg[f];
    for (int f = 0; f < ix.nf; ++f)
        if (f != rf && fdeg[f] != 3) throw MapError("inner face is not a triangle");
    if (ix.nv - static_cast<int>(bv.size()) != t.n) throw MapError("inner vertex count differs from n");
    if (t.marked >= 0 && (t.marked >= ix.nv || bv.count(t.marked))) throw MapError("mark is not an inner vertex");
}

bool is_quasi_simple(const PolygonTriangulation& t) {
    const auto& m = t.map;
    DartIndex ix(m);
    if (t.marked < 0 || t.marked >= ix.nv) throw MapError("quasi-simplicity needs a marked vertex");
    auto bv = t.boundary_vertices();
    if (std::find(bv.begin(), bv.end(), t.marked) != bv.end()) throw MapError("marked vertex lies on the boundary");

    int mark_dart = -1;
    for (int d = 0; d < m.darts(); ++d)
        if (ix.tail[d] == t.marked) {
            mark_dart = d;
            break;
        }
    const int root_face = ix.face[m.root];
    const int mark_face = ix.face[mark_dart];

    // edge id = smaller dart; group by endpoint pair
    std::map<std::pair<int, int>, std::vector<int>> by_ends;
    for (int d = 0; d < m.darts(); ++d) {
        if (d > m.alpha[d]) continue;
        int a = ix.tail[d], b = ix.tail[m.alpha[d]];
        by_ends[{std::min(a, b), std::max(a, b)}].push_back(d);
    }

    std::vector<int> parent(ix.nf);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto separates = [&](const std::vector<int>& cycle_edges) {
        std::vector<char> cut(m.darts(), 0);
        for (int d : cycle_edges) cut[d] = cut[m.alpha[d]] = 1;
        std::iota(parent.begin(), parent.end(), 0);
        for (int d = 0; d < m.darts(); ++d) {
            if (cut[d] || d > m.alpha[d]) continue;
            int a = find(ix.face[d]), b = find(ix.face[m.alpha[d]]);
            if (a != b) parent[a] = b;
        }
        return find(root_face) != find(mark_face);
    };

    for (auto& [ends, es] : by_ends) {
        if (ends.first == ends.second) {
            // two loops at one vertex bound a pinched annulus that holds neither side
            if (ends.first == t.marked || es.size() > 1) return false;
            for (int e : es)
                if (!separates({e})) return false;
        } else {
            if (es.size() < 2) continue;
            if (ends.first == t.marked || ends.second == t.marked) return false;
            for (std::size_t i = 0; i < es.size(); ++i)
                for (std::size_t j = i + 1; j < es.size(); ++j)
                    if (!separates({es[i], es[j]})) return false;
        }
    }
    return true;
}

PolygonTriangulation psi(const PolygonTriangulation& q) {
    const auto& m = q.map;
    DartIndex ix(m);
    const int r = m.root;
    if (m.phi(r) != r) throw MapError("psi needs a triangulation of the 1-gon");
    const int r2 = m.alpha[r];
    const int a = m.phi(r2), b = m.phi(a);
    if (m.phi(b) != r2) throw MapError("face inside the root loop is not a triangle");
    PolygonTriangulation out;
    if (m.alpha[a] == b) {
        // single inner vertex hanging from the loop: the image is one edge
        out.map.alpha = {1, 0};
        out.map.sigma = {0, 1};
        out.map.root = 0;
        out.p = 2;
        out.n = 0;
        out.marked = (q.marked >= 0) ? 1 : -1;
        return out;
    }
    const int a2 = m.alpha[a], b2 = m.alpha[b];
    std::vector<int> phi = phi_perm(m), alpha = m.alpha;
    alpha[a2] = b2;
    alpha[b2] = a2;
    std::vector<char> alive(m.darts(), 1);
    alive[r] = alive[r2] = alive[a] = alive[b] = 0;
    int keep_mark = -1;
    if (q.marked >= 0)
        for (int d = 0; d < m.darts(); ++d)
            if (alive[d] && ix.tail[d] == q.marked) {
                keep_mark = d;
                break;
            }
    std::vector<int> nid;
    out.map = compact(phi, alpha, alive, b2, &nid);
    out.p = static_cast<int>(orbit(phi_perm(out.map), out.map.root).size());
    auto v = out.map.vertex_of();
    std::set<int> bv;
    for (int d : orbit(phi_perm(out.map), out.map.root)) bv.insert(v[d]);
    out.n = out.map.num_vertices() - static_cast<int>(bv.size());
    out.marked = keep_mark >= 0 ? v[nid[keep_mark]] : -1;
    return out;
}

PolygonTriangulation psi_inverse(const PolygonTriangulation& t) {
    const auto& m = t.map;
    DartIndex ix(m);
    PolygonTriangulation out;
    out.p = 1;
    if (m.darts() == 2) {
        // r=0 root loop, r2=1, a=2 (v->c), b=3 (c->v)
        std::vector<int> phi{0, 2, 3, 1}, alpha{1, 0, 3, 2};
        out.map = from_phi(phi, alpha, 0);
        out.n = 1;
        out.marked = t.marked >= 0 ? out.map.vertex_of()[3] : -1;
        return out;
    }
    const int D = m.darts();
    const int b2 = m.root, a2 = m.alpha[b2];
    const int a = D, b = D + 1, r = D + 2, r2 = D + 3;
    std::vector<int> phi = phi_perm(m), alpha = m.alpha;
    phi.resize(D + 4);
    alpha.resize(D + 4);
    alpha[a2] = a;
    alpha[a] = a2;
    alpha[b2] = b;
    alpha[b] = b2;
    alpha[r] = r2;
    alpha[r2] = r;
    phi[a] = b;
    phi[b] = r2;
    phi[r2] = a;
    phi[r] = r;
    out.map = from_phi(phi, alpha, r);
    auto v = out.map.vertex_of();
    out.n = out.map.num_vertices() - 1;
    if (t.marked >= 0) {
        int md = -1;
        for (int d = 0; d < D; ++d)
            if (ix.tail[d] == t.marked) {
                md = d;
                break;
            }
        out.marked = v[md];
    }
    return out;
}

// ── graphs ──

std::size_t Graph::edge_count() const {
    std::size_t s = 0;
    for (auto& a : adj) s += a.size();
    return s / 2;
}

bool Graph::is_cubic() const {
    for (auto& a : adj)
        if (a.size() != 3) return false;
    return true;
}

bool Graph::is_simple() const {
    for (int v = 0; v < n(); ++v) {
        std::vector<int> a = adj[v];
        std::sort(a.begin(), a.end());
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] == v) return false;
            if (i && a[i] == a[i - 1]) return false;
        }
    }
    return true;
}

bool Graph::connected() const {
    if (n() == 0) return true;
    auto d = bfs_distances(*this, {0});
    return std::none_of(d.begin(), d.end(), [](int x) { return x < 0; });
}

Graph underlying_graph(const CombinatorialMap& m) {
    auto v = m.vertex_of();
    Graph g(m.num_vertices());
    for (int d = 0; d < m.darts(); ++d)
        if (d < m.alpha[d]) g.add_edge(v[d], v[m.alpha[d]]);
    return g;
}

namespace {

bool connected_without(const Graph& g, const std::vector<char>& removed) {
    int start = -1, alive = 0;
    for (int v = 0; v < g.n(); ++v)
        if (!removed[v]) {
            ++alive;
            if (start < 0) start = v;
        }
    if (alive == 0) return true;
    std::vector<char> seen(g.n(), 0);
    std::vector<int> st{start};
    seen[start] = 1;
    int cnt = 0;
    while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        ++cnt;
        for (int w : g.adj[v])
            if (!removed[w] && !seen[w]) {
                seen[w] = 1;
                st.push_back(w);
            }
    }
    return cnt == alive;
}

// Number of bridges in g with edge `skip` (given as endpoint pair occurrence) removed.
bool has_bridge_without(const Graph& g, int su, int sv) {
    const int n = g.n();
    std::vector<int> tin(n, -1), low(n, 0);
    int timer = 0;
    bool skipped = su < 0;
    struct Frame {
        int v, parent_edge_slot, it;
    };
    // edges identified by (vertex, slot); the reverse slot is found by search
    for (int s = 0; s < n; ++s) {
        if (tin[s] >= 0) continue;
        std::vector<Frame> st{{s, -1, 0}};
        std::vector<int> parent(n, -1);
        tin[s] = low[s] = timer++;
        while (!st.empty()) {
            Frame& f = st.back();
            int v = f.v;
            if (f.it < static_cast<int>(g.adj[v].size())) {
                int slot = f.it++;
                int w = g.adj[v][slot];
                bool is_skip = false;
                if (!skipped && ((v == su && w == sv) || (v == sv && w == su))) is_skip = true;
                if (is_skip) continue;
                if (slot == f.parent_edge_slot) continue;
                if (tin[w] >= 0) {
                    low[v] = std::min(low[v], tin[w]);
                } else {
                    tin[w] = low[w] = timer++;
                    parent[w] = v;
                    // parent slot at w: the first occurrence of v in adj[w]
                    int back = -1;
                    for (int k = 0; k < static_cast<int>(g.adj[w].size()); ++k)
                        if (g.adj[w][k] == v) {
                            back = k;
                            break;
                        }
                    st.push_back({w, back, 0});
                }
            } else {
                int child = v;
                st.pop_back();
                if (!st.empty()) {
                    int p = st.back().v;
                    low[p] = std::min(low[p], low[child]);
                    if (low[child] > tin[p]) return true;
                }
            }
        }
    }
    return false;
}

}  // namespace

bool is_three_connected_exhaustive(const Graph& g) {
    const int n = g.n();
    if (n < 4 || !g.is_simple() || !g.connected()) return false;
    std::vector<char> rem(n, 0);
    for (int a = 0; a < n; ++a) {
        rem[a] = 1;
        if (!connected_without(g, rem)) return false;
        for (int b = a + 1; b < n; ++b) {
            rem[b] = 1;
            bool ok = connected_without(g, rem);
            rem[b] = 0;
            if (!ok) return false;
        }
        rem[a] = 0;
    }
    return true;
}

bool is_three_connected(const Graph& g) {
    if (g.n() <= 64 || !g.is_cubic()) return is_three_connected_exhaustive(g);
    if (!g.is_simple() || !g.connected()) return false;
    if (has_bridge_without(g, -1, -1)) return false;
    for (int u = 0; u < g.n(); ++u)
        for (int w : g.adj[u])
            if (u < w && has_bridge_without(g, u, w)) return false;
    return true;
}

std::optional<CombinatorialMap> planar_embedding(const Graph& g, int root_tail, int root_head,
                                                 std::vector<int>* dart_tail) {
    using namespace boost;
    using BG = adjacency_list<vecS, vecS, undirectedS, property<vertex_index_t, int>,
                              property<edge_index_t, int>>;
    BG bg(g.n());
    std::vector<std::pair<int, int>> ends;
    for (int u = 0; u < g.n(); ++u)
        for (int w : g.adj[u])
            if (u < w) {
                add_edge(u, w, static_cast<int>(ends.size()), bg);
                ends.push_back({u, w});
            } else if (u == w) {
                throw MapError("planar_embedding needs a loopless graph");
            }
    using Edge = graph_traits<BG>::edge_descriptor;
    std::vector<std::vector<Edge>> emb(g.n());
    if (!boyer_myrvold_planarity_test(boyer_myrvold_params::graph = bg, boyer_myrvold_params::embedding = &emb[0]))
        return std::nullopt;
    auto eidx = get(edge_index, bg);
    const int E = static_cast<int>(ends.size());
    CombinatorialMap m;
    m.alpha.resize(2 * E);
    m.sigma.assign(2 * E, -1);
    std::vector<int> tail(2 * E);
    for (int e = 0; e < E; ++e) {
        m.alpha[2 * e] = 2 * e + 1;
        m.alpha[2 * e + 1] = 2 * e;
        tail[2 * e] = ends[e].first;
        tail[2 * e + 1] = ends[e].second;
    }
    for (int v = 0; v < g.n(); ++v) {
        std::vector<int> ds;
        for (auto& ed : emb[v]) {
            int e = eidx[ed];
            ds.push_back(ends[e].first == v ? 2 * e : 2 * e + 1);
        }
        for (std::size_t i = 0; i < ds.size(); ++i) m.sigma[ds[i]] = ds[(i + 1) % ds.size()];
    }
    m.root = -1;
    for (int d = 0; d < 2 * E; ++d)
        if (tail[d] == root_tail && tail[m.alpha[d]] == root_head) {
            m.root = d;
            break;
        }
    if (m.root < 0) throw MapError("root edge not present in graph");
    validate(m);
    if (dart_tail) *dart_tail = tail;
    return m;
}

LabeledMap canonical_embedding(const CombinatorialMap& embedded, const std::vector<int>& label_of_vertex) {
    auto pick = [&](const CombinatorialMap& m) {
        auto v = m.vertex_of();
        auto inv = inverse_permutation(m.sigma);
        int v1 = v[m.alpha[inv[m.root]]];
        int v2 = v[m.alpha[m.sigma[m.root]]];
        return std::make_pair(label_of_vertex[v1], label_of_vertex[v2]);
    };
    auto [l1, l2] = pick(embedded);
    if (l1 == l2) throw MapError("canonical embedding needs distinct far neighbours of the root");
    CombinatorialMap chosen = l1 < l2 ? embedded : mirror(embedded);
    // relabel darts canonically and carry vertex labels along
    const int D = chosen.darts();
    std::vector<int> lab(D, -1), order{chosen.root};
    lab[chosen.root] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int e : {chosen.sigma[order[i]], chosen.alpha[order[i]]})
            if (lab[e] < 0) {
                lab[e] = static_cast<int>(order.size());
                order.push_back(e);
            }
    LabeledMap out;
    out.map = canonical_form(chosen);
    auto vold = chosen.vertex_of();
    auto vnew = out.map.vertex_of();
    out.labels.assign(out.map.num_vertices(), 0);
    for (int d = 0; d < D; ++d) out.labels[vnew[lab[d]]] = label_of_vertex[vold[d]];
    return out;
}

LabeledMap canonical_embedding(const LabeledCubicGraph& k) {
    if (!is_three_connected(k.graph)) throw MapError("canonical embedding needs a 3-connected graph");
    std::vector<int> tail;
    auto m = planar_embedding(k.graph, k.root_tail, k.root_head, &tail);
    if (!m) throw MapError("graph is not planar");
    auto v = m->vertex_of();
    std::vector<int> lab(m->num_vertices());
    for (int d = 0; d < m->darts(); ++d) lab[v[d]] = k.labels[tail[d]];
    return canonical_embedding(*m, lab);
}

// ── 3-orientation by reverse canonical-order shelling ──

std::vector<char> compute_3_orientation(const CombinatorialMap& t) {
    DartIndex ix(t);
    const int N = ix.nv;
    if (N < 4) throw MapError("3-orientation needs at least 4 vertices");
    const int D = t.darts();
    std::vector<char> out(D, 0);
    std::vector<int> first_dart(N, -1);
    for (int d = 0; d < D; ++d)
        if (first_dart[ix.tail[d]] < 0) first_dart[ix.tail[d]] = d;
    auto head = [&](int d) { return ix.tail[t.alpha[d]]; };
    auto dart_to = [&](int v, int w) {
        int d = first_dart[v];
        int x = d;
        do {
            if (head(x) == w) return x;
            x = t.sigma[x];
        } while (x != d);
        throw MapError("missing edge during shelling");
    };
    auto orient = [&](int from, int to) {
        int d = dart_to(from, to);
        out[d] = 1;
        out[t.alpha[d]] = 0;
    };

    const int r = t.root;
    const int v1 = ix.tail[r], v2 = head(r);
    const int vN = head(t.phi(r));
    std::vector<int> nxt(N, -1), prv(N, -1), chords(N, 0), newidx(N, -1);
    std::vector<char> onb(N, 0);
    // boundary in root-face order v1 -> v2 -> vN -> v1
    nxt[v1] = v2;
    nxt[v2] = vN;
    nxt[vN] = v1;
    prv[v2] = v1;
    prv[vN] = v2;
    prv[v1] = vN;
    onb[v1] = onb[v2] = onb[vN] = 1;
    std::vector<int> cand{vN};
    int removed = 0;
    while (removed < N - 2) {
        int v = -1;
        while (!cand.empty()) {
            int c = cand.back();
            cand.pop_back();
            if (onb[c] && chords[c] == 0 && c != v1 && c != v2) {
                v = c;
                break;
            }
        }
        if (v < 0) throw MapError("shelling got stuck: input is not a simple triangulation");
        const int p = prv[v], n = nxt[v];
        // interior neighbours ccw from the n side to the p side
        std::vector<int> inner;
        int dn = dart_to(v, n);
        for (int x = t.sigma[dn]; head(x) != p; x = t.sigma[x]) inner.push_back(head(x));
        std::reverse(inner.begin(), inner.end());
        onb[v] = 0;
        ++removed;
        orient(v, p);
        orient(v, n);
        for (int u : inner) orient(u, v);
        if (inner.empty()) {
            nxt[p] = n;
            prv[n] = p;
            --chords[p];
            --chords[n];
            if (chords[p] == 0) cand.push_back(p);
            if (chords[n] == 0) cand.push_back(n);
            continue;
        }
        int last = p;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            int u = inner[i];
            onb[u] = 1;
            newidx[u] = static_cast<int>(i);
            nxt[last] = u;
            prv[u] = last;
            last = u;
        }
        nxt[last] = n;
        prv[n] = last;
        for (std::size_t i = 0; i < inner.size(); ++i) {
            int u = inner[i];
            int d0 = first_dart[u], x = d0;
            do {
                int w = head(x);
                if (onb[w] && w != nxt[u] && w != prv[u] &&
                    !(newidx[w] >= 0 && onb[w] && newidx[w] <= static_cast<int>(i) && std::find(inner.begin(), inner.end(), w) != inner.end())) {
                    ++chords[u];
                    ++chords[w];
                }
                x = t.sigma[x];
            } while (x != d0);
        }
        for (int u : inner) newidx[u] = -1;
        for (int u : inner)
            if (chords[u] == 0) cand.push_back(u);
    }
    // outer triangle oriented cyclically v1 -> v2 -> vN -> v1
    orient(v1, v2);
    orient(v2, vN);
    orient(vN, v1);
    return out;
}

std::vector<int> out_degrees(const CombinatorialMap& t, const std::vector<char>& out) {
    DartIndex ix(t);
    std::vector<int> deg(ix.nv, 0);
    for (int d = 0; d < t.darts(); ++d)
        if (out[d]) ++deg[ix.tail[d]];
    return deg;
}

std::vector<int> bfs_distances(const Graph& g, const std::vector<int>& sources) {
    std::vector<int> dist(g.n(), -1);
    std::deque<int> q;
    for (int s : sources) {
        dist[s] = 0;
        q.push_back(s);
    }
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : g.adj[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                q.push_back(w);
            }
    }
    return dist;
}

int graph_diameter(const Graph& g) {
    int best = 0;
    for (int s = 0; s < g.n(); ++s) {
        auto d = bfs_distances(g, {s});
        for (int x : d) {
            if (x < 0) throw MapError("diameter of a disconnected graph");
            best = std::max(best, x);
        }
    }
    return best;
}

}  // namespace cubiclab
