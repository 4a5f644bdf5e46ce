#include "cubiclab/decomp.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <numeric>
#include <unordered_map>

#include "cubiclab/rng.hpp"

namespace cubiclab {

std::string to_string(NodeLabel l) {
    switch (l) {
        case NodeLabel::L: return "L";
        case NodeLabel::R: return "R";
        case NodeLabel::M: return "M";
        case NodeLabel::T: return "T";
    }
    return "?";
}

std::vector<std::pair<int, int>> edge_list(const Graph& g) {
    std::vector<std::pair<int, int>> out;
    for (int u = 0; u < g.n(); ++u) {
        int loops = 0;
        for (int v : g.adj[u]) {
            if (v > u) out.push_back({u, v});
            if (v == u) ++loops;
        }
        if (loops % 2) throw DecompError("odd loop count at vertex " + std::to_string(u));
        for (int k = 0; k < loops / 2; ++k) out.push_back({u, u});
    }
    return out;
}

int DecompositionTree::diameter() const {
    if (nodes.empty()) return 0;
    auto far = [&](int s, int& dist) {
        std::vector<int> d(nodes.size(), -1);
        std::deque<int> q{s};
        d[s] = 0;
        int last = s;
        while (!q.empty()) {
            int x = q.front();
            q.pop_front();
            last = x;
            for (int e : nodes[x].tree_edges) {
                int y = edges[e].other(x);
                if (d[y] < 0) {
                    d[y] = d[x] + 1;
                    q.push_back(y);
                }
            }
        }
        dist = d[last];
        return last;
    };
    int dist = 0;
    int a = far(0, dist);
    far(a, dist);
    return dist;
}

// ── construction ──

namespace {

// Path of g between two branch vertices through separating vertices.
struct Chain {
    int x = 0, y = 0;
    std::vector<int> inner;   // separating vertices in order from x
    std::vector<int> gedges;  // edges of g in order from x
};

struct WorkEdge {
    int x = 0, y = 0;
    int chain = -1;            // real edge: index into chains
    int link = -1;             // substituted edge: link id
    std::uint64_t label = 0;   // 2-edge-cut class of a real edge
};

struct Builder {
    const Graph& g;
    DecompositionTree t;
    std::vector<std::vector<int>> incident;  // edge ids per vertex, loops twice
    std::vector<char> bridge;
    std::vector<int> lnode;                  // L-node of each separating vertex
    std::vector<Chain> chains;
    std::vector<std::vector<int>> link_ends;
    std::vector<std::vector<int>> link_legs;

    explicit Builder(const Graph& graph) : g(graph) {}

    int add_node(NodeLabel l) {
        t.nodes.push_back({});
        t.nodes.back().label = l;
        return static_cast<int>(t.nodes.size()) - 1;
    }
    void connect(int a, int b, std::vector<int> legs = {}) {
        int id = static_cast<int>(t.edges.size());
        t.edges.push_back({a, b, std::move(legs)});
        t.nodes[a].tree_edges.push_back(id);
        t.nodes[b].tree_edges.push_back(id);
    }
    int new_link(std::vector<int> legs = {}) {
        link_ends.emplace_back();
        link_legs.push_back(std::move(legs));
        return static_cast<int>(link_ends.size()) - 1;
    }
    int other_end(int e, int v) const {
        auto [a, b] = t.graph_edges[e];
        return a == v ? b : a;
    }

    void find_bridges();
    void cycle_piece(int start);
    void branch_piece(const std::vector<int>& branch);
    void hang_chain(int node, const Chain& c);
    void final_node(const std::vector<WorkEdge>& item);
};

void Builder::find_bridges() {
    const int n = g.n(), m = static_cast<int>(t.graph_edges.size());
    bridge.assign(m, 0);
    std::vector<int> tin(n, -1), low(n, 0);
    int timer = 0;
    struct Frame {
        int v, via, next;
    };
    for (int s = 0; s < n; ++s) {
        if (tin[s] >= 0) continue;
        std::vector<Frame> stack{{s, -1, 0}};
        tin[s] = low[s] = timer++;
        while (!stack.empty()) {
            auto& f = stack.back();
            if (f.next < static_cast<int>(incident[f.v].size())) {
                int e = incident[f.v][f.next++];
                if (e == f.via) continue;
                int w = other_end(e, f.v);
                if (tin[w] < 0) {
                    tin[w] = low[w] = timer++;
                    stack.push_back({w, e, 0});
                } else {
                    low[f.v] = std::min(low[f.v], tin[w]);
                }
            } else {
                Frame done = f;
                stack.pop_back();
                if (!stack.empty()) {
                    int p = stack.back().v;
                    low[p] = std::min(low[p], low[done.v]);
                    if (low[done.v] > tin[p]) bridge[done.via] = 1;
                }
            }
        }
    }
}

// A piece without branch vertices: a cycle through separating vertices, or a loop.
void Builder::cycle_piece(int start) {
    std::vector<int> verts{start}, gedges;
    int prev_edge = -1, v = start;
    for (;;) {
        int e = -1;
        for (int f : incident[v])
            if (!bridge[f] && f != prev_edge) {
                e = f;
                break;
            }
        if (e < 0) throw DecompError("broken cycle piece");
        gedges.push_back(e);
        int w = other_end(e, v);
        if (w == start) break;
        verts.push_back(w);
        prev_edge = e;
        v = w;
    }
    const int k = static_cast<int>(verts.size());
    if (k == 1) {
        t.nodes[lnode[start]].owned_edges.push_back(gedges[0]);
    } else if (k == 2) {
        connect(lnode[verts[0]], lnode[verts[1]], gedges);
    } else {
        int r = add_node(NodeLabel::R);
        t.nodes[r].owned_edges = gedges;
        for (int u : verts) connect(r, lnode[u]);
    }
}

void Builder::hang_chain(int node, const Chain& c) {
    const int m = static_cast<int>(c.inner.size());
    if (m == 0) {
        t.nodes[node].owned_edges.push_back(c.gedges[0]);
    } else if (m == 1) {
        connect(node, lnode[c.inner[0]], c.gedges);
    } else {
        int r = add_node(NodeLabel::R);
        t.nodes[r].owned_edges = c.gedges;
        connect(node, r);
        for (int u : c.inner) connect(r, lnode[u]);
    }
}

void Builder::final_node(const std::vector<WorkEdge>& item) {
    std::vector<int> verts;
    for (auto& w : item) {
        verts.push_back(w.x);
        verts.push_back(w.y);
    }
    std::sort(verts.begin(), verts.end());
    verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
    if (verts.size() == 2 && item.size() != 3) throw DecompError("bond with " + std::to_string(item.size()) + " edges");
    if (verts.size() == 3 || verts.size() == 1) throw DecompError("component with " + std::to_string(verts.size()) + " vertices");
    int node = add_node(verts.size() == 2 ? NodeLabel::M : NodeLabel::T);
    for (int v : verts) t.node_of_vertex[v] = node;
    t.nodes[node].vertices = verts;
    for (auto& w : item) {
        t.nodes[node].component.push_back({std::min(w.x, w.y), std::max(w.x, w.y)});
        if (w.chain >= 0)
            hang_chain(node, chains[w.chain]);
        else
            link_ends[w.link].push_back(node);
    }
}

// A bridgeless piece with branch vertices: smooth the separating vertices,
// then split along classes of 2-edge cuts.
void Builder::branch_piece(const std::vector<int>& branch) {
    const int n = g.n();
    std::vector<char> is_branch(n, 0);
    for (int v : branch) is_branch[v] = 1;
    std::vector<char> used(t.graph_edges.size(), 0);
    std::vector<WorkEdge> root;
    std::vector<std::vector<int>> wincident(n);
    for (int x : branch)
        for (int e : incident[x]) {
            if (bridge[e] || used[e]) continue;
            Chain c;
            c.x = x;
            int v = x, cur = e;
            for (;;) {
                used[cur] = 1;
                c.gedges.push_back(cur);
                int w = other_end(cur, v);
                if (is_branch[w]) {
                    c.y = w;
                    break;
                }
                c.inner.push_back(w);
                int nxt = -1;
                for (int f : incident[w])
                    if (!bridge[f] && f != cur) nxt = f;
                if (nxt < 0) throw DecompError("dead end in a piece");
                v = w;
                cur = nxt;
            }
            if (c.x == c.y) throw DecompError("loop at a branch vertex");
            WorkEdge we;
            we.x = c.x;
            we.y = c.y;
            we.chain = static_cast<int>(chains.size());
            chains.push_back(std::move(c));
            wincident[we.x].push_back(static_cast<int>(root.size()));
            wincident[we.y].push_back(static_cast<int>(root.size()));
            root.push_back(we);
        }

    // cycle-space labels: {e, f} is a 2-edge cut iff label(e) == label(f)
    {
        Rng rng(0x2c0ffee ^ static_cast<std::uint64_t>(root.size()));
        std::vector<int> parent_edge(n, -2), order;
        std::vector<char> tree_edge(root.size(), 0);
        std::vector<int> stack{branch[0]};
        parent_edge[branch[0]] = -1;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            order.push_back(v);
            for (int j : wincident[v]) {
                int w = root[j].x == v ? root[j].y : root[j].x;
                if (parent_edge[w] == -2) {
                    parent_edge[w] = j;
                    tree_edge[j] = 1;
                    stack.push_back(w);
                }
            }
        }
        if (order.size() != branch.size()) throw DecompError("disconnected piece");
        std::vector<std::uint64_t> acc(n, 0);
        for (std::size_t j = 0; j < root.size(); ++j)
            if (!tree_edge[j]) {
                root[j].label = rng.next() | 1;
                acc[root[j].x] ^= root[j].label;
                acc[root[j].y] ^= root[j].label;
            }
        for (auto it = order.rbegin(); it != order.rend(); ++it) {
            int v = *it, j = parent_edge[v];
            if (j < 0) continue;
            root[j].label = acc[v];
            if (acc[v] == 0) throw DecompError("bridge inside a piece");
            int p = root[j].x == v ? root[j].y : root[j].x;
            acc[p] ^= acc[v];
        }
    }

    std::vector<int> uf(n);
    std::vector<std::vector<WorkEdge>> work{std::move(root)};
    while (!work.empty()) {
        auto item = std::move(work.back());
        work.pop_back();
        std::unordered_map<std::uint64_t, int> count;
        for (auto& w : item)
            if (w.chain >= 0) ++count[w.label];
        std::uint64_t cls = 0;
        for (auto& w : item)
            if (w.chain >= 0 && count[w.label] >= 2) {
                cls = w.label;
                break;
            }
        if (cls == 0) {
            final_node(item);
            continue;
        }
        auto find = [&](int v) {
            while (uf[v] != v) v = uf[v] = uf[uf[v]];
            return v;
        };
        for (auto& w : item) uf[w.x] = w.x, uf[w.y] = w.y;
        std::vector<WorkEdge> ring;
        std::vector<WorkEdge> rest;
        for (auto& w : item) {
            if (w.chain >= 0 && w.label == cls) {
                ring.push_back(w);
            } else {
                rest.push_back(w);
                uf[find(w.x)] = find(w.y);
            }
        }
        std::unordered_map<int, int> part_of_root;
        std::vector<std::vector<WorkEdge>> parts;
        std::vector<std::vector<int>> ends;
        auto part = [&](int v) {
            auto [it, fresh] = part_of_root.try_emplace(find(v), static_cast<int>(parts.size()));
            if (fresh) {
                parts.emplace_back();
                ends.emplace_back();
            }
            return it->second;
        };
        for (auto& w : rest) parts[part(w.x)].push_back(w);
        for (auto& w : ring) {
            ends[part(w.x)].push_back(w.x);
            ends[part(w.y)].push_back(w.y);
        }
        int members = static_cast<int>(parts.size());
        for (auto& w : ring) members += static_cast<int>(chains[w.chain].inner.size());
        int link = -1, rnode = -1;
        if (members == 2) {
            if (ring.size() != 2) throw DecompError("two-member ring with stray chains");
            link = new_link({chains[ring[0].chain].gedges[0], chains[ring[1].chain].gedges[0]});
        } else {
            rnode = add_node(NodeLabel::R);
            for (auto& w : ring) {
                auto& c = chains[w.chain];
                auto& owned = t.nodes[rnode].owned_edges;
                owned.insert(owned.end(), c.gedges.begin(), c.gedges.end());
                for (int u : c.inner) connect(rnode, lnode[u]);
            }
        }
        for (std::size_t p = 0; p < parts.size(); ++p) {
            if (ends[p].size() != 2 || ends[p][0] == ends[p][1]) throw DecompError("ring member without two legs");
            WorkEdge v;
            v.x = ends[p][0];
            v.y = ends[p][1];
            if (rnode >= 0) {
                v.link = new_link();
                link_ends[v.link].push_back(rnode);
            } else {
                v.link = link;
            }
            parts[p].push_back(v);
            work.push_back(std::move(parts[p]));
        }
    }
}

}  // namespace

DecompositionTree decomposition_tree(const Graph& g) {
    if (g.n() == 0) throw DecompError("empty graph");
    if (!g.is_cubic()) throw DecompError("graph is not cubic");
    if (!g.connected()) throw DecompError("graph is not connected");
    Builder b(g);
    b.t.n = g.n();
    b.t.graph_edges = edge_list(g);
    b.t.node_of_vertex.assign(g.n(), -1);
    b.incident.assign(g.n(), {});
    for (int e = 0; e < static_cast<int>(b.t.graph_edges.size()); ++e) {
        auto [u, v] = b.t.graph_edges[e];
        b.incident[u].push_back(e);
        b.incident[v].push_back(e);
    }
    b.find_bridges();
    b.lnode.assign(g.n(), -1);
    for (int e = 0; e < static_cast<int>(b.t.graph_edges.size()); ++e) {
        if (!b.bridge[e]) continue;
        for (int v : {b.t.graph_edges[e].first, b.t.graph_edges[e].second})
            if (b.lnode[v] < 0) {
                b.lnode[v] = b.add_node(NodeLabel::L);
                b.t.nodes[b.lnode[v]].vertices = {v};
                b.t.node_of_vertex[v] = b.lnode[v];
            }
    }
    for (int e = 0; e < static_cast<int>(b.t.graph_edges.size()); ++e)
        if (b.bridge[e]) b.connect(b.lnode[b.t.graph_edges[e].first], b.lnode[b.t.graph_edges[e].second], {e});

    // pieces: components of g without its bridges
    std::vector<int> piece(g.n(), -1);
    int pieces = 0;
    for (int s = 0; s < g.n(); ++s) {
        if (piece[s] >= 0) continue;
        std::vector<int> verts{s};
        piece[s] = pieces;
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (int e : b.incident[verts[i]]) {
                if (b.bridge[e]) continue;
                int w = b.other_end(e, verts[i]);
                if (piece[w] < 0) {
                    piece[w] = pieces;
                    verts.push_back(w);
                }
            }
        ++pieces;
        std::vector<int> branch;
        for (int v : verts)
            if (b.lnode[v] < 0) branch.push_back(v);
        bool has_edges = false;
        for (int e : b.incident[s]) has_edges |= !b.bridge[e];
        if (!has_edges) continue;
        if (branch.empty())
            b.cycle_piece(s);
        else
            b.branch_piece(branch);
    }
    for (std::size_t k = 0; k < b.link_ends.size(); ++k) {
        if (b.link_ends[k].size() != 2) throw DecompError("unresolved substituted edge");
        b.connect(b.link_ends[k][0], b.link_ends[k][1], b.link_legs[k]);
    }
    return std::move(b.t);
}

Graph reassemble(const DecompositionTree& t) {
    Graph h(t.n);
    auto add = [&](int e) { h.add_edge(t.graph_edges[e].first, t.graph_edges[e].second); };
    for (auto& node : t.nodes)
        for (int e : node.owned_edges) add(e);
    for (auto& te : t.edges)
        for (int e : te.legs) add(e);
    return h;
}

void check_tree(const DecompositionTree& t) {
    std::vector<int> seen(t.n, 0);
    for (auto& node : t.nodes)
        for (int v : node.vertices) ++seen[v];
    for (int v = 0; v < t.n; ++v)
        if (seen[v] != 1) throw DecompError("vertex " + std::to_string(v) + " lies in " + std::to_string(seen[v]) + " components");
    std::vector<int> hits(t.graph_edges.size(), 0);
    for (auto& node : t.nodes)
        for (int e : node.owned_edges) ++hits[e];
    for (auto& te : t.edges)
        for (int e : te.legs) ++hits[e];
    for (std::size_t e = 0; e < hits.size(); ++e)
        if (hits[e] != 1) throw DecompError("edge " + std::to_string(e) + " accounted " + std::to_string(hits[e]) + " times");
    if (t.edges.size() + 1 != t.nodes.size()) throw DecompError("tree has the wrong number of edges");
    for (int x = 0; x < static_cast<int>(t.nodes.size()); ++x) {
        auto& node = t.nodes[x];
        int deg = t.degree(x);
        switch (node.label) {
            case NodeLabel::L:
                if (node.vertices.size() != 1 || deg < 1 || deg > 3) throw DecompError("bad L-node");
                break;
            case NodeLabel::R:
                if (!node.vertices.empty() || deg < 3) throw DecompError("bad R-node");
                break;
            case NodeLabel::M:
                if (node.vertices.size() != 2 || node.component.size() != 3) throw DecompError("bad M-node");
                break;
            case NodeLabel::T: {
                if (node.vertices.size() < 4) throw DecompError("T-node with fewer than 4 vertices");
                auto c = node.component;
                std::sort(c.begin(), c.end());
                if (std::adjacent_find(c.begin(), c.end()) != c.end()) throw DecompError("T-node with a multiple edge");
                if (c.size() * 2 != node.vertices.size() * 3) throw DecompError("T-node that is not cubic");
                break;
            }
        }
    }
    if (!t.nodes.empty()) {
        std::vector<char> reach(t.nodes.size(), 0);
        std::vector<int> st{0};
        reach[0] = 1;
        std::size_t count = 1;
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            for (int e : t.nodes[x].tree_edges) {
                int y = t.edges[e].other(x);
                if (!reach[y]) {
                    reach[y] = 1;
                    ++count;
                    st.push_back(y);
                }
            }
        }
        if (count != t.nodes.size()) throw DecompError("tree is disconnected");
    }
}

// ── 3-connected core ──

namespace {

Graph component_graph(const TreeNode& node) {
    Graph k(static_cast<int>(node.vertices.size()));
    auto at = [&](int v) {
        return static_cast<int>(std::lower_bound(node.vertices.begin(), node.vertices.end(), v) - node.vertices.begin());
    };
    for (auto [u, v] : node.component) k.add_edge(at(u), at(v));
    return k;
}

}  // namespace

CoreResult three_connected_core(const DecompositionTree& t, const std::vector<int>& labels) {
    CoreResult best;
    int best_label = 0;
    for (int x = 0; x < static_cast<int>(t.nodes.size()); ++x) {
        auto& node = t.nodes[x];
        if (node.label != NodeLabel::T) continue;
        int lo = labels.empty() ? node.vertices.front() + 1 : labels.at(node.vertices.front());
        if (!labels.empty())
            for (int v : node.vertices) lo = std::min(lo, labels.at(v));
        int sz = static_cast<int>(node.vertices.size());
        if (!best.found || sz > static_cast<int>(best.vertices.size()) ||
            (sz == static_cast<int>(best.vertices.size()) && lo < best_label)) {
            best.found = true;
            best.node = x;
            best.vertices = node.vertices;
            best_label = lo;
        }
    }
    if (best.found) {
        best.core = component_graph(t.nodes[best.node]);
        best.size = static_cast<int>(best.vertices.size()) / 2;
    }
    return best;
}

// ── diameter bound ──

namespace {

struct SideIndex {
    std::vector<int> tin, tout, parent_edge;
    explicit SideIndex(const DecompositionTree& t) {
        const int k = static_cast<int>(t.nodes.size());
        tin.assign(k, -1);
        tout.assign(k, -1);
        parent_edge.assign(k, -1);
        int timer = 0;
        std::vector<std::pair<int, std::size_t>> stack{{0, 0}};
        tin[0] = timer++;
        while (!stack.empty()) {
            auto& [x, i] = stack.back();
            if (i < t.nodes[x].tree_edges.size()) {
                int e = t.nodes[x].tree_edges[i++];
                int y = t.edges[e].other(x);
                if (tin[y] < 0) {
                    tin[y] = timer++;
                    parent_edge[y] = e;
                    stack.push_back({y, 0});
                }
            } else {
                tout[x] = timer++;
                stack.pop_back();
            }
        }
    }
    bool inside(int node, int sub) const { return tin[sub] <= tin[node] && tout[node] <= tout[sub]; }
};

int delta_with(const Graph& g, const DecompositionTree& t, const SideIndex& side, int e, int from) {
    const TreeEdge& te = t.edges[e];
    int far = te.other(from);
    int child = side.parent_edge[te.a] == e ? te.a : te.b;
    bool far_is_child = far == child;
    auto in_s = [&](int v) {
        int node = t.node_of_vertex[v];
        return side.inside(node, child) == far_is_child;
    };
    std::vector<int> starts;
    auto consider = [&](int ge) {
        auto [u, v] = t.graph_edges[ge];
        bool iu = in_s(u), iv = in_s(v);
        if (iu != iv) starts.push_back(iu ? u : v);
    };
    for (int ge : te.legs) consider(ge);
    if (t.nodes[from].label == NodeLabel::R)
        for (int ge : t.nodes[from].owned_edges) consider(ge);
    if (t.nodes[far].label == NodeLabel::R)
        for (int ge : t.nodes[far].owned_edges) consider(ge);
    if (starts.size() != 2) throw DecompError("network with " + std::to_string(starts.size()) + " legs");
    if (starts[0] == starts[1]) return 2;
    std::unordered_map<int, int> dist{{starts[0], 0}};
    std::deque<int> q{starts[0]};
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : g.adj[v]) {
            if (dist.count(w) || !in_s(w)) continue;
            dist[w] = dist[v] + 1;
            if (w == starts[1]) return 2 + dist[w];
            q.push_back(w);
        }
    }
    throw DecompError("poles of an attached network are not connected inside it");
}

}  // namespace

int attached_delta(const Graph& g, const DecompositionTree& t, int e, int from) {
    SideIndex side(t);
    return delta_with(g, t, side, e, from);
}

DiameterBound diameter_bound(const Graph& g, const DecompositionTree& t) {
    DiameterBound out;
    SideIndex side(t);
    out.tree_diameter = t.diameter();
    for (int x = 0; x < static_cast<int>(t.nodes.size()); ++x) {
        auto& node = t.nodes[x];
        if (node.label == NodeLabel::R) {
            out.xi_R = std::max(out.xi_R, t.degree(x));
            for (int e : node.tree_edges) out.delta_R = std::max(out.delta_R, delta_with(g, t, side, e, x));
        } else if (node.label == NodeLabel::T) {
            out.xi_T = std::max(out.xi_T, graph_diameter(component_graph(node)));
            if (!node.owned_edges.empty()) out.delta_T = std::max(out.delta_T, 1);
            for (int e : node.tree_edges) out.delta_T = std::max(out.delta_T, delta_with(g, t, side, e, x));
        }
    }
    out.bound = static_cast<long>(1 + out.tree_diameter) *
                (2 + static_cast<long>(out.xi_R) * out.delta_R + static_cast<long>(out.xi_T) * out.delta_T);
    return out;
}

}  // namespace cubiclab
