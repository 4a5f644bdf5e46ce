#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

#include "cubiclab/counts.hpp"
#include "cubiclab/sampler.hpp"

namespace cubiclab {

std::string to_string(Variant v) { return v == Variant::graph ? "graph" : "multigraph"; }

std::string to_string(NetType t) {
    switch (t) {
        case NetType::trivial: return "trivial";
        case NetType::L: return "L";
        case NetType::S: return "S";
        case NetType::P: return "P";
        case NetType::H: return "H";
    }
    return "?";
}

Variant parse_variant(const std::string& s) {
    if (s == "graph" || s == "graphs") return Variant::graph;
    if (s == "multigraph" || s == "multigraphs") return Variant::multigraph;
    throw std::invalid_argument("unknown variant: " + s);
}

// ── values at the singular point ──

namespace {

struct Values {
    long double L, S, P, H;
};

Values values_at(Variant v, long double D, long double E, long double TE) {
    const long double z = E / (D * D * D);
    Values out{};
    if (v == Variant::graph) {
        const long double b = 2.0L + z;
        out.L = (b - std::sqrt(b * b - 4.0L * z * (D - 1.0L))) / 2.0L;
        out.P = z * (D * D - 1.0L) / 2.0L;
    } else {
        out.L = 1.0L - std::sqrt(1.0L - z * D);
        out.P = z * D * D / 2.0L;
    }
    out.S = (D - 1.0L) * (D - 1.0L) / D;
    out.H = TE / (2.0L * D);
    return out;
}

long double residual(Variant v, long double D, long double E, long double TE) {
    auto x = values_at(v, D, E, TE);
    return 1.0L + x.L + x.S + x.P + x.H - D;
}

}  // namespace

long double NetworkLaw::leaf_weight() const {
    return variant == Variant::graph ? (D - 1.0L - L) / 2.0L : D / 2.0L;
}

long double NetworkLaw::branch_ratio() const { return L / 2.0L; }

NetworkLaw network_law(Variant v, int core_cap) {
    NetworkLaw law;
    law.variant = v;
    law.E = 27.0L / 256.0L;
    law.T_at_E = 5.0L / 256.0L;
    // smallest root above 1 of the one-dimensional reduction
    long double lo = 1.0L, hi = 1.0L;
    const long double step = 1.0L / 4096.0L;
    while (residual(v, hi + step, law.E, law.T_at_E) > 0) {
        hi += step;
        if (hi > 4) throw std::runtime_error("network system has no root");
    }
    lo = hi;
    hi += step;
    for (int it = 0; it < 200; ++it) {
        long double mid = (lo + hi) / 2;
        (residual(v, mid, law.E, law.T_at_E) > 0 ? lo : hi) = mid;
    }
    law.D = (lo + hi) / 2;
    auto x = values_at(v, law.D, law.E, law.T_at_E);
    law.L = x.L;
    law.S = x.S;
    law.P = x.P;
    law.H = x.H;
    law.rho = law.E / (law.D * law.D * law.D);

    const long double lE = std::log(law.E), lT = std::log(law.T_at_E);
    long double acc = 0;
    for (int k = 2; k <= core_cap; ++k) {
        acc += std::exp(TriangulationSampler::log_simple(k - 1, 3) + k * lE - lT);
        law.core_cdf.push_back(static_cast<double>(acc));
    }
    law.core_tail = static_cast<double>(std::max(0.0L, 1.0L - acc));
    return law;
}

// ── plan sampling ──

NetworkSampler::NetworkSampler(const NetworkLaw& law) : law_(law) {}

NetType NetworkSampler::draw_type(Rng& rng, bool allow_trivial, bool allow_L, bool allow_S) {
    const long double w[5] = {allow_trivial ? 1.0L : 0.0L, allow_L ? law_.L : 0.0L, allow_S ? law_.S : 0.0L, law_.P,
                              law_.H};
    long double total = w[0] + w[1] + w[2] + w[3] + w[4];
    long double u = rng.uniform_ld() * total, acc = 0;
    for (int i = 0; i < 5; ++i) {
        acc += w[i];
        if (u < acc && w[i] > 0) return static_cast<NetType>(i);
    }
    return NetType::H;
}

int NetworkSampler::draw_core_size(Rng& rng) {
    double u = rng.uniform();
    auto it = std::upper_bound(law_.core_cdf.begin(), law_.core_cdf.end(), u);
    if (it == law_.core_cdf.end()) return -1;  // beyond the tabulated range
    return static_cast<int>(it - law_.core_cdf.begin()) + 2;
}

namespace {

enum class Slot { any, nontrivial, series_head, loop_leaf };

}  // namespace

NetworkPlan NetworkSampler::sample_plan(Rng& rng, int size_cap, int* retries) {
    const bool graph = law_.variant == Variant::graph;
    if (retries) *retries = 0;
    for (;;) {
        NetworkPlan plan;
        plan.nodes.emplace_back();
        struct Pending {
            int node;
            Slot slot;
            bool preset;
        };
        std::vector<Pending> todo{{0, Slot::any, false}};
        bool overflow = false;
        auto add_child = [&](int parent, Slot slot, NetType preset = NetType::trivial, bool has_preset = false) {
            int id = static_cast<int>(plan.nodes.size());
            plan.nodes.emplace_back();
            plan.nodes[id].type = preset;
            plan.nodes[parent].children.push_back(id);
            todo.push_back({id, slot, has_preset});
        };
        while (!todo.empty() && !overflow) {
            Pending pd = todo.back();
            todo.pop_back();
            NetType t = NetType::trivial;
            if (pd.preset) {
                t = plan.nodes[pd.node].type;
            } else {
                switch (pd.slot) {
                    case Slot::any: t = draw_type(rng, true, true, true); break;
                    case Slot::nontrivial: t = draw_type(rng, false, true, true); break;
                    case Slot::series_head: t = draw_type(rng, false, true, false); break;
                    case Slot::loop_leaf:
                        t = graph ? draw_type(rng, false, false, true) : draw_type(rng, true, true, true);
                        break;
                }
            }
            const int id = pd.node;
            plan.nodes[id].type = t;
            switch (t) {
                case NetType::trivial: break;
                case NetType::L: {
                    std::vector<char> shape;
                    int open = 1, internal = 0;
                    while (open > 0) {
                        if (rng.uniform_ld() < law_.branch_ratio()) {
                            shape.push_back(1);
                            ++internal;
                            ++open;
                            if (plan.size + internal + 1 > size_cap) {
                                overflow = true;
                                break;
                            }
                        } else {
                            shape.push_back(0);
                            --open;
                        }
                    }
                    if (overflow) break;
                    plan.nodes[id].size = internal + 1;
                    plan.size += internal + 1;
                    const int leaf_count = internal + 1;
                    plan.nodes[id].shape = std::move(shape);
                    for (int i = 0; i < leaf_count; ++i) add_child(id, Slot::loop_leaf);
                    break;
                }
                case NetType::S:
                    add_child(id, Slot::series_head);
                    add_child(id, Slot::nontrivial);
                    break;
                case NetType::P: {
                    plan.nodes[id].size = 1;
                    if (++plan.size > size_cap) {
                        overflow = true;
                        break;
                    }
                    NetType a, b;
                    do {
                        a = draw_type(rng, true, true, true);
                        b = draw_type(rng, true, true, true);
                    } while (graph && a == NetType::trivial && b == NetType::trivial);
                    add_child(id, Slot::any, a, true);
                    add_child(id, Slot::any, b, true);
                    break;
                }
                case NetType::H: {
                    int k = draw_core_size(rng);
                    if (k < 0 || plan.size + k > size_cap) {
                        overflow = true;
                        break;
                    }
                    plan.nodes[id].size = k;
                    plan.size += k;
                    auto tri = tri_.uniform_polygon(k - 1, 3, rng);
                    auto core = std::make_shared<CombinatorialMap>(dual(tri.map));
                    const int r = core->root, r2 = core->alpha[r];
                    std::vector<char> on_face(core->darts(), 0);
                    int f = r;
                    do {
                        on_face[f] = 1;
                        f = core->phi(f);
                    } while (f != r);
                    for (int d = 0; d < core->darts(); ++d) {
                        int a = core->alpha[d];
                        if (d > a || d == r || d == r2) continue;
                        plan.nodes[id].core_edges.push_back(d);
                        plan.nodes[id].outer.push_back(on_face[d] || on_face[a]);
                    }
                    plan.nodes[id].core = std::move(core);
                    const int edges = static_cast<int>(plan.nodes[id].core_edges.size());
                    for (int i = 0; i < edges; ++i) add_child(id, Slot::any);
                    break;
                }
            }
        }
        if (!overflow) return plan;
        if (retries) ++*retries;
    }
}

// ── placement ──

void place_network(Graph& g, const NetworkPlan& plan, int root, int a, int b, std::vector<char>& is_joint,
                   PlacementResult* out) {
    auto fresh = [&](bool joint = false) {
        int v = g.add_vertex();
        is_joint.push_back(joint);
        if (out) out->vertices.push_back(v);
        return v;
    };
    is_joint.resize(g.n(), 0);
    struct Job {
        int node, a, b;
    };
    std::vector<Job> jobs{{root, a, b}};
    while (!jobs.empty()) {
        Job j = jobs.back();
        jobs.pop_back();
        const NetNode& nd = plan.nodes[j.node];
        switch (nd.type) {
            case NetType::trivial: g.add_edge(j.a, j.b); break;
            case NetType::L: {
                int u = fresh(), v = fresh();
                g.add_edge(j.a, u);
                g.add_edge(u, j.b);
                g.add_edge(u, v);
                std::vector<int> open{v};
                std::size_t leaf = 0;
                for (char bit : nd.shape) {
                    int w = open.back();
                    open.pop_back();
                    if (bit) {
                        int c1 = fresh(), c2 = fresh();
                        g.add_edge(w, c1);
                        g.add_edge(w, c2);
                        open.push_back(c2);
                        open.push_back(c1);
                    } else {
                        jobs.push_back({nd.children.at(leaf++), w, w});
                    }
                }
                break;
            }
            case NetType::S: {
                int joint = fresh(true);
                jobs.push_back({nd.children.at(0), j.a, joint});
                jobs.push_back({nd.children.at(1), joint, j.b});
                break;
            }
            case NetType::P: {
                int x = fresh(), y = fresh();
                g.add_edge(j.a, x);
                g.add_edge(y, j.b);
                jobs.push_back({nd.children.at(0), x, y});
                jobs.push_back({nd.children.at(1), x, y});
                break;
            }
            case NetType::H: {
                const auto& k = *nd.core;
                auto vid = k.vertex_of();
                const int nv = k.num_vertices();
                std::vector<int> at(nv);
                for (int i = 0; i < nv; ++i) at[i] = fresh();
                const int r = k.root;
                g.add_edge(j.a, at[vid[r]]);
                g.add_edge(at[vid[k.alpha[r]]], j.b);
                for (std::size_t i = 0; i < nd.core_edges.size(); ++i) {
                    int d = nd.core_edges[i];
                    jobs.push_back({nd.children.at(i), at[vid[d]], at[vid[k.alpha[d]]]});
                }
                break;
            }
        }
    }
}

std::vector<int> finalize_joints(Graph& g, const std::vector<char>& is_joint) {
    const int n = g.n();
    for (int v = 0; v < n; ++v) {
        if (v >= static_cast<int>(is_joint.size()) || !is_joint[v]) continue;
        if (g.adj[v].size() != 2) throw std::logic_error("joint vertex without degree 2");
        int x = g.adj[v][0], y = g.adj[v][1];
        if ((x < static_cast<int>(is_joint.size()) && is_joint[x]) ||
            (y < static_cast<int>(is_joint.size()) && is_joint[y]))
            throw std::logic_error("adjacent joints");
        std::replace(g.adj[x].begin(), g.adj[x].end(), v, y);
        // a loop through the joint would appear twice in adj[x]; x == y only for loops
        if (x != y) std::replace(g.adj[y].begin(), g.adj[y].end(), v, x);
        g.adj[v].clear();
    }
    std::vector<int> remap(n, -1);
    int k = 0;
    for (int v = 0; v < n; ++v)
        if (v >= static_cast<int>(is_joint.size()) || !is_joint[v]) remap[v] = k++;
    Graph h(k);
    for (int v = 0; v < n; ++v) {
        if (remap[v] < 0) continue;
        for (int w : g.adj[v]) h.adj[remap[v]].push_back(remap[w]);
    }
    g = std::move(h);
    return remap;
}

CubicNetwork build_network(NetworkPlan plan) {
    CubicNetwork net;
    net.graph = Graph(2);
    std::vector<char> joint(2, 0);
    place_network(net.graph, plan, 0, 0, 1, joint);
    finalize_joints(net.graph, joint);
    net.size = plan.size;
    net.type = plan.nodes.at(0).type;
    net.plan = std::move(plan);
    if (net.graph.n() != 2 + 2 * net.size) throw std::logic_error("network vertex count mismatch");
    return net;
}

NetworkSample NetworkSampler::sample(Rng& rng, int size_cap) {
    NetworkSample s;
    s.net = build_network(sample_plan(rng, size_cap, &s.retries));
    return s;
}

// ── pole distance and χ ──

int pole_distance(const CubicNetwork& net) {
    auto d = bfs_distances(net.graph, {0});
    if (d[1] < 0) throw std::runtime_error("network poles are disconnected");
    return d[1];
}

namespace {

// Evaluates a bottom-up recursion over the subtree of `node` (children have larger ids).
template <class F>
int fold_plan(const NetworkPlan& plan, int node, F&& f) {
    const int N = static_cast<int>(plan.nodes.size());
    std::vector<int> val(N, 0);
    std::vector<char> in(N, 0);
    std::vector<int> st{node};
    in[node] = 1;
    std::vector<int> order;
    while (!st.empty()) {
        int v = st.back();
        st.pop_back();
        order.push_back(v);
        for (int c : plan.nodes[v].children) {
            if (c <= v || c >= N) throw std::logic_error("malformed network plan");
            in[c] = 1;
            st.push_back(c);
        }
    }
    std::sort(order.begin(), order.end(), std::greater<int>());
    for (int v : order) val[v] = f(plan.nodes[v], val);
    return val[node];
}

int core_distance(const NetNode& nd, const std::vector<int>& val) {
    const auto& k = *nd.core;
    auto vid = k.vertex_of();
    const int nv = k.num_vertices();
    std::vector<std::vector<std::pair<int, int>>> adj(nv);
    for (std::size_t i = 0; i < nd.core_edges.size(); ++i) {
        int d = nd.core_edges[i];
        int a = vid[d], b = vid[k.alpha[d]], w = val[nd.children[i]];
        adj[a].push_back({b, w});
        adj[b].push_back({a, w});
    }
    const int src = vid[k.root], dst = vid[k.alpha[k.root]];
    std::vector<long long> dist(nv, std::numeric_limits<long long>::max());
    using Item = std::pair<long long, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;
    dist[src] = 0;
    pq.push({0, src});
    while (!pq.empty()) {
        auto [du, u] = pq.top();
        pq.pop();
        if (du != dist[u]) continue;
        if (u == dst) break;
        for (auto [w, len] : adj[u])
            if (du + len < dist[w]) {
                dist[w] = du + len;
                pq.push({dist[w], w});
            }
    }
    return static_cast<int>(dist[dst]);
}

}  // namespace

int plan_pole_distance(const NetworkPlan& plan, int node) {
    return fold_plan(plan, node, [](const NetNode& nd, const std::vector<int>& val) {
        switch (nd.type) {
            case NetType::trivial: return 1;
            case NetType::L: return 2;
            case NetType::S: return val[nd.children[0]] + val[nd.children[1]] - 1;
            case NetType::P: return 2 + std::min(val[nd.children[0]], val[nd.children[1]]);
            case NetType::H: return 2 + core_distance(nd, val);
        }
        return 0;
    });
}

int chi(const NetworkPlan& plan, int node) {
    return fold_plan(plan, node, [](const NetNode& nd, const std::vector<int>& val) {
        switch (nd.type) {
            case NetType::trivial: return 1;
            case NetType::L: return 2;
            case NetType::S:
                if (nd.children.size() != 2) throw std::logic_error("malformed S node");
                return val[nd.children[0]] + val[nd.children[1]];
            case NetType::P:
                if (nd.children.size() != 2) throw std::logic_error("malformed P node");
                return val[nd.children[0]] + val[nd.children[1]] + 2;
            case NetType::H: {
                int s = 2;
                for (std::size_t i = 0; i < nd.children.size(); ++i)
                    if (nd.outer.at(i)) s += val[nd.children[i]];
                return s;
            }
        }
        return 0;
    });
}

// ── substitution ──

SubstitutedGraph build_core_substituted(int q, Rng& rng, NetworkSampler& sampler, int size_cap,
                                        bool trivial_networks) {
    if (q < 2) throw DomainError("core size must be at least 2");
    SubstitutedGraph out;
    auto tri = sampler.tri().uniform_polygon(q - 1, 3, rng);
    out.core_map = dual(tri.map);
    out.core = underlying_graph(out.core_map);
    const int nv = out.core_map.num_vertices();
    out.labels.resize(nv);
    for (int i = 0; i < nv; ++i) out.labels[i] = i + 1;
    for (int i = nv - 1; i > 0; --i) std::swap(out.labels[i], out.labels[rng.below(i + 1)]);

    auto vid = out.core_map.vertex_of();
    out.graph = Graph(nv);
    std::vector<char> joint(nv, 0);
    for (int d = 0; d < out.core_map.darts(); ++d) {
        int a = out.core_map.alpha[d];
        if (d > a) continue;
        out.core_edges.push_back({vid[d], vid[a]});
        NetworkPlan plan;
        if (trivial_networks) {
            plan.nodes.emplace_back();
        } else {
            int r = 0;
            plan = sampler.sample_plan(rng, size_cap, &r);
            out.retries += r;
        }
        PlacementResult pr;
        place_network(out.graph, plan, 0, vid[d], vid[a], joint, &pr);
        out.network_size.push_back(plan.size);
        out.network_delta.push_back(plan_pole_distance(plan));
        out.network_vertices.push_back(std::move(pr.vertices));
        out.networks.push_back(std::move(plan));
    }
    auto remap = finalize_joints(out.graph, joint);
    for (auto& vs : out.network_vertices) {
        std::vector<int> kept;
        for (int v : vs)
            if (remap[v] >= 0) kept.push_back(remap[v]);
        vs = std::move(kept);
    }
    return out;
}

}  // namespace cubiclab
