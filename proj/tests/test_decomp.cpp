#include "doctest.h"

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <set>

#include "cubiclab/decomp.hpp"
#include "cubiclab/rng.hpp"
#include "cubiclab/sampler.hpp"

using namespace cubiclab;

namespace {

Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges) {
    Graph g(n);
    for (auto [u, v] : edges) g.add_edge(u, v);
    return g;
}

Graph k4() { return from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}); }

// Configuration model, retried until connected.
Graph random_cubic_multigraph(int n, Rng& rng) {
    for (;;) {
        std::vector<int> half;
        for (int v = 0; v < n; ++v)
            for (int k = 0; k < 3; ++k) half.push_back(v);
        for (int i = static_cast<int>(half.size()) - 1; i > 0; --i)
            std::swap(half[i], half[rng.below(i + 1)]);
        Graph g(n);
        for (std::size_t i = 0; i < half.size(); i += 2) g.add_edge(half[i], half[i + 1]);
        if (g.connected()) return g;
    }
}

bool same_multigraph(Graph a, Graph b) {
    if (a.n() != b.n()) return false;
    for (int v = 0; v < a.n(); ++v) {
        std::sort(a.adj[v].begin(), a.adj[v].end());
        std::sort(b.adj[v].begin(), b.adj[v].end());
    }
    return a.adj == b.adj;
}

std::map<NodeLabel, int> label_counts(const DecompositionTree& t) {
    std::map<NodeLabel, int> c;
    for (auto& node : t.nodes) ++c[node.label];
    return c;
}

// Invariants of the tree that do not depend on vertex names.
std::vector<std::vector<int>> shape(const DecompositionTree& t) {
    std::vector<std::vector<int>> out;
    for (int x = 0; x < static_cast<int>(t.nodes.size()); ++x) {
        std::vector<int> nb;
        for (int e : t.nodes[x].tree_edges) nb.push_back(static_cast<int>(t.nodes[t.edges[e].other(x)].label));
        std::sort(nb.begin(), nb.end());
        nb.insert(nb.begin(), {static_cast<int>(t.nodes[x].label), static_cast<int>(t.nodes[x].vertices.size())});
        out.push_back(nb);
    }
    std::sort(out.begin(), out.end());
    return out;
}

void check_decomposition(const Graph& g) {
    auto t = decomposition_tree(g);
    REQUIRE_NOTHROW(check_tree(t));
    CHECK(same_multigraph(reassemble(t), g));
    auto b = diameter_bound(g, t);
    CHECK(graph_diameter(g) <= b.bound);
    for (auto& node : t.nodes)
        if (node.label == NodeLabel::T && node.vertices.size() <= 40) {
            Graph k(static_cast<int>(node.vertices.size()));
            auto at = [&](int v) {
                return static_cast<int>(std::lower_bound(node.vertices.begin(), node.vertices.end(), v) -
                                        node.vertices.begin());
            };
            for (auto [u, v] : node.component) k.add_edge(at(u), at(v));
            CHECK(is_three_connected(k));
        }
}

}  // namespace

TEST_CASE("3-connected graphs are a single T-node") {
    auto prism = from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {3, 4}, {4, 5}, {5, 3}, {0, 3}, {1, 4}, {2, 5}});
    auto cube = from_edges(8, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6}, {6, 7}, {7, 4},
                               {0, 4}, {1, 5}, {2, 6}, {3, 7}});
    for (const auto& g : {k4(), prism, cube}) {
        auto t = decomposition_tree(g);
        REQUIRE(t.nodes.size() == 1);
        CHECK(t.nodes[0].label == NodeLabel::T);
        CHECK(static_cast<int>(t.nodes[0].vertices.size()) == g.n());
        auto b = diameter_bound(g, t);
        CHECK(b.delta_T == 1);
        CHECK(b.bound == 2 + graph_diameter(g));
        auto core = three_connected_core(t);
        CHECK(core.size == g.n() / 2);
    }
}

TEST_CASE("K4 with one edge replaced by a bond network") {
    // edge 2-3 of K4 becomes 2-4, 4=5 doubled, 5-3
    auto g = from_edges(6, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 4}, {4, 5}, {4, 5}, {5, 3}});
    auto t = decomposition_tree(g);
    REQUIRE_NOTHROW(check_tree(t));
    auto c = label_counts(t);
    CHECK(c[NodeLabel::T] == 1);
    CHECK(c[NodeLabel::M] == 1);
    CHECK(t.nodes.size() == 2);
    CHECK(t.edges[0].legs.size() == 2);
    auto b = diameter_bound(g, t);
    CHECK(b.delta_T == 3);
    CHECK(b.xi_T == 1);
    CHECK(graph_diameter(g) <= b.bound);
}

TEST_CASE("small multigraphs") {
    auto theta = from_edges(2, {{0, 1}, {0, 1}, {0, 1}});
    auto t = decomposition_tree(theta);
    REQUIRE(t.nodes.size() == 1);
    CHECK(t.nodes[0].label == NodeLabel::M);
    CHECK_FALSE(three_connected_core(t).found);

    auto dumbbell = from_edges(2, {{0, 0}, {0, 1}, {1, 1}});
    t = decomposition_tree(dumbbell);
    REQUIRE_NOTHROW(check_tree(t));
    CHECK(label_counts(t)[NodeLabel::L] == 2);
    CHECK(t.edges.size() == 1);

    // triangle of separating vertices, each carrying a loop
    auto ring = from_edges(6, {{0, 1}, {1, 2}, {2, 0}, {0, 3}, {1, 4}, {2, 5}, {3, 3}, {4, 4}, {5, 5}});
    t = decomposition_tree(ring);
    REQUIRE_NOTHROW(check_tree(t));
    CHECK(label_counts(t)[NodeLabel::R] == 1);
    CHECK(label_counts(t)[NodeLabel::L] == 6);
    auto b = diameter_bound(ring, t);
    CHECK(b.xi_R == 3);
    CHECK(b.delta_R == 2);

    CHECK_THROWS_AS(decomposition_tree(from_edges(4, {{0, 1}, {2, 3}, {0, 1}, {2, 3}, {0, 1}, {2, 3}})), DecompError);
    CHECK_THROWS_AS(decomposition_tree(from_edges(2, {{0, 1}})), DecompError);
}

TEST_CASE("random cubic multigraphs") {
    Rng rng(23);
    std::map<NodeLabel, int> seen;
    for (int n : {2, 4, 6, 10, 20, 40, 80})
        for (int rep = 0; rep < 120; ++rep) {
            auto g = random_cubic_multigraph(n, rng);
            CAPTURE(n);
            check_decomposition(g);
            for (auto [l, c] : label_counts(decomposition_tree(g))) seen[l] += c;
        }
    for (auto l : {NodeLabel::L, NodeLabel::R, NodeLabel::M, NodeLabel::T}) CHECK(seen[l] > 0);
}

TEST_CASE("planted cores are recovered") {
    Rng rng(31);
    NetworkSampler sampler(network_law(Variant::graph, 20000));
    int largest = 0, total = 0;
    for (int q : {10, 20, 50, 100, 200})
        for (int rep = 0; rep < 6; ++rep) {
            auto s = build_core_substituted(q, rng, sampler, 20000);
            CAPTURE(q);
            check_decomposition(s.graph);
            auto t = decomposition_tree(s.graph);
            std::set<std::pair<int, int>> planted;
            for (auto [a, b] : s.core_edges) planted.insert({std::min(a, b), std::max(a, b)});
            int node = t.node_of_vertex[0];
            REQUIRE(t.nodes[node].label == NodeLabel::T);
            std::vector<int> expect(2 * q);
            std::iota(expect.begin(), expect.end(), 0);
            CHECK(t.nodes[node].vertices == expect);
            std::set<std::pair<int, int>> found(t.nodes[node].component.begin(), t.nodes[node].component.end());
            CHECK(found == planted);
            std::vector<int> labels(s.graph.n());
            for (int v = 0; v < s.graph.n(); ++v) labels[v] = v < 2 * q ? s.labels[v] : 2 * q + 1 + v;
            auto core = three_connected_core(t, labels);
            ++total;
            if (core.node == node) ++largest;
            CHECK(core.size >= q);
        }
    MESSAGE(largest << " of " << total << " planted cores are the largest T-component");
    CHECK(largest * 10 >= total * 8);
}

TEST_CASE("long L-chains make the bound grow linearly") {
    // w(loop) - u1 = v1 - u2 = v2 - ... = vk - w'(loop), "=" a double edge, "-" a bridge
    auto necklace = [](int k) {
        Graph g(2 * k + 2);
        int w = 2 * k, w2 = 2 * k + 1;
        g.add_edge(w, w);
        g.add_edge(w2, w2);
        g.add_edge(w, 0);
        for (int i = 0; i < k; ++i) {
            g.add_edge(2 * i, 2 * i + 1);
            g.add_edge(2 * i, 2 * i + 1);
            g.add_edge(2 * i + 1, i + 1 < k ? 2 * i + 2 : w2);
        }
        return g;
    };
    long prev = 0;
    for (int k : {10, 20, 40, 80}) {
        auto g = necklace(k);
        check_decomposition(g);
        auto t = decomposition_tree(g);
        CHECK(label_counts(t)[NodeLabel::L] == g.n());
        auto b = diameter_bound(g, t);
        CHECK(b.tree_diameter == g.n() - 1);
        if (prev) CHECK(b.bound <= 2 * prev + 8);
        CHECK(b.bound >= 2 * k);
        prev = b.bound;
    }
}

TEST_CASE("the tree does not depend on vertex names") {
    Rng rng(41);
    NetworkSampler sampler(network_law(Variant::graph, 20000));
    auto s = build_core_substituted(30, rng, sampler, 5000);
    auto base = decomposition_tree(s.graph);
    auto bound = diameter_bound(s.graph, base);
    for (int rep = 0; rep < 10; ++rep) {
        std::vector<int> perm(s.graph.n());
        std::iota(perm.begin(), perm.end(), 0);
        for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
        Graph h(s.graph.n());
        for (int v = 0; v < s.graph.n(); ++v)
            for (int w : s.graph.adj[v]) h.adj[perm[v]].push_back(perm[w]);
        for (auto& a : h.adj) std::shuffle(a.begin(), a.end(), std::mt19937(rep));
        auto t = decomposition_tree(h);
        CHECK(shape(t) == shape(base));
        auto b = diameter_bound(h, t);
        CHECK(b.bound == bound.bound);
        CHECK(b.tree_diameter == bound.tree_diameter);
    }
}
