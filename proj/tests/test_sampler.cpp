#include "doctest.h"

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <functional>
#include <cmath>
#include <limits>
#include <map>

#include "cubiclab/counts.hpp"
#include "cubiclab/sampler.hpp"
#include "test_util.hpp"

using namespace cubiclab;
using cubiclab::testing::pointed_code;

namespace {

double chi_square_p(const std::vector<long>& observed, long draws) {
    const double expect = static_cast<double>(draws) / observed.size();
    double x2 = 0;
    for (long o : observed) x2 += (o - expect) * (o - expect) / expect;
    boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, x2));
}

template <class Code, class Draw>
double uniformity_p(const std::vector<Code>& objects, long draws, Draw&& draw) {
    std::map<Code, int> index;
    for (std::size_t i = 0; i < objects.size(); ++i) index[objects[i]] = static_cast<int>(i);
    REQUIRE(index.size() == objects.size());
    std::vector<long> hits(objects.size(), 0);
    for (long k = 0; k < draws; ++k) {
        auto it = index.find(draw());
        REQUIRE(it != index.end());
        ++hits[it->second];
    }
    return chi_square_p(hits, draws);
}

}  // namespace

TEST_CASE("partial sums match direct summation") {
    TriangulationSampler ts;
    auto lse = [](const std::vector<long double>& xs) {
        long double top = -std::numeric_limits<long double>::infinity();
        for (auto x : xs) top = std::max(top, x);
        if (std::isinf(top)) return top;
        long double acc = 0;
        for (auto x : xs) acc += std::exp(x - top);
        return top + std::log(acc);
    };
    for (int j = 0; j <= 60; j += 3)
        for (int t = 2; t <= 30; t += 4) {
            std::vector<long double> terms;
            for (int a = 1; a < t; ++a)
                for (int i = 0; i <= j; ++i)
                    terms.push_back(TriangulationSampler::log_simple(i, a + 1) +
                                    TriangulationSampler::log_simple(j - i, t - a + 1));
            long double want = lse(terms), got = ts.log_chord_pair(j, t);
            if (std::isinf(want))
                CHECK(std::isinf(got));
            else
                CHECK(static_cast<double>(got) == doctest::Approx(static_cast<double>(want)).epsilon(1e-12));
        }
    for (int n : {0, 5, 300, 900, 40}) // out of order to exercise window lowering
        for (int p = 2; p <= 12; p += 5) {
            std::vector<long double> clean, quasi;
            for (int m = 0; m <= n; ++m) clean.push_back(TriangulationSampler::log_simple(n - m, p - 1 + m));
            for (int m = 0; m < n; ++m) quasi.push_back(TriangulationSampler::log_quasi(n - m, p - 1 + m));
            for (int m = 1; m <= n; ++m)
                quasi.push_back(std::log(static_cast<long double>(m)) + TriangulationSampler::log_simple(n - m, p - 1 + m));
            if (!std::isinf(lse(clean)))
                CHECK(static_cast<double>(ts.log_clean_simple(n, p)) == doctest::Approx(static_cast<double>(lse(clean))).epsilon(1e-12));
            if (n > 0)
                CHECK(static_cast<double>(ts.log_clean_quasi(n, p)) == doctest::Approx(static_cast<double>(lse(quasi))).epsilon(1e-12));
        }
}

TEST_CASE("uniform polygon sampler is uniform on small classes") {
    Rng rng(11);
    for (int k = 0; k < 50; ++k) CHECK(sample_uniform_polygon(0, 3, rng).map.darts() == 6);
    for (auto [n, p] : {std::pair{0, 4}, {2, 3}, {1, 4}, {3, 3}, {2, 4}, {1, 5}}) {
        CAPTURE(n);
        CAPTURE(p);
        std::vector<std::vector<int>> codes;
        for (auto& t : brute_force_polygon_triangulations(n, p)) codes.push_back(canonical_code(t.map));
        double pv = uniformity_p(codes, 100000, [&] {
            auto t = sample_uniform_polygon(n, p, rng);
            return canonical_code(t.map);
        });
        CHECK(pv > 0.01);
    }
}

TEST_CASE("(0,4) frequencies are within 3 sigma of one half") {
    Rng rng(5);
    auto list = brute_force_polygon_triangulations(0, 4);
    auto first = canonical_code(list[0].map);
    const int draws = 100000;
    int hits = 0;
    for (int k = 0; k < draws; ++k) hits += canonical_code(sample_uniform_polygon(0, 4, rng).map) == first;
    CHECK(std::abs(hits - draws / 2.0) < 3 * std::sqrt(draws * 0.25));
}

TEST_CASE("quasi-simple sampler is uniform on small classes") {
    Rng rng(12);
    for (auto [n, p] : {std::pair{1, 1}, {2, 1}, {3, 1}, {1, 2}, {2, 2}, {3, 2}}) {
        CAPTURE(n);
        CAPTURE(p);
        std::vector<std::pair<std::vector<int>, int>> codes;
        for (auto& t : brute_force_quasi_simple(n, p)) codes.push_back(pointed_code(t));
        if (codes.size() == 1) {
            for (int k = 0; k < 20; ++k) CHECK(pointed_code(sample_uniform_quasi_simple(n, p, rng)) == codes[0]);
            continue;
        }
        double pv = uniformity_p(codes, 60000, [&] { return pointed_code(sample_uniform_quasi_simple(n, p, rng)); });
        CHECK(pv > 0.01);
    }
}

TEST_CASE("large samples are valid") {
    Rng rng(3);
    for (int rep = 0; rep < 5; ++rep) {
        auto t = sample_uniform_polygon(400, 3 + rep, rng);
        CHECK_NOTHROW(validate_polygon(t));
        CHECK(is_simple(t.map));
        auto q = sample_uniform_quasi_simple(300, 1 + rep, rng);
        CHECK_NOTHROW(validate(q.map));
        CHECK(q.map.num_vertices() == 300 + 1 + rep);
        CHECK(is_quasi_simple(q));
    }
    auto t0 = std::chrono::steady_clock::now();
    auto big = sample_uniform_quasi_simple(2000, 1, rng);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    CHECK(big.map.num_vertices() == 2001);
    CHECK(secs < 20.0);
    CHECK_THROWS_AS(sample_uniform_polygon(0, 2, rng), DomainError);
    CHECK_THROWS_AS(sample_uniform_polygon(TriangulationSampler::kMaxInner + 1, 3, rng), DomainError);
}

TEST_CASE("determinism") {
    Rng a(77), b(77);
    CHECK(sample_uniform_polygon(200, 5, a).map == sample_uniform_polygon(200, 5, b).map);
    auto qa = sample_uniform_quasi_simple(100, 1, a), qb = sample_uniform_quasi_simple(100, 1, b);
    CHECK(qa.map == qb.map);
    CHECK(qa.marked == qb.marked);
}

TEST_CASE("Boltzmann polygon size law") {
    double tail = 0;
    auto law = boltzmann_polygon_size_law(3, 2000, &tail);
    CHECK(law[0] == doctest::Approx(27.0 / 32.0 / (1 - tail)).epsilon(1e-12));
    CHECK(tail > 0);
    CHECK(tail < 1e-3);
    Rng rng(8);
    double mean = 0, expect = 0;
    const int draws = 20000;
    for (int k = 0; k < draws; ++k) mean += sample_boltzmann_polygon(3, rng, 200).tri.n;
    mean /= draws;
    auto law200 = boltzmann_polygon_size_law(3, 200);
    for (int n = 0; n <= 200; ++n) expect += n * law200[n];
    double var = 0;
    for (int n = 0; n <= 200; ++n) var += (n - expect) * (n - expect) * law200[n];
    CHECK(std::abs(mean - expect) < 4 * std::sqrt(var / draws));
}

TEST_CASE("network law at the singular point") {
    auto m = network_law(Variant::multigraph, 1000);
    CHECK(static_cast<double>(m.rho) == doctest::Approx(54.0 / std::pow(79.0, 1.5)).epsilon(1e-12));
    auto g = network_law(Variant::graph, 1000);
    CHECK(std::abs(static_cast<double>(g.rho) - 0.101905) < 5e-6);
    for (auto* law : {&m, &g}) {
        CHECK(static_cast<double>(1 + law->L + law->S + law->P + law->H) ==
              doctest::Approx(static_cast<double>(law->D)).epsilon(1e-15));
        CHECK(law->core_cdf.back() + law->core_tail == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(law->core_cdf[0] == doctest::Approx(std::pow(27.0 / 256.0, 2) / (5.0 / 256.0)).epsilon(1e-12));
    }
}

TEST_CASE("sampled networks are cubic and consistent") {
    for (Variant v : {Variant::graph, Variant::multigraph}) {
        CAPTURE(to_string(v));
        NetworkSampler sampler(network_law(v, 20000));
        Rng rng(21);
        std::map<NetType, long> type_hits;
        const int draws = 20000;
        long trivial = 0;
        for (int k = 0; k < draws; ++k) {
            auto s = sampler.sample(rng, 20000);
            const auto& net = s.net;
            ++type_hits[net.type];
            trivial += net.type == NetType::trivial;
            REQUIRE(net.graph.adj[0].size() == 1);
            REQUIRE(net.graph.adj[1].size() == 1);
            for (int x = 2; x < net.graph.n(); ++x) REQUIRE(net.graph.adj[x].size() == 3);
            REQUIRE(net.graph.n() == 2 + 2 * net.size);
            if (v == Variant::graph && net.type != NetType::trivial) REQUIRE(net.graph.is_simple());
            int delta = pole_distance(net);
            REQUIRE(delta == plan_pole_distance(net.plan));
            REQUIRE(chi(net.plan) >= delta);
        }
        const auto& law = sampler.law();
        auto within = [&](long hits, long double weight) {
            double p = static_cast<double>(weight / law.D);
            return std::abs(hits - draws * p) < 3.5 * std::sqrt(draws * p * (1 - p)) + 1;
        };
        CHECK(within(trivial, 1.0L));
        CHECK(within(type_hits[NetType::L], law.L));
        CHECK(within(type_hits[NetType::S], law.S));
        CHECK(within(type_hits[NetType::P], law.P));
        CHECK(within(type_hits[NetType::H], law.H));
    }
}

TEST_CASE("pole distance and chi on hand-built plans") {
    NetworkPlan triv;
    triv.nodes.emplace_back();
    CHECK(pole_distance(build_network(triv)) == 1);
    CHECK(chi(triv) == 1);
    // series of k L-networks, each with a single P-network leaf
    for (int k = 1; k <= 4; ++k) {
        NetworkPlan plan;
        auto add = [&](NetType t) {
            plan.nodes.emplace_back();
            plan.nodes.back().type = t;
            return static_cast<int>(plan.nodes.size()) - 1;
        };
        std::function<int(int)> chain = [&](int left) -> int {
            if (left == 1) {
                int l = add(NetType::L);
                plan.nodes[l].shape = {0};
                plan.nodes[l].size = 1;
                int pn = add(NetType::P);
                plan.nodes[pn].size = 1;
                int c1 = add(NetType::trivial), c2 = add(NetType::L);
                plan.nodes[c2].shape = {0};
                plan.nodes[c2].size = 1;
                int leaf = add(NetType::P);
                plan.nodes[leaf].size = 1;
                int d1 = add(NetType::trivial), d2 = add(NetType::trivial);
                plan.nodes[leaf].children = {d1, d2};
                plan.nodes[c2].children = {leaf};
                plan.nodes[pn].children = {c1, c2};
                plan.nodes[l].children = {pn};
                return l;
            }
            int s = add(NetType::S);
            int head = chain(1);
            int tail = chain(left - 1);
            plan.nodes[s].children = {head, tail};
            return s;
        };
        chain(k);
        for (auto& nd : plan.nodes) plan.size += nd.size;
        auto net = build_network(plan);
        CHECK(chi(plan) == 2 * k);
        CHECK(pole_distance(net) == k + 1);
        CHECK(plan_pole_distance(plan) == k + 1);
    }
}

TEST_CASE("core substitution") {
    NetworkSampler sampler(network_law(Variant::graph, 20000));
    Rng rng(4);
    auto plain = build_core_substituted(50, rng, sampler, 1000000, true);
    CHECK(plain.graph.n() == 100);
    CHECK(plain.graph.adj == plain.core.adj);
    for (int rep = 0; rep < 5; ++rep) {
        auto c = build_core_substituted(200, rng, sampler);
        CHECK(c.graph.is_cubic());
        CHECK(c.graph.connected());
        CHECK(c.core_edges.size() == 600);
        long total = 0;
        for (int s : c.network_size) total += s;
        CHECK(c.graph.n() == 2 * (200 + total));
        CHECK(is_three_connected(c.core));
        // distances between core vertices agree with the core weighted by pole distances
        auto bfs = bfs_distances(c.graph, {0});
        std::vector<long> dist(400, 1L << 40);
        dist[0] = 0;
        for (int it = 0; it < 400; ++it)
            for (std::size_t e = 0; e < c.core_edges.size(); ++e) {
                auto [a, b] = c.core_edges[e];
                dist[b] = std::min(dist[b], dist[a] + c.network_delta[e]);
                dist[a] = std::min(dist[a], dist[b] + c.network_delta[e]);
            }
        for (int v = 0; v < 400; ++v) CHECK(dist[v] == bfs[v]);
    }
}
