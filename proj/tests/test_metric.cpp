#include "doctest.h"

#include <cmath>

#include "cubiclab/counts.hpp"
#include "cubiclab/metric.hpp"
#include "cubiclab/rng.hpp"
#include "cubiclab/sampler.hpp"

using namespace cubiclab;

namespace {

Graph random_connected_graph(int n, int extra, Rng& rng) {
    Graph g(n);
    for (int v = 1; v < n; ++v) g.add_edge(v, static_cast<int>(rng.below(v)));
    for (int k = 0; k < extra; ++k) {
        int a = static_cast<int>(rng.below(n)), b = static_cast<int>(rng.below(n));
        if (a != b) g.add_edge(a, b);
    }
    return g;
}

WeightLaw uniform_law(int top) {
    WeightLaw law;
    law.kind = WeightKind::custom;
    for (int v = 1; v <= top; ++v) {
        law.values.push_back(v);
        law.probs.push_back(1.0 / top);
    }
    return law;
}

bool satisfies_overlaps(const LengthProfile& h, const LengthProfile& t, const std::vector<int>& dh,
                        const std::vector<int>& dt) {
    if (!(mult_profile(dh) == h) || !(mult_profile(dt) == t)) return false;
    const int top = static_cast<int>(std::max(h.counts.size(), t.counts.size()));
    for (int i = 1; i <= top; ++i) {
        long overlap = 0;
        for (std::size_t j = 0; j < dh.size(); ++j) overlap += dh[j] == i && dt[j] == i;
        if (overlap != std::min(h.at(i), t.at(i))) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("first-passage distances against exhaustive paths") {
    Rng rng(1);
    for (int rep = 0; rep < 200; ++rep) {
        int n = 2 + static_cast<int>(rng.below(7));
        auto g = random_connected_graph(n, static_cast<int>(rng.below(8)), rng);
        MetricGraph mg = MetricGraph::unit(g);
        for (double& l : mg.length) l = 0.1 + rng.uniform() * 3;
        for (int u = 0; u < n; ++u) {
            auto row = fpp_distances(mg, u);
            CHECK(row[u] == 0);
            for (int v = 0; v < n; ++v) {
                CHECK(row[v] == doctest::Approx(fpp_distance_brute_force(mg, u, v)));
                CHECK(row[v] == doctest::Approx(fpp_distance(mg, v, u)));
                auto path = fpp_geodesic(mg, u, v);
                CHECK(path.front() == u);
                CHECK(path.back() == v);
            }
        }
        int a = static_cast<int>(rng.below(n)), b = static_cast<int>(rng.below(n)), c = static_cast<int>(rng.below(n));
        CHECK(fpp_distance(mg, a, c) <= fpp_distance(mg, a, b) + fpp_distance(mg, b, c) + 1e-12);
        auto unit = MetricGraph::unit(g);
        auto hops = bfs_distances(g, {0});
        auto fd = fpp_distances(unit, 0);
        for (int v = 0; v < n; ++v) CHECK(fd[v] == hops[v]);
    }
    Graph split(3);
    split.add_edge(0, 1);
    CHECK_THROWS_AS(fpp_distance(MetricGraph::unit(split), 0, 2), MetricError);
}

TEST_CASE("lexicographic geodesic") {
    // square 0-1-3, 0-2-3 with equal lengths: the smaller middle vertex wins
    MetricGraph mg(4, {{0, 2}, {2, 3}, {0, 1}, {1, 3}}, {1, 1, 1, 1});
    CHECK(fpp_geodesic(mg, 0, 3) == std::vector<int>{0, 1, 3});
    MetricGraph longer(4, {{0, 2}, {2, 3}, {0, 1}, {1, 3}}, {1, 1, 1, 1.5});
    CHECK(fpp_geodesic(longer, 0, 3) == std::vector<int>{0, 2, 3});
}

TEST_CASE("truncation") {
    Rng rng(2);
    auto g = random_connected_graph(40, 40, rng);
    auto mg = with_iid_lengths(g, uniform_law(6), rng);
    CHECK(truncate(mg, 6).length == mg.length);
    auto hop = truncate(mg, 1);
    auto hops = bfs_distances(g, {0});
    auto d1 = fpp_distances(hop, 0);
    for (int v = 0; v < 40; ++v) CHECK(d1[v] == hops[v]);
    auto full = fpp_distances(mg, 0);
    std::vector<double> prev(40, 0);
    for (int k = 1; k <= 6; ++k) {
        auto dk = fpp_distances(truncate(mg, k), 0);
        for (int v = 0; v < 40; ++v) {
            CHECK(dk[v] <= full[v]);
            CHECK(dk[v] >= prev[v]);
            // geodesic of the truncated metric, uncapped, bounds the full distance
            auto path = fpp_geodesic(truncate(mg, k), 0, v);
            int capped = 0;
            for (std::size_t j = 1; j < path.size(); ++j) {
                double best = 1e300;
                for (int e : mg.incident[path[j - 1]])
                    if (mg.other(e, path[j - 1]) == path[j]) best = std::min(best, mg.length[e]);
                capped += best > k;
            }
            CHECK(full[v] <= dk[v] + (mg.max_length() - k) * capped + 1e-9);
        }
        prev = dk;
    }
}

TEST_CASE("multiplicity profiles and the canonical rearrangement") {
    auto p = mult_profile({1, 3, 1, 2});
    CHECK(p.counts == std::vector<long>{2, 1, 1});
    CHECK(p.total() == 4);
    CHECK(mult_profile({5, 5, 5}).counts == std::vector<long>{0, 0, 0, 0, 3});
    CHECK_THROWS_AS(mult_profile({0}), MetricError);

    LengthProfile a{{2, 1}}, b{{1, 2}};
    auto [da, db] = canonical_rearrangement(a, b);
    CHECK(satisfies_overlaps(a, b, da, db));
    CHECK(da == std::vector<int>{1, 2, 1});
    CHECK(db == std::vector<int>{1, 2, 2});

    LengthProfile c{{2, 1, 1}}, d{{1, 1, 2}};
    auto [dc, dd] = canonical_rearrangement(c, d);
    CHECK(satisfies_overlaps(c, d, dc, dd));
    long overlap2 = 0;
    for (std::size_t j = 0; j < dc.size(); ++j) overlap2 += dc[j] == 2 && dd[j] == 2;
    CHECK(overlap2 == 1);
    // plain sorting of both sequences loses the value-2 overlap
    std::vector<int> sc{1, 1, 2, 3}, sd{1, 2, 3, 3};
    long sorted2 = 0;
    for (int j = 0; j < 4; ++j) sorted2 += sc[j] == 2 && sd[j] == 2;
    CHECK(sorted2 == 0);

    auto [s1, s2] = canonical_rearrangement(c, c);
    CHECK(s1 == s2);
    CHECK_THROWS_AS(canonical_rearrangement(a, c), MetricError);

    Rng rng(3);
    for (int rep = 0; rep < 100000; ++rep) {
        int m = 1 + static_cast<int>(rng.below(30)), top = 1 + static_cast<int>(rng.below(6));
        std::vector<int> x(m), y(m);
        for (int& v : x) v = 1 + static_cast<int>(rng.below(top));
        for (int& v : y) v = 1 + static_cast<int>(rng.below(top));
        auto h = mult_profile(x), t = mult_profile(y);
        auto [dh, dt] = canonical_rearrangement(h, t);
        if (!satisfies_overlaps(h, t, dh, dt)) {
            FAIL("overlap identity violated at fuzz case " << rep);
            break;
        }
    }
}

TEST_CASE("coupled edge lengths") {
    Rng rng(4);
    auto law = uniform_law(4);
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < 30; ++v) edges.push_back({v, (v + 1) % 30});
    std::vector<int> same(30, 2);
    WeightLaw two;
    two.kind = WeightKind::custom;
    two.values = {2};
    two.probs = {1};
    auto eq = coupled_edge_lengths(30, edges, same, two, rng);
    CHECK(eq.hat.length == eq.tilde.length);
    CHECK(eq.disagreements == 0);

    // marginals: per-edge law of the hat side is the weight law; tilde side reproduces its multiset
    std::vector<int> tilde(30);
    for (int e = 0; e < 30; ++e) tilde[e] = 1 + e % 3;
    std::vector<double> hat_counts(5, 0);
    const int reps = 4000;
    for (int k = 0; k < reps; ++k) {
        auto c = coupled_edge_lengths(30, edges, tilde, law, rng);
        CHECK(mult_profile(std::vector<int>(c.tilde.length.begin(), c.tilde.length.end())) == mult_profile(tilde));
        long agree = 0;
        for (int e = 0; e < 30; ++e) agree += c.hat.length[e] == c.tilde.length[e];
        long expect = 0;
        for (int i = 1; i <= 4; ++i) expect += std::min(c.hat_profile.at(i), c.tilde_profile.at(i));
        CHECK(agree == expect);
        hat_counts[static_cast<int>(c.hat.length[7])] += 1;
    }
    double chi2 = 0;
    for (int i = 1; i <= 4; ++i) chi2 += std::pow(hat_counts[i] - reps / 4.0, 2) / (reps / 4.0);
    CHECK(chi2 < 16.27);  // 3 degrees of freedom, p = 0.001
    CHECK_THROWS_AS(coupled_edge_lengths(30, edges, std::vector<int>(29, 1), law, rng), MetricError);

    LengthProfile big_h{{3000, 1000, 300}}, big_t{{2980, 1010, 310}};
    CHECK(coupling_event_holds(big_h, big_t, 1000, 0.3, 2.0));
    LengthProfile far{{3000, 1000, 200, 100}};
    CHECK_FALSE(coupling_event_holds(big_h, far, 1000, 0.3, 0.5));
}

TEST_CASE("induced core distances and the projection correspondence") {
    Rng rng(5);
    NetworkSampler sampler(network_law(Variant::graph, 20000));
    auto plain = build_core_substituted(30, rng, sampler, 1000000, true);
    auto unit = induced_core_distance(plain, 50, &rng);
    auto hop = MetricGraph::unit(plain.core);
    for (int v = 0; v < plain.core.n(); v += 7) CHECK(fpp_distances(unit, 0)[v] == fpp_distances(hop, 0)[v]);

    auto s = build_core_substituted(200, rng, sampler);
    CHECK_NOTHROW(induced_core_distance(s, 1000, &rng));
    for (std::size_t e = 0; e < s.core_edges.size(); ++e)
        if (s.network_delta[e] == 3) {
            auto mg = induced_core_distance(s);
            auto [a, b] = s.core_edges[e];
            CHECK(fpp_distance(mg, a, b) <= 3);
            break;
        }
    auto broken = s;
    broken.network_delta.pop_back();
    CHECK_THROWS_AS(induced_core_distance(broken), MetricError);

    auto small = build_core_substituted(40, rng, sampler, 4000);
    auto R = projection_correspondence(small);
    std::vector<int> all(small.graph.n());
    for (int v = 0; v < small.graph.n(); ++v) all[v] = v;
    auto dC = fpp_distance_rows(MetricGraph::unit(small.graph), all);
    std::vector<int> core(small.core.n());
    for (int v = 0; v < small.core.n(); ++v) core[v] = v;
    auto dK = fpp_distance_rows(induced_core_distance(small), core);
    double dis = gh_distortion(R, dC, dK);
    CHECK(dis == gh_distortion_serial(R, dC, dK));
    CHECK(dis <= 2 * max_network_diameter(small));
}

TEST_CASE("distortion and GHP bound") {
    DistanceMatrix one{{0, 1}, {1, 0}}, two{{0, 2}, {2, 0}};
    Correspondence id{{0, 0}, {1, 1}};
    CHECK(gh_distortion(id, one, one) == 0);
    Correspondence full{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
    CHECK(gh_distortion(id, one, two) == 1);
    CHECK(gh_distortion(full, one, two) == 2);
    CHECK_THROWS_AS(gh_distortion({{0, 0}}, one, two), MetricError);
    std::vector<CouplingMass> diag{{0, 0, 0.5}, {1, 1, 0.5}};
    CHECK(ghp_estimate(id, diag, one, two) == 0.5);
    CHECK(ghp_estimate(id, diag, one, one) == 0);
    std::vector<CouplingMass> off{{0, 1, 0.5}, {1, 0, 0.5}};
    CHECK(ghp_estimate(id, off, one, one) == 1);
}

TEST_CASE("vertex-face coupling") {
    // tetrahedron: 4 vertices, 4 faces
    auto tets = brute_force_polygon_triangulations(1, 3);
    REQUIRE(tets.size() == 1);
    const auto& t = tets[0].map;
    auto out = compute_3_orientation(t);
    Rng rng(6);
    const int draws = 100000;
    std::vector<double> faces(t.num_faces(), 0), verts(t.num_vertices(), 0);
    for (int k = 0; k < draws; ++k) {
        auto r = vertex_face_coupling(t, out, rng);
        faces[r.face] += 1;
        verts[r.vertex] += 1;
    }
    double cf = 0, cv = 0;
    for (double f : faces) cf += std::pow(f - draws / 4.0, 2) / (draws / 4.0);
    for (double v : verts) cv += std::pow(v - draws / 4.0, 2) / (draws / 4.0);
    CHECK(cf < 16.27);
    CHECK(cv < 16.27);

    const int n = 50;
    auto tri = sample_uniform_polygon(n - 1, 3, rng);  // n + 2 vertices on the sphere
    auto o = compute_3_orientation(tri.map);
    int fails = 0;
    const int trials = 20000;
    for (int k = 0; k < trials; ++k) fails += !vertex_face_coupling(tri.map, o, rng).incident;
    double bound = 2.0 / (n + 2);
    CHECK(static_cast<double>(fails) / trials <= bound + 3 * std::sqrt(bound * (1 - bound) / trials));

    // oriented edges drawn uniformly: each dart's edge appears with frequency 1/E
    std::vector<double> edge_hits(t.darts(), 0);
    for (int k = 0; k < draws; ++k) {
        auto r = vertex_face_coupling(t, out, rng);
        edge_hits[std::min(r.dart, t.alpha[r.dart])] += 1;
    }
    double ce = 0;
    const double e_count = t.edges();
    for (int d = 0; d < t.darts(); ++d)
        if (d < t.alpha[d]) ce += std::pow(edge_hits[d] - draws / e_count, 2) / (draws / e_count);
    CHECK(ce < 20.52);  // 5 degrees of freedom, p = 0.001
}

TEST_CASE("weight law tables") {
    auto law = uniform_law(3);
    auto back = WeightLaw::from_csv(law.to_csv());
    CHECK(back.values == law.values);
    CHECK(back.probs[1] == doctest::Approx(1.0 / 3));
    CHECK_THROWS_AS(WeightLaw::from_csv("value,probability\n1,0.5\n"), MetricError);
    CHECK(dirac_one().mean() == 1);
    Rng rng(8);
    NetworkSampler sampler(network_law(Variant::graph, 20000));
    auto nu = nu_star_empirical(sampler, 20000, 9, 20000);
    CHECK(nu.eta0 == 1);
    CHECK(nu.values.size() > 3);
    double total = 0;
    for (double p : nu.probs) total += p;
    CHECK(total == doctest::Approx(1));
    CHECK(nu.tail_lambda > 0);
}
