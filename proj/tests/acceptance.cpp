#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cubiclab/counts.hpp"
#include "cubiclab/decomp.hpp"
#include "cubiclab/experiments.hpp"
#include "cubiclab/maps.hpp"
#include "cubiclab/metric.hpp"
#include "cubiclab/rng.hpp"
#include "cubiclab/sampler.hpp"
#include "cubiclab/series.hpp"
#include "cubiclab/skeleton.hpp"

using namespace cubiclab;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

double chi_square_p(const std::vector<long>& observed) {
    const double total = static_cast<double>(std::accumulate(observed.begin(), observed.end(), 0L));
    const double expect = total / static_cast<double>(observed.size());
    double stat = 0;
    for (long o : observed) stat += (o - expect) * (o - expect) / expect;
    boost::math::chi_squared dist(static_cast<double>(observed.size() - 1));
    return boost::math::cdf(boost::math::complement(dist, stat));
}

std::string fmt(double x) {
    std::ostringstream s;
    s.precision(6);
    s << x;
    return s.str();
}

// ── 1: exact counts ──

Outcome exact_counts() {
    int checked = 0;
    for (int n = 0; n <= 3; ++n)
        for (int p = 3; p <= 5; ++p) {
            if (count_simple_polygon(n, p) != static_cast<long>(brute_force_polygon_triangulations(n, p).size()))
                return {false, "simple mismatch at n=" + std::to_string(n) + " p=" + std::to_string(p)};
            ++checked;
        }
    for (int n = 1; n <= 3; ++n)
        for (int p = 1; p <= 2; ++p) {
            if (count_quasi_simple(n, p) != static_cast<long>(brute_force_quasi_simple(n, p).size()))
                return {false, "quasi-simple mismatch at n=" + std::to_string(n) + " p=" + std::to_string(p)};
            ++checked;
        }
    return {true, std::to_string(checked) + " classes equal their enumerations"};
}

// ── 2: cross identities ──

Outcome cross_identities() {
    for (int n = 2; n <= 30; ++n)
        if (count_simple_sphere(n) != count_simple_polygon(n - 1, 3))
            return {false, "sphere identity fails at n=" + std::to_string(n)};
    mpq_class sum = 0;
    for (int k = 0; k <= 200; ++k) sum += theta(k);
    if (!(sum > mpq_class(999, 1000))) return {false, "sum of theta(k), k <= 200, is " + fmt(sum.get_d())};
    // 1 - (1 + (1-x)^(-1/2))^(-2) with truncated series arithmetic
    const int K = 30;
    Series one_minus_x("1-x", K);
    one_minus_x[0] = 1;
    one_minus_x[1] = -1;
    Series inner = power(one_minus_x, mpq_class(-1, 2));
    inner[0] += 1;
    Series inv = inverse(inner);
    Series sq = inv * inv;
    for (int k = 0; k <= K; ++k) {
        mpq_class oracle = (k == 0 ? mpq_class(1) : mpq_class(0)) - sq[k];
        if (theta(k) != oracle) return {false, "theta(" + std::to_string(k) + ") differs from the series"};
    }
    return {true, "sphere identity n=2..30, sum theta = " + fmt(sum.get_d()) + ", 31 coefficients exact"};
}

// ── 3: series constants ──

Outcome series_constants() {
    auto m = estimate_constants(Variant::multigraph, 400);
    auto g = estimate_constants(Variant::graph, 400);
    const double rho_m = 54 / std::pow(79.0, 1.5), alpha_m = 199.0 / 316.0, c_m = 2.0 / 3.0 * std::pow(79.0 / 17.0, 2.0 / 3.0);
    std::vector<std::pair<std::string, bool>> checks = {
        {"multigraph rho", std::abs(m.rho - rho_m) < 1e-3}, {"multigraph alpha", std::abs(m.alpha - alpha_m) < 1e-2},
        {"multigraph c", std::abs(m.c - c_m) < 2e-2},       {"graph rho", std::abs(g.rho - 0.101905) < 1e-3},
        {"graph alpha", std::abs(g.alpha - 0.8509) < 1e-2}, {"graph c", std::abs(g.c - 1.5190) < 3e-2}};
    std::string detail = "multigraph rho " + fmt(m.rho) + " alpha " + fmt(m.alpha) + " c " + fmt(m.c) + "; graph rho " +
                         fmt(g.rho) + " alpha " + fmt(g.alpha) + " c " + fmt(g.c);
    for (auto& [name, ok] : checks)
        if (!ok) return {false, name + " out of tolerance: " + detail};
    return {true, detail};
}

// ── 4: sampler uniformity ──

Outcome sampler_uniformity() {
    Rng rng(404);
    TriangulationSampler sampler;
    std::string detail;
    bool pass = true;
    for (auto [n, p] : std::vector<std::pair<int, int>>{{0, 4}, {2, 3}, {1, 4}}) {
        std::map<std::vector<int>, int> index;
        for (auto& t : brute_force_polygon_triangulations(n, p)) index.emplace(canonical_code(t.map), static_cast<int>(index.size()));
        std::vector<long> hits(index.size(), 0);
        for (int k = 0; k < 100000; ++k) {
            auto it = index.find(canonical_code(sampler.uniform_polygon(n, p, rng).map));
            if (it == index.end()) return {false, "sample outside the enumerated class"};
            ++hits[it->second];
        }
        double pv = chi_square_p(hits);
        pass &= pv > 0.01;
        detail += "(" + std::to_string(n) + "," + std::to_string(p) + ") " + std::to_string(hits.size()) + " objects p=" + fmt(pv) + "; ";
    }
    return {pass, detail};
}

// ── 5: skeleton bijection ──

Outcome skeleton_bijection() {
    Rng rng(505);
    TriangulationSampler sampler;
    int cylinders = 0, failures = 0;
    std::string first;
    const int sizes[] = {30, 80, 200, 500};
    for (int k = 0; cylinders < 10000; ++k) {
        auto qt = sampler.uniform_quasi_simple(sizes[k % 4], 1, rng);
        for (int r = 1; r <= 8 && cylinders < 10000; ++r) {
            auto h = hull(qt, r);
            if (h.whole) break;
            ++cylinders;
            try {
                auto code = skeleton_decompose(h.cylinder);
                check_admissible(code);
                auto back = skeleton_reconstruct(code);
                long ksum = 0;
                for (auto& lvl : code.children)
                    for (int c : lvl) ksum += c;
                bool ok = same_cylinder(back, h.cylinder) && skeleton_decompose(back) == code &&
                          code.forest_size() == code.q + ksum &&
                          back.map.num_vertices() == code.forest_size() + code.inner_vertices();
                if (!ok) {
                    ++failures;
                    if (first.empty()) first = "round trip differs";
                }
            } catch (const std::exception& e) {
                ++failures;
                if (first.empty()) first = e.what();
            }
        }
    }
    return {failures == 0, std::to_string(cylinders) + " cylinders, " + std::to_string(failures) + " failures " + first};
}

// ── 6: hull law ──

Outcome hull_law() {
    const int n = 2000, samples = 3000;
    Rng rng(606);
    TriangulationSampler sampler;
    std::map<std::vector<int>, std::pair<long, double>> freq;
    for (int k = 0; k < samples; ++k) {
        auto qt = sampler.uniform_quasi_simple(n, 1, rng);
        auto h = hull(qt, 1);
        if (h.whole) continue;
        auto& entry = freq[canonical_code(h.cylinder.map)];
        if (entry.first++ == 0) entry.second = hull_probability_exact(skeleton_decompose(h.cylinder)).get_d();
    }
    std::vector<std::pair<double, long>> ranked;
    for (auto& [code, e] : freq) ranked.push_back({e.second, e.first});
    std::sort(ranked.rbegin(), ranked.rend());
    if (ranked.size() < 5) return {false, "fewer than five distinct hulls"};
    bool pass = true;
    std::string detail;
    for (int i = 0; i < 5; ++i) {
        double p = ranked[i].first, emp = static_cast<double>(ranked[i].second) / samples;
        double z = (emp - p) / std::sqrt(p * (1 - p) / samples);
        pass &= std::abs(z) < 3;
        detail += "p=" + fmt(p) + " emp=" + fmt(emp) + " z=" + fmt(z) + "; ";
    }
    return {pass, detail};
}

// ── 7: first-passage distances ──

Outcome fpp_correctness() {
    Rng rng(707);
    int mismatches = 0;
    for (int g = 0; g < 1000; ++g) {
        int n = 2 + static_cast<int>(rng.below(7));
        std::vector<std::pair<int, int>> edges;
        std::vector<double> len;
        for (int v = 1; v < n; ++v) edges.push_back({v, static_cast<int>(rng.below(v))});
        int extra = static_cast<int>(rng.below(2 * n));
        for (int k = 0; k < extra; ++k) edges.push_back({static_cast<int>(rng.below(n)), static_cast<int>(rng.below(n))});
        for (std::size_t k = 0; k < edges.size(); ++k) len.push_back(static_cast<double>(1 + rng.below(9)) / 4);
        MetricGraph mg(n, edges, len);
        for (int u = 0; u < n; ++u)
            for (int v = 0; v < n; ++v)
                if (fpp_distance(mg, u, v) != fpp_distance_brute_force(mg, u, v)) ++mismatches;
    }
    return {mismatches == 0, "1000 graphs, all pairs, " + std::to_string(mismatches) + " mismatches"};
}

// ── 8: coupling ──

Outcome coupling() {
    Rng rng(808);
    long failures = 0;
    for (int k = 0; k < 100000; ++k) {
        int slots = 1 + static_cast<int>(rng.below(60)), values = 1 + static_cast<int>(rng.below(6));
        auto draw = [&] {
            LengthProfile prof;
            prof.counts.assign(values, 0);
            for (int s = 0; s < slots; ++s) {
                int v = static_cast<int>(rng.below(values));
                if (rng.bernoulli(0.5)) v = 0;
                ++prof.counts[v];
            }
            return prof;
        };
        auto hat = draw(), tilde = draw();
        auto [dh, dt] = canonical_rearrangement(hat, tilde);
        bool ok = static_cast<int>(dh.size()) == slots && static_cast<int>(dt.size()) == slots;
        for (int i = 1; ok && i <= values; ++i) {
            long nh = 0, nt = 0, both = 0;
            for (int s = 0; s < slots; ++s) {
                nh += dh[s] == i;
                nt += dt[s] == i;
                both += dh[s] == i && dt[s] == i;
            }
            ok = nh == hat.at(i) && nt == tilde.at(i) && both == std::min(hat.at(i), tilde.at(i));
        }
        failures += !ok;
    }
    ExperimentConfig cfg;
    cfg.experiment = "coupling";
    cfg.sizes = {100, 1000, 10000};
    cfg.replicas = 12;
    cfg.seed = 808;
    cfg.weight_law = "nu-star";
    cfg.nu_draws = 1000000;
    cfg.pairs = 5;
    auto out = run_coupling_experiment(cfg);
    auto& s = out.records.back().statistics;
    auto fractions = s["mean_disagreement_fraction"].get<std::vector<double>>();
    std::string detail = std::to_string(failures) + " of 100000 fuzzed profiles fail; disagreement fractions";
    for (double f : fractions) detail += " " + fmt(f);
    return {failures == 0 && s["disagreement_decreasing"].get<bool>(), detail};
}

// ── 9: induced core metric ──

Outcome induced_metric() {
    Rng rng(909);
    NetworkSampler sampler(network_law(Variant::graph));
    auto s = build_core_substituted(500, rng, sampler);
    auto mg = induced_core_distance(s);
    int mismatches = 0;
    for (int k = 0; k < 1000; ++k) {
        int u = static_cast<int>(rng.below(s.core.n())), v = static_cast<int>(rng.below(s.core.n()));
        int bfs = bfs_distances(s.graph, {u})[v];
        if (fpp_distance(mg, u, v) != bfs) ++mismatches;
    }
    return {mismatches == 0, "q=500, 1000 pairs, " + std::to_string(mismatches) + " mismatches"};
}

// ── 10: scaling trends ──

Outcome scaling_trends() {
    ExperimentConfig diam;
    diam.experiment = "diameter";
    diam.sizes = {500, 1000, 2000, 4000};
    diam.replicas = 40;
    diam.seed = 1010;
    auto d = run_diameter_experiment(diam).records.back().statistics;
    double dev = d["max_relative_deviation"].get<double>();

    ExperimentConfig two;
    two.experiment = "two-point";
    two.sizes = {500, 1000, 2000};
    two.replicas = 100;
    two.pairs = 20;
    two.seed = 1011;
    auto t = run_two_point_experiment(two).records.back().statistics;
    bool iqr = t["iqr_decreasing"].get<bool>();

    ExperimentConfig core;
    core.experiment = "core-size";
    core.sizes = {10000};
    core.replicas = 40;
    core.seed = 1012;
    core.series_order = 400;
    auto c = run_core_size_experiment(core).records.front().statistics;
    double rel = c["relative_error"].get<double>();

    std::string detail = "diameter n^-1/4 medians";
    for (double v : d["median_normalized"].get<std::vector<double>>()) detail += " " + fmt(v);
    detail += " (max deviation " + fmt(dev) + "); IQR";
    for (double v : t["ratio_iqr"].get<std::vector<double>>()) detail += " " + fmt(v);
    detail += "; |C|/q " + fmt(c["size_ratio"]["mean"].get<double>()) + " vs " + fmt(c["target_ratio"].get<double>()) +
              " (rel " + fmt(rel) + ")";
    return {dev <= 0.08 && iqr && rel <= 0.03, detail};
}

// ── 11: vertex-face coupling ──

Outcome schnyder_coupling() {
    auto tets = brute_force_polygon_triangulations(1, 3);
    const auto& t = tets.at(0).map;
    auto out = compute_3_orientation(t);
    Rng rng(1111);
    std::vector<long> faces(t.num_faces(), 0);
    for (int k = 0; k < 100000; ++k) ++faces[vertex_face_coupling(t, out, rng).face];
    double pv = chi_square_p(faces);

    const int n = 50, maps = 200, per_map = 100;
    TriangulationSampler sampler;
    long fails = 0;
    for (int m = 0; m < maps; ++m) {
        auto tri = sampler.uniform_polygon(n - 1, 3, rng);
        auto o = compute_3_orientation(tri.map);
        for (int k = 0; k < per_map; ++k) fails += !vertex_face_coupling(tri.map, o, rng).incident;
    }
    const double draws = maps * per_map, bound = 2.0 / (n + 2);
    double rate = fails / draws, limit = bound + 3 * std::sqrt(bound * (1 - bound) / draws);
    return {pv > 0.01 && rate <= limit,
            "tetrahedron face p=" + fmt(pv) + "; failure rate " + fmt(rate) + " <= " + fmt(limit)};
}

// ── 12: diameter bound ──

Outcome diameter_bound_check() {
    Rng rng(1212);
    NetworkSampler sampler(network_law(Variant::graph));
    int violations = 0, errors = 0;
    double worst = 0;
    for (int k = 0; k < 1000; ++k) {
        int q = 10 + static_cast<int>(rng.below(141));
        auto s = build_core_substituted(q, rng, sampler, 5000);
        try {
            auto t = decomposition_tree(s.graph);
            check_tree(t);
            auto b = diameter_bound(s.graph, t);
            int d = graph_diameter(s.graph);
            if (d > b.bound) ++violations;
            worst = std::max(worst, static_cast<double>(d) / b.bound);
        } catch (const std::exception&) {
            ++errors;
        }
    }
    return {violations == 0 && errors == 0, "1000 samples, " + std::to_string(violations) + " violations, " +
                                                std::to_string(errors) + " errors, largest Diam/bound " + fmt(worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"exact-count agreement", exact_counts},
        {"formula cross-identities", cross_identities},
        {"series constants", series_constants},
        {"sampler uniformity", sampler_uniformity},
        {"skeleton bijection", skeleton_bijection},
        {"hull law", hull_law},
        {"first-passage correctness", fpp_correctness},
        {"coupling", coupling},
        {"induced core metric", induced_metric},
        {"scaling trends", scaling_trends},
        {"vertex-face coupling", schnyder_coupling},
        {"diameter bound", diameter_bound_check},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %2zu %-28s %s  [%.1f s] %s\n", i + 1, criteria[i].first.c_str(), o.pass ? "PASS" : "FAIL",
                    secs, o.detail.c_str());
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria pass\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
