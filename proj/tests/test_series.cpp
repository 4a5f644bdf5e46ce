#include "doctest.h"

#include <chrono>
#include <cmath>
#include <functional>

#include "cubiclab/counts.hpp"
#include "cubiclab/maps.hpp"
#include "cubiclab/series.hpp"

using namespace cubiclab;

namespace {

// labelled connected simple cubic planar graphs on v vertices
long count_connected_cubic_planar(int v) {
    Graph g(v);
    long found = 0;
    std::function<void()> rec = [&] {
        int cur = -1;
        for (int x = 0; x < v; ++x)
            if (g.adj[x].size() < 3) {
                cur = x;
                break;
            }
        if (cur < 0) {
            if (g.connected() && planar_embedding(g, 0, g.adj[0][0]).has_value()) ++found;
            return;
        }
        int floor = cur;
        for (int y : g.adj[cur]) floor = std::max(floor, y);
        for (int w = floor + 1; w < v; ++w) {
            if (g.adj[w].size() >= 3) continue;
            g.add_edge(cur, w);
            rec();
            g.adj[cur].pop_back();
            g.adj[w].pop_back();
        }
    };
    rec();
    return found;
}

}  // namespace

TEST_CASE("series arithmetic") {
    Series a("a", 6), b("b", 6);
    a[0] = 1;
    a[1] = 2;
    a[3] = mpq_class(1, 3);
    b[0] = 2;
    b[2] = -1;
    Series inv = inverse(a);
    Series one = a * inv;
    CHECK(one[0] == 1);
    for (int n = 1; n <= 6; ++n) CHECK(one[n] == 0);
    Series sq = power(a, mpq_class(1, 2));
    CHECK(sq * sq == a);
    CHECK(shift_down(shift_up(a, 2), 2)[3] == a[3]);
    CHECK_THROWS_AS(shift_down(a, 1), SeriesError);
    CHECK_THROWS_AS(inverse(shift_up(a, 1)), SeriesError);
    Series x("x", 6);
    x[1] = 1;
    CHECK(compose(b, x) == b);
    CHECK(to_long_double(mpq_class(1, 3)) == doctest::Approx(1.0 / 3));
    mpz_class huge = 1;
    huge <<= 5000;
    CHECK(std::isfinite(static_cast<double>(std::log(to_long_double(mpq_class(huge, huge + 1))))));
}

TEST_CASE("xi and the root-degree split of T") {
    const int N = 14;
    Series T = simple_sphere_series(N);
    CHECK(T[2] == 1);
    CHECK(T[3] == 3);
    CHECK(T[4] == 13);
    CHECK(T[5] == 68);
    Series xi = xi_series(N), one("1", N);
    one[0] = 1;
    Series back = xi * power(one - xi, 3);
    for (int n = 0; n <= N; ++n) CHECK(back[n] == (n == 1 ? 1 : 0));
    Series viaxi = xi * xi * (one - mpq_class(3) * xi + xi * xi);
    CHECK(viaxi == T);
    auto parts = root_degree_series(N);
    Series sum("sum", N);
    for (auto& p : parts) sum = sum + p;
    CHECK(sum == T);
    for (int j = 0; j <= N; ++j)
        for (int n = 0; n < std::min(j, N + 1); ++n) CHECK(parts[j][n] == 0);
    // root degree of simple triangulations of the sphere with n+2 vertices
    for (int n = 2; n <= 4; ++n) {
        std::vector<long> by_degree(n + 3, 0);
        // a sphere triangulation is a triangle-bounded polygon triangulation with n-1 inner vertices
        for (auto& t : brute_force_polygon_triangulations(n - 1, 3)) {
            auto v = t.map.vertex_of();
            int deg = 0;
            for (int d = 0; d < t.map.darts(); ++d) deg += v[d] == v[t.map.root];
            ++by_degree.at(deg);
        }
        for (int j = 2; j <= n; ++j) {
            CAPTURE(n);
            CAPTURE(j);
            CHECK(parts[j][n] == by_degree[j + 1]);
        }
    }
}

TEST_CASE("network systems: online solve against the fixed point") {
    for (Variant v : {Variant::graph, Variant::multigraph}) {
        CAPTURE(to_string(v));
        const int N = 12;
        auto s = solve_network_system(v, N);
        auto fp = solve_network_system_fixed_point(v, N);
        CHECK(fp.series.D == s.D);
        CHECK(fp.series.L == s.L);
        CHECK(fp.series.S == s.S);
        CHECK(fp.series.P == s.P);
        CHECK(fp.series.H == s.H);
        for (int n = 0; n <= N; ++n) CHECK(fp.settled_round[n] <= n + 1);
        Series one("1", N);
        one[0] = 1;
        Series dm1 = s.D - one;
        CHECK(s.S * s.D == dm1 * dm1);
        Series sum = one + s.L + s.S + s.P + s.H;
        CHECK(sum == s.D);
        for (int n = 0; n <= N; ++n) {
            CHECK(sgn(s.D[n]) >= 0);
            CHECK(sgn(s.L[n]) >= 0);
            CHECK(sgn(s.S[n]) >= 0);
            CHECK(sgn(s.P[n]) >= 0);
            CHECK(sgn(s.H[n]) >= 0);
        }
    }
}

TEST_CASE("network and pointed coefficients against brute force") {
    auto g = solve_graph_system(8);
    auto m = solve_multigraph_system(8);
    CHECK(g.D[1] == 0);
    // multigraph networks of size 1: 24 half-edge labellings, 12 loop-type and 12 parallel-type, over 4!
    CHECK(m.D[1] == 1);
    CHECK(m.L[1] == mpq_class(1, 2));
    CHECK(m.P[1] == mpq_class(1, 2));
    auto ch = pointed_series(g);
    CHECK(ch[1] == 0);
    for (int n = 2; n <= 4; ++n) {
        CAPTURE(n);
        long c = count_connected_cubic_planar(2 * n);
        CHECK(ch[n] == mpq_class(2 * n * c) / mpq_class(factorial(2 * n)));
    }
    CHECK(count_connected_cubic_planar(4) == 1);
    CHECK(count_connected_cubic_planar(6) == 60);
    auto mh = pointed_series(m);
    CHECK(mh[1] == mpq_class(5, 12));
}

TEST_CASE("singular constants") {
    auto t0 = std::chrono::steady_clock::now();
    auto gc = estimate_constants(Variant::graph, 160);
    auto mc = estimate_constants(Variant::multigraph, 160);
    MESSAGE("constants at N=160 in " << std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count()
                                     << " s");
    CHECK(std::abs(gc.rho - 0.101905) < 1e-5);
    CHECK(std::abs(mc.rho - 54 / std::pow(79.0, 1.5)) < 1e-6);
    for (auto* c : {&gc, &mc})
        for (auto& [name, fit] : c->fits) {
            CAPTURE(name);
            CHECK(std::abs(fit.rho - c->rho) < 1e-3);
        }
    CHECK(std::abs(mc.alpha - 199.0 / 316) < 1e-3);
    CHECK(std::abs(mc.c - 2.0 / 3 * std::pow(79.0 / 17, 2.0 / 3)) < 1e-2);
    CHECK(mc.c_printed == doctest::Approx(std::cbrt(9.0) * mc.c));
    CHECK(gc.c_printed == gc.c);
    CHECK(std::abs(gc.alpha - 0.8509) < 1e-3);
    CHECK(std::abs(gc.c - 1.5190) < 1e-2);
}

TEST_CASE("Airy-map density") {
    const double scale = std::cbrt(9.0);
    CHECK(airy_series(0.0, 100).value == 0);
    CHECK(airy_series(-1.0, 200).value < 0);
    for (double y : {-9.0, -3.0, 0.7, 5.0})
        CHECK(airy_series(y, 6000).value ==
              doctest::Approx(y / scale * airy_density_closed_form(y / scale)).epsilon(1e-8));
    for (double x : {-6.0, -2.0, -0.5, 0.0, 0.3, 1.0, 2.5, 4.0})
        CHECK(airy_density(x) == doctest::Approx(airy_density_closed_form(x)).epsilon(1e-8));
    CHECK(airy_density(-7.0) == doctest::Approx(airy_density(-7.0 - 1e-9)).epsilon(1e-9));
    double integral = 0, low = 1;
    const double h = 0.01;
    for (double x = -30; x <= 8; x += h) {
        double a = airy_density(x);
        low = std::min(low, a);
        integral += a * h;
    }
    CHECK(low > -1e-9);
    CHECK(std::abs(integral - 1) < 1e-2);
    CHECK_THROWS_AS(airy_density(5.0, 50), SeriesError);
}

TEST_CASE("bivariate system for the dominating parameter") {
    for (Variant v : {Variant::graph, Variant::multigraph}) {
        CAPTURE(to_string(v));
        const int Nz = 10, Nu = 4 * Nz + 2;
        auto s = solve_network_system(v, Nz);
        auto b = solve_bivariate_system(s, Nu);
        CHECK(b.at(0, 1) == 1);
        CHECK(b.at(0, 0) == 0);
        for (int n = 0; n <= Nz; ++n) {
            mpq_class at_one = 0;
            for (int k = 0; k <= Nu; ++k) {
                CHECK(sgn(b.at(n, k)) >= 0);
                at_one += b.at(n, k);
            }
            CHECK(at_one == s.D[n]);
            if (n > 0) CHECK(b.at(n, Nu) == 0);
        }
        auto scan = scan_exponential_tail(b, estimate_constants(v, 60).rho, 2.0, 0.1);
        CHECK(scan.u0 > 1.0);
        CHECK(scan.decay.front().second < 1.0);
    }
}
