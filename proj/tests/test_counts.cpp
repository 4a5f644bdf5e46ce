#include "doctest.h"

#include "cubiclab/counts.hpp"

using namespace cubiclab;

TEST_CASE("simple polygon counts on small classes") {
    CHECK(count_simple_polygon(0, 3) == 1);
    CHECK(count_simple_polygon(0, 4) == 2);
    CHECK(count_simple_polygon(2, 3) == 3);
    CHECK(count_simple_polygon(1, 4) == 5);
    CHECK_THROWS_AS(count_simple_polygon(0, 2), DomainError);
    CHECK_THROWS_AS(count_simple_polygon(-1, 3), DomainError);
}

TEST_CASE("sphere counts") {
    CHECK(count_simple_sphere(2) == 1);
    CHECK(count_simple_sphere(3) == 3);
    for (int n = 2; n <= 30; ++n) CHECK(count_simple_sphere(n) == count_simple_polygon(n - 1, 3));
    CHECK_THROWS_AS(count_simple_sphere(1), DomainError);
}

TEST_CASE("quasi-simple counts") {
    CHECK(count_quasi_simple(1, 1) == 1);
    CHECK(count_quasi_simple(2, 1) == 2);
    CHECK(count_quasi_simple(1, 2) == 3);
    CHECK_THROWS_AS(count_quasi_simple(0, 2), DomainError);
}

TEST_CASE("partition function, theta and kappa") {
    CHECK(partition_function_Z(3) == mpq_class(32, 27));
    CHECK(partition_function_Z(4) == mpq_class(256, 81));
    CHECK(theta(0) == mpq_class(3, 4));
    CHECK(theta(1) == mpq_class(1, 8));
    CHECK(theta(2) == mpq_class(3, 64));
    CHECK(kappa(1) == mpq_class(1, 2));
    CHECK(kappa(2) == mpq_class(3, 4));
    CHECK(kappa(3) == mpq_class(15, 16));
    CHECK_THROWS_AS(partition_function_Z(2), DomainError);
}

TEST_CASE("Z(3) is the limit of weighted partial sums") {
    mpq_class rho(27, 256), s = 0, w = 1;
    double prev_gap = 1e9;
    for (int n = 0; n <= 200; ++n) {
        s += mpq_class(count_simple_polygon(n, 3)) * w;
        w *= rho;
        if (n % 50 == 0 && n > 0) {
            double gap = mpq_class(partition_function_Z(3) - s).get_d();
            CHECK(gap > 0);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
    }
    CHECK(prev_gap < 2e-3);
}

TEST_CASE("theta sums to one and matches its generating series") {
    auto gf = theta_generating_series(30);
    for (int k = 0; k <= 30; ++k) CHECK(gf[k] == theta(k));
    mpq_class s = 0, prev = -1;
    for (int k = 0; k <= 200; ++k) {
        s += theta(k);
        CHECK(s >= prev);
        prev = s;
    }
    CHECK(s <= 1);
    CHECK(s.get_d() > 0.999);
}

TEST_CASE("asymptotic prefactors") {
    CHECK(constant_simple(2).rational == 0);
    // C(1) = 2/64 with sqrt(6)/sqrt(pi) factored out
    CHECK(constant_quasi_simple(1).rational == mpq_class(1, 32));
    auto lc = quasi_simple_bound_constant(200, 10);
    CHECK(lc.c > 0);
    CHECK(lc.c < 10);
    // the running maximum settles: no change over the last half of the range
    CHECK(lc.history[199] == doctest::Approx(lc.history[99]).epsilon(1e-12));
}

TEST_CASE("root-vertex recursion reproduces the closed forms") {
    auto rc = recursive_counts(60, 20, true);
    int bad_t = 0, bad_q = 0;
    for (int n = 0; n <= 60; ++n)
        for (int p = 3; p <= 20; ++p)
            if (rc.simple[n][p] != count_simple_polygon(n, p)) ++bad_t;
    for (int n = 1; n <= 60; ++n)
        for (int p = 1; p <= 20; ++p)
            if (rc.quasi[n][p] != count_quasi_simple(n, p)) ++bad_q;
    CHECK(bad_t == 0);
    CHECK(bad_q == 0);
}

TEST_CASE("brute-force oracles agree with the closed forms") {
    for (int n = 0; n <= 3; ++n)
        for (int p = 3; p <= 5; ++p) {
            CAPTURE(n);
            CAPTURE(p);
            auto list = brute_force_polygon_triangulations(n, p);
            CHECK(mpz_class(static_cast<unsigned long>(list.size())) == count_simple_polygon(n, p));
            for (auto& t : list) CHECK_NOTHROW(validate_polygon(t));
        }
    for (int n = 1; n <= 3; ++n)
        for (int p = 1; p <= 2; ++p) {
            CAPTURE(n);
            CAPTURE(p);
            auto list = brute_force_quasi_simple(n, p);
            CHECK(mpz_class(static_cast<unsigned long>(list.size())) == count_quasi_simple(n, p));
        }
    CHECK_THROWS_AS(brute_force_polygon_triangulations(4, 3), DomainError);
}
