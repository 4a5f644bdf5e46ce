#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "cubiclab/maps.hpp"

namespace cubiclab {

struct DomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ── closed forms ──

// Rooted simple triangulations of the p-gon with n inner vertices.
mpz_class count_simple_polygon(int n, int p);
// Rooted simple triangulations of the sphere with n+2 vertices.
mpz_class count_simple_sphere(int n);
// Rooted quasi-simple triangulations of the p-gon with n inner vertices, one marked.
mpz_class count_quasi_simple(int n, int p);

mpq_class partition_function_Z(int p);
mpq_class theta(int k);
mpq_class kappa(int p);

mpz_class factorial(int n);
mpz_class binomial(int n, int k);

// rational · √6 / √π
struct SqrtSixOverSqrtPi {
    mpq_class rational;
    double value() const;
    std::string to_string() const;
};

// Asymptotic prefactors: |T_{n,p}| ~ C*(p) n^{-5/2} (256/27)^n and
// |Q_{n,p}| ~ C(p) n^{-3/2} (256/27)^n.
SqrtSixOverSqrtPi constant_simple(int p);
SqrtSixOverSqrtPi constant_quasi_simple(int p);

// max |Q_{n,p}| / (C(p) n^{-3/2} (256/27)^n) over n in [1..n_max], p in [1..p_max].
// history[k] is the running maximum after n = k+1.
struct QuasiSimpleBound {
    double c = 0.0;
    std::vector<double> history;
};
QuasiSimpleBound quasi_simple_bound_constant(int n_max, int p_max);

// Taylor coefficients of 1 - (1 + 1/sqrt(1-x))^{-2} up to x^k_max, exact.
std::vector<mpq_class> theta_generating_series(int k_max);

// ── recursive tables ──

// Exact tables filled by root-vertex deletion; entries at (n,p) for
// 0 <= n <= n_max, 2 <= p <= p_max (T) and 1 <= p <= p_max (Q, n >= 1).
// T(0,2) = 1 stands for the single edge that a collapsed 2-gon leaves.
struct RecursiveCounts {
    int n_max = 0;
    int p_max = 0;
    std::vector<std::vector<mpz_class>> simple;  // [n][p]
    std::vector<std::vector<mpz_class>> quasi;   // [n][p]
};
RecursiveCounts recursive_counts(int n_max, int p_max, bool with_quasi = true);

// ── brute-force oracles ──

// Exhaustive rooted simple triangulations of the p-gon, n <= 3, p <= 5.
std::vector<PolygonTriangulation> brute_force_polygon_triangulations(int n, int p);
// Exhaustive rooted quasi-simple triangulations (one entry per marked vertex), n <= 3, p <= 2.
std::vector<PolygonTriangulation> brute_force_quasi_simple(int n, int p);

}  // namespace cubiclab
