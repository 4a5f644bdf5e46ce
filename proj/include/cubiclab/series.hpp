#pragma once

#include <gmpxx.h>

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cubiclab/variant.hpp"

namespace cubiclab {

struct SeriesError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ── truncated power series ──

struct Series {
    std::string label;
    std::vector<mpq_class> coeffs;  // indices 0..order

    Series() = default;
    Series(std::string name, int order) : label(std::move(name)), coeffs(order + 1, 0) {}
    int order() const { return static_cast<int>(coeffs.size()) - 1; }
    mpq_class& operator[](int n) { return coeffs.at(n); }
    const mpq_class& operator[](int n) const { return coeffs.at(n); }
    bool operator==(const Series& o) const { return coeffs == o.coeffs; }
};

// Results are truncated at the smaller order of the operands.
Series operator+(const Series& a, const Series& b);
Series operator-(const Series& a, const Series& b);
Series operator*(const Series& a, const Series& b);
Series operator*(const mpq_class& k, const Series& a);
Series inverse(const Series& a);                           // a[0] != 0
Series power(const Series& a, const mpq_class& exponent);  // a[0] == 1
Series shift_up(const Series& a, int k);                   // times z^k
Series shift_down(const Series& a, int k);                 // divided by z^k, order drops by k
Series compose(const Series& outer, const Series& inner);  // inner[0] == 0

// Exact rational to long double without overflow of the intermediate doubles.
long double to_long_double(const mpq_class& q);

// ── simple triangulations ──

// T(x) = sum_{n>=2} |T_n| x^n from the closed form.
Series simple_sphere_series(int N);
// xi(x) with x = xi (1 - xi)^3.
Series xi_series(int N);
// [v^j] T(x,v) for j = 0..N, v marking the root degree minus one.
std::vector<Series> root_degree_series(int N);

// ── network systems ──

struct NetworkSeries {
    Variant variant = Variant::graph;
    Series D, L, S, P, H;
    Series E;   // z D^3
    Series Xi;  // xi(E(z))
    Series G;   // K(E(z)) = T(E(z)) / 2
    int order() const { return D.order(); }
};

// Coefficient n is computed from coefficients below n only, in one pass.
NetworkSeries solve_network_system(Variant v, int N);
NetworkSeries solve_graph_system(int N);
NetworkSeries solve_multigraph_system(int N);

// Whole-system iteration from D = 1; settled_round[n] is the first round after
// which [z^n]D no longer changes.
struct FixedPointRun {
    NetworkSeries series;
    std::vector<int> settled_round;
    int rounds = 0;
};
FixedPointRun solve_network_system_fixed_point(Variant v, int N);

// Pointed connected graphs (C-hat) or multigraphs (M-hat); order drops by one.
Series pointed_series(const NetworkSeries& s);

// ── singular constants ──

// Three-point Richardson extrapolation of s_n = s + a/n + b/n^2 using seq[last-2..last].
long double richardson(const std::vector<long double>& seq, int last);

struct SingularFit {
    double rho = 0;        // from coefficient ratios
    double rho_residual = 0;
    double F0 = 0, F2 = 0, F3 = 0;
    double residual = 0;   // largest change of F0, F2, F3 between orders N and 9N/10
};

struct SingularConstants {
    Variant variant = Variant::graph;
    int order = 0;
    double rho = 0;
    double rho_residual = 0;
    double alpha = 0;
    double c = 0;          // (1/alpha) (E2 / (3 E3))^{2/3} for both models
    double c_printed = 0;  // multigraphs: (1/alpha) (E2 / E3)^{2/3}; graphs: same as c
    std::map<std::string, SingularFit> fits;  // D, L, E, G, pointed
};

SingularFit fit_singular_expansion(const Series& f, double rho);
SingularFit fit_singular_expansion(const Series& f);
SingularConstants estimate_constants(const NetworkSeries& s, const Series& pointed);
SingularConstants estimate_constants(Variant v, int N);

// ── Airy-map density ──

struct AiryValue {
    double value = 0;
    double last_term = 0;  // magnitude of the last nonzero term kept
    int terms = 0;
};
// K-term partial sum of S(x) = (1/pi) sum_{k>=1} (-1)^{k-1} x^k Gamma(1+2k/3)/Gamma(1+k) sin(2 pi k/3),
// |x| <= 15. S(x) = y A(y) with y = x / 3^{2/3}, so S vanishes at 0 and is negative for x < 0.
AiryValue airy_series(double x, int K);
// Map-Airy density A(x) = S(3^{2/3} x) / x: series for |x| <= 7 (throws SeriesError when
// K terms do not reach 1e-14), large-argument Bessel expansion below -7, closed form above 7.
double airy_density(double x, int K = 6000);
// 2 exp(-2x^3/3) (x Ai(x^2) - Ai'(x^2)) in double precision, for |x| <= 6.
double airy_density_closed_form(double x);

// ── bivariate system for the dominating parameter ──

struct BivariateSeries {
    std::string label;
    int nz = 0, nu = 0;
    std::vector<std::vector<mpq_class>> coeffs;  // [z-degree][u-degree]
    BivariateSeries() = default;
    BivariateSeries(std::string name, int z_order, int u_order)
        : label(std::move(name)), nz(z_order), nu(u_order),
          coeffs(z_order + 1, std::vector<mpq_class>(u_order + 1, 0)) {}
    const mpq_class& at(int n, int k) const { return coeffs.at(n).at(k); }
};

// D(z,u), u marking the dominating parameter; Nu bounds the u-degree kept.
BivariateSeries solve_bivariate_system(const NetworkSeries& s, int Nu);
BivariateSeries solve_bivariate_system(Variant v, int Nz, int Nu);
// Sum over z^n, n <= Nz, of the u-polynomial evaluated at u; one entry per n.
std::vector<long double> bivariate_terms(const BivariateSeries& b, long double z, long double u);

struct TailScan {
    double u0 = 1.0;  // largest u on the grid whose terms still decay
    std::vector<std::pair<double, double>> decay;  // (u, fitted ratio of successive terms)
};
TailScan scan_exponential_tail(const BivariateSeries& b, double z, double u_max = 3.0, double step = 0.05);

}  // namespace cubiclab
