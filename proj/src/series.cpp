#include "cubiclab/series.hpp"

#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <cmath>

#include "cubiclab/counts.hpp"

namespace cubiclab {

namespace {

// sum_{i=lo}^{hi} a[i] b[n-i]
mpq_class conv(const std::vector<mpq_class>& a, const std::vector<mpq_class>& b, int n, int lo, int hi) {
    mpq_class acc = 0, t;
    for (int i = std::max(lo, 0); i <= std::min(hi, n); ++i) {
        if (sgn(a[i]) == 0 || sgn(b[n - i]) == 0) continue;
        mpq_mul(t.get_mpq_t(), a[i].get_mpq_t(), b[n - i].get_mpq_t());
        acc += t;
    }
    return acc;
}

int common_order(const Series& a, const Series& b) { return std::min(a.order(), b.order()); }

}  // namespace

// ── truncated power series ──

Series operator+(const Series& a, const Series& b) {
    Series r(a.label, common_order(a, b));
    for (int n = 0; n <= r.order(); ++n) r[n] = a[n] + b[n];
    return r;
}

Series operator-(const Series& a, const Series& b) {
    Series r(a.label, common_order(a, b));
    for (int n = 0; n <= r.order(); ++n) r[n] = a[n] - b[n];
    return r;
}

Series operator*(const Series& a, const Series& b) {
    Series r(a.label, common_order(a, b));
    for (int n = 0; n <= r.order(); ++n) r[n] = conv(a.coeffs, b.coeffs, n, 0, n);
    return r;
}

Series operator*(const mpq_class& k, const Series& a) {
    Series r = a;
    for (auto& c : r.coeffs) c *= k;
    return r;
}

Series inverse(const Series& a) {
    if (sgn(a[0]) == 0) throw SeriesError("inverse of a series without constant term");
    Series r(a.label, a.order());
    r[0] = 1 / a[0];
    for (int n = 1; n <= r.order(); ++n) r[n] = -conv(a.coeffs, r.coeffs, n, 1, n) * r[0];
    return r;
}

// (g^e)' g = e g' g^e, solved coefficient by coefficient
Series power(const Series& a, const mpq_class& exponent) {
    if (a[0] != 1) throw SeriesError("power needs constant term 1");
    Series r(a.label, a.order());
    r[0] = 1;
    for (int n = 1; n <= r.order(); ++n) {
        mpq_class acc = 0;
        for (int k = 1; k <= n; ++k) {
            if (sgn(a[k]) == 0) continue;
            acc += ((exponent + 1) * k - n) * a[k] * r[n - k];
        }
        r[n] = acc / n;
    }
    return r;
}

Series shift_up(const Series& a, int k) {
    Series r(a.label, a.order());
    for (int n = k; n <= r.order(); ++n) r[n] = a[n - k];
    return r;
}

Series shift_down(const Series& a, int k) {
    for (int n = 0; n < k; ++n)
        if (sgn(a[n]) != 0) throw SeriesError("shift_down of a series with low-order terms");
    Series r(a.label, a.order() - k);
    for (int n = 0; n <= r.order(); ++n) r[n] = a[n + k];
    return r;
}

Series compose(const Series& outer, const Series& inner) {
    if (sgn(inner[0]) != 0) throw SeriesError("compose needs an inner series without constant term");
    Series r(outer.label, inner.order());
    for (int k = std::min(outer.order(), inner.order()); k >= 0; --k) {
        r = r * inner;
        r[0] += outer[k];
    }
    return r;
}

long double to_long_double(const mpq_class& q) {
    if (sgn(q) == 0) return 0.0L;
    long en = 0, ed = 0;
    double mn = mpz_get_d_2exp(&en, q.get_num_mpz_t());
    double md = mpz_get_d_2exp(&ed, q.get_den_mpz_t());
    return std::ldexp(static_cast<long double>(mn) / md, static_cast<int>(en - ed));
}

// ── simple triangulations ──

Series simple_sphere_series(int N) {
    Series t("T", N);
    for (int n = 2; n <= N; ++n) t[n] = count_simple_sphere(n);
    return t;
}

// xi = x (1 - xi)^{-3}; the power is advanced alongside xi
Series xi_series(int N) {
    Series xi("xi", N), w("w", N);
    w[0] = 1;
    for (int n = 1; n <= N; ++n) {
        xi[n] = w[n - 1];
        mpq_class acc = 0;
        for (int k = 1; k <= n; ++k) acc += (2 * k + n) * xi[k] * w[n - k];
        w[n] = acc / n;
    }
    return xi;
}

std::vector<Series> root_degree_series(int N) {
    Series xi = xi_series(N);
    Series one("1", N);
    one[0] = 1;
    Series q = xi * (one - xi);
    Series outer = one - xi;
    std::vector<Series> out;
    out.emplace_back("T0", N);
    out.emplace_back("T1", N);
    Series qj = q;  // q^j
    for (int j = 2; j <= N; ++j) {
        qj = qj * q;
        mpz_class cat_prev = binomial(2 * (j - 1), j - 1) / j;
        mpz_class cat = binomial(2 * j, j) / (j + 1);
        Series lin = mpq_class(cat_prev) * one - mpq_class(cat) * xi;
        Series tj = qj * outer * lin;
        tj.label = "T" + std::to_string(j);
        out.push_back(std::move(tj));
    }
    return out;
}

// ── network systems ──

NetworkSeries solve_network_system(Variant v, int N) {
    if (N < 1) throw SeriesError("truncation order must be at least 1");
    const bool graph = v == Variant::graph;
    NetworkSeries s;
    s.variant = v;
    s.D = Series("D", N);
    s.L = Series("L", N);
    s.S = Series("S", N);
    s.P = Series("P", N);
    s.H = Series("H", N);
    s.E = Series("E", N);
    s.Xi = Series("Xi", N);
    s.G = Series("G", N);
    Series inv("1/D", N), d2("D^2", N), d3("D^3", N), w("(1-Xi)^-3", N), x2("Xi^2", N), x3("Xi^3", N),
        x4("Xi^4", N);
    s.D[0] = inv[0] = d2[0] = d3[0] = w[0] = 1;
    const mpq_class half(1, 2);
    for (int n = 1; n <= N; ++n) {
        s.E[n] = d3[n - 1];
        s.Xi[n] = conv(s.E.coeffs, w.coeffs, n, 1, n);
        mpq_class acc = 0;
        for (int k = 1; k <= n; ++k) acc += (2 * k + n) * s.Xi[k] * w[n - k];
        w[n] = acc / n;
        x2[n] = conv(s.Xi.coeffs, s.Xi.coeffs, n, 1, n - 1);
        x3[n] = conv(s.Xi.coeffs, x2.coeffs, n, 1, n - 2);
        x4[n] = conv(s.Xi.coeffs, x3.coeffs, n, 1, n - 3);
        s.G[n] = (x2[n] - 3 * x3[n] + x4[n]) * half;
        s.H[n] = conv(s.G.coeffs, inv.coeffs, n, 2, n);
        mpq_class chain = graph ? s.D[n - 1] - (n == 1 ? 1 : 0) - s.L[n - 1] : s.D[n - 1];
        s.L[n] = half * conv(s.L.coeffs, s.L.coeffs, n, 1, n - 1) + half * chain;
        mpq_class ser = 0, t;
        for (int i = 1; i <= n - 1; ++i) ser += (s.D[i] - s.S[i]) * s.D[n - i];
        s.S[n] = ser;
        s.P[n] = half * (d2[n - 1] - (graph && n == 1 ? 1 : 0));
        s.D[n] = s.L[n] + s.S[n] + s.P[n] + s.H[n];
        d2[n] = conv(s.D.coeffs, s.D.coeffs, n, 0, n);
        d3[n] = conv(s.D.coeffs, d2.coeffs, n, 0, n);
        inv[n] = -conv(s.D.coeffs, inv.coeffs, n, 1, n);
    }
    return s;
}

NetworkSeries solve_graph_system(int N) { return solve_network_system(Variant::graph, N); }
NetworkSeries solve_multigraph_system(int N) { return solve_network_system(Variant::multigraph, N); }

FixedPointRun solve_network_system_fixed_point(Variant v, int N) {
    const bool graph = v == Variant::graph;
    const mpq_class half(1, 2);
    Series one("1", N);
    one[0] = 1;
    Series T = simple_sphere_series(N);
    NetworkSeries cur;
    cur.variant = v;
    cur.D = one;
    cur.L = cur.S = cur.P = cur.H = Series("0", N);
    FixedPointRun run;
    std::vector<Series> history{cur.D};
    for (int round = 1; round <= N + 2; ++round) {
        NetworkSeries nx;
        nx.variant = v;
        Series dm1 = cur.D - one;
        nx.L = half * (cur.L * cur.L) + half * shift_up(graph ? dm1 - cur.L : cur.D, 1);
        nx.S = (dm1 - cur.S) * dm1;
        nx.P = half * shift_up(graph ? cur.D * cur.D - one : cur.D * cur.D, 1);
        nx.E = shift_up(cur.D * cur.D * cur.D, 1);
        nx.G = half * compose(T, nx.E);
        nx.H = nx.G * inverse(cur.D);
        nx.D = one + nx.L + nx.S + nx.P + nx.H;
        bool same = nx.D == cur.D && nx.L == cur.L && nx.S == cur.S;
        cur = std::move(nx);
        history.push_back(cur.D);
        run.rounds = round;
        if (same) break;
    }
    run.settled_round.assign(N + 1, 0);
    for (int n = 0; n <= N; ++n) {
        int r = static_cast<int>(history.size()) - 1;
        while (r > 0 && history[r - 1][n] == cur.D[n]) --r;
        run.settled_round[n] = r;
    }
    cur.D.label = "D";
    cur.L.label = "L";
    cur.S.label = "S";
    cur.P.label = "P";
    cur.H.label = "H";
    run.series = std::move(cur);
    return run;
}

Series pointed_series(const NetworkSeries& s) {
    const int N = s.order();
    const mpq_class half(1, 2), sixth(1, 6), third(1, 3);
    Series one("1", N);
    one[0] = 1;
    Series cube = s.L * s.L * s.L;
    Series loops = sixth * shift_down(cube, 1);
    Series out;
    if (s.variant == Variant::graph) {
        Series d3 = s.D * s.D * s.D;
        out = half * ((s.D - one - s.L) * s.L) + sixth * shift_up(d3 - mpq_class(3) * s.D + mpq_class(2) * one, 1) +
              third * s.G;
        out.label = "C-hat";
    } else {
        out = half * (s.D * s.L) + sixth * shift_up(s.D * s.D * s.D, 1) + third * s.G;
        out.label = "M-hat";
    }
    Series r(out.label, N - 1);
    for (int n = 0; n < N; ++n) r[n] = out[n] + loops[n];
    return r;
}

// ── singular constants ──

long double richardson(const std::vector<long double>& seq, int last) {
    // s_n = s + a/n + b/n^2: sum_j s_{n+j} (n+j)^2 (-1)^{j} binom(2,j) / 2 with sign making the weights sum to 1
    const int n = last - 2;
    long double r = 0;
    const long double w[3] = {1, -2, 1};
    for (int j = 0; j <= 2; ++j) {
        long double m = n + j;
        r += w[j] * m * m * seq[n + j];
    }
    return r / 2;
}

namespace {

// sum_{n > N} n^{-s} by Euler-Maclaurin
long double zeta_tail(long double s, int N) {
    long double x = N;
    return std::pow(x, 1 - s) / (s - 1) - std::pow(x, -s) / 2 + s * std::pow(x, -s - 1) / 12 -
           s * (s + 1) * (s + 2) * std::pow(x, -s - 3) / 720;
}

struct RawFit {
    long double F0, F2, F3;
};

RawFit fit_at(const std::vector<long double>& logf, const std::vector<int>& sign, long double rho, int N) {
    const long double lr = std::log(rho);
    std::vector<long double> kap(N + 1, 0);
    for (int n = 1; n <= N; ++n)
        kap[n] = sign[n] == 0 ? 0 : sign[n] * std::exp(logf[n] + n * lr + 2.5L * std::log(static_cast<long double>(n)));
    long double kappa = richardson(kap, N);
    long double a = N * (kap[N] / kappa - 1);
    long double f0 = 0, f2 = 0;
    for (int n = 0; n <= N; ++n) {
        if (sign[n] == 0) continue;
        long double t = sign[n] * std::exp(logf[n] + n * lr);
        f0 += t;
        f2 += n * t;
    }
    f0 += kappa * (zeta_tail(2.5L, N) + a * zeta_tail(3.5L, N));
    f2 += kappa * (zeta_tail(1.5L, N) + a * zeta_tail(2.5L, N));
    const long double sqrt_pi = std::sqrt(3.14159265358979323846264338327950288L);
    return {f0, f2, kappa * 4 * sqrt_pi / 3};
}

}  // namespace

SingularFit fit_singular_expansion(const Series& f) { return fit_singular_expansion(f, -1.0); }

SingularFit fit_singular_expansion(const Series& f, double rho_in) {
    const int N = f.order();
    if (N < 30) throw SeriesError("singular fit needs at least 30 coefficients");
    std::vector<long double> logf(N + 1, 0);
    std::vector<int> sign(N + 1, 0);
    for (int n = 0; n <= N; ++n) {
        sign[n] = sgn(f[n]);
        if (sign[n] != 0) logf[n] = std::log(std::abs(to_long_double(f[n])));
    }
    for (int n = N - 4; n <= N; ++n)
        if (sign[n] <= 0) throw SeriesError("coefficients of " + f.label + " are not eventually positive");
    // rho_n = (f_{n-1}/f_n) ((n-1)/n)^{5/2} = rho (1 + O(1/n^2))
    std::vector<long double> ratio(N + 1, 0);
    for (int n = N - 8; n <= N; ++n)
        ratio[n] = std::exp(logf[n - 1] - logf[n]) * std::pow((n - 1.0L) / n, 2.5L);
    SingularFit out;
    long double rho = richardson(ratio, N);
    out.rho = static_cast<double>(rho);
    out.rho_residual = static_cast<double>(std::abs(rho - richardson(ratio, N - 1)));
    if (rho_in > 0) rho = rho_in;
    RawFit full = fit_at(logf, sign, rho, N);
    RawFit part = fit_at(logf, sign, rho, N - N / 10);
    out.F0 = static_cast<double>(full.F0);
    out.F2 = static_cast<double>(full.F2);
    out.F3 = static_cast<double>(full.F3);
    out.residual = static_cast<double>(
        std::max({std::abs(full.F0 - part.F0), std::abs(full.F2 - part.F2), std::abs(full.F3 - part.F3)}));
    return out;
}

SingularConstants estimate_constants(const NetworkSeries& s, const Series& pointed) {
    SingularConstants out;
    out.variant = s.variant;
    out.order = s.order();
    SingularFit dfit = fit_singular_expansion(s.D);
    out.rho = dfit.rho;
    out.rho_residual = dfit.rho_residual;
    out.fits["D"] = fit_singular_expansion(s.D, out.rho);
    out.fits["L"] = fit_singular_expansion(s.L, out.rho);
    out.fits["E"] = fit_singular_expansion(s.E, out.rho);
    out.fits["G"] = fit_singular_expansion(s.G, out.rho);
    out.fits["pointed"] = fit_singular_expansion(pointed, out.rho);
    const auto& e = out.fits["E"];
    out.alpha = e.F0 / e.F2;
    out.c = std::pow(e.F2 / (3 * e.F3), 2.0 / 3.0) / out.alpha;
    out.c_printed = s.variant == Variant::graph ? out.c : std::pow(e.F2 / e.F3, 2.0 / 3.0) / out.alpha;
    return out;
}

SingularConstants estimate_constants(Variant v, int N) {
    auto s = solve_network_system(v, N);
    return estimate_constants(s, pointed_series(s));
}

// ── Airy-map density ──

namespace {
using Big = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<320>>;

struct AiryBase {
    Big t1, t2, pi;  // x-free parts of the k = 1, 2 terms
};

const AiryBase& airy_base() {
    static const AiryBase base = [] {
        AiryBase b;
        Big sqrt3 = boost::multiprecision::sqrt(Big(3));
        b.t1 = boost::math::tgamma(Big(5) / 3) * sqrt3 / 2;
        b.t2 = boost::math::tgamma(Big(7) / 3) * sqrt3 / 4;
        b.pi = boost::math::constants::pi<Big>();
        return b;
    }();
    return base;
}
}  // namespace

AiryValue airy_series(double x, int K) {
    const auto& base = airy_base();
    const Big bx(x), x3 = bx * bx * bx;
    Big sum = 0;
    Big term[2] = {base.t1 * bx, base.t2 * bx * bx};
    AiryValue out;
    Big last = 0;
    const double past_peak = 4 * std::abs(x * x * x) / 9 + 3;
    for (int k = 1; k <= K; ++k) {
        int r = (k - 1) % 3;
        if (r == 2) continue;  // sin(2 pi k / 3) = 0
        Big& t = term[r];
        sum += t;
        last = abs(t);
        ++out.terms;
        // t_{k+3} = -t_k x^3 (1 + 2k/3)(2 + 2k/3) / ((k+1)(k+2)(k+3))
        Big kk(k);
        t = -t * x3 * (1 + 2 * kk / 3) * (2 + 2 * kk / 3) / ((kk + 1) * (kk + 2) * (kk + 3));
        if (k > past_peak && last < 1e-30 * abs(sum)) break;
    }
    out.value = static_cast<double>(sum / base.pi);
    out.last_term = static_cast<double>(last / base.pi);
    return out;
}

double airy_density(double x, int K) {
    const double scale = std::cbrt(9.0);
    const double pi = 3.14159265358979323846;
    if (x == 0) return scale * std::tgamma(5.0 / 3) * std::sqrt(3.0) / 2 / pi;
    if (x > 7) return airy_density_closed_form(x);
    if (x < -7) {
        // e^z K_nu(z) ~ sqrt(pi/(2z)) sum_k a_k(nu) z^{-k}
        const long double z = 2.0L / 3 * -x * x * x;
        auto scaled_k = [&](long double nu) {
            long double term = 1, sum = 1;
            for (int k = 1; k <= 30; ++k) {
                term *= (4 * nu * nu - (2 * k - 1) * (2 * k - 1)) / (8.0L * k * z);
                sum += term;
                if (std::abs(term) < 1e-19L * std::abs(sum)) break;
            }
            return std::sqrt(3.14159265358979323846264338327950288L / (2 * z)) * sum;
        };
        long double bracket = scaled_k(2.0L / 3) - scaled_k(1.0L / 3);
        return static_cast<double>(2.0L * x * x / (3.14159265358979323846264338327950288L * std::sqrt(3.0L)) * bracket);
    }
    auto v = airy_series(scale * x, K);
    if (v.last_term > 1e-14 * std::max(1.0, std::abs(v.value)))
        throw SeriesError("airy_density: series not converged at x = " + std::to_string(x) + " with " +
                          std::to_string(K) + " terms (last term " + std::to_string(v.last_term) + ")");
    return v.value / x;
}

double airy_density_closed_form(double x) {
    double y = x * x;
    return 2 * std::exp(-2 * x * x * x / 3) * (x * boost::math::airy_ai(y) - boost::math::airy_ai_prime(y));
}

// ── bivariate system ──

namespace {

using Poly = std::vector<mpq_class>;

void add_product(Poly& acc, const Poly& a, const Poly& b) {
    const int U = static_cast<int>(acc.size()) - 1;
    mpq_class t;
    for (int i = 0; i <= U; ++i) {
        if (sgn(a[i]) == 0) continue;
        for (int j = 0; i + j <= U; ++j) {
            if (sgn(b[j]) == 0) continue;
            mpq_mul(t.get_mpq_t(), a[i].get_mpq_t(), b[j].get_mpq_t());
            acc[i + j] += t;
        }
    }
}

void add_scaled(Poly& acc, const mpq_class& k, const Poly& a) {
    if (sgn(k) == 0) return;
    for (std::size_t i = 0; i < acc.size(); ++i)
        if (sgn(a[i]) != 0) acc[i] += k * a[i];
}

// multiplies by u^2 with truncation
Poly times_u2(const Poly& a) {
    Poly r(a.size(), 0);
    for (std::size_t i = 0; i + 2 < a.size(); ++i) r[i + 2] = a[i];
    return r;
}

}  // namespace

// With W = D(z,u)/D(z) and R = Xi(1-Xi) W, the H-term is
// u^2 (1-Xi)/(2D) * (R (C-1) - Xi (C-1-R)) where C = 1 + R C^2 is the Catalan series in R.
BivariateSeries solve_bivariate_system(const NetworkSeries& s, int Nu) {
    const int Nz = s.order();
    if (Nu < 2) throw SeriesError("u-order must be at least 2");
    const bool graph = s.variant == Variant::graph;
    const mpq_class half(1, 2);
    Series one("1", Nz);
    one[0] = 1;
    Series q = s.Xi * (one - s.Xi);
    Series m = half * ((one - s.Xi) * inverse(s.D));
    auto grid = [&] { return std::vector<Poly>(Nz + 1, Poly(Nu + 1, 0)); };
    auto Y = grid(), W = grid(), R = grid(), C = grid(), C2 = grid(), A2 = grid(), F = grid(), Y2 = grid(), S = grid();
    Y[0][1] = 1;
    W[0][1] = 1;
    C[0][0] = 1;
    C2[0][0] = 1;
    Y2[0][2] = 1;
    for (int n = 1; n <= Nz; ++n) {
        for (int i = 1; i <= n; ++i) add_scaled(R[n], q[i], W[n - i]);
        for (int i = 1; i <= n; ++i) add_product(C[n], R[i], C2[n - i]);
        for (int i = 0; i <= n; ++i) add_product(C2[n], C[i], C[n - i]);
        Poly a1(Nu + 1, 0);
        for (int i = 1; i <= n - 1; ++i) add_product(a1, R[i], C[n - i]);
        for (int k = 0; k <= Nu; ++k) A2[n][k] = C[n][k] - R[n][k];
        F[n] = a1;
        for (int i = 1; i <= n; ++i) add_scaled(F[n], -s.Xi[i], A2[n - i]);
        Poly h(Nu + 1, 0);
        for (int i = 0; i <= n; ++i) add_scaled(h, m[i], F[n - i]);
        Poly ser(Nu + 1, 0);
        for (int i = 1; i <= n - 1; ++i) {
            Poly left = Y[i];
            for (int k = 0; k <= Nu; ++k) left[k] -= S[i][k];
            add_product(ser, left, Y[n - i]);
        }
        S[n] = ser;
        Poly p = Y2[n - 1];
        if (graph && n == 1) p[2] -= 1;
        Poly y = times_u2(h);
        auto pu = times_u2(p);
        for (int k = 0; k <= Nu; ++k) y[k] += half * pu[k] + ser[k];
        if (Nu >= 2) y[2] += s.L[n];
        Y[n] = y;
        for (int i = 0; i <= n; ++i) add_product(Y2[n], Y[i], Y[n - i]);
        W[n] = Y[n];
        for (int i = 1; i <= n; ++i) add_scaled(W[n], -s.D[i], W[n - i]);
    }
    BivariateSeries out("D(z,u)", Nz, Nu);
    out.coeffs = std::move(Y);
    return out;
}

BivariateSeries solve_bivariate_system(Variant v, int Nz, int Nu) {
    return solve_bivariate_system(solve_network_system(v, Nz), Nu);
}

std::vector<long double> bivariate_terms(const BivariateSeries& b, long double z, long double u) {
    std::vector<long double> out(b.nz + 1, 0);
    for (int n = 0; n <= b.nz; ++n) {
        long double acc = 0, up = 1;
        for (int k = 0; k <= b.nu; ++k, up *= u) acc += to_long_double(b.at(n, k)) * up;
        out[n] = acc * std::pow(z, static_cast<long double>(n));
    }
    return out;
}

TailScan scan_exponential_tail(const BivariateSeries& b, double z, double u_max, double step) {
    TailScan out;
    const int N = b.nz, span = std::max(4, N / 4);
    bool ok = true;
    for (double u = 1.0; u <= u_max + 1e-12; u += step) {
        auto t = bivariate_terms(b, z, u);
        double r = static_cast<double>(std::pow(t[N] / t[N - span], 1.0L / span));
        out.decay.emplace_back(u, r);
        if (ok && r < 1) out.u0 = u;
        else ok = false;
    }
    return out;
}

}  // namespace cubiclab
