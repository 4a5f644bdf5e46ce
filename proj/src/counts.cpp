#include "cubiclab/counts.hpp"

#include <cmath>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace cubiclab {

mpz_class factorial(int n) {
    if (n < 0) throw DomainError("factorial of a negative number");
    mpz_class r;
    mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
    return r;
}

mpz_class binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    mpz_class r;
    mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
    return r;
}

namespace {

mpq_class power(const mpq_class& b, int e) {
    mpq_class r = 1;
    for (int i = 0; i < e; ++i) r *= b;
    return r;
}

mpz_class exact_div(const mpz_class& num, const mpz_class& den) {
    mpz_class q, rem;
    mpz_tdiv_qr(q.get_mpz_t(), rem.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
    if (rem != 0) throw std::logic_error("closed form produced a non-integer count");
    return q;
}

}  // namespace

// ── closed forms ──

mpz_class count_simple_polygon(int n, int p) {
    if (p < 3) throw DomainError("count_simple_polygon needs p >= 3");
    if (n < 0) throw DomainError("count_simple_polygon needs n >= 0");
    mpz_class num = 2 * factorial(2 * p - 3) * factorial(4 * n + 2 * p - 5);
    mpz_class den = factorial(p - 1) * factorial(p - 3) * factorial(n) * factorial(3 * n + 2 * p - 3);
    return exact_div(num, den);
}

mpz_class count_simple_sphere(int n) {
    if (n < 2) throw DomainError("count_simple_sphere needs n >= 2");
    return exact_div(2 * binomial(4 * n - 3, n - 2), mpz_class(n) * (n - 1));
}

mpz_class count_quasi_simple(int n, int p) {
    if (n < 1) throw DomainError("count_quasi_simple needs n >= 1");
    if (p < 1) throw DomainError("count_quasi_simple needs p >= 1");
    mpz_class num = factorial(2 * p) * factorial(4 * n + 2 * p - 5);
    mpz_class den = factorial(p - 1) * factorial(p) * factorial(n - 1) * factorial(3 * n + 2 * p - 3);
    return exact_div(num, den);
}

mpq_class partition_function_Z(int p) {
    if (p < 3) throw DomainError("partition_function_Z needs p >= 3");
    mpq_class r = power(mpq_class(16, 9), p - 2) * mpq_class(binomial(2 * p - 2, p - 1));
    r /= mpq_class(p * (2 * p - 3));
    r.canonicalize();
    return r;
}

mpq_class theta(int k) {
    if (k < 0) throw DomainError("theta needs k >= 0");
    mpq_class r(factorial(2 * k), factorial(k) * factorial(k + 2));
    r *= mpq_class(3, 2);
    mpz_class four_k = 1;
    four_k <<= 2 * k;
    r /= four_k;
    r.canonicalize();
    return r;
}

mpq_class kappa(int p) {
    if (p < 1) throw DomainError("kappa needs p >= 1");
    mpz_class four_p = 1;
    four_p <<= 2 * p;
    mpq_class r(p * binomial(2 * p, p), four_p);
    r.canonicalize();
    return r;
}

double SqrtSixOverSqrtPi::value() const { return rational.get_d() * std::sqrt(6.0) / std::sqrt(M_PI); }

std::string SqrtSixOverSqrtPi::to_string() const {
    std::ostringstream os;
    os << rational.get_str() << "*sqrt(6)/sqrt(pi)";
    return os.str();
}

SqrtSixOverSqrtPi constant_simple(int p) {
    if (p < 2) throw DomainError("constant_simple needs p >= 2");
    mpq_class r = mpq_class((p - 2) * binomial(2 * p - 2, p - 1)) * power(mpq_class(16, 9), p - 1) / 128;
    r.canonicalize();
    return {r};
}

SqrtSixOverSqrtPi constant_quasi_simple(int p) {
    if (p < 1) throw DomainError("constant_quasi_simple needs p >= 1");
    mpq_class r = mpq_class(p * binomial(2 * p, p)) * power(mpq_class(16, 9), p - 1) / 64;
    r.canonicalize();
    return {r};
}

QuasiSimpleBound quasi_simple_bound_constant(int n_max, int p_max) {
    QuasiSimpleBound out;
    const long double log_growth = std::log(256.0L / 27.0L);
    for (int n = 1; n <= n_max; ++n) {
        for (int p = 1; p <= p_max; ++p) {
            long exp2 = 0;
            double mant = mpz_get_d_2exp(&exp2, count_quasi_simple(n, p).get_mpz_t());
            long double log_q = std::log(static_cast<long double>(mant)) + exp2 * std::log(2.0L);
            long double log_ref = std::log(static_cast<long double>(constant_quasi_simple(p).value())) -
                                  1.5L * std::log(static_cast<long double>(n)) + n * log_growth;
            out.c = std::max(out.c, static_cast<double>(std::exp(log_q - log_ref)));
        }
        out.history.push_back(out.c);
    }
    return out;
}

std::vector<mpq_class> theta_generating_series(int k_max) {
    const int N = k_max + 1;
    std::vector<mpq_class> u(N);
    for (int k = 0; k < N; ++k) {
        mpz_class four_k = 1;
        four_k <<= 2 * k;
        u[k] = mpq_class(binomial(2 * k, k), four_k);
        u[k].canonicalize();
    }
    u[0] += 1;
    std::vector<mpq_class> sq(N, 0);
    for (int i = 0; i < N; ++i)
        for (int j = 0; i + j < N; ++j) sq[i + j] += u[i] * u[j];
    std::vector<mpq_class> inv(N, 0);
    inv[0] = 1 / sq[0];
    for (int k = 1; k < N; ++k) {
        mpq_class s = 0;
        for (int j = 1; j <= k; ++j) s += sq[j] * inv[k - j];
        inv[k] = -s / sq[0];
    }
    std::vector<mpq_class> out(N);
    for (int k = 0; k < N; ++k) out[k] = (k == 0 ? 1 : 0) - inv[k];
    return out;
}

// ── recursive tables ──

RecursiveCounts recursive_counts(int n_max, int p_max, bool with_quasi) {
    if (n_max < 0 || p_max < 2) throw DomainError("recursive_counts needs n_max >= 0 and p_max >= 2");
    const int reach = n_max + p_max + 2;  // every term stays below n + p <= reach
    const int NP = reach + 2;
    using Table = std::vector<std::vector<mpz_class>>;
    Table T(reach + 1, std::vector<mpz_class>(NP, 0));
    Table A(reach + 1, std::vector<mpz_class>(NP + 1, 0));
    auto t_at = [&](int n, int p) -> const mpz_class& {
        static const mpz_class zero = 0;
        if (n < 0 || p < 2 || n > reach || p >= NP) return zero;
        return T[n][p];
    };
    // A(n,p) = sum_m T(n-m, p-1+m) = T(n,p-1) + A(n-1,p+1)
    auto a_at = [&](int n, int p) -> const mpz_class& {
        static const mpz_class zero = 0;
        if (n < 0 || p < 2 || n > reach || p > NP) return zero;
        return A[n][p];
    };
    for (int n = 0; n <= reach; ++n) {
        for (int p = 2; n + p <= reach && p < NP; ++p) {
            if (p == 2) {
                T[n][p] = (n == 0) ? 1 : 0;
            } else {
                mpz_class s = 0;
                // A(n,p) is needed before T(n,p): it only uses T(n,p-1) and row n-1
                A[n][p] = t_at(n, p - 1) + a_at(n - 1, p + 1);
                s = A[n][p];
                for (int L = 2; L <= p - 2; ++L)
                    for (int i = 0; i <= n; ++i) {
                        const mpz_class& rhs = t_at(n - i, p - L + 1);
                        if (rhs == 0) continue;
                        s += a_at(i, L + 1) * rhs;
                    }
                T[n][p] = s;
            }
            if (p + 1 <= NP) A[n][p + 1] = t_at(n, p) + a_at(n - 1, p + 2);
        }
    }

    RecursiveCounts out;
    out.n_max = n_max;
    out.p_max = p_max;
    out.simple.assign(n_max + 1, std::vector<mpz_class>(p_max + 1, 0));
    for (int n = 0; n <= n_max; ++n)
        for (int p = 2; p <= p_max; ++p) out.simple[n][p] = T[n][p];
    if (!with_quasi) return out;

    // R(j,t): two consecutive chord pieces around the root vertex
    const int RT = n_max + p_max + 2;
    Table R(n_max + 1, std::vector<mpz_class>(RT + 1, 0));
    for (int j = 0; j <= n_max; ++j)
        for (int t = 2; j + t <= RT; ++t)
            for (int a = 1; a <= t - 1; ++a)
                for (int i = 0; i <= j; ++i) R[j][t] += t_at(i, a + 1) * t_at(j - i, t - a + 1);

    const int QP = p_max + n_max + 3;
    Table Q(n_max + 1, std::vector<mpz_class>(QP + 1, 0));
    Table Qs(n_max + 1, std::vector<mpz_class>(QP + 2, 0));  // sum_m Q(n-m, p-1+m)
    Table Tm(n_max + 1, std::vector<mpz_class>(QP + 2, 0));  // sum_{m>=1} m T(n-m, p-1+m)
    auto q_at = [&](int n, int p) -> const mpz_class& {
        static const mpz_class zero = 0;
        if (n < 1 || p < 1 || n > n_max || p > QP) return zero;
        return Q[n][p];
    };
    auto qc = [&](int n, int p) -> mpz_class {
        if (n < 1 || n > n_max || p > QP + 1) return 0;
        return Qs[n][p] + Tm[n][p];
    };
    for (int n = 1; n <= n_max; ++n) {
        // Tm(n,p) = A(n-1,p+1) + Tm(n-1,p+1)
        for (int p = 2; p <= QP + 1; ++p)
            Tm[n][p] = a_at(n - 1, p + 1) + (n - 1 >= 1 && p + 1 <= QP + 1 ? Tm[n - 1][p + 1] : mpz_class(0));
        for (int p = 1; p <= QP && n + p <= n_max + p_max + 1; ++p) {
            mpz_class s = 0;
            if (p == 1) {
                if (n == 1) s = 1;
                for (int k = 0; k <= n - 1; ++k) s += t_at(k, 3) * qc(n - 1 - k, 2);
            } else {
                for (int sdeg = 2; sdeg <= p; ++sdeg)
                    for (int j = 0; j <= n - 1; ++j) {
                        int t = p - sdeg + 2;
                        if (t > RT) continue;
                        // Qc(n-j, p) with j = 0 needs Q(n, p-1), already filled
                        mpz_class c = (n - j >= 1) ? (Qs[n - j][sdeg] + Tm[n - j][sdeg]) : mpz_class(0);
                        if (c != 0) s += R[j][t] * c;
                    }
                s += t_at(n - 1, p + 1);
                for (int k = 0; k <= n - 1; ++k) s += t_at(k, p + 2) * qc(n - k - 1, 2);
            }
            Q[n][p] = s;
            // Qs(n,p+1) = Q(n,p) + Qs(n-1,p+2)
            Qs[n][p + 1] = Q[n][p] + (n - 1 >= 1 && p + 2 <= QP + 1 ? Qs[n - 1][p + 2] : mpz_class(0));
        }
    }
    out.quasi.assign(n_max + 1, std::vector<mpz_class>(p_max + 1, 0));
    for (int n = 1; n <= n_max; ++n)
        for (int p = 1; p <= p_max; ++p) out.quasi[n][p] = q_at(n, p);
    return out;
}

// ── brute-force oracles ──

namespace {

// Glues triangles onto the inside of a p-gon whose outer face is darts 0..p-1.
// Open sides form cycles; the first side of the last cycle is always resolved
// next, either by a new triangle or by gluing it to another open side.
void glue_all(int n, int p, const std::function<void(const CombinatorialMap&)>& emit) {
    const int faces = 2 * n + p - 2;
    std::vector<int> phi(p), alpha(p, -1);
    for (int i = 0; i < p; ++i) phi[i] = (i + 1) % p;
    std::vector<std::vector<int>> cycles;
    std::vector<int> start(p);
    std::iota(start.begin(), start.end(), 0);
    cycles.push_back(start);

    std::function<void(int)> rec = [&](int left) {
        while (!cycles.empty() && cycles.back().empty()) cycles.pop_back();
        if (cycles.empty()) {
            if (left == 0) {
                std::vector<int> sig(phi.size());
                for (std::size_t d = 0; d < phi.size(); ++d) sig[d] = phi[alpha[d]];
                CombinatorialMap m;
                m.alpha = alpha;
                m.sigma = sig;
                m.root = 0;
                emit(m);
            }
            return;
        }
        std::size_t open = 0;
        for (auto& c : cycles) open += c.size();
        if ((open + left) % 2 != 0) return;

        const auto saved = cycles;
        const std::vector<int> cyc = cycles.back();
        const int k = static_cast<int>(cyc.size());
        const int e0 = cyc[0];

        if (left > 0) {
            cycles = saved;
            cycles.pop_back();
            int t0 = static_cast<int>(phi.size());
            phi.insert(phi.end(), {t0 + 1, t0 + 2, t0});
            alpha.insert(alpha.end(), {e0, -1, -1});
            alpha[e0] = t0;
            std::vector<int> next{t0 + 1, t0 + 2};
            next.insert(next.end(), cyc.begin() + 1, cyc.end());
            cycles.push_back(next);
            rec(left - 1);
            cycles = saved;
            phi.resize(t0);
            alpha.resize(t0);
            alpha[e0] = -1;
        }
        for (int j = 1; j < k; ++j) {
            int ej = cyc[j];
            alpha[e0] = ej;
            alpha[ej] = e0;
            std::vector<int> inner(cyc.begin() + 1, cyc.begin() + j);
            std::vector<int> outer(cyc.begin() + j + 1, cyc.end());
            cycles = saved;
            cycles.pop_back();
            cycles.push_back(outer);
            cycles.push_back(inner);
            rec(left);
            alpha[e0] = alpha[ej] = -1;
        }
        cycles = saved;
    };
    rec(faces);
}

bool simple_boundary(const CombinatorialMap& m, int p) {
    DartIndex ix(m);
    std::set<int> bv;
    int d = m.root;
    for (int i = 0; i < p; ++i) {
        bv.insert(ix.tail[d]);
        d = m.phi(d);
    }
    return d == m.root && static_cast<int>(bv.size()) == p;
}

}  // namespace

std::vector<PolygonTriangulation> brute_force_polygon_triangulations(int n, int p) {
    if (n < 0 || n > 3 || p < 3 || p > 5)
        throw DomainError("brute_force_polygon_triangulations is limited to 0 <= n <= 3, 3 <= p <= 5");
    std::set<std::vector<int>> seen;
    std::vector<PolygonTriangulation> out;
    glue_all(n, p, [&](const CombinatorialMap& m) {
        if (!is_simple(m) || !simple_boundary(m, p)) return;
        if (!seen.insert(canonical_code(m)).second) return;
        PolygonTriangulation t;
        t.map = m;
        t.p = p;
        t.n = n;
        out.push_back(t);
    });
    return out;
}

std::vector<PolygonTriangulation> brute_force_quasi_simple(int n, int p) {
    if (n < 1 || n > 3 || p < 1 || p > 2)
        throw DomainError("brute_force_quasi_simple is limited to 1 <= n <= 3, 1 <= p <= 2");
    std::set<std::pair<std::vector<int>, int>> seen;
    std::vector<PolygonTriangulation> out;
    glue_all(n, p, [&](const CombinatorialMap& m) {
        if (!simple_boundary(m, p)) return;
        PolygonTriangulation t;
        t.map = m;
        t.p = p;
        t.n = n;
        auto bv = t.boundary_vertices();
        std::set<int> bset(bv.begin(), bv.end());
        const int nv = m.num_vertices();
        auto code = canonical_code(m);
        for (int v = 0; v < nv; ++v) {
            if (bset.count(v)) continue;
            t.marked = v;
            if (!is_quasi_simple(t)) continue;
            if (!seen.insert({code, v}).second) continue;
            out.push_back(t);
        }
    });
    return out;
}

}  // namespace cubiclab
