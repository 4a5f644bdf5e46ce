#include <algorithm>
#include <cmath>
#include <limits>

#include "cubiclab/counts.hpp"
#include "cubiclab/sampler.hpp"

namespace cubiclab {

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
constexpr long double kCut = 64.0L;  // terms below exp(-64) of the running sum are dropped

long double lfact(int k) {
    static const std::vector<long double> table = [] {
        std::vector<long double> t(1 << 20);
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::lgamma(static_cast<long double>(i) + 1.0L);
        return t;
    }();
    return k < static_cast<int>(table.size()) ? table[k] : std::lgamma(static_cast<long double>(k) + 1.0L);
}

const long double kLogX = std::log(27.0L / 256.0L);
const long double kLogY = std::log(9.0L / 64.0L);

struct LogSum {
    long double top = kNegInf;
    long double acc = 0.0L;
    void add(long double x) {
        if (x == kNegInf) return;
        if (x <= top) {
            acc += std::exp(x - top);
        } else {
            acc = acc * std::exp(top - x) + 1.0L;
            top = x;
        }
    }
    long double value() const { return top == kNegInf ? kNegInf : top + std::log(acc); }
};


// Walks a sequence of log-weights against a uniform target u * total.
struct Chooser {
    long double total;
    long double target;
    long double acc = 0.0L;
    bool offer(long double log_w) {
        if (log_w == kNegInf) return false;
        acc += std::exp(log_w - total);
        return acc > target;
    }
};

}  // namespace

// ── log weights ──

long double TriangulationSampler::log_simple(int n, int p) {
    if (n < 0 || p < 2) return kNegInf;
    if (p == 2) return n == 0 ? 0.0L : kNegInf;
    return std::log(2.0L) + lfact(2 * p - 3) + lfact(4 * n + 2 * p - 5) - lfact(p - 1) - lfact(p - 3) - lfact(n) -
           lfact(3 * n + 2 * p - 3);
}

long double TriangulationSampler::log_quasi(int n, int p) {
    if (n < 1 || p < 1) return kNegInf;
    return lfact(2 * p) + lfact(4 * n + 2 * p - 5) - lfact(p - 1) - lfact(p) - lfact(n - 1) - lfact(3 * n + 2 * p - 3);
}

// ── diagonal partial sums ──

// Every term of sum_m T(n-m, p-1+m) lies on the diagonal k + p' = n + p - 1 and
// the terms grow with k, so these sums are prefix sums along a diagonal. Each
// diagonal keeps a window of indices wide enough that the part cut off is below
// exp(-kCut) of the total; the second level sums the first-level prefixes.
void TriangulationSampler::DiagonalSums::ensure(int d, int k) {
    constexpr int kWindow = 256;
    if (static_cast<int>(diags.size()) <= d) diags.resize(d + 1);
    auto& dg = diags[d];
    auto push = [&](std::vector<long double>& f, std::vector<long double>& g, int at) {
        LogSum a, b;
        if (!f.empty()) a.add(f.back());
        a.add(term(at, d - at));
        f.push_back(a.value());
        if (!g.empty()) b.add(g.back());
        b.add(f.back());
        g.push_back(b.value());
    };
    auto top = [&] { return dg.base + static_cast<int>(dg.first.size()) - 1; };
    // lowers the base, recomputing old entries only until they stop changing
    auto lower = [&](int nb) {
        std::vector<long double> f, g;
        for (int at = nb; at < dg.base; ++at) push(f, g, at);
        std::size_t keep = 0;
        for (; keep < dg.first.size(); ++keep) {
            push(f, g, dg.base + static_cast<int>(keep));
            auto same = [](long double x, long double y) { return std::abs(x - y) <= 1e-17L * (1 + std::abs(y)); };
            if (same(f.back(), dg.first[keep]) && same(g.back(), dg.second[keep])) {
                ++keep;
                break;
            }
        }
        f.insert(f.end(), dg.first.begin() + keep, dg.first.end());
        g.insert(g.end(), dg.second.begin() + keep, dg.second.end());
        dg.first = std::move(f);
        dg.second = std::move(g);
        dg.base = nb;
    };
    if (dg.first.empty()) {
        dg.base = std::max(0, k - kWindow);
        for (int at = dg.base; at <= k; ++at) push(dg.first, dg.second, at);
    } else if (k < dg.base) {
        lower(std::max(0, k - kWindow));
    }
    while (top() < k) push(dg.first, dg.second, top() + 1);
    while (dg.base > 0 && dg.first[0] >= dg.second[k - dg.base] - kCut) lower(std::max(0, dg.base - kWindow));
}

long double TriangulationSampler::DiagonalSums::first(int d, int k) {
    if (k < 0) return kNegInf;
    ensure(d, k);
    return diags[d].first[k - diags[d].base];
}

long double TriangulationSampler::DiagonalSums::second(int d, int k) {
    if (k < 0) return kNegInf;
    ensure(d, k);
    return diags[d].second[k - diags[d].base];
}

long double TriangulationSampler::log_clean_simple(int n, int p) {
    if (n < 0 || p < 2) return kNegInf;
    return simple_diag_.first(n + p - 1, n);
}

long double TriangulationSampler::log_quasi_sum(int n, int p) {
    if (n < 1) return kNegInf;
    return quasi_diag_.first(n + p - 1, n);
}

// sum_{m>=1} m T(n-m, p-1+m) = sum_{j>=1} A(n-j, p+j), all on the same diagonal
long double TriangulationSampler::log_marked_fan(int n, int p) {
    if (n < 1) return kNegInf;
    return simple_diag_.second(n + p - 1, n - 1);
}

long double TriangulationSampler::log_clean_quasi(int n, int p) {
    LogSum s;
    s.add(log_quasi_sum(n, p));
    s.add(log_marked_fan(n, p));
    return s.value();
}

// Scaled weights g[a][i] = T(i,a+1) x^i y^(a+1) stay polynomially bounded, so the
// convolution below neither overflows nor needs per-term logarithms.
const double* TriangulationSampler::scaled_column(int a, int upto) {
    if (static_cast<int>(scaled_.size()) <= a) scaled_.resize(a + 1);
    auto& col = scaled_[a];
    for (int i = static_cast<int>(col.size()); i <= upto; ++i)
        col.push_back(static_cast<double>(std::exp(log_simple(i, a + 1) + i * kLogX + (a + 1) * kLogY)));
    return col.data();
}

// Root-edge deletion undone on a (t+1)-gon double-counts the chord cutting off
// the apex triangle, hence R(j,t) = T(j,t+1) - T(j-1,t+2) + sum_i T(i,3) T(j-1-i,t+1).
long double TriangulationSampler::log_chord_pair(int j, int t) {
    if (j < 0 || t < 2) return kNegInf;
    if (static_cast<int>(chord_pair_.size()) <= t) chord_pair_.resize(t + 1);
    auto& row = chord_pair_[t];
    if (static_cast<int>(row.size()) <= j) row.resize(j + 1, std::numeric_limits<long double>::quiet_NaN());
    if (!std::isnan(row[j])) return row[j];
    long double out = kNegInf;
    const long double whole = log_simple(j, t + 1);
    long double rel = 1.0L;
    if (j > 0) {
        rel -= std::exp(log_simple(j - 1, t + 2) - whole);
        const double* f = scaled_column(2, j - 1);
        const double* g = scaled_column(t, j - 1);
        double dot = 0;
        for (int i = 0; i < j; ++i) dot += f[i] * g[j - 1 - i];
        if (dot > 1e-280) {
            long double conv = std::log(static_cast<long double>(dot)) - (j - 1) * kLogX - (t + 4) * kLogY;
            rel += std::exp(conv - whole);
        } else {
            rel = -1;
        }
    }
    if (rel > 1e-6L) {
        out = whole + std::log(rel);
    } else {
        LogSum ls;
        for (int a = 1; a < t; ++a)
            for (int i = 0; i <= j; ++i) ls.add(log_simple(i, a + 1) + log_simple(j - i, t - a + 1));
        out = ls.value();
    }
    return row[j] = out;
}

// ── builder ──

// Regions are cyclic lists of darts with the unfilled region on their right;
// the first dart leaves the root vertex of the region.
struct TriangulationSampler::Region {
    enum Kind : char { simple, clean, quasi, clean_quasi };
    Kind kind;
    int n;
    std::vector<int> darts;
};

struct TriangulationSampler::Builder {
    std::vector<int> alpha, phi;
    std::vector<char> dead;
    int mark_dart = -1;

    int new_edge() {
        int d = static_cast<int>(alpha.size());
        alpha.push_back(d + 1);
        alpha.push_back(d);
        phi.push_back(-1);
        phi.push_back(-1);
        dead.push_back(0);
        dead.push_back(0);
        return d;
    }
    void face(int a, int b, int c) {
        phi[a] = b;
        phi[b] = c;
        phi[c] = a;
    }
    void collapse(int a, int b) {
        int x = alpha[a], y = alpha[b];
        alpha[x] = y;
        alpha[y] = x;
        dead[a] = dead[b] = 1;
    }

    // Deletes the root vertex with m inner neighbours; returns the remainder
    // region and, in x_to_root, one dart x_j -> v per new neighbour.
    std::vector<int> fan(const std::vector<int>& R, int m, std::vector<int>* x_to_root = nullptr) {
        const int p = static_cast<int>(R.size());
        std::vector<int> rest(R.begin() + 1, R.end() - 1);
        if (m == 0) {
            int h = new_edge();
            face(R[0], h, R[p - 1]);
            rest.push_back(h + 1);
            return rest;
        }
        int a0 = new_edge();
        int b0 = new_edge();  // b0: x1 -> v, b0+1: v -> x1
        face(R[0], a0, b0);
        if (x_to_root) x_to_root->push_back(b0);
        std::vector<int> inner_twins;  // twins of x_j -> x_{j+1}
        int c = b0 + 1;
        for (int j = 1; j < m; ++j) {
            int e = new_edge();
            int f = new_edge();  // f: x_{j+1} -> v
            face(c, e, f);
            if (x_to_root) x_to_root->push_back(f);
            inner_twins.push_back(e + 1);
            c = f + 1;
        }
        int g = new_edge();
        face(c, g, R[p - 1]);
        rest.push_back(g + 1);
        for (auto it = inner_twins.rbegin(); it != inner_twins.rend(); ++it) rest.push_back(*it);
        rest.push_back(a0 + 1);
        return rest;
    }

    CombinatorialMap finish(int root, int* mark_out) {
        const int D = static_cast<int>(alpha.size());
        std::vector<int> nid(D, -1);
        int k = 0;
        for (int d = 0; d < D; ++d)
            if (!dead[d]) nid[d] = k++;
        CombinatorialMap m;
        m.alpha.resize(k);
        m.sigma.resize(k);
        for (int d = 0; d < D; ++d) {
            if (dead[d]) continue;
            if (phi[d] < 0 || dead[phi[d]] || dead[alpha[d]]) throw MapError("sampler left an open dart");
            m.alpha[nid[d]] = nid[alpha[d]];
            m.sigma[nid[d]] = nid[phi[alpha[d]]];
        }
        m.root = nid[root];
        if (mark_out) *mark_out = mark_dart >= 0 ? nid[mark_dart] : -1;
        return m;
    }
};

namespace {

void check_bounds(int n, int p, int p_min) {
    if (n < 0 || p < p_min) throw DomainError("sampler parameters out of range");
    if (n > TriangulationSampler::kMaxInner || p > TriangulationSampler::kMaxInner)
        throw DomainError("sampler size exceeds the supported range");
}

}  // namespace

// Fills a simple region: either the clean root-vertex fan, or (unrestricted
// regions) the fan or a first chord from the root vertex. Fan terms and chord
// levels are offered alternately so the scan stops near the chosen term.
void TriangulationSampler::fill_simple(Builder& b, Region task, Rng& rng) {
    std::vector<Region> stack;
    stack.push_back(std::move(task));
    while (!stack.empty()) {
        auto u = std::move(stack.back());
        stack.pop_back();
        const int tp = static_cast<int>(u.darts.size());
        const int tn = u.n;
        if (tp == 2) {
            b.collapse(u.darts[0], u.darts[1]);
            continue;
        }
        const bool clean = u.kind == Region::clean;
        Chooser ch{clean ? log_clean_simple(tn, tp) : log_simple(tn, tp), rng.uniform_ld()};
        int pick_m = -1, pick_L = -1, pick_i = -1;
        bool done = false;
        auto offer_fan = [&](int m) {
            long double w = log_simple(tn - m, tp - 1 + m);
            if (w == kNegInf) return;
            pick_m = m;
            pick_L = -1;
            done = ch.offer(w);
        };
        // chords at level s: the smaller piece has s inner-plus-excess vertices
        const int span = tn + tp - 4;
        auto offer_level = [&](int s) {
            for (int L = 2; L <= tp - 2 && !done; ++L) {
                const int i1 = s - L + 2;
                const int i2 = tn + tp - L - 2 - s;
                for (int pass = 0; pass < 2 && !done; ++pass) {
                    const int i = pass == 0 ? i1 : i2;
                    if (i < 0 || i > tn || (pass == 1 && i2 == i1)) continue;
                    long double w = log_clean_simple(i, L + 1) + log_simple(tn - i, tp - L + 1);
                    if (w == kNegInf) continue;
                    pick_L = L;
                    pick_i = i;
                    done = ch.offer(w);
                }
            }
        };
        const int levels = clean || tp < 4 ? 0 : span / 2 + 1;
        for (int k = 0; !done && (k <= tn || k < levels); ++k) {
            if (k <= tn) offer_fan(k);
            if (!done && k < levels) offer_level(k);
        }
        if (pick_L < 0) {
            if (pick_m < 0) throw MapError("simple region with no admissible decomposition");
            auto rest = b.fan(u.darts, pick_m);
            stack.push_back({Region::simple, tn - pick_m, std::move(rest)});
            continue;
        }
        int c = b.new_edge();  // c: w_L -> v, c+1: v -> w_L
        std::vector<int> left(u.darts.begin(), u.darts.begin() + pick_L);
        left.push_back(c);
        std::vector<int> right{c + 1};
        right.insert(right.end(), u.darts.begin() + pick_L, u.darts.end());
        stack.push_back({Region::clean, pick_i, std::move(left)});
        stack.push_back({Region::simple, tn - pick_i, std::move(right)});
    }
}

PolygonTriangulation TriangulationSampler::uniform_polygon(int n, int p, Rng& rng) {
    check_bounds(n, p, 3);
    Builder b;
    std::vector<int> R(p);
    for (int i = 0; i < p; ++i) R[i] = b.new_edge();
    for (int i = 0; i < p; ++i) b.phi[R[i]] = R[(i + 1) % p];
    std::vector<int> inner{R[0] + 1};
    for (int i = p - 1; i >= 1; --i) inner.push_back(R[i] + 1);
    fill_simple(b, Region{Region::simple, n, std::move(inner)}, rng);

    PolygonTriangulation out;
    out.map = b.finish(R[0], nullptr);
    out.p = p;
    out.n = n;
    return out;
}

PolygonTriangulation TriangulationSampler::uniform_quasi_simple(int n, int p, Rng& rng) {
    check_bounds(n, p, 1);
    if (n < 1) throw DomainError("quasi-simple sampler needs n >= 1");
    Builder b;
    std::vector<int> R(p);
    for (int i = 0; i < p; ++i) R[i] = b.new_edge();
    for (int i = 0; i < p; ++i) b.phi[R[i]] = R[(i + 1) % p];
    std::vector<int> inner{R[0] + 1};
    for (int i = p - 1; i >= 1; --i) inner.push_back(R[i] + 1);
    std::vector<Region> qstack;
    qstack.push_back({Region::quasi, n, std::move(inner)});

    auto pendant = [&](int loop_dart) {
        int s = b.new_edge();  // s: v -> c, s+1: c -> v
        b.face(loop_dart, s, s + 1);
        b.mark_dart = s + 1;
    };
    auto two_cycle = [&](const std::vector<int>& D, int k, int inner_n) {
        int e1 = b.new_edge();  // e1: v -> x
        int e2 = b.new_edge();  // e2: x -> v
        std::vector<int> annulus = D;
        annulus.push_back(e1);
        annulus.push_back(e2);
        fill_simple(b, {Region::simple, k, std::move(annulus)}, rng);
        qstack.push_back({Region::clean_quasi, inner_n, {e2 + 1, e1 + 1}});
    };

    while (!qstack.empty()) {
        auto t = std::move(qstack.back());
        qstack.pop_back();
        const int tp = static_cast<int>(t.darts.size());
        const int tn = t.n;
        auto& D = t.darts;

        if (t.kind == Region::clean_quasi) {
            Chooser ch{log_clean_quasi(tn, tp), rng.uniform_ld()};
            int last_m = -1;
            bool last_marked = false;
            bool done = false;
            for (int m = 0; m <= tn && !done; ++m) {
                long double wq = log_quasi(tn - m, tp - 1 + m);
                long double wt = m >= 1 ? std::log(static_cast<long double>(m)) + log_simple(tn - m, tp - 1 + m) : kNegInf;
                for (bool marked : {false, true}) {
                    long double w = marked ? wt : wq;
                    if (w == kNegInf) continue;
                    last_m = m;
                    last_marked = marked;
                    if (ch.offer(w)) {
                        done = true;
                        break;
                    }
                }
            }
            if (last_m < 0) throw MapError("clean quasi-simple region with no admissible decomposition");
            std::vector<int> xs;
            auto rest = b.fan(D, last_m, &xs);
            if (last_marked) {
                b.mark_dart = xs[rng.below(xs.size())];
                fill_simple(b, {Region::simple, tn - last_m, std::move(rest)}, rng);
            } else {
                qstack.push_back({Region::quasi, tn - last_m, std::move(rest)});
            }
            continue;
        }

        Chooser ch{log_quasi(tn, tp), rng.uniform_ld()};
        if (tp == 1) {
            if (tn == 1 && ch.offer(0.0L)) {
                pendant(D[0]);
                continue;
            }
            int last_k = -1;
            bool done = false;
            for (int k = 0; k <= tn - 2; ++k) {
                long double w = log_simple(k, 3) + log_clean_quasi(tn - 1 - k, 2);
                if (w == kNegInf) continue;
                last_k = k;
                if (ch.offer(w)) {
                    done = true;
                    break;
                }
            }
            if (last_k < 0) {
                pendant(D[0]);
                continue;
            }
            (void)done;
            two_cycle(D, last_k, tn - 1 - last_k);
            continue;
        }

        // loop at the root vertex with the mark as a pendant vertex inside
        if (ch.offer(log_simple(tn - 1, tp + 1))) {
            int l = b.new_edge();
            std::vector<int> annulus = D;
            annulus.push_back(l);
            pendant(l + 1);
            fill_simple(b, {Region::simple, tn - 1, std::move(annulus)}, rng);
            continue;
        }
        // scan chord levels j upwards to the middle, then downwards from the top
        enum Pick { none, i2, ii };
        Pick pick = none;
        int pick_j = -1, pick_s = -1;
        auto level = [&](int j) -> bool {
            long double w = log_simple(j, tp + 2) + log_clean_quasi(tn - j - 1, 2);
            if (w != kNegInf) {
                pick = i2;
                pick_j = j;
                if (ch.offer(w)) return true;
            }
            for (int s = 2; s <= tp; ++s) {
                long double r = log_chord_pair(j, tp - s + 2);
                if (r == kNegInf) continue;
                long double wq = r + log_clean_quasi(tn - j, s);
                if (wq == kNegInf) continue;
                pick = ii;
                pick_j = j;
                pick_s = s;
                if (ch.offer(wq)) return true;
            }
            return false;
        };
        const int mid = (tn - 1) / 2;
        bool found = false;
        for (int j = 0; j <= mid && !found; ++j) found = level(j);
        for (int j = tn - 1; j > mid && !found; --j) found = level(j);
        if (pick == none) throw MapError("quasi-simple region with no admissible decomposition");
        if (pick == i2) {
            two_cycle(D, pick_j, tn - pick_j - 1);
            continue;
        }
        // two chords: a piece of a sides ending at the root, then one of t-a sides after it
        const int tt = tp - pick_s + 2;
        const int j = pick_j;
        Chooser inner{log_chord_pair(j, tt), rng.uniform_ld()};
        int la = -1, li = -1;
        bool done = false;
        for (int a = 1; a <= tt - 1 && !done; ++a)
            for (int i = 0; i <= j; ++i) {
                long double w = log_simple(i, a + 1) + log_simple(j - i, tt - a + 1);
                if (w == kNegInf) continue;
                la = a;
                li = i;
                if (inner.offer(w)) {
                    done = true;
                    break;
                }
            }
        const int lb = tt - la;
        int ca = b.new_edge();  // ca: v -> w_{p-la}, ca+1 back
        std::vector<int> apiece(D.end() - la, D.end());
        apiece.push_back(ca);
        std::vector<int> rem(D.begin(), D.end() - la);
        rem.push_back(ca + 1);
        fill_simple(b, {Region::simple, li, std::move(apiece)}, rng);
        int cb = b.new_edge();  // cb: w'_{lb} -> v, cb+1 back
        std::vector<int> bpiece(rem.begin(), rem.begin() + lb);
        bpiece.push_back(cb);
        std::vector<int> cpiece{cb + 1};
        cpiece.insert(cpiece.end(), rem.begin() + lb, rem.end());
        fill_simple(b, {Region::simple, j - li, std::move(bpiece)}, rng);
        qstack.push_back({Region::clean_quasi, tn - j, std::move(cpiece)});
    }

    PolygonTriangulation out;
    int mark = -1;
    out.map = b.finish(R[0], &mark);
    out.p = p;
    out.n = n;
    if (mark < 0) throw MapError("quasi-simple sampler produced no mark");
    out.marked = out.map.vertex_of()[mark];
    return out;
}

// ── free functions ──

PolygonTriangulation sample_uniform_polygon(int n, int p, Rng& rng) {
    thread_local TriangulationSampler s;
    return s.uniform_polygon(n, p, rng);
}

PolygonTriangulation sample_uniform_quasi_simple(int n, int p, Rng& rng) {
    thread_local TriangulationSampler s;
    return s.uniform_quasi_simple(n, p, rng);
}

std::vector<double> boltzmann_polygon_size_law(int p, int n_cap, double* tail_mass) {
    if (p < 3) throw DomainError("Boltzmann polygon needs p >= 3");
    if (n_cap < 0) throw DomainError("size cap must be nonnegative");
    const long double lrho = std::log(27.0L / 256.0L);
    const long double lz = std::log(static_cast<long double>(partition_function_Z(p).get_d()));
    std::vector<long double> w(n_cap + 1);
    long double sum = 0;
    for (int n = 0; n <= n_cap; ++n) {
        w[n] = std::exp(TriangulationSampler::log_simple(n, p) + n * lrho - lz);
        sum += w[n];
    }
    if (tail_mass) *tail_mass = static_cast<double>(std::max(0.0L, 1.0L - sum));
    std::vector<double> out(n_cap + 1);
    for (int n = 0; n <= n_cap; ++n) out[n] = static_cast<double>(w[n] / sum);
    return out;
}

BoltzmannPolygon sample_boltzmann_polygon(int p, Rng& rng, int n_cap) {
    BoltzmannPolygon out;
    auto law = boltzmann_polygon_size_law(p, n_cap, &out.tail_mass);
    long double u = rng.uniform_ld(), acc = 0;
    int n = n_cap;
    for (int k = 0; k <= n_cap; ++k) {
        acc += law[k];
        if (acc > u) {
            n = k;
            break;
        }
    }
    out.tri = sample_uniform_polygon(n, p, rng);
    return out;
}

}  // namespace cubiclab
