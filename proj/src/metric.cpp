#include "cubiclab/metric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <queue>
#include <sstream>

#include "cubiclab/rng.hpp"

namespace cubiclab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

bool close(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a)); }

}  // namespace

// ── metric graphs ──

MetricGraph::MetricGraph(int vertices, std::vector<std::pair<int, int>> edge_list, std::vector<double> lengths)
    : n(vertices), edges(std::move(edge_list)), length(std::move(lengths)), incident(vertices) {
    if (edges.size() != length.size()) throw MetricError("edge and length counts differ");
    for (std::size_t e = 0; e < edges.size(); ++e) {
        auto [u, v] = edges[e];
        if (u < 0 || v < 0 || u >= n || v >= n) throw MetricError("edge endpoint out of range");
        if (!(length[e] > 0)) throw MetricError("edge lengths must be positive");
        incident[u].push_back(static_cast<int>(e));
        incident[v].push_back(static_cast<int>(e));
    }
}

MetricGraph MetricGraph::unit(const Graph& g) {
    std::vector<std::pair<int, int>> es;
    for (int u = 0; u < g.n(); ++u) {
        int loops = 0;
        for (int v : g.adj[u]) {
            if (u < v) es.push_back({u, v});
            if (u == v && (++loops % 2 == 0)) es.push_back({u, u});
        }
    }
    std::vector<double> ones(es.size(), 1.0);
    return MetricGraph(g.n(), std::move(es), std::move(ones));
}

double MetricGraph::max_length() const { return length.empty() ? 0 : *std::max_element(length.begin(), length.end()); }
double MetricGraph::min_length() const { return length.empty() ? 0 : *std::min_element(length.begin(), length.end()); }

// ── weight laws ──

double WeightLaw::sample(Rng& rng) const {
    if (kind == WeightKind::dirac_one && values.empty()) return 1.0;
    double u = rng.uniform(), acc = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        acc += probs[i];
        if (u < acc) return values[i];
    }
    return values.back();
}

double WeightLaw::mean() const {
    if (values.empty()) return 1.0;
    double m = 0;
    for (std::size_t i = 0; i < values.size(); ++i) m += values[i] * probs[i];
    return m;
}

std::string WeightLaw::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "value,probability\n";
    for (std::size_t i = 0; i < values.size(); ++i) os << values[i] << ',' << probs[i] << '\n';
    return os.str();
}

WeightLaw WeightLaw::from_csv(const std::string& text, WeightKind kind) {
    WeightLaw law;
    law.kind = kind;
    std::istringstream is(text);
    std::string line;
    std::map<double, double> table;
    while (std::getline(is, line)) {
        if (line.empty() || line.rfind("value", 0) == 0) continue;
        auto comma = line.find(',');
        if (comma == std::string::npos) throw MetricError("weight table line without a comma: " + line);
        double v = std::stod(line.substr(0, comma)), p = std::stod(line.substr(comma + 1));
        if (!(v > 0) || p < 0) throw MetricError("weight table needs positive values and nonnegative masses");
        table[v] += p;
    }
    if (table.empty()) throw MetricError("empty weight table");
    double total = 0;
    for (auto& [v, p] : table) total += p;
    if (std::abs(total - 1) > 1e-9) throw MetricError("weight table masses do not sum to 1");
    for (auto& [v, p] : table) {
        law.values.push_back(v);
        law.probs.push_back(p / total);
    }
    law.eta0 = law.values.front();
    return law;
}

WeightLaw dirac_one() {
    WeightLaw law;
    law.values = {1.0};
    law.probs = {1.0};
    return law;
}

WeightLaw nu_star_empirical(NetworkSampler& sampler, long draws, std::uint64_t seed, int size_cap) {
    if (draws < 1) throw MetricError("nu-star table needs at least one draw");
    Rng rng(seed);
    std::map<int, long> hist;
    for (long k = 0; k < draws; ++k) ++hist[plan_pole_distance(sampler.sample_plan(rng, size_cap))];
    WeightLaw law;
    law.kind = WeightKind::nu_star_empirical;
    law.seed = seed;
    law.draws = draws;
    for (auto& [v, c] : hist) {
        law.values.push_back(v);
        law.probs.push_back(static_cast<double>(c) / static_cast<double>(draws));
    }
    law.eta0 = law.values.front();
    fit_exponential_tail(law);
    return law;
}

void fit_exponential_tail(WeightLaw& law) {
    const int m = static_cast<int>(law.values.size());
    if (m < 4) return;
    std::vector<double> tail(m);
    double acc = 0;
    for (int i = m - 1; i >= 0; --i) tail[i] = acc += law.probs[i];
    // points with enough mass to be informative
    std::vector<std::pair<double, double>> pts;
    for (int i = 0; i < m; ++i)
        if (tail[i] > 0 && (law.draws == 0 || tail[i] * static_cast<double>(law.draws) >= 20))
            pts.push_back({law.values[i], std::log(tail[i])});
    if (pts.size() < 3) return;
    std::vector<std::pair<double, double>> upper(pts.begin() + static_cast<long>(pts.size() / 2), pts.end());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, k = static_cast<double>(upper.size());
    for (auto [x, y] : upper) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    if (!(slope < 0)) return;
    law.tail_lambda = -slope;
    double A = 0;
    for (auto [x, y] : pts) A = std::max(A, std::exp(y + law.tail_lambda * x));
    law.tail_A = A;
}

MetricGraph with_iid_lengths(const Graph& g, const WeightLaw& law, Rng& rng) {
    MetricGraph mg = MetricGraph::unit(g);
    for (double& l : mg.length) l = law.sample(rng);
    return mg;
}

// ── first-passage distances ──

std::vector<double> fpp_distances(const MetricGraph& mg, int source) {
    if (source < 0 || source >= mg.n) throw MetricError("source out of range");
    std::vector<double> dist(mg.n, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0;
    heap.push({0, source});
    while (!heap.empty()) {
        auto [d, v] = heap.top();
        heap.pop();
        if (d > dist[v]) continue;
        for (int e : mg.incident[v]) {
            int w = mg.other(e, v);
            double nd = d + mg.length[e];
            if (nd < dist[w]) {
                dist[w] = nd;
                heap.push({nd, w});
            }
        }
    }
    return dist;
}

double fpp_distance(const MetricGraph& mg, int u, int v) {
    if (v < 0 || v >= mg.n) throw MetricError("target out of range");
    double d = fpp_distances(mg, u)[v];
    if (d == kInf) throw MetricError("vertices lie in different components");
    return d;
}

double fpp_distance_brute_force(const MetricGraph& mg, int u, int v) {
    if (mg.n > 12) throw MetricError("exhaustive path search is limited to 12 vertices");
    double best = kInf;
    std::vector<char> used(mg.n, 0);
    std::function<void(int, double)> walk = [&](int x, double len) {
        if (x == v) {
            best = std::min(best, len);
            return;
        }
        used[x] = 1;
        for (int e : mg.incident[x]) {
            int y = mg.other(e, x);
            if (!used[y]) walk(y, len + mg.length[e]);
        }
        used[x] = 0;
    };
    walk(u, 0);
    if (best == kInf) throw MetricError("vertices lie in different components");
    return best;
}

std::vector<int> fpp_geodesic(const MetricGraph& mg, int u, int v) {
    auto to_v = fpp_distances(mg, v);
    if (to_v[u] == kInf) throw MetricError("vertices lie in different components");
    std::vector<int> path{u};
    int x = u;
    while (x != v) {
        int next = -1;
        for (int e : mg.incident[x]) {
            int y = mg.other(e, x);
            if (y != x && close(to_v[y] + mg.length[e], to_v[x]) && (next < 0 || y < next)) next = y;
        }
        if (next < 0) throw MetricError("geodesic reconstruction failed");
        path.push_back(next);
        x = next;
    }
    return path;
}

std::vector<std::vector<double>> fpp_distance_rows(const MetricGraph& mg, const std::vector<int>& sources) {
    std::vector<std::vector<double>> rows(sources.size());
    const long m = static_cast<long>(sources.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < m; ++i) rows[i] = fpp_distances(mg, sources[i]);
    return rows;
}

std::vector<std::vector<double>> fpp_distance_rows_serial(const MetricGraph& mg, const std::vector<int>& sources) {
    std::vector<std::vector<double>> rows;
    for (int s : sources) rows.push_back(fpp_distances(mg, s));
    return rows;
}

MetricGraph truncate(const MetricGraph& mg, double k) {
    if (!(k > 0)) throw MetricError("truncation level must be positive");
    MetricGraph out = mg;
    for (double& l : out.length) l = std::min(l, k);
    return out;
}

// ── length profiles and the coupling ──

long LengthProfile::total() const { return std::accumulate(counts.begin(), counts.end(), 0L); }

long LengthProfile::at_least(int i) const {
    long s = 0;
    for (int j = std::max(i, 1); j <= static_cast<int>(counts.size()); ++j) s += counts[j - 1];
    return s;
}

bool LengthProfile::operator==(const LengthProfile& o) const {
    std::size_t m = std::max(counts.size(), o.counts.size());
    for (std::size_t i = 1; i <= m; ++i)
        if (at(static_cast<int>(i)) != o.at(static_cast<int>(i))) return false;
    return true;
}

LengthProfile mult_profile(const std::vector<int>& delta) {
    LengthProfile p;
    for (int d : delta) {
        if (d < 1) throw MetricError("length sequences take values >= 1");
        if (static_cast<int>(p.counts.size()) < d) p.counts.resize(d, 0);
        ++p.counts[d - 1];
    }
    return p;
}

std::pair<std::vector<int>, std::vector<int>> canonical_rearrangement(const LengthProfile& hat,
                                                                      const LengthProfile& tilde) {
    for (long c : hat.counts)
        if (c < 0) throw MetricError("negative multiplicity");
    for (long c : tilde.counts)
        if (c < 0) throw MetricError("negative multiplicity");
    const long m = hat.total();
    if (tilde.total() != m) throw MetricError("profiles carry different total mass");
    const int top = static_cast<int>(std::max(hat.counts.size(), tilde.counts.size()));
    std::vector<int> dh(m, 0), dt(m, 0);
    long next = 0;
    for (int i = 1; i <= top; ++i)
        for (long c = std::min(hat.at(i), tilde.at(i)); c > 0; --c) {
            dh[next] = dt[next] = i;
            ++next;
        }
    auto fill = [&](std::vector<int>& seq, const LengthProfile& own, const LengthProfile& other) {
        long idx = next;
        for (int i = 1; i <= top; ++i)
            for (long c = own.at(i) - std::min(own.at(i), other.at(i)); c > 0; --c) seq[idx++] = i;
    };
    fill(dh, hat, tilde);
    fill(dt, tilde, hat);
    return {dh, dt};
}

CoupledLengths coupled_edge_lengths(int vertices, const std::vector<std::pair<int, int>>& core_edges,
                                    const std::vector<int>& tilde_delta, const WeightLaw& nu_star, Rng& rng) {
    const int m = static_cast<int>(core_edges.size());
    if (static_cast<int>(tilde_delta.size()) != m) throw MetricError("one substitution length per core edge needed");
    std::vector<int> hat_delta(m);
    for (int& d : hat_delta) {
        double x = nu_star.sample(rng);
        if (x < 1 || x != std::floor(x)) throw MetricError("nu-star values must be positive integers");
        d = static_cast<int>(x);
    }
    CoupledLengths out;
    out.hat_profile = mult_profile(hat_delta);
    out.tilde_profile = mult_profile(tilde_delta);
    auto [dh, dt] = canonical_rearrangement(out.hat_profile, out.tilde_profile);
    out.order.resize(m);
    std::iota(out.order.begin(), out.order.end(), 0);
    for (int i = m - 1; i > 0; --i) std::swap(out.order[i], out.order[rng.below(i + 1)]);
    std::vector<double> lh(m), lt(m);
    for (int j = 0; j < m; ++j) {
        lh[out.order[j]] = dh[j];
        lt[out.order[j]] = dt[j];
        out.disagreements += dh[j] != dt[j];
    }
    out.hat = MetricGraph(vertices, core_edges, lh);
    out.tilde = MetricGraph(vertices, core_edges, lt);
    return out;
}

CoupledLengths coupled_edge_lengths(const SubstitutedGraph& s, const WeightLaw& nu_star, Rng& rng) {
    return coupled_edge_lengths(s.core.n(), s.core_edges, s.network_delta, nu_star, rng);
}

bool coupling_event_holds(const LengthProfile& hat, const LengthProfile& tilde, int q, double a, double A) {
    const double lq = std::log(static_cast<double>(q));
    const double low = std::pow(q, 0.75), gap = std::pow(q, 2.0 / 3.0);
    for (int i = 1; i <= a * lq; ++i) {
        if (static_cast<double>(std::min(hat.at(i), tilde.at(i))) < low) return false;
        if (static_cast<double>(std::abs(hat.at(i) - tilde.at(i))) > gap) return false;
    }
    const int top = static_cast<int>(std::max(hat.counts.size(), tilde.counts.size()));
    for (int i = static_cast<int>(std::ceil(A * lq)); i <= top; ++i)
        if (i >= 1 && (hat.at(i) != 0 || tilde.at(i) != 0)) return false;
    return true;
}

// ── core distances induced by substitution ──

MetricGraph induced_core_distance(const SubstitutedGraph& s, int check_pairs, Rng* rng) {
    const int m = static_cast<int>(s.core_edges.size());
    if (static_cast<int>(s.network_delta.size()) != m) throw MetricError("substitution record misses edge lengths");
    std::vector<double> len(m);
    for (int e = 0; e < m; ++e) {
        if (s.network_delta[e] < 1) throw MetricError("substitution record has a nonpositive pole distance");
        len[e] = s.network_delta[e];
    }
    MetricGraph mg(s.core.n(), s.core_edges, len);
    if (check_pairs > 0) {
        if (!rng) throw MetricError("checking induced distances needs a generator");
        const int nk = mg.n;
        for (int k = 0; k < check_pairs; ++k) {
            int u = static_cast<int>(rng->below(nk)), v = static_cast<int>(rng->below(nk));
            auto bfs = bfs_distances(s.graph, {u});
            double d = fpp_distance(mg, u, v);
            if (bfs[v] != d)
                throw MetricError("induced core distance " + std::to_string(d) + " differs from the graph distance " +
                                  std::to_string(bfs[v]));
        }
    }
    return mg;
}

// ── Gromov-Hausdorff(-Prokhorov) estimators ──

namespace {

void check_correspondence(const Correspondence& R, const DistanceMatrix& dX, const DistanceMatrix& dY) {
    std::vector<char> hx(dX.size(), 0), hy(dY.size(), 0);
    for (auto [x, y] : R) {
        if (x < 0 || y < 0 || x >= static_cast<int>(dX.size()) || y >= static_cast<int>(dY.size()))
            throw MetricError("correspondence pair out of range");
        hx[x] = hy[y] = 1;
    }
    if (std::find(hx.begin(), hx.end(), 0) != hx.end()) throw MetricError("correspondence misses a point of X");
    if (std::find(hy.begin(), hy.end(), 0) != hy.end()) throw MetricError("correspondence misses a point of Y");
}

}  // namespace

double gh_distortion(const Correspondence& R, const DistanceMatrix& dX, const DistanceMatrix& dY) {
    check_correspondence(R, dX, dY);
    const long m = static_cast<long>(R.size());
    double worst = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (long i = 0; i < m; ++i)
        for (long j = i + 1; j < m; ++j)
            worst = std::max(worst, std::abs(dX[R[i].first][R[j].first] - dY[R[i].second][R[j].second]));
    return worst;
}

double gh_distortion_serial(const Correspondence& R, const DistanceMatrix& dX, const DistanceMatrix& dY) {
    check_correspondence(R, dX, dY);
    double worst = 0;
    for (std::size_t i = 0; i < R.size(); ++i)
        for (std::size_t j = i + 1; j < R.size(); ++j)
            worst = std::max(worst, std::abs(dX[R[i].first][R[j].first] - dY[R[i].second][R[j].second]));
    return worst;
}

double ghp_estimate(const Correspondence& R, const std::vector<CouplingMass>& nu, const DistanceMatrix& dX,
                    const DistanceMatrix& dY) {
    double dis = gh_distortion(R, dX, dY);
    std::vector<double> mx(dX.size(), 0), my(dY.size(), 0);
    double total = 0, inside = 0;
    std::map<std::pair<int, int>, int> in_r;
    for (auto& p : R) in_r[p] = 1;
    for (auto& c : nu) {
        if (c.mass < 0) throw MetricError("coupling masses must be nonnegative");
        if (c.x < 0 || c.y < 0 || c.x >= static_cast<int>(dX.size()) || c.y >= static_cast<int>(dY.size()))
            throw MetricError("coupling pair out of range");
        total += c.mass;
        if (in_r.count({c.x, c.y})) inside += c.mass;
    }
    if (std::abs(total - 1) > 1e-9) throw MetricError("coupling masses do not sum to 1");
    return std::max(dis / 2, 1 - inside);
}

Correspondence projection_correspondence(const SubstitutedGraph& s) {
    const int nc = s.graph.n(), nk = s.core.n();
    std::vector<int> proj(nc, -1);
    for (int v = 0; v < nk; ++v) proj[v] = v;
    for (std::size_t e = 0; e < s.network_vertices.size(); ++e)
        for (int v : s.network_vertices[e]) proj[v] = s.core_edges[e].first;
    Correspondence R;
    for (int v = 0; v < nc; ++v) {
        if (proj[v] < 0) throw MetricError("vertex of C outside every network");
        R.push_back({v, proj[v]});
    }
    return R;
}

int max_network_diameter(const SubstitutedGraph& s) {
    int best = 0;
    std::vector<int> local(s.graph.n(), -1);
    for (std::size_t e = 0; e < s.network_vertices.size(); ++e) {
        std::vector<int> verts = s.network_vertices[e];
        verts.push_back(s.core_edges[e].first);
        verts.push_back(s.core_edges[e].second);
        for (std::size_t i = 0; i < verts.size(); ++i) local[verts[i]] = static_cast<int>(i);
        Graph sub(static_cast<int>(verts.size()));
        for (std::size_t i = 0; i < verts.size(); ++i)
            for (int w : s.graph.adj[verts[i]])
                if (local[w] > static_cast<int>(i)) sub.add_edge(static_cast<int>(i), local[w]);
        // a pole-to-pole edge belongs to this network only when the network is a single edge
        const int a = static_cast<int>(verts.size()) - 2, b = a + 1;
        if (!s.network_vertices[e].empty()) {
            sub.adj[a].erase(std::remove(sub.adj[a].begin(), sub.adj[a].end(), b), sub.adj[a].end());
            sub.adj[b].erase(std::remove(sub.adj[b].begin(), sub.adj[b].end(), a), sub.adj[b].end());
        }
        best = std::max(best, graph_diameter(sub));
        for (int v : verts) local[v] = -1;
    }
    return best;
}

// ── vertex-face coupling ──

VertexFace vertex_face_coupling(const CombinatorialMap& t, const std::vector<char>& out, Rng& rng) {
    const int D = t.darts();
    if (static_cast<int>(out.size()) != D) throw MetricError("orientation does not match the map");
    auto vid = t.vertex_of();
    auto fid = t.face_of();
    auto outdeg = out_degrees(t, out);
    const int nv = t.num_vertices();
    const double E = D / 2.0;
    VertexFace r;
    // uniform edge, taken with its orientation
    int d = static_cast<int>(rng.below(D));
    if (!out[d]) d = t.alpha[d];
    r.dart = d;
    r.face = fid[rng.bernoulli(0.5) ? d : t.alpha[d]];
    int proposed = vid[d];
    double mu = outdeg[proposed] / E, uni = 1.0 / nv;
    r.vertex = proposed;
    if (mu > uni && !rng.bernoulli(uni / mu)) {
        // residual mass sits on vertices with outdegree below E / nv
        std::vector<double> deficit(nv);
        double total = 0;
        for (int v = 0; v < nv; ++v) total += deficit[v] = std::max(0.0, uni - outdeg[v] / E);
        double u = rng.uniform() * total, acc = 0;
        int pick = nv - 1;
        for (int v = 0; v < nv; ++v) {
            acc += deficit[v];
            if (u < acc && deficit[v] > 0) {
                pick = v;
                break;
            }
        }
        r.vertex = pick;
        r.kept = false;
    }
    r.incident = false;
    for (int e = 0; e < D; ++e)
        if (fid[e] == r.face && vid[e] == r.vertex) r.incident = true;
    return r;
}

}  // namespace cubiclab
