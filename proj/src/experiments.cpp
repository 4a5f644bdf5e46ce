#include "cubiclab/experiments.hpp"

#include <omp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <fstream>
#include <limits>
#include <memory>
#include <numeric>
#include <sstream>

#include "cubiclab/counts.hpp"
#include "cubiclab/maps.hpp"
#include "cubiclab/rng.hpp"
#include "cubiclab/sampler.hpp"
#include "cubiclab/series.hpp"

namespace cubiclab {

using nlohmann::json;

// ── configuration ──

void ExperimentConfig::validate() const {
    if (replicas < 1) throw ConfigError("replicas must be at least 1");
    if (sizes.empty()) throw ConfigError("sizes must not be empty");
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw ConfigError("sizes must be sorted");
    if (sizes.front() < 1) throw ConfigError("sizes must be positive");
    if (pairs < 1) throw ConfigError("pairs must be at least 1");
    if (nu_draws < 1) throw ConfigError("nu_draws must be at least 1");
    if (bins < 1) throw ConfigError("bins must be at least 1");
}

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string unquote(std::string s) {
    s = trim(s);
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front()) return s.substr(1, s.size() - 2);
    return s;
}

long long to_integer(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        long long x = std::stoll(v, &used);
        if (used != v.size()) throw ConfigError("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' expects an integer, got '" + v + "'");
    }
}

double to_real(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        double x = std::stod(v, &used);
        if (used != v.size()) throw ConfigError("");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("key '" + key + "' expects a number, got '" + v + "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError("key '" + key + "' expects true or false, got '" + v + "'");
}

}  // namespace

std::vector<std::pair<std::string, std::string>> parse_config_pairs(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> pairs;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        pairs.push_back({key, value});
    }
    return pairs;
}

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    for (const auto& [key, value] : parse_config_pairs(text)) {
        if (key == "experiment") {
            cfg.experiment = unquote(value);
        } else if (key == "sizes") {
            if (value.size() < 2 || value.front() != '[' || value.back() != ']')
                throw ConfigError("sizes expects a list like [100, 200]");
            std::istringstream items(value.substr(1, value.size() - 2));
            std::string item;
            cfg.sizes.clear();
            while (std::getline(items, item, ','))
                if (!trim(item).empty()) cfg.sizes.push_back(static_cast<int>(to_integer(key, trim(item))));
        } else if (key == "replicas") {
            cfg.replicas = static_cast<int>(to_integer(key, value));
        } else if (key == "seed") {
            cfg.seed = static_cast<std::uint64_t>(to_integer(key, value));
        } else if (key == "weight_law") {
            cfg.weight_law = unquote(value);
        } else if (key == "variant") {
            try {
                cfg.variant = parse_variant(unquote(value));
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        } else if (key == "out") {
            cfg.out = unquote(value);
        } else if (key == "pairs") {
            cfg.pairs = static_cast<int>(to_integer(key, value));
        } else if (key == "nu_draws") {
            cfg.nu_draws = static_cast<long>(to_integer(key, value));
        } else if (key == "size_cap") {
            cfg.size_cap = static_cast<int>(to_integer(key, value));
        } else if (key == "series_order") {
            cfg.series_order = static_cast<int>(to_integer(key, value));
        } else if (key == "bins") {
            cfg.bins = static_cast<int>(to_integer(key, value));
        } else if (key == "epsilon") {
            cfg.epsilon = to_real(key, value);
        } else if (key == "trivial_networks") {
            cfg.trivial_networks = to_bool(key, unquote(value));
        } else {
            cfg.extra[key] = unquote(value);
        }
    }
    return cfg;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read file " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ExperimentConfig load_config(const std::string& path) { return parse_config(read_text_file(path)); }

json ResultRecord::to_json() const {
    return json{{"schema", kSchemaVersion}, {"version", kVersion},  {"experiment", experiment},
                {"parameters", parameters},  {"seed", seed},        {"statistics", statistics},
                {"wall_time_s", wall_time}};
}

// ── summary statistics ──

double quantile(std::vector<double> xs, double p) {
    if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(xs.begin(), xs.end());
    double pos = p * static_cast<double>(xs.size() - 1);
    auto lo = static_cast<std::size_t>(std::floor(pos));
    std::size_t hi = std::min(lo + 1, xs.size() - 1);
    return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

Summary summarize(std::vector<double> xs) {
    Summary s;
    s.count = static_cast<long>(xs.size());
    if (xs.empty()) return s;
    std::sort(xs.begin(), xs.end());
    s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
    double ss = 0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.sd = xs.size() > 1 ? std::sqrt(ss / static_cast<double>(xs.size() - 1)) : 0;
    double half = 1.96 * s.sd / std::sqrt(static_cast<double>(xs.size()));
    s.ci_low = s.mean - half;
    s.ci_high = s.mean + half;
    s.q10 = quantile(xs, 0.10);
    s.q25 = quantile(xs, 0.25);
    s.median = quantile(xs, 0.5);
    s.q75 = quantile(xs, 0.75);
    s.q90 = quantile(xs, 0.90);
    s.min = xs.front();
    s.max = xs.back();
    return s;
}

json to_json(const Summary& s) {
    return json{{"count", s.count}, {"mean", s.mean},   {"sd", s.sd},   {"ci95", {s.ci_low, s.ci_high}},
                {"q10", s.q10},     {"q25", s.q25},     {"median", s.median},
                {"q75", s.q75},     {"q90", s.q90},     {"min", s.min}, {"max", s.max}};
}

std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    const double k = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double slope = (k * sxy - sx * sy) / (k * sxx - sx * sx);
    return {slope, (sy - slope * sx) / k};
}

// ── shared plumbing ──

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

Rng replica_rng(const ExperimentConfig& cfg, int size, int rep) {
    return Rng(cfg.seed).split((static_cast<std::uint64_t>(size) << 32) ^ static_cast<std::uint64_t>(rep));
}

ResultRecord make_record(const ExperimentConfig& cfg, json parameters) {
    ResultRecord r;
    r.experiment = cfg.experiment;
    r.parameters = std::move(parameters);
    r.parameters["variant"] = to_string(cfg.variant);
    r.parameters["replicas"] = cfg.replicas;
    r.seed = cfg.seed;
    return r;
}

bool decreasing(const std::vector<double>& xs) {
    for (std::size_t i = 1; i < xs.size(); ++i)
        if (!(xs[i] < xs[i - 1])) return false;
    return true;
}

// One sampler per OpenMP thread; samplers keep memo tables that must not be shared.
template <class T>
struct PerThread {
    std::vector<std::unique_ptr<T>> items;
    template <class... Args>
    explicit PerThread(const Args&... args) {
        for (int i = 0; i < omp_get_max_threads(); ++i) items.push_back(std::make_unique<T>(args...));
    }
    T& mine() { return *items[omp_get_thread_num()]; }
};

MetricGraph dual_metric_graph(const CombinatorialMap& m, const WeightLaw& law, Rng& rng) {
    auto face = m.face_of();
    std::vector<std::pair<int, int>> edges;
    std::vector<double> len;
    for (int d = 0; d < m.darts(); ++d)
        if (d < m.alpha[d]) {
            edges.push_back({face[d], face[m.alpha[d]]});
            len.push_back(law.sample(rng));
        }
    return MetricGraph(m.num_faces(), std::move(edges), std::move(len));
}

int bfs_distance(const Graph& g, int s, int t) {
    if (s == t) return 0;
    std::vector<int> dist(g.n(), -1);
    std::deque<int> q{s};
    dist[s] = 0;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (int w : g.adj[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                if (w == t) return dist[w];
                q.push_back(w);
            }
    }
    throw MetricError("disconnected graph");
}

}  // namespace

WeightLaw resolve_weight_law(const ExperimentConfig& cfg) {
    if (cfg.weight_law == "dirac" || cfg.weight_law == "dirac-one") return dirac_one();
    if (cfg.weight_law == "nu-star" || cfg.weight_law == "nu_star") {
        NetworkSampler sampler(network_law(cfg.variant));
        return nu_star_empirical(sampler, cfg.nu_draws, cfg.seed, std::min(cfg.size_cap, 100000));
    }
    std::ifstream probe(cfg.weight_law);
    if (!probe) throw ConfigError("weight_law must be dirac, nu-star or a readable CSV file: " + cfg.weight_law);
    auto law = WeightLaw::from_csv(read_text_file(cfg.weight_law));
    fit_exponential_tail(law);
    return law;
}

// ── core size ──

ExperimentOutput run_core_size_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    auto t0 = Clock::now();
    auto constants = estimate_constants(cfg.variant, cfg.series_order);
    const double alpha = constants.alpha, c = constants.c;
    const NetworkLaw law = network_law(cfg.variant);
    PerThread<NetworkSampler> samplers(law);
    std::ostringstream csv;
    csv << "q,bin_center,density,airy_overlay\n";
    std::vector<double> log_q, log_spread;
    for (int q : cfg.sizes) {
        auto ts = Clock::now();
        std::vector<double> ratio(cfg.replicas), y(cfg.replicas), total(cfg.replicas);
        std::vector<long> retries(cfg.replicas);
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            Rng rng = replica_rng(cfg, q, rep);
            auto s = build_core_substituted(q, rng, samplers.mine(), cfg.size_cap);
            double n = s.graph.n() / 2.0;
            total[rep] = n;
            ratio[rep] = n / q;
            y[rep] = (q - alpha * n) / std::pow(n, 2.0 / 3.0);
            retries[rep] = s.retries;
        }
        auto rs = summarize(ratio), ys = summarize(y);
        double m3 = 0;
        for (double v : y) m3 += std::pow(v - ys.mean, 3);
        double spread = quantile(total, 0.9) - quantile(total, 0.1);
        log_q.push_back(std::log(q));
        log_spread.push_back(std::log(std::max(spread, 1e-300)));
        auto rec = make_record(cfg, {{"q", q}, {"size_cap", cfg.size_cap}, {"series_order", cfg.series_order}});
        rec.statistics = {{"size_ratio", to_json(rs)},
                          {"target_ratio", 1 / alpha},
                          {"relative_error", std::abs(rs.mean * alpha - 1)},
                          {"alpha_series", alpha},
                          {"c_series", c},
                          {"rescaled", to_json(ys)},
                          {"rescaled_third_moment", m3 / static_cast<double>(cfg.replicas)},
                          {"size_spread_q10_q90", spread},
                          {"retries", std::accumulate(retries.begin(), retries.end(), 0L)}};
        if (cfg.variant == Variant::multigraph) rec.statistics["alpha_reference"] = 199.0 / 316.0;
        rec.wall_time = seconds_since(ts);
        out.records.push_back(rec);
        // histogram of the rescaled fluctuation with the overlay c A(c x)
        double lo = quantile(y, 0.01), hi = quantile(y, 0.99);
        if (hi > lo) {
            double w = (hi - lo) / cfg.bins;
            std::vector<long> hist(cfg.bins, 0);
            for (double v : y) {
                int b = static_cast<int>((v - lo) / w);
                if (b >= 0 && b < cfg.bins) ++hist[b];
            }
            for (int b = 0; b < cfg.bins; ++b) {
                double x = lo + (b + 0.5) * w;
                double overlay = std::abs(c * x) <= 15 ? c * airy_density(c * x) : 0.0;
                csv << q << ',' << x << ',' << hist[b] / (w * cfg.replicas) << ',' << overlay << '\n';
            }
        }
    }
    auto summary = make_record(cfg, {{"sizes", cfg.sizes}});
    summary.statistics["kind"] = "summary";
    if (cfg.sizes.size() >= 2) summary.statistics["spread_slope"] = linear_fit(log_q, log_spread).first;
    summary.wall_time = seconds_since(t0);
    out.records.push_back(summary);
    out.csv = csv.str();
    return out;
}

// ── diameter ──

ExperimentOutput run_diameter_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    auto t0 = Clock::now();
    PerThread<TriangulationSampler> samplers;
    std::ostringstream csv;
    csv << "n,replica,diameter,max_degree\n";
    std::vector<double> normalized;
    std::vector<double> medians;
    for (int n : cfg.sizes) {
        if (n < 2) throw ConfigError("diameter sizes must be at least 2");
        auto ts = Clock::now();
        std::vector<double> diam(cfg.replicas), maxdeg(cfg.replicas);
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            Rng rng = replica_rng(cfg, n, rep);
            auto t = samplers.mine().uniform_polygon(n - 1, 3, rng);
            auto g = underlying_graph(t.map);
            diam[rep] = graph_diameter(g);
            std::size_t best = 0;
            for (auto& a : g.adj) best = std::max(best, a.size());
            maxdeg[rep] = static_cast<double>(best);
        }
        for (int rep = 0; rep < cfg.replicas; ++rep) csv << n << ',' << rep << ',' << diam[rep] << ',' << maxdeg[rep] << '\n';
        auto ds = summarize(diam), ms = summarize(maxdeg);
        double threshold = std::pow(n, 0.25 + 0.15);
        long exceed = std::count_if(diam.begin(), diam.end(), [&](double d) { return d > threshold; });
        normalized.push_back(ds.median / std::pow(n, 0.25));
        medians.push_back(ds.median);
        auto rec = make_record(cfg, {{"n", n}, {"vertices", n + 2}});
        rec.statistics = {{"diameter", to_json(ds)},
                          {"median_normalized", normalized.back()},
                          {"exceedance_frequency", static_cast<double>(exceed) / cfg.replicas},
                          {"exceedance_threshold", threshold},
                          {"max_degree", to_json(ms)},
                          {"max_degree_over_n_0_1", ms.max / std::pow(n, 0.1)}};
        rec.wall_time = seconds_since(ts);
        out.records.push_back(rec);
    }
    auto summary = make_record(cfg, {{"sizes", cfg.sizes}});
    double mean = std::accumulate(normalized.begin(), normalized.end(), 0.0) / static_cast<double>(normalized.size());
    double dev = 0;
    for (double v : normalized) dev = std::max(dev, std::abs(v / mean - 1));
    std::vector<double> ratios;
    for (std::size_t i = 1; i < medians.size(); ++i) ratios.push_back(medians[i] / medians[i - 1]);
    summary.statistics = {{"kind", "summary"},
                          {"median_normalized", normalized},
                          {"max_relative_deviation", dev},
                          {"consecutive_median_ratios", ratios}};
    summary.wall_time = seconds_since(t0);
    out.records.push_back(summary);
    out.csv = csv.str();
    return out;
}

// ── two-point function ──

ExperimentOutput run_two_point_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    auto t0 = Clock::now();
    const WeightLaw law = resolve_weight_law(cfg);
    PerThread<TriangulationSampler> samplers;
    std::ostringstream csv;
    csv << "n,replica,d_gr,d_star\n";
    std::vector<double> iqrs;
    for (int n : cfg.sizes) {
        if (n < 2) throw ConfigError("two-point sizes must be at least 2");
        auto ts = Clock::now();
        std::vector<std::vector<std::pair<int, double>>> pairs(cfg.replicas);
        std::vector<long> failures(cfg.replicas, 0);
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            Rng rng = replica_rng(cfg, n, rep);
            auto t = samplers.mine().uniform_polygon(n - 1, 3, rng);
            auto orient = compute_3_orientation(t.map);
            auto g = underlying_graph(t.map);
            auto dual = dual_metric_graph(t.map, law, rng);
            for (int k = 0; k < cfg.pairs; ++k) {
                auto a = vertex_face_coupling(t.map, orient, rng);
                auto b = vertex_face_coupling(t.map, orient, rng);
                if (!a.incident || !b.incident) {
                    ++failures[rep];
                    continue;
                }
                pairs[rep].push_back({bfs_distance(g, a.vertex, b.vertex), fpp_distance(dual, a.face, b.face)});
            }
        }
        double sxy = 0, sxx = 0;
        std::vector<double> ratio, per_map;
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            double mxy = 0, mxx = 0;
            for (auto [dg, ds] : pairs[rep]) {
                csv << n << ',' << rep << ',' << dg << ',' << ds << '\n';
                sxy += dg * ds;
                sxx += static_cast<double>(dg) * dg;
                mxy += dg * ds;
                mxx += static_cast<double>(dg) * dg;
                if (dg > 0) ratio.push_back(ds / dg);
            }
            if (mxx > 0) per_map.push_back(mxy / mxx);
        }
        double slope = sxx > 0 ? sxy / sxx : 0;
        auto slopes = summarize(per_map);
        long far = 0, total = 0;
        const double eps = cfg.epsilon * std::pow(n, 0.25);
        for (auto& ps : pairs)
            for (auto [dg, ds] : ps) {
                ++total;
                if (std::abs(ds - slope * dg) > eps) ++far;
            }
        double iqr = quantile(ratio, 0.75) - quantile(ratio, 0.25);
        iqrs.push_back(iqr);
        auto rec = make_record(cfg, {{"n", n}, {"pairs", cfg.pairs}, {"weight_law", cfg.weight_law}, {"eta0", law.eta0}});
        rec.statistics = {{"slope", slope},
                          {"slope_ci95", {slopes.ci_low, slopes.ci_high}},
                          {"ratio", to_json(summarize(ratio))},
                          {"ratio_iqr", iqr},
                          {"sup_form_frequency", total ? static_cast<double>(far) / total : 0.0},
                          {"incidence_failures", std::accumulate(failures.begin(), failures.end(), 0L)}};
        rec.wall_time = seconds_since(ts);
        out.records.push_back(rec);
    }
    auto summary = make_record(cfg, {{"sizes", cfg.sizes}, {"weight_law", cfg.weight_law}});
    summary.statistics = {{"kind", "summary"}, {"ratio_iqr", iqrs}, {"iqr_decreasing", decreasing(iqrs)}};
    summary.wall_time = seconds_since(t0);
    out.records.push_back(summary);
    out.csv = csv.str();
    return out;
}

// ── coupling ──

ExperimentOutput run_coupling_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    auto t0 = Clock::now();
    const WeightLaw law = resolve_weight_law(cfg);
    double a = law.tail_lambda > 0 ? 1 / (8 * law.tail_lambda) : 0.1;
    double A = law.tail_lambda > 0 ? 3 / law.tail_lambda : 10.0;
    if (cfg.extra.count("a")) a = to_real("a", cfg.extra.at("a"));
    if (cfg.extra.count("A")) A = to_real("A", cfg.extra.at("A"));
    const NetworkLaw net_law = network_law(cfg.variant);
    PerThread<NetworkSampler> samplers(net_law);
    std::ostringstream csv;
    csv << "q,replica,disagreement_fraction,max_gap_scaled,event\n";
    std::vector<double> mean_frac, mean_gap;
    for (int q : cfg.sizes) {
        auto ts = Clock::now();
        std::vector<double> frac(cfg.replicas), gap(cfg.replicas);
        std::vector<char> event(cfg.replicas);
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            Rng rng = replica_rng(cfg, q, rep);
            auto s = build_core_substituted(q, rng, samplers.mine(), cfg.size_cap);
            auto cl = coupled_edge_lengths(s, law, rng);
            frac[rep] = static_cast<double>(cl.disagreements) / static_cast<double>(s.core_edges.size());
            double worst = 0;
            const int nk = s.core.n();
            for (int k = 0; k < cfg.pairs; ++k) {
                int u = static_cast<int>(rng.below(nk)), v = static_cast<int>(rng.below(nk));
                worst = std::max(worst, std::abs(fpp_distance(cl.hat, u, v) - fpp_distance(cl.tilde, u, v)));
            }
            gap[rep] = worst / std::pow(q, 0.25);
            event[rep] = coupling_event_holds(cl.hat_profile, cl.tilde_profile, q, a, A);
        }
        for (int rep = 0; rep < cfg.replicas; ++rep)
            csv << q << ',' << rep << ',' << frac[rep] << ',' << gap[rep] << ',' << int(event[rep]) << '\n';
        auto fs = summarize(frac), gs = summarize(gap);
        mean_frac.push_back(fs.mean);
        mean_gap.push_back(gs.mean);
        long held = std::count(event.begin(), event.end(), 1);
        auto rec = make_record(cfg, {{"q", q}, {"pairs", cfg.pairs}, {"weight_law", cfg.weight_law}, {"a", a}, {"A", A},
                                     {"nu_seed", law.seed}, {"nu_draws", law.draws}});
        rec.statistics = {{"disagreement_fraction", to_json(fs)},
                          {"max_gap_over_q_1_4", to_json(gs)},
                          {"event_frequency", static_cast<double>(held) / cfg.replicas}};
        rec.wall_time = seconds_since(ts);
        out.records.push_back(rec);
    }
    auto summary = make_record(cfg, {{"sizes", cfg.sizes}, {"weight_law", cfg.weight_law}});
    summary.statistics = {{"kind", "summary"},
                          {"mean_disagreement_fraction", mean_frac},
                          {"disagreement_decreasing", decreasing(mean_frac)},
                          {"mean_max_gap_over_q_1_4", mean_gap},
                          {"gap_decreasing", decreasing(mean_gap)}};
    summary.wall_time = seconds_since(t0);
    out.records.push_back(summary);
    out.csv = csv.str();
    return out;
}

// ── projection of masses ──

double projection_distortion(const SubstitutedGraph& s) {
    const auto R = projection_correspondence(s);
    const int nk = s.core.n();
    const MetricGraph induced = induced_core_distance(s);
    std::vector<std::vector<int>> fibre(nk);
    for (auto [x, y] : R) fibre[y].push_back(x);
    double worst = 0;
#pragma omp parallel for schedule(dynamic) reduction(max : worst)
    for (int y = 0; y < nk; ++y) {
        auto dK = fpp_distances(induced, y);
        for (int x : fibre[y]) {
            auto dC = bfs_distances(s.graph, {x});
            for (auto [x2, y2] : R) worst = std::max(worst, std::abs(dC[x2] - dK[y2]));
        }
    }
    return worst;
}

ExperimentOutput run_ghp_projection_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentOutput out;
    auto t0 = Clock::now();
    const NetworkLaw net_law = network_law(cfg.variant);
    PerThread<NetworkSampler> samplers(net_law);
    std::ostringstream csv;
    csv << "q,replica,n,distortion,ghp_upper,max_network_vertices\n";
    std::vector<double> scaled;
    for (int q : cfg.sizes) {
        auto ts = Clock::now();
        std::vector<double> n(cfg.replicas), dis(cfg.replicas), net_max(cfg.replicas), mu_tv(cfg.replicas);
#pragma omp parallel for schedule(dynamic)
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            Rng rng = replica_rng(cfg, q, rep);
            auto s = build_core_substituted(q, rng, samplers.mine(), cfg.size_cap, cfg.trivial_networks);
            n[rep] = s.graph.n() / 2.0;
            dis[rep] = projection_distortion(s);
            std::size_t biggest = 0;
            for (auto& v : s.network_vertices) biggest = std::max(biggest, v.size());
            net_max[rep] = static_cast<double>(biggest);
            // projected mass mu'(v) = (vertices sent to v) / |V(C)| against the uniform law on K
            std::vector<double> mass(s.core.n(), 0);
            for (auto [x, y] : projection_correspondence(s)) mass[y] += 1.0 / s.graph.n();
            double tv = 0;
            for (double m : mass) tv += std::abs(m - 1.0 / s.core.n());
            mu_tv[rep] = tv / 2;
        }
        std::vector<double> ghp(cfg.replicas), ghp_scaled(cfg.replicas), net_ratio(cfg.replicas);
        for (int rep = 0; rep < cfg.replicas; ++rep) {
            // the coupling is the pushforward of the uniform law on V(C), carried by R
            ghp[rep] = dis[rep] / 2;
            ghp_scaled[rep] = ghp[rep] / std::pow(n[rep], 0.25);
            net_ratio[rep] = net_max[rep] / std::pow(n[rep], 0.75);
            csv << q << ',' << rep << ',' << n[rep] << ',' << dis[rep] << ',' << ghp[rep] << ',' << net_max[rep] << '\n';
        }
        auto gs = summarize(ghp_scaled);
        scaled.push_back(gs.mean);
        auto rec = make_record(cfg, {{"q", q}, {"trivial_networks", cfg.trivial_networks}});
        rec.statistics = {{"size", to_json(summarize(n))},
                          {"distortion", to_json(summarize(dis))},
                          {"ghp_upper_over_n_1_4", to_json(gs)},
                          {"max_network_vertices", to_json(summarize(net_max))},
                          {"max_network_over_n_0_75", to_json(summarize(net_ratio))},
                          {"projected_mass_tv_to_uniform", to_json(summarize(mu_tv))}};
        rec.wall_time = seconds_since(ts);
        out.records.push_back(rec);
    }
    auto summary = make_record(cfg, {{"sizes", cfg.sizes}});
    summary.statistics = {{"kind", "summary"}, {"ghp_upper_over_n_1_4", scaled}, {"decreasing", decreasing(scaled)}};
    summary.wall_time = seconds_since(t0);
    out.records.push_back(summary);
    out.csv = csv.str();
    return out;
}

// ── dispatch ──

std::vector<std::string> experiment_names() { return {"core-size", "diameter", "two-point", "coupling", "ghp-projection"}; }

ExperimentOutput run_experiment(const ExperimentConfig& cfg) {
    if (cfg.experiment == "core-size") return run_core_size_experiment(cfg);
    if (cfg.experiment == "diameter") return run_diameter_experiment(cfg);
    if (cfg.experiment == "two-point") return run_two_point_experiment(cfg);
    if (cfg.experiment == "coupling") return run_coupling_experiment(cfg);
    if (cfg.experiment == "ghp-projection") return run_ghp_projection_experiment(cfg);
    throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace cubiclab
