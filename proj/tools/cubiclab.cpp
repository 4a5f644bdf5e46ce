#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

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
using nlohmann::json;

namespace {

// ── output ──

struct Common {
    std::string config;
    std::uint64_t seed = 0;
    std::string out;
};

json stamp(const std::string& subcommand, std::uint64_t seed) {
    return json{{"schema", kSchemaVersion}, {"version", kVersion}, {"subcommand", subcommand}, {"seed", seed}};
}

// JSON-lines appended to path, or standard output when path is empty.
void emit(const std::string& path, const json& record) {
    if (path.empty()) {
        std::cout << record.dump() << '\n';
        return;
    }
    std::ofstream out(path, std::ios::app);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << record.dump() << '\n';
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

std::string csv_path_for(const std::string& out) {
    auto dot = out.rfind('.');
    auto slash = out.rfind('/');
    if (dot != std::string::npos && (slash == std::string::npos || dot > slash)) return out.substr(0, dot) + ".csv";
    return out + ".csv";
}

// ── graph files ──

std::string graph_to_text(const Graph& g) {
    auto edges = edge_list(g);
    std::ostringstream s;
    s << "GRAPH v1 " << g.n() << ' ' << edges.size() << '\n';
    for (auto [u, v] : edges) s << u << ' ' << v << '\n';
    return s.str();
}

Graph graph_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string tag, version;
    int n = 0;
    long m = 0;
    if (!(in >> tag >> version >> n >> m) || tag != "GRAPH" || version != "v1" || n < 0 || m < 0)
        throw std::runtime_error("expected a 'GRAPH v1 <n> <m>' header");
    Graph g(n);
    for (long i = 0; i < m; ++i) {
        int u = 0, v = 0;
        if (!(in >> u >> v) || u < 0 || v < 0 || u >= n || v >= n) throw std::runtime_error("bad edge line in graph file");
        g.add_edge(u, v);
    }
    return g;
}

// ── config defaults for subcommand flags ──

// Options not given on the command line take the value of the config key with
// the same name (dashes become underscores).
void apply_config(CLI::App* sub, const std::string& path) {
    auto pairs = parse_config_pairs(read_text_file(path));
    for (CLI::Option* opt : sub->get_options()) {
        if (opt->count() > 0 || opt->get_lnames().empty()) continue;
        std::string key = opt->get_lnames()[0];
        std::replace(key.begin(), key.end(), '-', '_');
        if (key == "config") continue;
        for (auto& [k, v] : pairs)
            if (k == key) {
                std::string value = v;
                if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'')) value = value.substr(1, value.size() - 2);
                opt->add_result(value);
                opt->run_callback();
            }
    }
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config, "toml-like file of defaults");
    sub->add_option("--seed", c.seed, "random seed");
    sub->add_option("--out", c.out, "output path");
}

WeightLaw law_from_name(const std::string& name, Variant variant, std::uint64_t seed, long draws) {
    ExperimentConfig cfg;
    cfg.weight_law = name;
    cfg.variant = variant;
    cfg.seed = seed;
    cfg.nu_draws = draws;
    return resolve_weight_law(cfg);
}

// ── skeleton codes as JSON ──

json code_to_json(const SkeletonCode& code) {
    json slots = json::array();
    for (auto& level : code.slots) {
        json row = json::array();
        for (auto& s : level) row.push_back({{"p", s.p}, {"n", s.n}, {"map", to_text(s.map)}});
        slots.push_back(row);
    }
    return json{{"p", code.p},           {"q", code.q},
                {"r", code.r},           {"marked", code.marked},
                {"words", code.parenthesis_words()}, {"slots", slots}};
}

// Words list each tree in preorder; nodes of one depth appear left to right.
SkeletonCode code_from_json(const json& j) {
    SkeletonCode code;
    code.p = j.at("p").get<int>();
    code.q = j.at("q").get<int>();
    code.r = j.at("r").get<int>();
    code.marked = j.at("marked").get<int>();
    if (code.r < 1) throw SkeletonError("height must be at least 1");
    code.children.assign(code.r, {});
    for (const std::string& w : j.at("words").get<std::vector<std::string>>()) {
        int depth = -1;
        for (char ch : w) {
            if (ch == '(') {
                ++depth;
                if (depth > code.r) throw SkeletonError("word deeper than the height");
                if (depth >= 1) ++code.children[depth - 1].back();
                if (depth < code.r) code.children[depth].push_back(0);
            } else if (ch == ')') {
                if (--depth < -1) throw SkeletonError("unbalanced word");
            } else {
                throw SkeletonError("unexpected character in word");
            }
        }
        if (depth != -1) throw SkeletonError("unbalanced word");
    }
    for (auto& row : j.at("slots")) {
        code.slots.emplace_back();
        for (auto& s : row) {
            PolygonTriangulation t;
            t.p = s.at("p").get<int>();
            t.n = s.at("n").get<int>();
            t.map = from_text(s.at("map").get<std::string>());
            code.slots.back().push_back(t);
        }
    }
    return code;
}

json tree_to_json(const DecompositionTree& t) {
    json nodes = json::array(), edges = json::array();
    for (std::size_t x = 0; x < t.nodes.size(); ++x) {
        auto& node = t.nodes[x];
        json comp = json::array();
        for (auto [u, v] : node.component) comp.push_back({u, v});
        nodes.push_back({{"id", x}, {"label", to_string(node.label)}, {"vertices", node.vertices}, {"component", comp}});
    }
    for (auto& e : t.edges) edges.push_back({e.a, e.b});
    return json{{"nodes", nodes}, {"edges", edges}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cubiclab: triangulations, cubic planar graphs and their metric structure"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ── count ──
    Common count_c;
    std::string family = "simple";
    int cn = 0, cp = 3;
    auto* count = app.add_subcommand("count", "exact counts");
    add_common(count, count_c);
    count->add_option("--family", family, "simple | sphere | quasi-simple")->check(CLI::IsMember({"simple", "sphere", "quasi-simple"}));
    count->add_option("--n", cn, "inner vertices (sphere: vertices minus two)");
    count->add_option("--p", cp, "boundary length");

    // ── series ──
    Common series_c;
    std::string variant_name = "graph", series_csv;
    int order = 200, print_terms = 30;
    auto* series = app.add_subcommand("series", "network series and singular constants");
    add_common(series, series_c);
    series->add_option("--variant", variant_name)->check(CLI::IsMember({"graph", "multigraph"}));
    series->add_option("--order", order, "number of terms");
    series->add_option("--terms", print_terms, "coefficients of D written to the record");
    series->add_option("--csv", series_csv, "CSV of normalized coefficient ratios");

    // ── sample ──
    Common sample_c;
    std::string sample_family = "tri", sample_variant = "graph";
    int sn = 10, sp = 3, sq = 10, size_cap = 1000000;
    auto* sample = app.add_subcommand("sample", "draw a triangulation, network or core with networks");
    add_common(sample, sample_c);
    sample->add_option("--family", sample_family, "tri | quasi | network | core")
        ->check(CLI::IsMember({"tri", "quasi", "network", "core"}));
    sample->add_option("--n", sn, "inner vertices");
    sample->add_option("--p", sp, "boundary length");
    sample->add_option("--q", sq, "core size");
    sample->add_option("--variant", sample_variant)->check(CLI::IsMember({"graph", "multigraph"}));
    sample->add_option("--size-cap", size_cap, "network size cap");

    // ── skeleton ──
    Common skel_c;
    std::string op = "encode", code_in;
    int kn = 200, kr = 1;
    auto* skeleton = app.add_subcommand("skeleton", "skeleton codes of hulls");
    add_common(skeleton, skel_c);
    skeleton->add_option("--op", op, "encode | decode | hull-prob")->check(CLI::IsMember({"encode", "decode", "hull-prob"}));
    skeleton->add_option("--n", kn, "inner vertices of the sampled quasi-simple triangulation (encode)");
    skeleton->add_option("--r", kr, "hull height (encode)");
    skeleton->add_option("--in", code_in, "code file (decode, hull-prob)");

    // ── fpp ──
    Common fpp_c;
    std::string map_in, weights = "dirac", weights_out;
    int fn = 500, fpairs = 10;
    long nu_draws = 100000;
    auto* fpp = app.add_subcommand("fpp", "first-passage distances on the dual of a triangulation");
    add_common(fpp, fpp_c);
    fpp->add_option("--map", map_in, "map file of a triangulation; sampled when absent");
    fpp->add_option("--n", fn, "triangulation size when sampling (n + 2 vertices)");
    fpp->add_option("--pairs", fpairs, "random face pairs");
    fpp->add_option("--weights", weights, "dirac | nu-star | CSV path");
    fpp->add_option("--nu-draws", nu_draws, "draws behind a nu-star table");
    fpp->add_option("--weights-out", weights_out, "write the weight table as CSV");

    // ── couple ──
    Common couple_c;
    std::string couple_weights = "nu-star";
    int cq = 100, cpairs = 10;
    long couple_draws = 100000;
    auto* couple = app.add_subcommand("couple", "couple substitution lengths with i.i.d. lengths on a core");
    add_common(couple, couple_c);
    couple->add_option("--q", cq, "core size");
    couple->add_option("--weights", couple_weights, "dirac | nu-star | CSV path");
    couple->add_option("--nu-draws", couple_draws, "draws behind a nu-star table");
    couple->add_option("--pairs", cpairs, "core pairs compared");

    // ── decompose ──
    Common dec_c;
    std::string graph_in;
    int dq = 50;
    auto* decompose = app.add_subcommand("decompose", "decomposition tree of a connected cubic graph");
    add_common(decompose, dec_c);
    decompose->add_option("--graph", graph_in, "graph file; a core with networks is sampled when absent");
    decompose->add_option("--q", dq, "core size when sampling");

    // ── experiments ──
    std::map<std::string, std::pair<CLI::App*, Common>> experiments;
    std::map<std::string, std::vector<int>> exp_sizes;
    std::map<std::string, int> exp_replicas;
    for (const auto& name : experiment_names()) {
        auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
        experiments[name] = {sub, Common{}};
        add_common(sub, experiments[name].second);
        sub->add_option("--sizes", exp_sizes[name], "overrides the config sizes");
        sub->add_option("--replicas", exp_replicas[name], "overrides the config replicas");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        auto t0 = std::chrono::steady_clock::now();
        auto wall = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
        for (auto& [name, entry] : experiments) {
            auto& [sub, c] = entry;
            if (!sub->parsed()) continue;
            ExperimentConfig cfg;
            if (!c.config.empty()) cfg = load_config(c.config);
            cfg.experiment = name;
            if (sub->get_option("--seed")->count()) cfg.seed = c.seed;
            if (sub->get_option("--out")->count()) cfg.out = c.out;
            if (!exp_sizes[name].empty()) cfg.sizes = exp_sizes[name];
            if (sub->get_option("--replicas")->count()) cfg.replicas = exp_replicas[name];
            auto result = run_experiment(cfg);
            for (auto& rec : result.records) emit(cfg.out, rec.to_json());
            if (!cfg.out.empty()) write_file(csv_path_for(cfg.out), result.csv);
            return 0;
        }

        if (count->parsed()) {
            if (!count_c.config.empty()) apply_config(count, count_c.config);
            mpz_class value;
            int p = cp;
            if (family == "simple") value = count_simple_polygon(cn, cp);
            if (family == "quasi-simple") value = count_quasi_simple(cn, cp);
            if (family == "sphere") {
                value = count_simple_sphere(cn);
                p = 3;
            }
            auto rec = stamp("count", count_c.seed);
            rec.update({{"family", family}, {"n", cn}, {"p", p}, {"value", value.get_str()}});
            emit(count_c.out, rec);
        } else if (series->parsed()) {
            if (!series_c.config.empty()) apply_config(series, series_c.config);
            auto v = parse_variant(variant_name);
            auto s = solve_network_system(v, order);
            auto k = estimate_constants(s, pointed_series(s));
            std::vector<std::string> coeffs;
            for (int i = 0; i <= std::min(print_terms, s.order()); ++i) coeffs.push_back(s.D[i].get_str());
            json fits = json::object();
            for (auto& [name, f] : k.fits)
                fits[name] = {{"rho", f.rho}, {"F0", f.F0}, {"F2", f.F2}, {"F3", f.F3}, {"residual", f.residual}};
            auto rec = stamp("series", series_c.seed);
            rec.update({{"variant", variant_name}, {"order", order}, {"rho", k.rho}, {"rho_residual", k.rho_residual},
                        {"alpha", k.alpha}, {"c", k.c}, {"c_printed", k.c_printed}, {"D", coeffs}, {"fits", fits},
                        {"wall_time_s", wall()}});
            emit(series_c.out, rec);
            if (!series_csv.empty()) {
                std::ostringstream csv;
                csv << "series,n,normalized,ratio\n";
                for (auto& [label, f] : std::vector<std::pair<std::string, const Series*>>{{"D", &s.D}, {"E", &s.E}, {"G", &s.G}})
                    for (int i = 2; i <= f->order(); ++i) {
                        long double a = to_long_double((*f)[i]), prev = to_long_double((*f)[i - 1]);
                        if (a == 0 || prev == 0) continue;
                        long double norm = a * std::pow(static_cast<long double>(i), 2.5L) *
                                           std::pow(static_cast<long double>(k.rho), static_cast<long double>(i));
                        csv << label << ',' << i << ',' << static_cast<double>(norm) << ',' << static_cast<double>(a / prev) << '\n';
                    }
                write_file(series_csv, csv.str());
            }
        } else if (sample->parsed()) {
            if (!sample_c.config.empty()) apply_config(sample, sample_c.config);
            Rng rng(sample_c.seed);
            auto rec = stamp("sample", sample_c.seed);
            rec["family"] = sample_family;
            std::string text;
            if (sample_family == "tri" || sample_family == "quasi") {
                auto t = sample_family == "tri" ? sample_uniform_polygon(sn, sp, rng) : sample_uniform_quasi_simple(sn, sp, rng);
                text = to_text(t.map);
                rec.update({{"n", sn}, {"p", sp}, {"vertices", t.map.num_vertices()}, {"marked", t.marked}});
            } else {
                NetworkSampler sampler(network_law(parse_variant(sample_variant)));
                if (sample_family == "network") {
                    auto ns = sampler.sample(rng, size_cap);
                    text = graph_to_text(ns.net.graph);
                    rec.update({{"variant", sample_variant}, {"size", ns.net.size}, {"type", to_string(ns.net.type)},
                                {"pole_distance", pole_distance(ns.net)}, {"retries", ns.retries}});
                } else {
                    auto s = build_core_substituted(sq, rng, sampler, size_cap);
                    text = graph_to_text(s.graph);
                    rec.update({{"variant", sample_variant}, {"q", sq}, {"size", s.graph.n() / 2}, {"retries", s.retries}});
                }
            }
            if (sample_c.out.empty())
                std::cout << text;
            else
                write_file(sample_c.out, text);
            rec["wall_time_s"] = wall();
            std::cerr << rec.dump() << '\n';
        } else if (skeleton->parsed()) {
            if (!skel_c.config.empty()) apply_config(skeleton, skel_c.config);
            auto rec = stamp("skeleton", skel_c.seed);
            rec["op"] = op;
            if (op == "encode") {
                Rng rng(skel_c.seed);
                auto qt = sample_uniform_quasi_simple(kn, 1, rng);
                auto h = hull(qt, kr);
                if (h.whole) throw std::runtime_error("the hull is the whole triangulation; try a larger n or smaller r");
                auto code = skeleton_decompose(h.cylinder);
                auto j = code_to_json(code);
                j["schema"] = kSchemaVersion;
                j["version"] = kVersion;
                j["seed"] = skel_c.seed;
                if (skel_c.out.empty())
                    std::cout << j.dump() << '\n';
                else
                    write_file(skel_c.out, j.dump() + "\n");
            } else {
                if (code_in.empty()) throw std::runtime_error("--in is required for " + op);
                auto code = code_from_json(json::parse(read_text_file(code_in)));
                check_admissible(code);
                if (op == "decode") {
                    auto c = skeleton_reconstruct(code);
                    rec.update({{"p", c.p}, {"q", c.q}, {"r", c.r}, {"vertices", c.map.num_vertices()},
                                {"edges", c.map.edges()}, {"faces", c.map.num_faces()}, {"top", c.top},
                                {"map", to_text(c.map)}});
                } else {
                    auto prob = hull_probability_exact(code);
                    rec.update({{"probability", prob.get_str()}, {"probability_double", prob.get_d()}});
                }
                emit(skel_c.out, rec);
            }
        } else if (fpp->parsed()) {
            if (!fpp_c.config.empty()) apply_config(fpp, fpp_c.config);
            Rng rng(fpp_c.seed);
            CombinatorialMap m;
            if (map_in.empty()) {
                m = sample_uniform_polygon(fn - 1, 3, rng).map;
            } else {
                m = from_text(read_text_file(map_in));
                if (!is_triangulation(m)) throw std::runtime_error("map is not a triangulation");
            }
            auto law = law_from_name(weights, Variant::graph, fpp_c.seed, nu_draws);
            if (!weights_out.empty()) write_file(weights_out, law.to_csv());
            auto face = m.face_of();
            std::vector<std::pair<int, int>> edges;
            std::vector<double> len;
            for (int d = 0; d < m.darts(); ++d)
                if (d < m.alpha[d]) {
                    edges.push_back({face[d], face[m.alpha[d]]});
                    len.push_back(law.sample(rng));
                }
            MetricGraph dual(m.num_faces(), edges, len);
            for (int k = 0; k < fpairs; ++k) {
                int f = static_cast<int>(rng.below(m.num_faces())), g = static_cast<int>(rng.below(m.num_faces()));
                auto path = fpp_geodesic(dual, f, g);
                auto rec = stamp("fpp", fpp_c.seed);
                rec.update({{"weights", weights}, {"faces", m.num_faces()}, {"f", f}, {"g", g},
                            {"d_star", fpp_distance(dual, f, g)}, {"geodesic_faces", path.size()}});
                emit(fpp_c.out, rec);
            }
        } else if (couple->parsed()) {
            if (!couple_c.config.empty()) apply_config(couple, couple_c.config);
            Rng rng(couple_c.seed);
            auto law = law_from_name(couple_weights, Variant::graph, couple_c.seed, couple_draws);
            NetworkSampler sampler(network_law(Variant::graph));
            auto s = build_core_substituted(cq, rng, sampler);
            auto cl = coupled_edge_lengths(s, law, rng);
            double gap = 0;
            for (int k = 0; k < cpairs; ++k) {
                int u = static_cast<int>(rng.below(s.core.n())), v = static_cast<int>(rng.below(s.core.n()));
                gap = std::max(gap, std::abs(fpp_distance(cl.hat, u, v) - fpp_distance(cl.tilde, u, v)));
            }
            double a = law.tail_lambda > 0 ? 1 / (8 * law.tail_lambda) : 0.1;
            double A = law.tail_lambda > 0 ? 3 / law.tail_lambda : 10.0;
            auto rec = stamp("couple", couple_c.seed);
            rec.update({{"q", cq},
                        {"weights", couple_weights},
                        {"edges", s.core_edges.size()},
                        {"disagreements", cl.disagreements},
                        {"hat_profile", cl.hat_profile.counts},
                        {"tilde_profile", cl.tilde_profile.counts},
                        {"max_gap", gap},
                        {"event", coupling_event_holds(cl.hat_profile, cl.tilde_profile, cq, a, A)},
                        {"a", a},
                        {"A", A}});
            emit(couple_c.out, rec);
        } else if (decompose->parsed()) {
            if (!dec_c.config.empty()) apply_config(decompose, dec_c.config);
            Graph g;
            if (graph_in.empty()) {
                Rng rng(dec_c.seed);
                NetworkSampler sampler(network_law(Variant::graph));
                g = build_core_substituted(dq, rng, sampler).graph;
            } else {
                g = graph_from_text(read_text_file(graph_in));
            }
            auto t = decomposition_tree(g);
            check_tree(t);
            auto b = diameter_bound(g, t);
            auto core = three_connected_core(t);
            auto rec = stamp("decompose", dec_c.seed);
            rec.update({{"vertices", g.n()},
                        {"tree", tree_to_json(t)},
                        {"core_size", core.size},
                        {"core_node", core.node},
                        {"bound", {{"tree_diameter", b.tree_diameter}, {"xi_R", b.xi_R}, {"delta_R", b.delta_R},
                                   {"xi_T", b.xi_T}, {"delta_T", b.delta_T}, {"value", b.bound}}},
                        {"diameter", graph_diameter(g)}});
            emit(dec_c.out, rec);
        }
    } catch (const ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
