#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "cubiclab/metric.hpp"
#include "cubiclab/variant.hpp"

namespace cubiclab {

inline constexpr const char* kVersion = CUBICLAB_VERSION;
inline constexpr int kSchemaVersion = 1;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// ── configuration ──

struct ExperimentConfig {
    std::string experiment;
    std::vector<int> sizes;
    int replicas = 1;
    std::uint64_t seed = 0;
    std::string weight_law = "dirac";  // dirac | nu-star | path of a value,probability CSV
    Variant variant = Variant::graph;
    std::string out;
    int pairs = 20;                    // point pairs per sampled object
    long nu_draws = 100000;            // draws behind an empirical nu-star table
    int size_cap = 1000000;            // network size cap
    int series_order = 200;            // order of the series fit for alpha and c
    int bins = 40;                     // histogram bins of the core-size CSV
    double epsilon = 0.5;              // threshold factor of the sup-form check
    bool trivial_networks = false;     // ghp-projection: substitute trivial networks only
    std::map<std::string, std::string> extra;

    void validate() const;  // throws ConfigError
};

// key = value lines, '#' comments, [section] headers ignored, lists as [a, b, c].
std::vector<std::pair<std::string, std::string>> parse_config_pairs(const std::string& text);
ExperimentConfig parse_config(const std::string& text);
std::string read_text_file(const std::string& path);
ExperimentConfig load_config(const std::string& path);

// ── results ──

struct ResultRecord {
    std::string experiment;
    nlohmann::json parameters = nlohmann::json::object();
    std::uint64_t seed = 0;
    nlohmann::json statistics = nlohmann::json::object();
    double wall_time = 0;

    nlohmann::json to_json() const;  // carries schema and code version
};

struct ExperimentOutput {
    std::vector<ResultRecord> records;
    std::string csv;   // summary table for plotting
};

// ── summary statistics ──

struct Summary {
    long count = 0;
    double mean = 0, sd = 0, ci_low = 0, ci_high = 0;  // normal 95% interval of the mean
    double q10 = 0, q25 = 0, median = 0, q75 = 0, q90 = 0, min = 0, max = 0;
};
Summary summarize(std::vector<double> xs);
nlohmann::json to_json(const Summary& s);
double quantile(std::vector<double> xs, double p);  // linear interpolation between order statistics
// Least-squares slope and intercept.
std::pair<double, double> linear_fit(const std::vector<double>& x, const std::vector<double>& y);

// ── experiments ──

// Weight law named by the configuration; nu-star tables are drawn with the config seed.
WeightLaw resolve_weight_law(const ExperimentConfig& cfg);

// Sizes are core sizes q; reports |C^(q)|/q against 1/alpha and the rescaled
// fluctuations (q - alpha |C|)/|C|^(2/3) with a c A(c x) overlay.
ExperimentOutput run_core_size_experiment(const ExperimentConfig& cfg);
// Sizes are n for uniform simple triangulations with n + 2 vertices.
ExperimentOutput run_diameter_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_two_point_experiment(const ExperimentConfig& cfg);
// Sizes are core sizes q.
ExperimentOutput run_coupling_experiment(const ExperimentConfig& cfg);
ExperimentOutput run_ghp_projection_experiment(const ExperimentConfig& cfg);

ExperimentOutput run_experiment(const ExperimentConfig& cfg);
std::vector<std::string> experiment_names();

// Distortion of the projection correspondence, one source row at a time.
double projection_distortion(const SubstitutedGraph& s);

}  // namespace cubiclab
