#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubiclab/maps.hpp"
#include "cubiclab/sampler.hpp"

namespace cubiclab {

class Rng;

struct MetricError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ── metric graphs ──

struct MetricGraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;
    std::vector<double> length;               // aligned with edges, > 0
    std::vector<std::vector<int>> incident;   // per vertex: edge indices (a loop appears twice)

    MetricGraph() = default;
    MetricGraph(int vertices, std::vector<std::pair<int, int>> edge_list, std::vector<double> lengths);
    static MetricGraph unit(const Graph& g);
    int other(int e, int v) const { return edges[e].first == v ? edges[e].second : edges[e].first; }
    double max_length() const;
    double min_length() const;
};

// ── weight laws ──

enum class WeightKind { dirac_one, nu_star_empirical, custom };

struct WeightLaw {
    WeightKind kind = WeightKind::dirac_one;
    std::vector<double> values;  // increasing
    std::vector<double> probs;   // sums to 1
    double eta0 = 1.0;           // smallest value in the support
    double tail_A = 0, tail_lambda = 0;  // P(X >= x) <= A exp(-lambda x); lambda 0 when unknown
    std::uint64_t seed = 0;      // seed of the empirical table
    long draws = 0;

    double sample(Rng& rng) const;
    double mean() const;
    std::string to_csv() const;                   // "value,probability" lines with a header
    static WeightLaw from_csv(const std::string& text, WeightKind kind = WeightKind::custom);
};

WeightLaw dirac_one();
// Pole distances of `draws` critical Boltzmann networks of size at most size_cap.
WeightLaw nu_star_empirical(NetworkSampler& sampler, long draws, std::uint64_t seed, int size_cap = 100000);
// Least-squares fit of log P(X >= x) over the upper half of the support.
void fit_exponential_tail(WeightLaw& law);

MetricGraph with_iid_lengths(const Graph& g, const WeightLaw& law, Rng& rng);

// ── first-passage distances ──

// Dijkstra from one source; unreachable vertices get +infinity.
std::vector<double> fpp_distances(const MetricGraph& mg, int source);
double fpp_distance(const MetricGraph& mg, int u, int v);  // throws MetricError when disconnected
// Exhaustive search over simple paths, for graphs of at most 12 vertices.
double fpp_distance_brute_force(const MetricGraph& mg, int u, int v);
// Lexicographically smallest vertex sequence among the geodesics from u to v.
std::vector<int> fpp_geodesic(const MetricGraph& mg, int u, int v);
// Distances from each source; rows are computed in parallel.
std::vector<std::vector<double>> fpp_distance_rows(const MetricGraph& mg, const std::vector<int>& sources);
std::vector<std::vector<double>> fpp_distance_rows_serial(const MetricGraph& mg, const std::vector<int>& sources);

MetricGraph truncate(const MetricGraph& mg, double k);

// ── length profiles and the coupling ──

struct LengthProfile {
    std::vector<long> counts;  // counts[i-1] = N_i
    long total() const;
    long at(int i) const { return i >= 1 && i <= static_cast<int>(counts.size()) ? counts[i - 1] : 0; }
    long at_least(int i) const;
    bool operator==(const LengthProfile& o) const;
};

LengthProfile mult_profile(const std::vector<int>& delta);

// For i = 1, 2, ... the first min(hat_i, tilde_i) unused indices take value i in
// both sequences; the remaining indices are then filled in each sequence by
// increasing value over increasing index.
std::pair<std::vector<int>, std::vector<int>> canonical_rearrangement(const LengthProfile& hat,
                                                                      const LengthProfile& tilde);

struct CoupledLengths {
    MetricGraph hat;                  // i.i.d. nu-star lengths
    MetricGraph tilde;                // lengths inherited from the substituted networks
    LengthProfile hat_profile, tilde_profile;
    std::vector<int> order;           // random ordering of the core edges
    int disagreements = 0;            // edges with different lengths
};

// Core K given by its edge list; tilde_delta are the substitution lengths of the edges.
CoupledLengths coupled_edge_lengths(int vertices, const std::vector<std::pair<int, int>>& core_edges,
                                    const std::vector<int>& tilde_delta, const WeightLaw& nu_star, Rng& rng);
CoupledLengths coupled_edge_lengths(const SubstitutedGraph& s, const WeightLaw& nu_star, Rng& rng);

// For i <= a log q: min(hat_i, tilde_i) >= q^{3/4} and |hat_i - tilde_i| <= q^{2/3};
// for i >= A log q both counts vanish.
bool coupling_event_holds(const LengthProfile& hat, const LengthProfile& tilde, int q, double a, double A);

// ── core distances induced by substitution ──

// Core edge e carries the pole distance of its network. With check_pairs > 0,
// that many random core pairs are compared with breadth-first distances in C.
MetricGraph induced_core_distance(const SubstitutedGraph& s, int check_pairs = 0, Rng* rng = nullptr);

// ── Gromov-Hausdorff(-Prokhorov) estimators ──

using DistanceMatrix = std::vector<std::vector<double>>;
using Correspondence = std::vector<std::pair<int, int>>;

// sup over pairs of related pairs of |dX - dY|; rows of the outer loop in parallel.
double gh_distortion(const Correspondence& R, const DistanceMatrix& dX, const DistanceMatrix& dY);
double gh_distortion_serial(const Correspondence& R, const DistanceMatrix& dX, const DistanceMatrix& dY);

struct CouplingMass {
    int x = 0, y = 0;
    double mass = 0;
};
// Smallest eps with dis(R) <= 2 eps and nu(R) >= 1 - eps for the supplied pair.
double ghp_estimate(const Correspondence& R, const std::vector<CouplingMass>& nu, const DistanceMatrix& dX,
                    const DistanceMatrix& dY);

// Every vertex of C goes to the first pole of its network; core vertices to themselves.
Correspondence projection_correspondence(const SubstitutedGraph& s);
// Largest diameter of a substituted network, poles included.
int max_network_diameter(const SubstitutedGraph& s);

// ── vertex-face coupling ──

struct VertexFace {
    int vertex = 0;    // vertex_of id
    int face = 0;      // face_of id
    int dart = 0;      // oriented edge drawn, tail = proposed vertex
    bool kept = true;  // proposed vertex accepted
    bool incident = true;
};
// Uniform edge with its orientation, uniform side face, then a maximal coupling
// of the tail law with the uniform law on vertices.
VertexFace vertex_face_coupling(const CombinatorialMap& t, const std::vector<char>& out, Rng& rng);

}  // namespace cubiclab
