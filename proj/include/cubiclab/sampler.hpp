#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cubiclab/maps.hpp"
#include "cubiclab/rng.hpp"
#include "cubiclab/variant.hpp"

namespace cubiclab {

// ── uniform triangulations ──

// Log-space branching weights for the root-vertex deletion recursions.
// One instance per thread: the memo tables are not shared.
class TriangulationSampler {
public:
    PolygonTriangulation uniform_polygon(int n, int p, Rng& rng);
    PolygonTriangulation uniform_quasi_simple(int n, int p, Rng& rng);

    // log of the closed forms and the partial sums used by the recursions
    static long double log_simple(int n, int p);  // T(0,2) = 1
    static long double log_quasi(int n, int p);
    long double log_clean_simple(int n, int p);   // sum_m T(n-m, p-1+m)
    long double log_clean_quasi(int n, int p);    // Qc(n,p)
    long double log_chord_pair(int j, int t);     // R(j,t)

    static constexpr int kMaxInner = 200000;

private:
    struct Builder;
    struct Region;
    void fill_simple(Builder& b, Region region, Rng& rng);
    long double log_quasi_sum(int n, int p);   // sum_m Q(n-m, p-1+m)
    long double log_marked_fan(int n, int p);  // sum_{m>=1} m T(n-m, p-1+m)
    struct DiagonalSums {
        struct Diagonal {
            int base = 0;
            std::vector<long double> first, second;
        };
        long double (*term)(int, int);
        std::vector<Diagonal> diags;
        void ensure(int d, int k);
        long double first(int d, int k);
        long double second(int d, int k);
    };
    DiagonalSums simple_diag_{&TriangulationSampler::log_simple, {}};
    DiagonalSums quasi_diag_{&TriangulationSampler::log_quasi, {}};
    const double* scaled_column(int a, int upto);
    std::vector<std::vector<double>> scaled_;
    std::vector<std::vector<long double>> chord_pair_;
};

PolygonTriangulation sample_uniform_polygon(int n, int p, Rng& rng);
PolygonTriangulation sample_uniform_quasi_simple(int n, int p, Rng& rng);

struct BoltzmannPolygon {
    PolygonTriangulation tri;
    double tail_mass = 0.0;  // probability of sizes above the cap under the untruncated law
};
// Size drawn with P(n) ∝ |T_{n,p}| (27/256)^n on n <= n_cap, then uniform.
BoltzmannPolygon sample_boltzmann_polygon(int p, Rng& rng, int n_cap);
// Truncated size law as probabilities P(0..n_cap) (already normalised).
std::vector<double> boltzmann_polygon_size_law(int p, int n_cap, double* tail_mass = nullptr);

// ── cubic networks ──

enum class NetType { trivial, L, S, P, H };

std::string to_string(NetType t);

// Values of the network series at the singular point, obtained by solving the
// system with rho D(rho)^3 = 27/256 and T(27/256) = 5/256.
struct NetworkLaw {
    Variant variant = Variant::graph;
    long double rho = 0, D = 0, L = 0, S = 0, P = 0, H = 0;
    long double E = 0;      // rho D^3
    long double T_at_E = 0; // T(E)
    // core-size law of H-networks: weight |T_{k-1,3}| E^k / T(E), k >= 2
    std::vector<double> core_cdf;
    double core_tail = 0;   // mass above core_cdf.size()+1
    long double leaf_weight() const;   // loop-leaf weight of an L-branch node
    long double branch_ratio() const;  // probability of an internal L-branch node
};
NetworkLaw network_law(Variant v, int core_cap = 200000);

// Decomposition record of a sampled network: a tree of typed nodes.
struct NetNode {
    NetType type = NetType::trivial;
    int size = 0;                 // size units contributed by this node itself
    std::vector<int> children;    // networks substituted below this node
    std::vector<char> shape;      // L: preorder of the branch tree, 1 internal, 0 leaf
    std::shared_ptr<CombinatorialMap> core;  // H: rooted 3-connected cubic map
    std::vector<int> core_edges;  // H: dart of each non-root core edge, aligned with children
    std::vector<char> outer;      // H: 1 if the edge lies on the face right of the root
};

struct NetworkPlan {
    std::vector<NetNode> nodes;   // nodes[0] is the root
    int size = 0;
};

struct CubicNetwork {
    Graph graph;                  // vertices 0 and 1 are the poles
    NetworkPlan plan;
    int size = 0;
    NetType type = NetType::trivial;
};

struct NetworkSample {
    CubicNetwork net;
    int retries = 0;
};

class NetworkSampler {
public:
    explicit NetworkSampler(const NetworkLaw& law);
    // Root type drawn with probability weight/D; conditioned on size <= size_cap by retrying.
    NetworkPlan sample_plan(Rng& rng, int size_cap, int* retries = nullptr);
    NetworkSample sample(Rng& rng, int size_cap);
    const NetworkLaw& law() const { return law_; }
    TriangulationSampler& tri() { return tri_; }

private:
    NetType draw_type(Rng& rng, bool allow_trivial, bool allow_L, bool allow_S);
    int draw_core_size(Rng& rng);
    NetworkLaw law_;
    TriangulationSampler tri_;
};

// Places the network rooted at node `root` of the plan between vertices a and b
// of g (a takes the pole-0 side). Degree-2 joints are suppressed afterwards by
// finalize_joints. Returns the vertices created.
struct PlacementResult {
    std::vector<int> vertices;
};
void place_network(Graph& g, const NetworkPlan& plan, int root, int a, int b, std::vector<char>& is_joint,
                   PlacementResult* out = nullptr);
// Removes joint vertices, returns the old->new vertex map (-1 for removed).
std::vector<int> finalize_joints(Graph& g, const std::vector<char>& is_joint);

CubicNetwork build_network(NetworkPlan plan);

// Pole distance by breadth-first search; throws if the poles are disconnected.
int pole_distance(const CubicNetwork& net);
// Pole distance computed along the plan (weighted core distances for H).
int plan_pole_distance(const NetworkPlan& plan, int node = 0);
// Dominating parameter: trivial 1, L 2, S adds, P adds + 2, H 2 + outer networks.
int chi(const NetworkPlan& plan, int node = 0);

// ── core with substituted networks ──

struct SubstitutedGraph {
    Graph graph;                      // C: core vertices first (0..2q-1)
    CombinatorialMap core_map;        // rooted 3-connected cubic map K
    Graph core;                       // underlying graph of K
    std::vector<int> labels;          // label of each core vertex, 1..2q
    std::vector<std::pair<int, int>> core_edges;  // endpoints in K, one per edge
    std::vector<NetworkPlan> networks;            // aligned with core_edges
    std::vector<int> network_size;
    std::vector<int> network_delta;   // pole distance of each substituted network
    std::vector<std::vector<int>> network_vertices;  // vertices of C inside each network
    int retries = 0;
};

// Uniform 3-connected cubic core of size q (dual of a uniform simple
// triangulation with q+2 vertices, uniform labels) with i.i.d. critical
// Boltzmann networks on its 3q edges.
SubstitutedGraph build_core_substituted(int q, Rng& rng, NetworkSampler& sampler, int size_cap = 1000000,
                                        bool trivial_networks = false);

}  // namespace cubiclab
