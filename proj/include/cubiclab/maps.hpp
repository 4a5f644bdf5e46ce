#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cubiclab {

class Rng;

struct MapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Rooted planar map on darts 0..D-1. alpha is the twin involution, sigma the
// counterclockwise rotation around vertices. Faces are orbits of
// phi = sigma∘alpha and lie on the right of their darts.
struct CombinatorialMap {
    std::vector<int> alpha;
    std::vector<int> sigma;
    int root = 0;

    int darts() const { return static_cast<int>(alpha.size()); }
    int edges() const { return darts() / 2; }
    int phi(int d) const { return sigma[alpha[d]]; }

    // Orbit labelling: ids are assigned in order of the smallest dart of each orbit.
    std::vector<int> vertex_of() const;
    std::vector<int> face_of() const;
    int num_vertices() const;
    int num_faces() const;

    bool operator==(const CombinatorialMap& o) const {
        return root == o.root && alpha == o.alpha && sigma == o.sigma;
    }
};

// Throws MapError unless alpha is a fixed-point-free involution, sigma is a
// permutation, the map is connected, root exists and V - E + F = 2.
void validate(const CombinatorialMap& m);

std::string to_text(const CombinatorialMap& m);
CombinatorialMap from_text(const std::string& text);

// Inverse permutation helper.
std::vector<int> inverse_permutation(const std::vector<int>& p);

// Sequence of darts of the orbit of d under perm.
std::vector<int> orbit(const std::vector<int>& perm, int d);

// Rooted-map invariant: darts relabelled in breadth-first order from the root.
// Two rooted maps are isomorphic iff their codes are equal.
std::vector<int> canonical_code(const CombinatorialMap& m);

// Same map with darts relabelled in canonical breadth-first order.
CombinatorialMap canonical_form(const CombinatorialMap& m);

CombinatorialMap reroot(const CombinatorialMap& m, int new_root);
// Orientation reversal: sigma replaced by its inverse, root dart kept.
CombinatorialMap mirror(const CombinatorialMap& m);

// Dual map: dual dart d runs from the face on the right of d to the face on
// its left, so it crosses d counterclockwise around the tail of d.
CombinatorialMap dual(const CombinatorialMap& m);

// Degree multisets (sorted) for the duality checks.
std::vector<int> vertex_degrees(const CombinatorialMap& m);
std::vector<int> face_degrees(const CombinatorialMap& m);

bool has_loop(const CombinatorialMap& m);
bool has_multi_edge(const CombinatorialMap& m);
bool is_simple(const CombinatorialMap& m);
bool is_triangulation(const CombinatorialMap& m);

// ── polygon triangulations ──

struct PolygonTriangulation {
    CombinatorialMap map;
    int p = 0;
    int n = 0;
    int marked = -1;  // vertex id under map.vertex_of(), or -1

    std::vector<int> boundary_darts() const;  // root face, phi order from root
    std::vector<int> boundary_vertices() const;
};

// Checks the root face is a simple p-cycle (p distinct vertices when p >= 2),
// all other faces are triangles and the inner vertex count equals n.
void validate_polygon(const PolygonTriangulation& t);

// True iff every 1-cycle and 2-cycle separates the root face from the mark.
// Throws MapError if the mark is missing or lies on the boundary.
bool is_quasi_simple(const PolygonTriangulation& t);

// Ψ: quasi-simple triangulation of the 1-gon -> rooted triangulation of the
// sphere; the marked vertex is carried along.
PolygonTriangulation psi(const PolygonTriangulation& q);
PolygonTriangulation psi_inverse(const PolygonTriangulation& t);

// ── graphs ──

// Undirected multigraph; a loop at v appears twice in adj[v].
struct Graph {
    std::vector<std::vector<int>> adj;

    Graph() = default;
    explicit Graph(int n) : adj(n) {}
    int n() const { return static_cast<int>(adj.size()); }
    int add_vertex() {
        adj.emplace_back();
        return n() - 1;
    }
    void add_edge(int u, int v) {
        adj[u].push_back(v);
        adj[v].push_back(u);
    }
    std::size_t edge_count() const;
    bool is_cubic() const;
    bool is_simple() const;
    bool connected() const;
};

struct LabeledCubicGraph {
    Graph graph;
    std::vector<int> labels;  // vertex labels 1..2n
    int root_tail = 0;
    int root_head = 0;
};

Graph underlying_graph(const CombinatorialMap& m);

// Simple, >= 4 vertices, no vertex cut of size <= 2. Exhaustive pair deletion
// up to 64 vertices; beyond that (cubic input only) edge cuts of size <= 2 are
// searched, which is equivalent for cubic graphs.
bool is_three_connected(const Graph& g);
bool is_three_connected_exhaustive(const Graph& g);

// Planar embedding of a connected planar graph as a map rooted at the dart
// root_tail -> root_head. Returns nullopt if the graph is not planar.
std::optional<CombinatorialMap> planar_embedding(const Graph& g, int root_tail, int root_head,
                                                 std::vector<int>* dart_tail = nullptr);

// Choice between an embedding and its mirror: keep the one where the label of
// the far neighbour of the root vertex in the root face is smaller than the
// one in the face on the left of the root edge.
struct LabeledMap {
    CombinatorialMap map;     // darts in canonical breadth-first order
    std::vector<int> labels;  // label of each vertex id of map
};
LabeledMap canonical_embedding(const LabeledCubicGraph& k);
LabeledMap canonical_embedding(const CombinatorialMap& embedded,
                               const std::vector<int>& label_of_vertex);

// ── 3-orientations ──

// out[d] == 1 iff the edge of d is oriented away from the tail of d.
// Inner vertices get out-degree 3, root-face vertices out-degree 1.
std::vector<char> compute_3_orientation(const CombinatorialMap& t);
std::vector<int> out_degrees(const CombinatorialMap& t, const std::vector<char>& out);

// Dart-level helpers on a map with known vertex ids.
struct DartIndex {
    std::vector<int> tail;
    std::vector<int> face;
    int nv = 0;
    int nf = 0;
    explicit DartIndex(const CombinatorialMap& m);
    int head(const CombinatorialMap& m, int d) const { return tail[m.alpha[d]]; }
};

// Breadth-first hop distances from a set of sources in a graph.
std::vector<int> bfs_distances(const Graph& g, const std::vector<int>& sources);
int graph_diameter(const Graph& g);

}  // namespace cubiclab
