#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "cubiclab/maps.hpp"

namespace cubiclab {

struct DecompError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ── decomposition trees ──

enum class NodeLabel { L, R, M, T };
std::string to_string(NodeLabel l);

struct TreeNode {
    NodeLabel label = NodeLabel::T;
    std::vector<int> vertices;                     // L: the separating vertex, M: the bond pair, T: the component, R: none
    std::vector<std::pair<int, int>> component;    // M, T: component graph, substituted edges included
    std::vector<int> owned_edges;                  // edges of g accounted to this node
    std::vector<int> tree_edges;                   // incident tree edges
};

struct TreeEdge {
    int a = 0, b = 0;          // node ids
    std::vector<int> legs;     // edges of g accounted to this tree edge
    int other(int node) const { return node == a ? b : a; }
};

struct DecompositionTree {
    int n = 0;                                     // vertices of g
    std::vector<std::pair<int, int>> graph_edges;  // edges of g by id
    std::vector<TreeNode> nodes;
    std::vector<TreeEdge> edges;
    std::vector<int> node_of_vertex;               // L, M or T node holding each vertex

    int degree(int node) const { return static_cast<int>(nodes[node].tree_edges.size()); }
    int diameter() const;
};

// Edges of a multigraph by id; a loop appears twice in adj and once here.
std::vector<std::pair<int, int>> edge_list(const Graph& g);

// Cut vertices give L-nodes joined along bridges, classes of 2-edge cuts give
// rings (R), bonds of three edges give M-nodes and the remaining 3-edge-connected
// pieces give T-nodes. A ring of two members is smoothed into a single tree edge.
DecompositionTree decomposition_tree(const Graph& g);

// Graph rebuilt from the edges owned by nodes and tree edges.
Graph reassemble(const DecompositionTree& t);
// Throws DecompError unless L/M/T vertex sets partition V(g), every edge of g
// is accounted once and the node degrees match their labels.
void check_tree(const DecompositionTree& t);

// ── 3-connected core ──

struct CoreResult {
    bool found = false;
    int node = -1;
    std::vector<int> vertices;    // sorted vertex ids of g
    Graph core;                   // on indices into `vertices`
    int size = 0;                 // vertices / 2
};
// Largest T-component, ties broken by the smaller minimal label (labels[v], default v + 1).
CoreResult three_connected_core(const DecompositionTree& t, const std::vector<int>& labels = {});

// ── diameter bound ──

// Pole distance of the network on the far side of tree edge e seen from node `from`.
int attached_delta(const Graph& g, const DecompositionTree& t, int e, int from);

struct DiameterBound {
    int tree_diameter = 0;
    int xi_R = 0;      // largest R-node degree
    int delta_R = 0;   // largest pole distance of an R-attached network
    int xi_T = 0;      // largest diameter of a 3-connected component
    int delta_T = 0;   // largest pole distance of a T-attached network, unsubstituted edges count 1
    long bound = 0;    // (1 + tree_diameter)(2 + xi_R delta_R + xi_T delta_T)
};
DiameterBound diameter_bound(const Graph& g, const DecompositionTree& t);

}  // namespace cubiclab
