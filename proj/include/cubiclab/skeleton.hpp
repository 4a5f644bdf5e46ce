#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <vector>

#include "cubiclab/maps.hpp"

namespace cubiclab {

struct SkeletonError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ── cylinders, balls and hulls ──

// Triangulation of the cylinder: the bottom face lies right of map.root, the
// top face right of `top`. Every other face is a triangle.
struct Cylinder {
    CombinatorialMap map;
    int top = -1;
    int p = 0;  // bottom cycle length
    int q = 0;  // top cycle length
    int r = 0;  // height
};

// Hop distance of every vertex (vertex_of ids) to the vertices of the face right of m.root.
std::vector<int> distances_from_root_face(const CombinatorialMap& m);

// Faces incident to a vertex at distance < j from the root face (indexed by face_of ids).
std::vector<char> ball_faces(const CombinatorialMap& m, const std::vector<int>& dist, int j);

// Faces of the hull of radius j: the ball plus every component of its complement
// that does not contain `outside_face`. outside_face must not lie in the ball.
std::vector<char> hull_faces(const CombinatorialMap& m, const std::vector<int>& dist, int j, int outside_face);

// Submap spanned by the faces in `keep`; the remaining faces must form a single
// disk, which becomes one face lying right of the returned dart.
struct Restriction {
    CombinatorialMap map;
    int outer = -1;                // new dart with the merged face on its right
    std::vector<int> old_of_new;   // original dart of each new dart
};
Restriction restrict_to_faces(const CombinatorialMap& m, const std::vector<char>& keep);

// Hull of a pointed quasi-simple triangulation of the p-gon. When the mark is
// within distance r of the root vertex the whole triangulation is returned.
struct HullResult {
    bool whole = false;
    Cylinder cylinder;  // valid when !whole
};
HullResult hull(const PolygonTriangulation& q, int r);

// Hull of radius j inside a cylinder, itself a cylinder of height j (1 <= j <= r).
Cylinder cylinder_hull(const Cylinder& c, int j);

// Throws SkeletonError naming the first violated condition: triangular inner
// faces, disjoint simple boundary cycles, top vertices at distance r with a
// downward triangle on every top edge, and separating 1- and 2-cycles.
void validate_cylinder(const Cylinder& c);

// Rooted equality including the top face.
bool same_cylinder(const Cylinder& a, const Cylinder& b);

// ── skeleton codec ──

// Forest: children[h][i] is the number of children of the i-th node at height h
// (h = 0 top, h = r bottom), nodes of each height listed tree by tree in plane
// order. Node i at height h is the i-th edge of the cycle at height r-h.
struct SkeletonCode {
    int p = 0, q = 0, r = 0;
    std::vector<std::vector<int>> children;    // heights 0..r-1
    int marked = 0;                            // index of the root edge among height-r nodes
    std::vector<std::vector<PolygonTriangulation>> slots;  // [h][i], a (k+2)-gon in canonical form

    bool operator==(const SkeletonCode& o) const;
    int forest_size() const;                   // all forest vertices, heights 0..r
    long inner_vertices() const;               // sum of slot inner vertex counts
    std::vector<std::string> parenthesis_words() const;  // one word per tree
};

// Throws SkeletonError naming the violated admissibility item.
void check_admissible(const SkeletonCode& code);

SkeletonCode skeleton_decompose(const Cylinder& c);
Cylinder skeleton_reconstruct(const SkeletonCode& code);

// Limit probability of a hull: kappa(q)/kappa(p) prod theta(k_v) rho^{Inn(s_v)} / Z(k_v+2), rho = 27/256,
// Z(2) = 1 for the edge slot.
mpq_class hull_probability_exact(const SkeletonCode& code);
double hull_probability(const Cylinder& c);  // underflows to 0 for large hulls
// (rho/beta)^{p - q - sum (k_v - 1)} with beta = 9/64; equals 1 on every admissible code.
mpq_class scaling_factor(const SkeletonCode& code);

// ── downward paths ──

// Dual path from a downward triangle at height j: turn counterclockwise around
// the apex until an edge of the cycle below is crossed, repeat down to the
// bottom face. faces[0] is the start; crossings counts dual edges.
struct DownwardPath {
    std::vector<int> faces;  // face_of ids, ending with the bottom face
    int crossings = 0;
};
// start_dart: dart of the cycle at height j whose left face is the downward triangle.
DownwardPath downward_path(const Cylinder& c, int start_dart);
// Darts of the cycle at height j oriented with the hull on their left, in order.
std::vector<int> layer_darts(const Cylinder& c, int j);

// ── simple components of quasi-simple triangulations of the 1-gon ──

enum class ComponentFamily { marked_vertex, marked_edge, marked_edge_at_root, marked_edge_not_root, none };
std::string to_string(ComponentFamily f);

struct SimpleComponent {
    CombinatorialMap map;        // simple triangulation of the sphere
    ComponentFamily family = ComponentFamily::none;
    int size = 0;                // vertices - 2
};

struct ComponentSplit {
    std::vector<SimpleComponent> components;  // outermost first
    int atoms = 0;                             // single triangles next to a loop
    bool mark_in_atom = false;                 // innermost piece is a triangle with the mark as a leaf
    int largest = -1;                          // index into components, first of maximal size
    int remainder = 0;                         // n - size of the largest (n when none)
};
ComponentSplit split_simple_components(const PolygonTriangulation& q);

}  // namespace cubiclab
