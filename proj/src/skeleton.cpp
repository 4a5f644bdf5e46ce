#include "cubiclab/skeleton.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <set>

#include "cubiclab/counts.hpp"

namespace cubiclab {

namespace {

std::vector<int> face_orbit(const CombinatorialMap& m, int d) {
    std::vector<int> out;
    int e = d;
    do {
        out.push_back(e);
        e = m.phi(e);
    } while (e != d);
    return out;
}

// breadth-first dart labels from the root, the same order canonical_code uses
std::vector<int> canonical_labels(const CombinatorialMap& m) {
    std::vector<int> lab(m.darts(), -1), order{m.root};
    lab[m.root] = 0;
    for (std::size_t i = 0; i < order.size(); ++i)
        for (int e : {m.sigma[order[i]], m.alpha[order[i]]})
            if (lab[e] < 0) {
                lab[e] = static_cast<int>(order.size());
                order.push_back(e);
            }
    return lab;
}

// Components of the faces selected by `inside` under adjacency across edges whose
// two sides are both selected and which are not cut. Returns a component id per face, -1 outside.
std::vector<int> face_components(const CombinatorialMap& m, const DartIndex& ix, const std::vector<char>& inside,
                                 const std::vector<char>& cut_dart) {
    std::vector<std::vector<int>> darts_of(ix.nf);
    for (int d = 0; d < m.darts(); ++d) darts_of[ix.face[d]].push_back(d);
    std::vector<int> comp(ix.nf, -1);
    int next = 0;
    for (int f = 0; f < ix.nf; ++f) {
        if (!inside[f] || comp[f] >= 0) continue;
        std::vector<int> stack{f};
        comp[f] = next;
        while (!stack.empty()) {
            int g = stack.back();
            stack.pop_back();
            for (int d : darts_of[g]) {
                if (!cut_dart.empty() && cut_dart[d]) continue;
                int h = ix.face[m.alpha[d]];
                if (inside[h] && comp[h] < 0) {
                    comp[h] = next;
                    stack.push_back(h);
                }
            }
        }
        ++next;
    }
    return comp;
}

// Layer structure of a cylinder: level of every face (0 bottom, j for faces of
// the hull of radius j outside the hull of radius j-1, r+1 top) and the cycles.
struct Layers {
    DartIndex ix;
    int bottom = 0, top = 0, r = 0;
    std::vector<int> level;                // per face
    std::vector<std::vector<int>> cycle;   // [j] darts with the hull on their left, in order
    std::vector<int> layer_of;             // per dart: j if the dart is in cycle j, else -1

    Layers(const Cylinder& c) : ix(c.map), r(c.r) {
        const auto& m = c.map;
        bottom = ix.face[m.root];
        top = ix.face[c.top];
        auto dist = distances_from_root_face(m);
        level.assign(ix.nf, -1);
        level[bottom] = 0;
        level[top] = r + 1;
        for (int j = 1; j <= r; ++j) {
            auto in = hull_faces(m, dist, j, top);
            for (int f = 0; f < ix.nf; ++f)
                if (in[f] && level[f] < 0) level[f] = j;
        }
        for (int f = 0; f < ix.nf; ++f)
            if (level[f] < 0) throw SkeletonError("face outside every hull below the top");
        layer_of.assign(m.darts(), -1);
        cycle.assign(r + 1, {});
        for (int j = 0; j <= r; ++j) {
            int count = 0, first = -1;
            for (int d = 0; d < m.darts(); ++d)
                if (level[ix.face[d]] > j && level[ix.face[m.alpha[d]]] <= j) {
                    ++count;
                    if (first < 0) first = d;
                }
            if (first < 0) throw SkeletonError("empty cycle at height " + std::to_string(j));
            int d = first;
            do {
                cycle[j].push_back(d);
                if (static_cast<int>(cycle[j].size()) > count)
                    throw SkeletonError("cycle at height " + std::to_string(j) + " is not a single cycle");
                int e = m.sigma[m.alpha[d]];
                while (level[ix.face[m.alpha[e]]] > j) e = m.sigma[e];
                d = e;
            } while (d != first);
            if (static_cast<int>(cycle[j].size()) != count)
                throw SkeletonError("cycle at height " + std::to_string(j) + " is not a single cycle");
            std::set<int> verts;
            for (int e : cycle[j]) {
                verts.insert(ix.tail[e]);
                layer_of[e] = j;
            }
            if (cycle[j].size() > 1 && verts.size() != cycle[j].size())
                throw SkeletonError("cycle at height " + std::to_string(j) + " is not simple");
        }
    }
};

CombinatorialMap edge_map() {
    CombinatorialMap e;
    e.alpha = {1, 0};
    e.sigma = {0, 1};
    e.root = 0;
    return e;
}

mpq_class rational_power(const mpq_class& base, long e) {
    mpz_class num = base.get_num(), den = base.get_den();
    mpz_class pn, pd;
    unsigned long a = static_cast<unsigned long>(e < 0 ? -e : e);
    mpz_pow_ui(pn.get_mpz_t(), num.get_mpz_t(), a);
    mpz_pow_ui(pd.get_mpz_t(), den.get_mpz_t(), a);
    mpq_class out = e < 0 ? mpq_class(pd, pn) : mpq_class(pn, pd);
    out.canonicalize();
    return out;
}

}  // namespace

// ── balls and hulls ──

std::vector<int> distances_from_root_face(const CombinatorialMap& m) {
    DartIndex ix(m);
    std::vector<std::vector<int>> out(ix.nv);
    for (int d = 0; d < m.darts(); ++d) out[ix.tail[d]].push_back(ix.tail[m.alpha[d]]);
    std::vector<int> dist(ix.nv, -1);
    std::deque<int> queue;
    for (int d : face_orbit(m, m.root))
        if (dist[ix.tail[d]] < 0) {
            dist[ix.tail[d]] = 0;
            queue.push_back(ix.tail[d]);
        }
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : out[v])
            if (dist[w] < 0) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
    }
    return dist;
}

std::vector<char> ball_faces(const CombinatorialMap& m, const std::vector<int>& dist, int j) {
    DartIndex ix(m);
    std::vector<char> in(ix.nf, 0);
    for (int d = 0; d < m.darts(); ++d)
        if (dist[ix.tail[d]] < j) in[ix.face[d]] = 1;
    return in;
}

std::vector<char> hull_faces(const CombinatorialMap& m, const std::vector<int>& dist, int j, int outside_face) {
    DartIndex ix(m);
    auto ball = ball_faces(m, dist, j);
    if (ball[outside_face]) throw SkeletonError("the outside face lies in the ball");
    std::vector<char> rest(ix.nf);
    for (int f = 0; f < ix.nf; ++f) rest[f] = !ball[f];
    auto comp = face_components(m, ix, rest, {});
    std::vector<char> keep(ix.nf);
    for (int f = 0; f < ix.nf; ++f) keep[f] = comp[f] != comp[outside_face];
    return keep;
}

Restriction restrict_to_faces(const CombinatorialMap& m, const std::vector<char>& keep) {
    DartIndex ix(m);
    const int D = m.darts();
    std::vector<int> new_of(D, -1);
    Restriction out;
    for (int d = 0; d < D; ++d)
        if (keep[ix.face[d]] || keep[ix.face[m.alpha[d]]]) {
            new_of[d] = static_cast<int>(out.old_of_new.size());
            out.old_of_new.push_back(d);
        }
    const int N = static_cast<int>(out.old_of_new.size());
    out.map.alpha.resize(N);
    out.map.sigma.resize(N);
    for (int i = 0; i < N; ++i) {
        int d = out.old_of_new[i];
        out.map.alpha[i] = new_of[m.alpha[d]];
        int e = m.sigma[d];
        while (new_of[e] < 0) e = m.sigma[e];
        out.map.sigma[i] = new_of[e];
        if (out.outer < 0 && !keep[ix.face[d]]) out.outer = i;
    }
    out.map.root = new_of[m.root] >= 0 ? new_of[m.root] : 0;
    if (out.outer >= 0) {
        auto merged = face_orbit(out.map, out.outer);
        for (int i = 0; i < N; ++i) {
            bool outer_side = !keep[ix.face[out.old_of_new[i]]];
            bool in_orbit = std::find(merged.begin(), merged.end(), i) != merged.end();
            if (outer_side != in_orbit) throw SkeletonError("removed faces do not form a single disk");
        }
    }
    return out;
}

HullResult hull(const PolygonTriangulation& q, int r) {
    if (r < 1) throw SkeletonError("hull radius must be at least 1");
    if (q.marked < 0) throw SkeletonError("hull needs a marked vertex");
    const auto& m = q.map;
    DartIndex ix(m);
    auto dist = distances_from_root_face(m);
    HullResult out;
    if (dist[q.marked] <= r) {
        out.whole = true;
        return out;
    }
    int outside = -1;
    for (int d = 0; d < m.darts() && outside < 0; ++d)
        if (ix.tail[d] == q.marked) outside = ix.face[d];
    auto keep = hull_faces(m, dist, r, outside);
    auto res = restrict_to_faces(m, keep);
    auto& c = out.cylinder;
    c.map = std::move(res.map);
    c.top = res.outer;
    c.p = q.p;
    c.q = static_cast<int>(face_orbit(c.map, c.top).size());
    c.r = r;
    return out;
}

Cylinder cylinder_hull(const Cylinder& c, int j) {
    if (j < 1 || j > c.r) throw SkeletonError("hull radius outside [1, r]");
    if (j == c.r) return c;
    DartIndex ix(c.map);
    auto dist = distances_from_root_face(c.map);
    auto keep = hull_faces(c.map, dist, j, ix.face[c.top]);
    auto res = restrict_to_faces(c.map, keep);
    Cylinder out;
    out.map = std::move(res.map);
    out.top = res.outer;
    out.p = c.p;
    out.q = static_cast<int>(face_orbit(out.map, out.top).size());
    out.r = j;
    return out;
}

void validate_cylinder(const Cylinder& c) {
    const auto& m = c.map;
    try {
        validate(m);
    } catch (const MapError& e) {
        throw SkeletonError(std::string("not a planar map: ") + e.what());
    }
    if (c.r < 1) throw SkeletonError("height must be at least 1");
    if (c.top < 0 || c.top >= m.darts()) throw SkeletonError("top dart missing");
    DartIndex ix(m);
    const int bottom = ix.face[m.root], top = ix.face[c.top];
    if (bottom == top) throw SkeletonError("item 1: bottom and top faces coincide");
    std::vector<int> deg(ix.nf, 0);
    for (int f : ix.face) ++deg[f];
    for (int f = 0; f < ix.nf; ++f)
        if (f != bottom && f != top && deg[f] != 3) throw SkeletonError("item 1: inner face is not a triangle");
    auto bd = face_orbit(m, m.root), td = face_orbit(m, c.top);
    if (static_cast<int>(bd.size()) != c.p) throw SkeletonError("item 2: bottom length differs from p");
    if (static_cast<int>(td.size()) != c.q) throw SkeletonError("item 2: top length differs from q");
    std::set<int> bv, tv;
    for (int d : bd) bv.insert(ix.tail[d]);
    for (int d : td) tv.insert(ix.tail[d]);
    if (bd.size() > 1 && bv.size() != bd.size()) throw SkeletonError("item 2: bottom cycle is not simple");
    if (td.size() > 1 && tv.size() != td.size()) throw SkeletonError("item 2: top cycle is not simple");
    for (int v : tv)
        if (bv.count(v)) throw SkeletonError("item 2: bottom and top cycles share a vertex");
    auto dist = distances_from_root_face(m);
    for (int d : td) {
        if (dist[ix.tail[d]] != c.r) throw SkeletonError("item 3: top vertex not at distance r");
        int tri = m.alpha[d];
        int apex = ix.tail[m.phi(m.phi(tri))];
        if (dist[apex] != c.r - 1) throw SkeletonError("item 3: top edge without a downward triangle");
    }
    std::map<std::pair<int, int>, std::vector<int>> by_ends;
    for (int d = 0; d < m.darts(); ++d) {
        if (d > m.alpha[d]) continue;
        int a = ix.tail[d], b = ix.tail[m.alpha[d]];
        by_ends[{std::min(a, b), std::max(a, b)}].push_back(d);
    }
    std::vector<char> all(ix.nf, 1);
    auto separates = [&](const std::vector<int>& edges) {
        std::vector<char> cut(m.darts(), 0);
        for (int d : edges) cut[d] = cut[m.alpha[d]] = 1;
        auto comp = face_components(m, ix, all, cut);
        return comp[bottom] != comp[top];
    };
    for (auto& [ends, edges] : by_ends) {
        if (ends.first == ends.second)
            for (int d : edges)
                if (!separates({d})) throw SkeletonError("item 4: a loop does not separate bottom from top");
        if (ends.first != ends.second)
            for (std::size_t a = 0; a < edges.size(); ++a)
                for (std::size_t b = a + 1; b < edges.size(); ++b)
                    if (!separates({edges[a], edges[b]}))
                        throw SkeletonError("item 4: a 2-cycle does not separate bottom from top");
    }
}

bool same_cylinder(const Cylinder& a, const Cylinder& b) {
    if (a.p != b.p || a.q != b.q || a.r != b.r) return false;
    if (canonical_code(a.map) != canonical_code(b.map)) return false;
    auto la = canonical_labels(a.map), lb = canonical_labels(b.map);
    int ta = a.map.darts(), tb = b.map.darts();
    for (int d : face_orbit(a.map, a.top)) ta = std::min(ta, la[d]);
    for (int d : face_orbit(b.map, b.top)) tb = std::min(tb, lb[d]);
    return ta == tb;
}

// ── skeleton codec ──

bool SkeletonCode::operator==(const SkeletonCode& o) const {
    if (p != o.p || q != o.q || r != o.r || marked != o.marked || children != o.children) return false;
    if (slots.size() != o.slots.size()) return false;
    for (std::size_t h = 0; h < slots.size(); ++h) {
        if (slots[h].size() != o.slots[h].size()) return false;
        for (std::size_t i = 0; i < slots[h].size(); ++i)
            if (!(slots[h][i].map == o.slots[h][i].map) || slots[h][i].p != o.slots[h][i].p ||
                slots[h][i].n != o.slots[h][i].n)
                return false;
    }
    return true;
}

int SkeletonCode::forest_size() const {
    int total = p;
    for (auto& lvl : children) total += static_cast<int>(lvl.size());
    return total;
}

long SkeletonCode::inner_vertices() const {
    long total = 0;
    for (auto& lvl : slots)
        for (auto& s : lvl) total += s.n;
    return total;
}

std::vector<std::string> SkeletonCode::parenthesis_words() const {
    // first child index of every node, per height
    std::vector<std::vector<int>> first(r);
    for (int h = 0; h < r; ++h) {
        first[h].resize(children[h].size());
        int c = 0;
        for (std::size_t i = 0; i < children[h].size(); ++i) {
            first[h][i] = c;
            c += children[h][i];
        }
    }
    std::vector<std::string> words;
    for (int t = 0; t < q; ++t) {
        std::string w;
        std::vector<std::pair<int, int>> stack;  // (height, index), negative height closes
        stack.push_back({0, t});
        while (!stack.empty()) {
            auto [h, i] = stack.back();
            stack.pop_back();
            if (h < 0) {
                w += ')';
                continue;
            }
            w += '(';
            stack.push_back({-1, 0});
            if (h < r)
                for (int c = children[h][i] - 1; c >= 0; --c) stack.push_back({h + 1, first[h][i] + c});
        }
        words.push_back(w);
    }
    return words;
}

void check_admissible(const SkeletonCode& code) {
    if (code.r < 1) throw SkeletonError("admissibility item 2: height must be at least 1");
    if (code.q < 1 || static_cast<int>(code.children.size()) != code.r ||
        static_cast<int>(code.children[0].size()) != code.q)
        throw SkeletonError("admissibility item 1: the forest must consist of q rooted plane trees");
    for (int h = 0; h < code.r; ++h) {
        long sum = 0;
        for (int k : code.children[h]) {
            if (k < 0) throw SkeletonError("admissibility item 1: negative child count");
            sum += k;
        }
        int below = h + 1 < code.r ? static_cast<int>(code.children[h + 1].size()) : code.p;
        if (sum != below) {
            if (h + 1 == code.r)
                throw SkeletonError("admissibility item 3: generation r does not have p vertices");
            throw SkeletonError("admissibility item 1: child counts do not match the next generation");
        }
    }
    if (code.p < 1) throw SkeletonError("admissibility item 2: no vertex at height r");
    if (code.marked < 0 || code.marked >= code.p)
        throw SkeletonError("admissibility item 4: the distinguished vertex is not at height r");
    // descendants of the first tree at height r
    long span = 1;
    for (int h = 0; h < code.r; ++h) {
        long next = 0;
        for (long i = 0; i < span; ++i) next += code.children[h][i];
        span = next;
    }
    if (code.marked >= span) throw SkeletonError("admissibility item 5: the distinguished vertex is not in the first tree");
    if (static_cast<int>(code.slots.size()) != code.r) throw SkeletonError("slot table does not match the forest");
    for (int h = 0; h < code.r; ++h) {
        if (code.slots[h].size() != code.children[h].size()) throw SkeletonError("slot table does not match the forest");
        for (std::size_t i = 0; i < code.slots[h].size(); ++i) {
            const auto& s = code.slots[h][i];
            if (s.p != code.children[h][i] + 2)
                throw SkeletonError("slot boundary length differs from the number of children plus two");
            if (s.p == 2) continue;
            try {
                validate_polygon(s);
            } catch (const MapError& e) {
                throw SkeletonError(std::string("slot is not a polygon triangulation: ") + e.what());
            }
            if (!is_simple(s.map)) throw SkeletonError("slot triangulation is not simple");
        }
    }
}

SkeletonCode skeleton_decompose(const Cylinder& c) {
    validate_cylinder(c);
    Layers L(c);
    const auto& m = c.map;
    const auto& ix = L.ix;
    const int r = c.r;
    std::vector<std::map<int, int>> pos(r + 1);  // vertex -> index in cycle j
    for (int j = 0; j <= r; ++j)
        for (std::size_t i = 0; i < L.cycle[j].size(); ++i) pos[j][ix.tail[L.cycle[j][i]]] = static_cast<int>(i);

    // per level j >= 1: first child position c_i and child count k_i, arbitrary start
    std::vector<std::vector<int>> first(r + 1), count(r + 1);
    std::vector<std::vector<int>> parent(r + 1);
    std::vector<char> downward(ix.nf, 0);
    for (int j = 1; j <= r; ++j) {
        const auto& cyc = L.cycle[j];
        const int n = static_cast<int>(cyc.size()), below = static_cast<int>(L.cycle[j - 1].size());
        std::vector<int> apex(n), vdown(n), wup(n);
        for (int i = 0; i < n; ++i) {
            int tri = m.alpha[cyc[i]];
            if (L.level[ix.face[tri]] != j) throw SkeletonError("edge without a downward triangle");
            downward[ix.face[tri]] = 1;
            vdown[i] = m.phi(tri);
            wup[i] = m.phi(vdown[i]);
            if (m.phi(wup[i]) != tri) throw SkeletonError("downward face is not a triangle");
            auto it = pos[j - 1].find(ix.tail[wup[i]]);
            if (it == pos[j - 1].end()) throw SkeletonError("downward triangle apex is not on the cycle below");
            apex[i] = it->second;
        }
        first[j].resize(n);
        count[j].resize(n);
        long total = 0;
        for (int i = 0; i < n; ++i) {
            int prev = (i + n - 1) % n;
            first[j][i] = apex[prev];
            if (vdown[i] == m.alpha[wup[prev]]) {
                count[j][i] = 0;
            } else {
                int k = ((apex[i] - apex[prev]) % below + below) % below;
                count[j][i] = k == 0 ? below : k;
            }
            total += count[j][i];
        }
        if (total != below) throw SkeletonError("children do not partition the cycle below");
        parent[j - 1].assign(below, -1);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < count[j][i]; ++t) parent[j - 1][(first[j][i] + t) % below] = i;
    }

    // start of every cycle: the top ancestor of the root edge, then first children
    int p0 = -1;
    for (std::size_t i = 0; i < L.cycle[0].size(); ++i)
        if (L.cycle[0][i] == m.alpha[m.root]) p0 = static_cast<int>(i);
    if (p0 < 0) throw SkeletonError("root dart is not on the bottom cycle");
    std::vector<int> start(r + 1);
    int a = p0;
    for (int j = 0; j < r; ++j) a = parent[j][a];
    start[r] = a;
    for (int j = r; j >= 1; --j) start[j - 1] = first[j][start[j]];

    SkeletonCode code;
    code.p = c.p;
    code.q = static_cast<int>(L.cycle[r].size());
    code.r = r;
    code.children.assign(r, {});
    code.slots.assign(r, {});
    const int nb = static_cast<int>(L.cycle[0].size());
    code.marked = ((p0 - start[0]) % nb + nb) % nb;

    // slot faces: not downward, connected across edges whose sides share a level
    std::vector<char> slot_face(ix.nf, 0), level_cut(m.darts(), 0);
    for (int f = 0; f < ix.nf; ++f) slot_face[f] = L.level[f] >= 1 && L.level[f] <= r && !downward[f];
    for (int d = 0; d < m.darts(); ++d) level_cut[d] = L.level[ix.face[d]] != L.level[ix.face[m.alpha[d]]];
    auto slot_comp = face_components(m, ix, slot_face, level_cut);

    for (int j = r; j >= 1; --j) {
        const int h = r - j;
        const auto& cyc = L.cycle[j];
        const int n = static_cast<int>(cyc.size());
        for (int s = 0; s < n; ++s) {
            int i = (start[j] + s) % n;
            int k = count[j][i];
            code.children[h].push_back(k);
            PolygonTriangulation slot;
            slot.p = k + 2;
            if (k == 0) {
                slot.map = edge_map();
                code.slots[h].push_back(slot);
                continue;
            }
            int prev = (i + n - 1) % n;
            int rdown = m.alpha[m.phi(m.phi(m.alpha[cyc[prev]]))];
            int id = slot_comp[ix.face[rdown]];
            if (id < 0) throw SkeletonError("slot with children has no faces");
            std::vector<char> region(ix.nf, 0);
            for (int f = 0; f < ix.nf; ++f) region[f] = slot_comp[f] == id;
            std::vector<int> boundary;
            int d = rdown;
            do {
                boundary.push_back(d);
                if (static_cast<int>(boundary.size()) > k + 2) throw SkeletonError("slot boundary too long");
                int e = m.sigma[m.alpha[d]];
                while (region[ix.face[m.alpha[e]]]) e = m.sigma[e];
                d = e;
            } while (d != rdown);
            if (static_cast<int>(boundary.size()) != k + 2) throw SkeletonError("slot boundary length mismatch");
            const int below = static_cast<int>(L.cycle[j - 1].size());
            for (int t = 0; t < k; ++t)
                if (boundary[1 + t] != L.cycle[j - 1][(first[j][i] + t) % below])
                    throw SkeletonError("slot boundary does not follow the children");
            // slot map: inner darts keep their faces, outer face runs backwards
            std::vector<int> old_darts;
            std::map<int, int> new_of;
            for (int e = 0; e < m.darts(); ++e)
                if (region[ix.face[e]]) {
                    new_of[e] = static_cast<int>(old_darts.size());
                    old_darts.push_back(e);
                }
            for (int b : boundary) {
                int o = m.alpha[b];
                if (new_of.count(o)) throw SkeletonError("slot edge with the slot on both sides on its boundary");
                new_of[o] = static_cast<int>(old_darts.size());
                old_darts.push_back(o);
            }
            const int N = static_cast<int>(old_darts.size());
            std::vector<int> phi(N), alpha(N);
            for (int t = 0; t < N; ++t) {
                int e = old_darts[t];
                auto it = new_of.find(m.alpha[e]);
                if (it == new_of.end()) throw SkeletonError("slot boundary misses an edge");
                alpha[t] = it->second;
                if (region[ix.face[e]]) phi[t] = new_of.at(m.phi(e));
            }
            const int B = k + 2;
            for (int t = 0; t < B; ++t)
                phi[new_of.at(m.alpha[boundary[t]])] = new_of.at(m.alpha[boundary[(t + B - 1) % B]]);
            CombinatorialMap sm;
            sm.alpha = alpha;
            sm.sigma.resize(N);
            for (int t = 0; t < N; ++t) sm.sigma[t] = phi[alpha[t]];
            sm.root = new_of.at(m.alpha[rdown]);
            slot.map = canonical_form(sm);
            slot.n = slot.map.num_vertices() - B;
            code.slots[h].push_back(slot);
        }
    }
    check_admissible(code);
    // vertex accounting: all vertices = forest vertices + slot inner vertices = q + sum k_v + slot inner vertices
    long ksum = 0;
    for (auto& lvl : code.children)
        for (int k : lvl) ksum += k;
    if (code.forest_size() != code.q + ksum) throw SkeletonError("forest vertex count differs from q + sum k");
    if (ix.nv != code.forest_size() + code.inner_vertices())
        throw SkeletonError("vertex count differs from forest plus slot inner vertices");
    return code;
}

Cylinder skeleton_reconstruct(const SkeletonCode& code) {
    check_admissible(code);
    const int r = code.r;
    std::vector<int> len(r + 1);
    for (int j = 1; j <= r; ++j) len[j] = static_cast<int>(code.children[r - j].size());
    len[0] = code.p;
    std::vector<int> alpha, phi;
    auto pair = [&]() {
        int d = static_cast<int>(alpha.size());
        alpha.push_back(d + 1);
        alpha.push_back(d);
        phi.push_back(-1);
        phi.push_back(-1);
        return d;
    };
    // lower[j][i]: cycle dart with the hull on its left; its twin is the upper side
    std::vector<std::vector<int>> lower(r + 1);
    for (int j = 0; j <= r; ++j)
        for (int i = 0; i < len[j]; ++i) lower[j].push_back(pair());
    std::vector<std::vector<int>> rdown(r + 1), ldown(r + 1), firstc(r + 1);
    for (int j = 1; j <= r; ++j) {
        const auto& ks = code.children[r - j];
        int c = 0;
        for (int i = 0; i < len[j]; ++i) {
            firstc[j].push_back(c);
            c += ks[i];
            int rd = pair();
            rdown[j].push_back(rd);
            ldown[j].push_back(ks[i] == 0 ? rd : pair());
        }
    }
    auto set_phi = [&](int d, int e) {
        if (phi[d] >= 0) throw SkeletonError("dart assigned to two faces");
        phi[d] = e;
    };
    for (int j = 1; j <= r; ++j)
        for (int i = 0; i < len[j]; ++i) {
            int up = alpha[lower[j][i]];
            int ld = ldown[j][i];
            int rup = alpha[rdown[j][(i + 1) % len[j]]];
            set_phi(up, ld);
            set_phi(ld, rup);
            set_phi(rup, up);
        }
    for (int i = 0; i < len[r]; ++i) set_phi(lower[r][i], lower[r][(i + 1) % len[r]]);
    for (int i = 0; i < len[0]; ++i) set_phi(alpha[lower[0][i]], alpha[lower[0][(i + len[0] - 1) % len[0]]]);
    for (int j = 1; j <= r; ++j)
        for (int i = 0; i < len[j]; ++i) {
            int k = code.children[r - j][i];
            if (k == 0) continue;
            const auto& s = code.slots[r - j][i].map;
            std::vector<int> outer = face_orbit(s, s.root);
            if (static_cast<int>(outer.size()) != k + 2) throw SkeletonError("slot root face has the wrong degree");
            std::vector<int> mu(s.darts(), -1);
            std::vector<char> is_outer(s.darts(), 0);
            for (int o : outer) is_outer[o] = 1;
            mu[s.alpha[outer[0]]] = rdown[j][i];
            mu[s.alpha[outer[1]]] = alpha[ldown[j][i]];
            for (int t = 1; t <= k; ++t) mu[s.alpha[outer[1 + t]]] = lower[j - 1][firstc[j][i] + k - t];
            for (int d = 0; d < s.darts(); ++d)
                if (!is_outer[d] && mu[d] < 0) {
                    if (is_outer[s.alpha[d]]) throw SkeletonError("slot outer face is not a simple cycle");
                    int e = pair();
                    mu[d] = e;
                    mu[s.alpha[d]] = e + 1;
                }
            for (int d = 0; d < s.darts(); ++d)
                if (!is_outer[d]) set_phi(mu[d], mu[s.phi(d)]);
        }
    const int D = static_cast<int>(alpha.size());
    Cylinder c;
    c.map.alpha = alpha;
    c.map.sigma.resize(D);
    for (int d = 0; d < D; ++d) {
        if (phi[d] < 0) throw SkeletonError("dart without a face");
        c.map.sigma[d] = phi[alpha[d]];
    }
    c.map.root = alpha[lower[0][code.marked]];
    c.top = lower[r][0];
    c.p = code.p;
    c.q = code.q;
    c.r = r;
    validate_cylinder(c);
    return c;
}

mpq_class hull_probability_exact(const SkeletonCode& code) {
    const mpq_class rho(27, 256);
    mpq_class prob = kappa(code.q) / kappa(code.p);
    for (int h = 0; h < code.r; ++h)
        for (std::size_t i = 0; i < code.children[h].size(); ++i) {
            int k = code.children[h][i];
            prob *= theta(k) * rational_power(rho, code.slots[h][i].n);
            if (k > 0) prob /= partition_function_Z(k + 2);
        }
    return prob;
}

double hull_probability(const Cylinder& c) { return hull_probability_exact(skeleton_decompose(c)).get_d(); }

mpq_class scaling_factor(const SkeletonCode& code) {
    long e = code.p - code.q;
    for (auto& lvl : code.children)
        for (int k : lvl) e -= k - 1;
    return rational_power(mpq_class(27, 256) / mpq_class(9, 64), e);
}

// ── downward paths ──

std::vector<int> layer_darts(const Cylinder& c, int j) {
    Layers L(c);
    if (j < 0 || j > c.r) throw SkeletonError("height outside [0, r]");
    return L.cycle[j];
}

DownwardPath downward_path(const Cylinder& c, int start_dart) {
    Layers L(c);
    const auto& m = c.map;
    int j = L.layer_of.at(start_dart);
    if (j < 1) throw SkeletonError("downward paths start on a cycle at height >= 1");
    DownwardPath out;
    int d = start_dart;
    out.faces.push_back(L.ix.face[m.alpha[d]]);
    while (j >= 1) {
        int y = m.phi(m.phi(m.alpha[d]));  // apex -> far endpoint
        for (int guard = 0;; ++guard) {
            if (guard > m.darts()) throw SkeletonError("downward path does not reach the cycle below");
            int prev = y;
            y = m.sigma[y];
            ++out.crossings;
            out.faces.push_back(L.ix.face[y]);
            if (L.layer_of[prev] == j - 1) {
                d = prev;
                break;
            }
        }
        --j;
    }
    return out;
}

// ── simple components ──

std::string to_string(ComponentFamily f) {
    switch (f) {
        case ComponentFamily::marked_vertex: return "marked-vertex";
        case ComponentFamily::marked_edge: return "marked-edge";
        case ComponentFamily::marked_edge_at_root: return "marked-edge-at-root";
        case ComponentFamily::marked_edge_not_root: return "marked-edge-not-root";
        case ComponentFamily::none: return "none";
    }
    return "none";
}

ComponentSplit split_simple_components(const PolygonTriangulation& q) {
    if (q.p != 1) throw SkeletonError("simple components are defined for the 1-gon");
    if (q.marked < 0) throw SkeletonError("simple components need a marked vertex");
    const auto& m = q.map;
    DartIndex ix(m);
    const int root_face = ix.face[m.root];
    int mark_face = -1;
    for (int d = 0; d < m.darts() && mark_face < 0; ++d)
        if (ix.tail[d] == q.marked) mark_face = ix.face[d];

    struct Cycle {
        std::vector<int> edges;  // one dart per edge
        int a = 0, b = 0;        // endpoints
        std::vector<char> inside;
        int size = 0;
        bool loop() const { return edges.size() == 1; }
    };
    std::map<std::pair<int, int>, std::vector<int>> by_ends;
    for (int d = 0; d < m.darts(); ++d) {
        if (d > m.alpha[d]) continue;
        int a = ix.tail[d], b = ix.tail[m.alpha[d]];
        by_ends[{std::min(a, b), std::max(a, b)}].push_back(d);
    }
    std::vector<Cycle> cycles;
    std::vector<char> all(ix.nf, 1);
    for (auto& [ends, edges] : by_ends) {
        if (ends.first != ends.second && edges.size() > 2)
            throw SkeletonError("edge of multiplicity above two in a quasi-simple triangulation");
        std::vector<std::vector<int>> sets;
        if (ends.first == ends.second)
            for (int d : edges) sets.push_back({d});
        else if (edges.size() == 2)
            sets.push_back(edges);
        for (auto& s : sets) {
            Cycle c;
            c.edges = s;
            c.a = ends.first;
            c.b = ends.second;
            std::vector<char> cut(m.darts(), 0);
            for (int d : s) cut[d] = cut[m.alpha[d]] = 1;
            auto comp = face_components(m, ix, all, cut);
            if (comp[root_face] == comp[mark_face]) throw SkeletonError("a 1- or 2-cycle does not separate root from mark");
            c.inside.assign(ix.nf, 0);
            for (int f = 0; f < ix.nf; ++f)
                if (comp[f] == comp[mark_face]) {
                    c.inside[f] = 1;
                    ++c.size;
                }
            cycles.push_back(std::move(c));
        }
    }
    std::sort(cycles.begin(), cycles.end(), [](const Cycle& x, const Cycle& y) { return x.size > y.size; });
    for (std::size_t i = 1; i < cycles.size(); ++i)
        for (int f = 0; f < ix.nf; ++f)
            if (cycles[i].inside[f] && !cycles[i - 1].inside[f]) throw SkeletonError("separating cycles are not nested");
    if (cycles.empty() || !cycles[0].loop() || cycles[0].inside[root_face])
        throw SkeletonError("the root loop is missing");

    ComponentSplit out;
    bool state_u = true;
    int root_vertex = cycles[0].a;
    for (std::size_t i = 0; i < cycles.size(); ++i) {
        const Cycle& outer = cycles[i];
        const Cycle* inner = i + 1 < cycles.size() ? &cycles[i + 1] : nullptr;
        std::vector<char> region(ix.nf, 0);
        int faces = 0;
        for (int f = 0; f < ix.nf; ++f)
            if (outer.inside[f] && !(inner && inner->inside[f])) {
                region[f] = 1;
                ++faces;
            }
        if (outer.loop() || (inner && inner->loop())) {
            if (faces != 1) throw SkeletonError("region next to a loop is not a single triangle");
            ++out.atoms;
            if (!inner) out.mark_in_atom = true;
            if (outer.loop()) {
                state_u = true;
                root_vertex = outer.a;
            }
            continue;
        }
        // close both 2-cycles into single edges
        auto boundary_pair = [&](const Cycle& c) {
            std::vector<int> ds;
            for (int e : c.edges)
                for (int d : {e, m.alpha[e]})
                    if (region[ix.face[d]]) ds.push_back(d);
            if (ds.size() != 2) throw SkeletonError("2-cycle does not bound the region once");
            return ds;
        };
        std::vector<int> glue(m.darts(), -1);
        auto outer_pair = boundary_pair(outer);
        glue[outer_pair[0]] = outer_pair[1];
        glue[outer_pair[1]] = outer_pair[0];
        if (inner) {
            auto inner_pair = boundary_pair(*inner);
            glue[inner_pair[0]] = inner_pair[1];
            glue[inner_pair[1]] = inner_pair[0];
        }
        std::vector<int> new_of(m.darts(), -1), old;
        for (int d = 0; d < m.darts(); ++d)
            if (region[ix.face[d]]) {
                new_of[d] = static_cast<int>(old.size());
                old.push_back(d);
            }
        const int N = static_cast<int>(old.size());
        CombinatorialMap cm;
        cm.alpha.resize(N);
        cm.sigma.resize(N);
        for (int t = 0; t < N; ++t) {
            int d = old[t];
            cm.alpha[t] = new_of[glue[d] >= 0 ? glue[d] : m.alpha[d]];
        }
        for (int t = 0; t < N; ++t) cm.sigma[t] = new_of[m.phi(old[cm.alpha[t]])];
        int root = outer_pair[0];
        if (state_u && ix.tail[outer_pair[1]] == root_vertex) root = outer_pair[1];
        cm.root = new_of[root];
        try {
            validate(cm);
        } catch (const MapError& e) {
            throw SkeletonError(std::string("closed component is not a planar map: ") + e.what());
        }
        if (!is_simple(cm) || !is_triangulation(cm)) throw SkeletonError("closed component is not a simple triangulation");
        SimpleComponent comp;
        comp.size = cm.num_vertices() - 2;
        comp.map = canonical_form(cm);
        if (!inner) {
            comp.family = ComponentFamily::marked_vertex;
        } else if (!state_u) {
            comp.family = ComponentFamily::marked_edge;
        } else if (inner->a == root_vertex || inner->b == root_vertex) {
            comp.family = ComponentFamily::marked_edge_at_root;
        } else {
            comp.family = ComponentFamily::marked_edge_not_root;
            state_u = false;
        }
        out.components.push_back(std::move(comp));
    }
    int best = -1;
    for (std::size_t i = 0; i < out.components.size(); ++i)
        if (best < 0 || out.components[i].size > out.components[best].size) best = static_cast<int>(i);
    out.largest = best;
    out.remainder = q.n - (best >= 0 ? out.components[best].size : 0);
    return out;
}

}  // namespace cubiclab
