#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>

#include "bqk/error.hpp"
#include "bqk/mesh.hpp"

namespace bqk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

// Assembles a complex from polygon vertex cycles. Edges are shared by key;
// the default key is the unordered vertex pair.
class ComplexBuilder {
public:
    using Key = std::tuple<long, long, long>;

    explicit ComplexBuilder(std::size_t num_vertices) { data_.num_vertices = num_vertices; }

    SignedEdge keyed_edge(const Key& key, int tail, int head) {
        auto it = index_.find(key);
        if (it == index_.end()) {
            const int id = static_cast<int>(data_.edges.size());
            data_.edges.push_back({tail, head});
            index_.emplace(key, id);
            return {id, 1};
        }
        const Edge& e = data_.edges[it->second];
        if (e.tail == tail && e.head == head) return {it->second, 1};
        return {it->second, -1};
    }

    // stored low -> high vertex index
    SignedEdge edge_between(int a, int b) {
        SignedEdge s = keyed_edge({0, std::min(a, b), std::max(a, b)}, std::min(a, b), std::max(a, b));
        if (a > b) s.sign = -s.sign;
        return s;
    }

    void add_polygon(const std::vector<int>& verts) {
        FaceLoop loop;
        for (std::size_t k = 0; k < verts.size(); ++k) loop.push_back(edge_between(verts[k], verts[(k + 1) % verts.size()]));
        data_.faces.push_back(std::move(loop));
    }

    void add_loop(FaceLoop loop) { data_.faces.push_back(std::move(loop)); }

    MeshData& data() { return data_; }

private:
    MeshData data_;
    std::map<Key, int> index_;
};

int param_int(const std::map<std::string, double>& params, const std::string& key, int minimum) {
    auto it = params.find(key);
    if (it == params.end()) throw InputError("catalogue: missing parameter '" + key + "'");
    const double value = it->second;
    if (value != std::floor(value)) throw InputError("catalogue: parameter '" + key + "' must be an integer");
    if (value < minimum)
        throw InputError("catalogue: resolution below minimum: " + key + " must be >= " + std::to_string(minimum));
    return static_cast<int>(value);
}

double wrap_unit(double x) {
    x -= std::floor(x);
    return x >= 1.0 ? 0.0 : x;
}

// signed difference b - a on the unit circle, in [-0.5, 0.5)
double periodic_delta(double a, double b) {
    double d = b - a;
    d -= std::floor(d + 0.5);
    return d;
}

bool periodic_u(Shape s) {
    return s == Shape::circle || s == Shape::torus || s == Shape::annulus || s == Shape::cylinder;
}
bool periodic_v(Shape s) { return s == Shape::torus; }

constexpr double torus_major = 2.0;
constexpr double torus_minor = 1.0;

Vec3 embed_uv(Shape shape, const Vec2& uv) {
    const double phi = two_pi * uv.x();
    switch (shape) {
        case Shape::circle: return {std::cos(phi), std::sin(phi), 0.0};
        case Shape::torus: {
            const double psi = two_pi * uv.y();
            const double rho = torus_major + torus_minor * std::cos(psi);
            return {rho * std::cos(phi), rho * std::sin(phi), torus_minor * std::sin(psi)};
        }
        case Shape::annulus: {
            const double r = 1.0 + uv.y();
            return {r * std::cos(phi), r * std::sin(phi), 0.0};
        }
        case Shape::cylinder: return {std::cos(phi), std::sin(phi), uv.y()};
        default: break;
    }
    return Vec3::Zero();
}

// Recomputes positions (and for the circle, arc lengths) from the shape's
// parametrization, and drops derived geometry so create() recomputes it.
void reembed(MeshData& data) {
    const Shape shape = data.info.shape;
    data.measure.clear();
    data.weights.clear();
    data.face_areas.clear();
    data.lengths.clear();
    if (!data.uv.empty()) {
        data.positions.resize(data.num_vertices);
        for (std::size_t v = 0; v < data.num_vertices; ++v) data.positions[v] = embed_uv(shape, data.uv[v]);
    }
    if (shape == Shape::sphere)
        for (auto& p : data.positions) p.normalize();
    if (shape == Shape::circle) {
        data.lengths.resize(data.edges.size());
        for (std::size_t e = 0; e < data.edges.size(); ++e)
            data.lengths[e] = two_pi * std::abs(periodic_delta(data.uv[data.edges[e].tail].x(), data.uv[data.edges[e].head].x()));
    }
}

MeshComplex make_circle(int n) {
    MeshData data;
    data.num_vertices = n;
    for (int k = 0; k < n; ++k) {
        data.edges.push_back({k, (k + 1) % n});
        data.uv.emplace_back(static_cast<double>(k) / n, 0.0);
    }
    data.info = {"circle", Shape::circle, {{"N", n}}, 0};
    reembed(data);
    return MeshComplex::create(std::move(data));
}

// Quad grid over [0,1) x [0,1] with u periodic; v periodic when `wrap_v`.
MeshData quad_grid(int nu, int nv_rings, bool wrap_v) {
    const int rows = nv_rings;
    ComplexBuilder builder(static_cast<std::size_t>(nu) * rows);
    auto id = [&](int i, int j) { return ((i % nu + nu) % nu) * rows + ((j % rows + rows) % rows); };
    const int vcells = wrap_v ? rows : rows - 1;
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < vcells; ++j) builder.add_polygon({id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)});
    MeshData data = std::move(builder.data());
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < rows; ++j)
            data.uv.emplace_back(static_cast<double>(i) / nu,
                                 wrap_v ? static_cast<double>(j) / rows : static_cast<double>(j) / (rows - 1));
    return data;
}

MeshComplex make_torus(int nu, int nv) {
    MeshData data = quad_grid(nu, nv, true);
    data.info = {"torus", Shape::torus, {{"Nu", nu}, {"Nv", nv}}, 0};
    reembed(data);
    return MeshComplex::create(std::move(data));
}

MeshComplex make_annulus(int nr, int nphi) {
    MeshData data = quad_grid(nphi, nr, false);
    data.info = {"annulus", Shape::annulus, {{"Nr", nr}, {"Nphi", nphi}}, 0};
    reembed(data);
    return MeshComplex::create(std::move(data));
}

MeshComplex make_cylinder(int nu, int nv) {
    MeshData data = quad_grid(nu, nv, false);
    data.info = {"cylinder", Shape::cylinder, {{"Nu", nu}, {"Nv", nv}}, 0};
    reembed(data);
    return MeshComplex::create(std::move(data));
}

MeshComplex make_icosahedron() {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> pts;
    for (int s1 : {-1, 1})
        for (int s2 : {-1, 1}) {
            pts.emplace_back(0.0, s1, s2 * phi);
            pts.emplace_back(s1, s2 * phi, 0.0);
            pts.emplace_back(s2 * phi, 0.0, s1);
        }
    ComplexBuilder builder(pts.size());
    const int n = static_cast<int>(pts.size());
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            for (int c = b + 1; c < n; ++c) {
                auto adjacent = [&](int x, int y) { return std::abs((pts[x] - pts[y]).norm() - 2.0) < 1e-9; };
                if (!adjacent(a, b) || !adjacent(b, c) || !adjacent(a, c)) continue;
                const bool outward = (pts[b] - pts[a]).cross(pts[c] - pts[a]).dot(pts[a]) > 0.0;
                builder.add_polygon(outward ? std::vector<int>{a, b, c} : std::vector<int>{a, c, b});
            }
    MeshData data = std::move(builder.data());
    data.positions = pts;
    data.info = {"sphere", Shape::sphere, {{"L", 0}}, 2};
    reembed(data);
    return MeshComplex::create(std::move(data));
}

MeshComplex make_sphere(int level) {
    MeshComplex mesh = make_icosahedron();
    for (int k = 0; k < level; ++k) mesh = refine(mesh);
    return mesh;
}

// Antipodal quotient of the icosahedral sphere. Geometry (measure, weights,
// lengths, areas) is inherited from the covering sphere.
MeshComplex make_projective_plane(int level) {
    const MeshComplex sphere = make_sphere(level);
    const auto pos = sphere.positions();
    const std::size_t nv = sphere.num_vertices();

    auto find_antipode = [&](const Vec3& p) {
        for (std::size_t w = 0; w < nv; ++w)
            if ((pos[w] + p).squaredNorm() < 1e-18) return static_cast<int>(w);
        return -1;
    };
    std::map<std::tuple<long, long, long>, int> by_position;
    auto key_of = [](const Vec3& p) {
        return std::make_tuple(std::lround(p.x() * 1e9), std::lround(p.y() * 1e9), std::lround(p.z() * 1e9));
    };
    for (std::size_t v = 0; v < nv; ++v) by_position[key_of(pos[v])] = static_cast<int>(v);
    std::vector<int> antipode(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        auto it = by_position.find(key_of(-pos[v]));
        antipode[v] = it != by_position.end() ? it->second : find_antipode(pos[v]);
        if (antipode[v] < 0) throw InvariantError("projective_plane: sphere mesh is not antipodally symmetric");
    }

    std::vector<int> vclass(nv, -1);
    int nclasses = 0;
    for (std::size_t v = 0; v < nv; ++v)
        if (vclass[v] < 0) vclass[v] = vclass[antipode[v]] = nclasses++;

    // sphere edges keyed by endpoints to find antipodal edge partners
    std::map<std::pair<int, int>, int> edge_of;
    for (std::size_t e = 0; e < sphere.num_edges(); ++e) edge_of[{sphere.edge(e).tail, sphere.edge(e).head}] = static_cast<int>(e);

    MeshData data;
    data.num_vertices = nclasses;
    std::vector<int> eclass(sphere.num_edges(), -1);
    std::vector<int> esign(sphere.num_edges(), 1);
    for (std::size_t e = 0; e < sphere.num_edges(); ++e) {
        if (eclass[e] >= 0) continue;
        const Edge& edge = sphere.edge(e);
        const int id = static_cast<int>(data.edges.size());
        data.edges.push_back({vclass[edge.tail], vclass[edge.head]});
        data.lengths.push_back(sphere.edge_lengths()[e]);
        data.weights.push_back(sphere.edge_weights()[e]);
        eclass[e] = id;
        const int a = antipode[edge.tail];
        const int b = antipode[edge.head];
        if (auto it = edge_of.find({a, b}); it != edge_of.end()) {
            eclass[it->second] = id;
            esign[it->second] = 1;
        } else if (auto jt = edge_of.find({b, a}); jt != edge_of.end()) {
            eclass[jt->second] = id;
            esign[jt->second] = -1;
        } else {
            throw InvariantError("projective_plane: missing antipodal edge");
        }
    }

    std::vector<bool> face_taken(sphere.num_faces(), false);
    std::map<std::vector<int>, int> face_by_verts;
    for (std::size_t f = 0; f < sphere.num_faces(); ++f) {
        std::vector<int> verts;
        for (const auto& s : sphere.face(f)) verts.push_back(s.sign > 0 ? sphere.edge(s.edge).tail : sphere.edge(s.edge).head);
        std::sort(verts.begin(), verts.end());
        face_by_verts[verts] = static_cast<int>(f);
    }
    for (std::size_t f = 0; f < sphere.num_faces(); ++f) {
        if (face_taken[f]) continue;
        FaceLoop loop;
        std::vector<int> anti;
        for (const auto& s : sphere.face(f)) {
            loop.push_back({eclass[s.edge], s.sign * esign[s.edge]});
            anti.push_back(antipode[s.sign > 0 ? sphere.edge(s.edge).tail : sphere.edge(s.edge).head]);
        }
        std::sort(anti.begin(), anti.end());
        face_taken[f] = true;
        auto it = face_by_verts.find(anti);
        if (it == face_by_verts.end()) throw InvariantError("projective_plane: missing antipodal face");
        face_taken[it->second] = true;
        data.faces.push_back(std::move(loop));
        data.face_areas.push_back(sphere.face_areas()[f]);
    }
    // the edge sign table above records orientation of the partner edge
    // relative to the representative; loops built from either partner close.
    data.measure.assign(nclasses, 0.0);
    for (std::size_t v = 0; v < nv; ++v)
        if (static_cast<int>(v) < antipode[v]) data.measure[vclass[v]] = sphere.measure()[v];
    data.info = {"projective_plane", Shape::projective_plane, {{"L", level}}, 1};
    return MeshComplex::create(std::move(data));
}

// Standard 4p-gon with boundary word a1 b1 a1^-1 b1^-1 ..., triangulated by
// concentric rings; each polygon side is split into R segments.
MeshComplex make_genus_surface(int p, int rings) {
    const int R = rings;
    const int sides = 4 * p;
    const int per_ring = sides * R;
    // vertex numbering: center, interior rings 1..R-1, corner, side points
    const int center = 0;
    auto ring_vertex = [&](int k, int j) { return 1 + (k - 1) * per_ring + ((j % per_ring + per_ring) % per_ring); };
    const int corner = 1 + (R - 1) * per_ring;
    auto side_point = [&](int handle, int which, int t) { return corner + 1 + (handle * 2 + which) * (R - 1) + (t - 1); };
    const int nv = corner + 1 + 2 * p * (R - 1);

    auto boundary_vertex = [&](int j) {
        j = (j % per_ring + per_ring) % per_ring;
        const int s = j / R;
        const int t = j % R;
        if (t == 0) return corner;
        const int handle = s / 4;
        const int k = s % 4;
        return k < 2 ? side_point(handle, k, t) : side_point(handle, k - 2, R - t);
    };
    auto vertex = [&](int k, int j) { return k == R ? boundary_vertex(j) : ring_vertex(k, j); };

    ComplexBuilder builder(nv);
    auto edge = [&](int k1, int j1, int k2, int j2) -> SignedEdge {
        const int a = vertex(k1, j1);
        const int b = vertex(k2, j2);
        if (k1 == R && k2 == R) {
            // boundary segment between ring positions j and j+1 (either direction)
            const bool forward = ((j2 - j1) % per_ring + per_ring) % per_ring == 1;
            const int j = forward ? (j1 % per_ring + per_ring) % per_ring : (j2 % per_ring + per_ring) % per_ring;
            const int s = j / R;
            const int t = j % R;
            const int handle = s / 4;
            const int kind = s % 4;
            const bool canonical = kind < 2;
            const long seg = canonical ? t : R - 1 - t;
            const long cls = handle * 2 + (canonical ? kind : kind - 2);
            const int tail = vertex(R, j);
            const int head = vertex(R, j + 1);
            // canonical direction is the ccw traversal of sides a_i, b_i
            SignedEdge se = canonical ? builder.keyed_edge({1, cls, seg}, tail, head)
                                      : builder.keyed_edge({1, cls, seg}, head, tail);
            if (!canonical) se.sign = -se.sign;
            if (!forward) se.sign = -se.sign;
            return se;
        }
        return builder.edge_between(a, b);
    };
    auto triangle = [&](std::array<std::pair<int, int>, 3> v) {
        FaceLoop loop;
        for (int i = 0; i < 3; ++i) loop.push_back(edge(v[i].first, v[i].second, v[(i + 1) % 3].first, v[(i + 1) % 3].second));
        builder.add_loop(std::move(loop));
    };
    for (int j = 0; j < per_ring; ++j) {
        FaceLoop loop;
        loop.push_back(builder.edge_between(center, vertex(1, j)));
        loop.push_back(edge(1, j, 1, j + 1));
        loop.push_back(builder.edge_between(vertex(1, j + 1), center));
        builder.add_loop(std::move(loop));
    }
    for (int k = 1; k < R; ++k)
        for (int j = 0; j < per_ring; ++j) {
            triangle({{{k, j}, {k + 1, j}, {k + 1, j + 1}}});
            triangle({{{k, j}, {k + 1, j + 1}, {k, j + 1}}});
        }
    MeshData data = std::move(builder.data());
    data.info = {"genus_surface", Shape::genus_surface, {{"p", p}, {"R", R}}, 2 - 2 * p};
    return MeshComplex::create(std::move(data));
}

std::map<std::string, double> with_defaults(const std::string& name, const std::map<std::string, double>& params) {
    for (const auto& entry : catalogue_entries()) {
        if (entry.name != name) continue;
        auto merged = entry.defaults;
        for (const auto& [k, v] : params) {
            if (!merged.count(k)) throw InputError("catalogue: unknown parameter '" + k + "' for " + name);
            merged[k] = v;
        }
        return merged;
    }
    throw InputError("catalogue: unknown manifold '" + name + "'");
}

}  // namespace

std::vector<CatalogueEntry> catalogue_entries() {
    return {
        {"circle", {{"N", 32}}, 0, "rotator with fixed axis (S^1)"},
        {"annulus", {{"Nr", 4}, {"Nphi", 8}}, 0, "Aharonov-Bohm configuration, homotopy-reduced to a planar annulus"},
        {"sphere", {{"L", 2}}, 2, "icosahedral S^2 (Dirac monopole, symmetric top)"},
        {"torus", {{"Nu", 8}, {"Nv", 8}}, 0, "torus of revolution K_1"},
        {"genus_surface", {{"p", 2}, {"R", 2}}, -2, "closed orientable surface K_p from the 4p-gon"},
        {"projective_plane", {{"L", 0}}, 1, "RP^2 as antipodal quotient of the icosahedral sphere"},
        {"cylinder", {{"Nu", 8}, {"Nv", 3}}, 0, "open cylinder S^1 x [0,1]"},
    };
}

MeshComplex catalogue(const std::string& name, const std::map<std::string, double>& params_in) {
    const auto params = with_defaults(name, params_in);
    if (name == "circle") return make_circle(param_int(params, "N", 3));
    if (name == "torus") return make_torus(param_int(params, "Nu", 3), param_int(params, "Nv", 3));
    if (name == "sphere") return make_sphere(param_int(params, "L", 0));
    if (name == "genus_surface") {
        const int p = param_int(params, "p", 1);
        return make_genus_surface(p, param_int(params, "R", 2));
    }
    if (name == "projective_plane") return make_projective_plane(param_int(params, "L", 0));
    if (name == "annulus") return make_annulus(param_int(params, "Nr", 2), param_int(params, "Nphi", 3));
    if (name == "cylinder") return make_cylinder(param_int(params, "Nu", 3), param_int(params, "Nv", 2));
    throw InputError("catalogue: unknown manifold '" + name + "'");
}

MeshComplex refine(const MeshComplex& mesh) {
    const MeshInfo& info = mesh.info();
    if (info.shape == Shape::projective_plane && info.params.count("L"))
        return catalogue("projective_plane", {{"L", info.params.at("L") + 1}});

    std::size_t arity = 0;
    for (const auto& loop : mesh.faces()) {
        if (loop.size() != 3 && loop.size() != 4) throw InputError("refine: only triangle and quad faces are supported");
        if (arity != 0 && loop.size() != arity) throw InputError("refine: mixed face arities are not supported");
        arity = loop.size();
    }

    const std::size_t nv = mesh.num_vertices();
    const std::size_t ne = mesh.num_edges();
    const std::size_t nf = mesh.num_faces();
    const bool quads = arity == 4;

    MeshData data;
    data.num_vertices = nv + ne + (quads ? nf : 0);
    data.info = info;
    const int edge_mid0 = static_cast<int>(nv);
    const int face_mid0 = static_cast<int>(nv + ne);
    // lengths of interior child edges when there is no embedding to measure
    std::vector<double> inner_lengths;
    auto len = [&](const SignedEdge& s) { return mesh.edge_lengths()[s.edge]; };

    // each parent edge e -> children 2e (tail..mid), 2e+1 (mid..head)
    for (std::size_t e = 0; e < ne; ++e) {
        const Edge& edge = mesh.edge(e);
        data.edges.push_back({edge.tail, edge_mid0 + static_cast<int>(e)});
        data.edges.push_back({edge_mid0 + static_cast<int>(e), edge.head});
    }
    auto half = [](const SignedEdge& s, bool first) -> SignedEdge {
        // first half of the traversal of signed edge s
        const int child = s.sign > 0 ? (first ? 2 * s.edge : 2 * s.edge + 1) : (first ? 2 * s.edge + 1 : 2 * s.edge);
        return {child, s.sign};
    };
    auto start_vertex = [&](const SignedEdge& s) { return s.sign > 0 ? mesh.edge(s.edge).tail : mesh.edge(s.edge).head; };

    for (std::size_t f = 0; f < nf; ++f) {
        const FaceLoop& loop = mesh.face(f);
        const std::size_t k = loop.size();
        if (!quads) {
            // interior edges connect consecutive edge midpoints
            std::vector<int> inner(k);
            for (std::size_t i = 0; i < k; ++i) {
                inner[i] = static_cast<int>(data.edges.size());
                data.edges.push_back({edge_mid0 + loop[i].edge, edge_mid0 + loop[(i + 1) % k].edge});
                inner_lengths.push_back(0.5 * len(loop[(i + 2) % k]));
            }
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t next = (i + 1) % k;
                data.faces.push_back({half(loop[i], false), half(loop[next], true), {inner[i], -1}});
            }
            data.faces.push_back({{inner[0], 1}, {inner[1], 1}, {inner[2], 1}});
        } else {
            const int center = face_mid0 + static_cast<int>(f);
            std::vector<int> spoke(k);
            for (std::size_t i = 0; i < k; ++i) {
                spoke[i] = static_cast<int>(data.edges.size());
                data.edges.push_back({edge_mid0 + loop[i].edge, center});
                inner_lengths.push_back(0.5 * len(loop[(i + 1) % k]));
            }
            for (std::size_t i = 0; i < k; ++i) {
                const std::size_t next = (i + 1) % k;
                data.faces.push_back({half(loop[i], false), half(loop[next], true), {spoke[next], 1}, {spoke[i], -1}});
            }
        }
    }

    if (mesh.has_uv()) {
        const bool pu = periodic_u(info.shape);
        const bool pv = periodic_v(info.shape);
        auto uv = mesh.uv();
        data.uv.assign(uv.begin(), uv.end());
        auto average = [&](const std::vector<int>& verts) {
            const Vec2 base = uv[verts[0]];
            Vec2 sum = Vec2::Zero();
            for (int v : verts) {
                Vec2 d = uv[v] - base;
                if (pu) d.x() = periodic_delta(base.x(), uv[v].x());
                if (pv) d.y() = periodic_delta(base.y(), uv[v].y());
                sum += d;
            }
            Vec2 out = base + sum / static_cast<double>(verts.size());
            if (pu) out.x() = wrap_unit(out.x());
            if (pv) out.y() = wrap_unit(out.y());
            return out;
        };
        for (std::size_t e = 0; e < ne; ++e) data.uv.push_back(average({mesh.edge(e).tail, mesh.edge(e).head}));
        if (quads)
            for (std::size_t f = 0; f < nf; ++f) {
                std::vector<int> verts;
                for (const auto& s : mesh.face(f)) verts.push_back(start_vertex(s));
                data.uv.push_back(average(verts));
            }
    }
    if (mesh.has_positions()) {
        auto pos = mesh.positions();
        data.positions.assign(pos.begin(), pos.end());
        for (std::size_t e = 0; e < ne; ++e) data.positions.push_back(0.5 * (pos[mesh.edge(e).tail] + pos[mesh.edge(e).head]));
        if (quads)
            for (std::size_t f = 0; f < nf; ++f) {
                Vec3 c = Vec3::Zero();
                for (const auto& s : mesh.face(f)) c += pos[start_vertex(s)];
                data.positions.push_back(c / static_cast<double>(mesh.face(f).size()));
            }
    }

    if (!data.uv.empty() || mesh.has_positions()) {
        reembed(data);
    } else {
        for (std::size_t e = 0; e < ne; ++e) {
            data.lengths.push_back(0.5 * mesh.edge_lengths()[e]);
            data.lengths.push_back(0.5 * mesh.edge_lengths()[e]);
        }
        data.lengths.insert(data.lengths.end(), inner_lengths.begin(), inner_lengths.end());
        for (std::size_t f = 0; f < nf; ++f)
            for (std::size_t c = 0; c < 4; ++c) data.face_areas.push_back(0.25 * mesh.face_areas()[f]);
    }

    // keep catalogue metadata in step with the subdivision
    auto& p = data.info.params;
    switch (info.shape) {
        case Shape::circle: p["N"] *= 2; break;
        case Shape::torus: p["Nu"] *= 2; p["Nv"] *= 2; break;
        case Shape::sphere: p["L"] += 1; break;
        case Shape::annulus: p["Nr"] = 2 * p["Nr"] - 1; p["Nphi"] *= 2; break;
        case Shape::cylinder: p["Nu"] *= 2; p["Nv"] = 2 * p["Nv"] - 1; break;
        case Shape::genus_surface: p["refinements"] += 1; break;
        default: break;
    }
    return MeshComplex::create(std::move(data));
}

}  // namespace bqk
