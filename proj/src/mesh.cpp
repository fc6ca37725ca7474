#include "bqk/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <limits>
#include <sstream>

#include "bqk/error.hpp"

namespace bqk {

std::string to_string(Shape shape) {
    switch (shape) {
        case Shape::circle: return "circle";
        case Shape::torus: return "torus";
        case Shape::sphere: return "sphere";
        case Shape::genus_surface: return "genus_surface";
        case Shape::projective_plane: return "projective_plane";
        case Shape::annulus: return "annulus";
        case Shape::cylinder: return "cylinder";
        case Shape::custom: break;
    }
    return "custom";
}

namespace {

double cot_angle(const Vec3& apex, const Vec3& a, const Vec3& b) {
    const Vec3 u = a - apex;
    const Vec3 v = b - apex;
    return u.dot(v) / u.cross(v).norm();
}

std::vector<int> face_vertices(const MeshData& data, const FaceLoop& loop) {
    std::vector<int> out;
    out.reserve(loop.size());
    for (const auto& step : loop) {
        const Edge& e = data.edges[step.edge];
        out.push_back(step.sign > 0 ? e.tail : e.head);
    }
    return out;
}

void fill_geometry(MeshData& data) {
    const std::size_t nv = data.num_vertices;
    const std::size_t ne = data.edges.size();
    const std::size_t nf = data.faces.size();
    const bool embedded = !data.positions.empty();

    if (data.lengths.empty()) {
        data.lengths.assign(ne, 1.0);
        if (embedded)
            for (std::size_t e = 0; e < ne; ++e)
                data.lengths[e] = (data.positions[data.edges[e].head] - data.positions[data.edges[e].tail]).norm();
    }

    if (data.face_areas.empty()) {
        data.face_areas.assign(nf, 1.0);
        if (embedded) {
            for (std::size_t f = 0; f < nf; ++f) {
                const auto verts = face_vertices(data, data.faces[f]);
                Vec3 centroid = Vec3::Zero();
                for (int v : verts) centroid += data.positions[v];
                centroid /= static_cast<double>(verts.size());
                double area = 0.0;
                for (std::size_t k = 0; k < verts.size(); ++k) {
                    const Vec3& a = data.positions[verts[k]];
                    const Vec3& b = data.positions[verts[(k + 1) % verts.size()]];
                    area += 0.5 * (a - centroid).cross(b - centroid).norm();
                }
                data.face_areas[f] = area;
            }
        }
    }

    std::vector<bool> edge_in_face(ne, false);
    for (const auto& loop : data.faces)
        for (const auto& step : loop) edge_in_face[step.edge] = true;

    if (data.weights.empty()) {
        data.weights.assign(ne, 0.0);
        if (embedded && nf > 0) {
            for (const auto& loop : data.faces) {
                const auto verts = face_vertices(data, loop);
                if (loop.size() == 3) {
                    for (std::size_t k = 0; k < 3; ++k) {
                        const int e = loop[k].edge;
                        const Vec3& a = data.positions[verts[k]];
                        const Vec3& b = data.positions[verts[(k + 1) % 3]];
                        const Vec3& apex = data.positions[verts[(k + 2) % 3]];
                        data.weights[e] += 0.5 * cot_angle(apex, a, b);
                    }
                } else {
                    Vec3 centroid = Vec3::Zero();
                    for (int v : verts) centroid += data.positions[v];
                    centroid /= static_cast<double>(verts.size());
                    for (std::size_t k = 0; k < loop.size(); ++k) {
                        const int e = loop[k].edge;
                        const Vec3 mid = 0.5 * (data.positions[verts[k]] + data.positions[verts[(k + 1) % verts.size()]]);
                        data.weights[e] += (centroid - mid).norm() / data.lengths[e];
                    }
                }
            }
            // Obtuse configurations can drive cotangent weights to zero or
            // below; clamp to a small positive floor.
            const double max_w = *std::max_element(data.weights.begin(), data.weights.end());
            for (std::size_t e = 0; e < ne; ++e)
                if (edge_in_face[e] && data.weights[e] < 1e-8 * max_w) data.weights[e] = 1e-8 * max_w;
        } else if (nf > 0) {
            for (std::size_t e = 0; e < ne; ++e) data.weights[e] = 1.0;
        }
        for (std::size_t e = 0; e < ne; ++e)
            if (!edge_in_face[e]) data.weights[e] = 1.0 / data.lengths[e];
    }

    if (data.measure.empty()) {
        data.measure.assign(nv, 0.0);
        std::vector<bool> in_face(nv, false);
        for (std::size_t f = 0; f < nf; ++f) {
            const auto verts = face_vertices(data, data.faces[f]);
            for (int v : verts) {
                data.measure[v] += data.face_areas[f] / static_cast<double>(verts.size());
                in_face[v] = true;
            }
        }
        for (std::size_t e = 0; e < ne; ++e) {
            if (edge_in_face[e]) continue;
            const Edge& edge = data.edges[e];
            if (!in_face[edge.tail]) data.measure[edge.tail] += 0.5 * data.lengths[e];
            if (!in_face[edge.head]) data.measure[edge.head] += 0.5 * data.lengths[e];
        }
        for (std::size_t v = 0; v < nv; ++v)
            if (data.measure[v] == 0.0) data.measure[v] = 1.0;  // isolated vertex
    }
}

void check_positive(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i)
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            std::ostringstream msg;
            msg << "non-positive weight: " << what << " #" << i << " = " << values[i];
            throw InputError(msg.str());
        }
}

}  // namespace

MeshComplex MeshComplex::create(MeshData data) {
    const std::size_t nv = data.num_vertices;
    const std::size_t ne = data.edges.size();
    const std::size_t nf = data.faces.size();
    if (nv == 0) throw InputError("mesh has no vertices");

    for (std::size_t e = 0; e < ne; ++e) {
        const Edge& edge = data.edges[e];
        if (edge.tail < 0 || edge.head < 0 || static_cast<std::size_t>(edge.tail) >= nv ||
            static_cast<std::size_t>(edge.head) >= nv)
            throw InputError("dangling edge: edge #" + std::to_string(e) + " references a missing vertex");
        if (edge.tail == edge.head)
            throw InputError("degenerate edge: edge #" + std::to_string(e) + " is a self-loop");
    }
    for (std::size_t f = 0; f < nf; ++f) {
        const auto& loop = data.faces[f];
        if (loop.empty()) throw InputError("non-closing face: face #" + std::to_string(f) + " is empty");
        for (const auto& step : loop)
            if (step.edge < 0 || static_cast<std::size_t>(step.edge) >= ne || (step.sign != 1 && step.sign != -1))
                throw InputError("dangling edge: face #" + std::to_string(f) + " references a missing edge");
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const auto& a = loop[k];
            const auto& b = loop[(k + 1) % loop.size()];
            const int a_end = a.sign > 0 ? data.edges[a.edge].head : data.edges[a.edge].tail;
            const int b_start = b.sign > 0 ? data.edges[b.edge].tail : data.edges[b.edge].head;
            if (a_end != b_start) throw InputError("non-closing face: face #" + std::to_string(f));
        }
    }
    if (!data.positions.empty() && data.positions.size() != nv) throw InputError("positions: size mismatch");
    if (!data.uv.empty() && data.uv.size() != nv) throw InputError("uv: size mismatch");
    if (!data.lengths.empty() && data.lengths.size() != ne) throw InputError("lengths: size mismatch");
    if (!data.measure.empty() && data.measure.size() != nv) throw InputError("measure: size mismatch");
    if (!data.weights.empty() && data.weights.size() != ne) throw InputError("weights: size mismatch");
    if (!data.face_areas.empty() && data.face_areas.size() != nf) throw InputError("face areas: size mismatch");

    fill_geometry(data);
    check_positive(data.lengths, "edge length");
    check_positive(data.measure, "vertex measure");
    check_positive(data.weights, "edge weight");
    check_positive(data.face_areas, "face area");

    if (data.vertex_ids.empty())
        for (std::size_t v = 0; v < nv; ++v) data.vertex_ids.push_back(static_cast<long>(v));
    if (data.edge_ids.empty())
        for (std::size_t e = 0; e < ne; ++e) data.edge_ids.push_back(static_cast<long>(e + 1));
    if (data.face_ids.empty())
        for (std::size_t f = 0; f < nf; ++f) data.face_ids.push_back(static_cast<long>(f));

    MeshComplex mesh;
    mesh.data_ = std::move(data);
    const MeshData& d = mesh.data_;

    // edge -> face incidence (CSR), with net signed coefficient and raw side count
    std::vector<std::vector<FaceIncidence>> per_edge(ne);
    std::vector<int> sides(ne, 0);
    for (std::size_t f = 0; f < nf; ++f) {
        for (const auto& step : d.faces[f]) {
            ++sides[step.edge];
            auto& list = per_edge[step.edge];
            auto it = std::find_if(list.begin(), list.end(), [&](const FaceIncidence& x) { return x.face == static_cast<int>(f); });
            if (it == list.end()) list.push_back({static_cast<int>(f), step.sign});
            else it->coefficient += step.sign;
        }
    }
    mesh.edge_face_offsets_.assign(ne + 1, 0);
    for (std::size_t e = 0; e < ne; ++e) {
        mesh.edge_face_offsets_[e + 1] = mesh.edge_face_offsets_[e] + static_cast<int>(per_edge[e].size());
        mesh.edge_face_list_.insert(mesh.edge_face_list_.end(), per_edge[e].begin(), per_edge[e].end());
    }

    mesh.vertex_edge_offsets_.assign(nv + 1, 0);
    std::vector<std::vector<VertexEdge>> per_vertex(nv);
    for (std::size_t e = 0; e < ne; ++e) {
        per_vertex[d.edges[e].tail].push_back({static_cast<int>(e), 1});
        per_vertex[d.edges[e].head].push_back({static_cast<int>(e), -1});
    }
    for (std::size_t v = 0; v < nv; ++v) {
        mesh.vertex_edge_offsets_[v + 1] = mesh.vertex_edge_offsets_[v] + static_cast<int>(per_vertex[v].size());
        mesh.vertex_edge_list_.insert(mesh.vertex_edge_list_.end(), per_vertex[v].begin(), per_vertex[v].end());
    }

    // Face components and orientations. Faces are glued across edges with
    // exactly two sides; a gluing is orientation-consistent when the two
    // sides traverse the edge in opposite directions.
    mesh.pseudo_manifold_ = std::all_of(sides.begin(), sides.end(), [](int s) { return s <= 2; });
    struct Side { int face; int sign; };
    std::vector<std::vector<Side>> edge_sides(ne);
    for (std::size_t f = 0; f < nf; ++f)
        for (const auto& step : d.faces[f]) edge_sides[step.edge].push_back({static_cast<int>(f), step.sign});

    mesh.face_orientation_.assign(nf, 0);
    mesh.face_component_.assign(nf, -1);
    for (std::size_t start = 0; start < nf; ++start) {
        if (mesh.face_component_[start] >= 0) continue;
        FaceComponent comp;
        const int cid = static_cast<int>(mesh.components_.size());
        std::deque<int> queue{static_cast<int>(start)};
        mesh.face_component_[start] = cid;
        mesh.face_orientation_[start] = 1;
        while (!queue.empty()) {
            const int f = queue.front();
            queue.pop_front();
            comp.faces.push_back(f);
            for (const auto& step : d.faces[f]) {
                const auto& s = edge_sides[step.edge];
                if (s.size() == 1) comp.closed = false;
                if (s.size() != 2) {
                    if (s.size() > 2) comp.orientable = false;
                    continue;
                }
                const Side& self = (s[0].face == f && s[0].sign == step.sign) ? s[0] : s[1];
                const Side& other = (&self == &s[0]) ? s[1] : s[0];
                // required orientation of the other side so that the edge cancels
                const int want = -mesh.face_orientation_[f] * self.sign * other.sign;
                if (other.face == f) {
                    if (self.sign == other.sign) comp.orientable = false;
                    continue;
                }
                if (mesh.face_component_[other.face] < 0) {
                    mesh.face_component_[other.face] = cid;
                    mesh.face_orientation_[other.face] = want;
                    queue.push_back(other.face);
                } else if (mesh.face_orientation_[other.face] != want) {
                    comp.orientable = false;
                }
            }
        }
        std::sort(comp.faces.begin(), comp.faces.end());
        mesh.components_.push_back(std::move(comp));
    }

    mesh.orientable_ = mesh.pseudo_manifold_ &&
                       std::all_of(mesh.components_.begin(), mesh.components_.end(),
                                   [](const FaceComponent& c) { return c.orientable; });
    if (nf > 0) {
        mesh.has_boundary_ = std::any_of(sides.begin(), sides.end(), [](int s) { return s == 1; });
    } else {
        mesh.has_boundary_ = false;
        for (std::size_t v = 0; v < nv; ++v)
            if (per_vertex[v].size() == 1) mesh.has_boundary_ = true;
    }

    if (d.info.declared_euler && *d.info.declared_euler != mesh.euler_characteristic())
        throw InvariantError("Euler characteristic " + std::to_string(mesh.euler_characteristic()) +
                             " differs from declared " + std::to_string(*d.info.declared_euler));
    return mesh;
}

std::span<const FaceIncidence> MeshComplex::edge_faces(int e) const {
    return std::span<const FaceIncidence>(edge_face_list_).subspan(
        edge_face_offsets_[e], edge_face_offsets_[e + 1] - edge_face_offsets_[e]);
}

std::span<const VertexEdge> MeshComplex::vertex_edges(int v) const {
    return std::span<const VertexEdge>(vertex_edge_list_).subspan(
        vertex_edge_offsets_[v], vertex_edge_offsets_[v + 1] - vertex_edge_offsets_[v]);
}

std::string MeshComplex::fingerprint() const {
    // FNV-1a over the combinatorial structure
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&h](std::int64_t x) {
        for (int i = 0; i < 8; ++i) {
            h ^= static_cast<std::uint64_t>((x >> (8 * i)) & 0xff);
            h *= 1099511628211ULL;
        }
    };
    mix(static_cast<std::int64_t>(num_vertices()));
    for (const auto& e : data_.edges) {
        mix(e.tail);
        mix(e.head);
    }
    for (const auto& loop : data_.faces) {
        mix(-1);
        for (const auto& s : loop) mix(s.sign * (s.edge + 1));
    }
    std::ostringstream out;
    out << std::hex << std::setw(16) << std::setfill('0') << h;
    return out.str();
}

DiscreteVectorField DiscreteVectorField::operator*(double a) const {
    DiscreteVectorField out = *this;
    for (double& x : out.flow) x *= a;
    return out;
}

DiscreteVectorField DiscreteVectorField::operator+(const DiscreteVectorField& other) const {
    if (flow.size() != other.flow.size()) throw InputError("vector field size mismatch");
    DiscreteVectorField out = *this;
    for (std::size_t i = 0; i < flow.size(); ++i) out.flow[i] += other.flow[i];
    if (!support.empty() || !other.support.empty()) {
        out.support.assign(flow.size() ? std::max(support.size(), other.support.size()) : 0, false);
        for (std::size_t v = 0; v < out.support.size(); ++v)
            out.support[v] = (support.empty() || support[v]) || (other.support.empty() || other.support[v]);
    }
    return out;
}

VertexFunction VertexFunction::from_real(std::vector<double> values) {
    VertexFunction out;
    out.values.assign(values.begin(), values.end());
    out.real = true;
    return out;
}

VertexFunction divergence(const MeshComplex& mesh, const DiscreteVectorField& field) {
    if (field.flow.size() != mesh.num_edges()) throw InputError("divergence: vector field does not match mesh");
    std::vector<double> out(mesh.num_vertices(), 0.0);
    std::vector<double> scale(mesh.num_vertices(), 0.0);
    const auto w = mesh.edge_weights();
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        const double flux = w[e] * field.flow[e];
        out[mesh.edge(e).tail] += flux;
        out[mesh.edge(e).head] -= flux;
        scale[mesh.edge(e).tail] += std::abs(flux);
        scale[mesh.edge(e).head] += std::abs(flux);
    }
    const auto mu = mesh.measure();
    // cancellation down to rounding level means a source-free vertex
    constexpr double snap = 64.0 * std::numeric_limits<double>::epsilon();
    for (std::size_t v = 0; v < out.size(); ++v) out[v] = std::abs(out[v]) <= snap * scale[v] ? 0.0 : out[v] / mu[v];
    return VertexFunction::from_real(std::move(out));
}

VertexFunction sample_function(const MeshComplex& mesh, const std::function<double(const Vec3&)>& f) {
    if (!mesh.has_positions()) throw InputError("sample_function: mesh has no embedding");
    std::vector<double> out;
    out.reserve(mesh.num_vertices());
    for (const auto& p : mesh.positions()) out.push_back(f(p));
    return VertexFunction::from_real(std::move(out));
}

DiscreteVectorField sample_vector_field(const MeshComplex& mesh,
                                        const std::function<Vec3(const Vec3&)>& field) {
    if (!mesh.has_positions()) throw InputError("sample_vector_field: mesh has no embedding");
    DiscreteVectorField out;
    out.flow.resize(mesh.num_edges());
    const auto pos = mesh.positions();
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        const Vec3& a = pos[mesh.edge(e).tail];
        const Vec3& b = pos[mesh.edge(e).head];
        // Simpson rule for the line integral of the field along the chord
        const Vec3 d = b - a;
        out.flow[e] = (field(a).dot(d) + 4.0 * field(0.5 * (a + b)).dot(d) + field(b).dot(d)) / 6.0;
    }
    return out;
}

DiscreteVectorField stream_field(const MeshComplex& mesh, const std::vector<double>& stream) {
    if (stream.size() != mesh.num_faces()) throw InputError("stream function does not match the faces");
    DiscreteVectorField out;
    out.flow.assign(mesh.num_edges(), 0.0);
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        for (const auto& s : mesh.face(f)) out.flow[s.edge] += s.sign * stream[f];
    const auto w = mesh.edge_weights();
    for (std::size_t e = 0; e < out.flow.size(); ++e) out.flow[e] /= w[e];
    return out;
}

DiscreteVectorField restrict_support(const MeshComplex& mesh, DiscreteVectorField field, std::vector<bool> mask) {
    if (mask.size() != mesh.num_vertices()) throw InputError("support mask does not match mesh");
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
        if (!mask[mesh.edge(e).tail] && !mask[mesh.edge(e).head]) field.flow[e] = 0.0;
    field.support = std::move(mask);
    return field;
}

}  // namespace bqk
