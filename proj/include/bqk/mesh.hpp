#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace bqk {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using cplx = std::complex<double>;

struct Edge {
    int tail = 0;
    int head = 0;
};

// One step of a face boundary: edge index traversed forward (+1) or backward (-1).
struct SignedEdge {
    int edge = 0;
    int sign = 1;
};

using FaceLoop = std::vector<SignedEdge>;

enum class Shape { custom, circle, torus, sphere, genus_surface, projective_plane, annulus, cylinder };

std::string to_string(Shape shape);

struct MeshInfo {
    std::string name = "mesh";
    Shape shape = Shape::custom;
    std::map<std::string, double> params;
    std::optional<int> declared_euler;
};

// Raw description handed to MeshComplex::create. Empty geometry arrays are
// filled with defaults derived from the embedding (or unit values without one).
struct MeshData {
    std::size_t num_vertices = 0;
    std::vector<Edge> edges;
    std::vector<FaceLoop> faces;

    std::vector<Vec3> positions;   // optional embedding in R^3
    std::vector<Vec2> uv;          // optional periodic parameter coordinates
    std::vector<double> lengths;   // per edge
    std::vector<double> measure;   // per vertex
    std::vector<double> weights;   // per edge conductance
    std::vector<double> face_areas;

    std::vector<long> vertex_ids;  // external ids, default 0..V-1
    std::vector<long> edge_ids;    // external ids, default 1..E (positive)
    std::vector<long> face_ids;

    MeshInfo info;
};

// Index of a connected set of faces glued along edges shared by exactly two
// face sides. `orientation[f]` is a consistent orientation when `orientable`.
struct FaceComponent {
    std::vector<int> faces;
    bool closed = true;
    bool orientable = true;
};

struct FaceIncidence {
    int face = 0;
    int coefficient = 0;  // net signed multiplicity of the edge in the face loop
};

struct VertexEdge {
    int edge = 0;
    int sign = 1;  // +1 when the vertex is the tail, i.e. the edge points away
};

// Finite oriented 2-complex with vertex measure and edge conductances.
// Immutable once created; all invariants are checked by create().
class MeshComplex {
public:
    static MeshComplex create(MeshData data);

    std::size_t num_vertices() const { return data_.num_vertices; }
    std::size_t num_edges() const { return data_.edges.size(); }
    std::size_t num_faces() const { return data_.faces.size(); }

    const Edge& edge(int e) const { return data_.edges[e]; }
    std::span<const Edge> edges() const { return data_.edges; }
    std::span<const FaceLoop> faces() const { return data_.faces; }
    const FaceLoop& face(int f) const { return data_.faces[f]; }

    std::span<const double> measure() const { return data_.measure; }
    std::span<const double> edge_lengths() const { return data_.lengths; }
    std::span<const double> edge_weights() const { return data_.weights; }
    std::span<const double> face_areas() const { return data_.face_areas; }

    bool has_positions() const { return !data_.positions.empty(); }
    std::span<const Vec3> positions() const { return data_.positions; }
    bool has_uv() const { return !data_.uv.empty(); }
    std::span<const Vec2> uv() const { return data_.uv; }

    std::span<const long> vertex_ids() const { return data_.vertex_ids; }
    std::span<const long> edge_ids() const { return data_.edge_ids; }
    std::span<const long> face_ids() const { return data_.face_ids; }

    const MeshInfo& info() const { return data_.info; }
    const MeshData& data() const { return data_; }

    long euler_characteristic() const {
        return static_cast<long>(num_vertices()) - static_cast<long>(num_edges()) +
               static_cast<long>(num_faces());
    }
    bool orientable() const { return orientable_; }
    bool has_boundary() const { return has_boundary_; }
    // Every edge lies on at most two face sides.
    bool pseudo_manifold() const { return pseudo_manifold_; }

    std::span<const FaceIncidence> edge_faces(int e) const;
    std::span<const VertexEdge> vertex_edges(int v) const;
    std::span<const FaceComponent> face_components() const { return components_; }
    // +1/-1 orientation of each face relative to its component root.
    std::span<const int> face_orientation() const { return face_orientation_; }
    int face_component_of(int f) const { return face_component_[f]; }

    // Stable content hash of the combinatorics, used to tie connections to meshes.
    std::string fingerprint() const;

private:
    MeshData data_;
    bool orientable_ = true;
    bool has_boundary_ = false;
    bool pseudo_manifold_ = true;
    std::vector<int> edge_face_offsets_;
    std::vector<FaceIncidence> edge_face_list_;
    std::vector<int> vertex_edge_offsets_;
    std::vector<VertexEdge> vertex_edge_list_;
    std::vector<FaceComponent> components_;
    std::vector<int> face_orientation_;
    std::vector<int> face_component_;
};

using MeshPtr = std::shared_ptr<const MeshComplex>;

inline MeshPtr share(MeshComplex mesh) { return std::make_shared<const MeshComplex>(std::move(mesh)); }

// Flow coefficient per edge, stored for the positive orientation. X_e is the
// line integral of the field's metric dual along the edge, so X_{-e} = -X_e.
struct DiscreteVectorField {
    std::vector<double> flow;
    std::vector<bool> support;  // optional vertex mask; empty means everywhere

    DiscreteVectorField operator*(double a) const;
    DiscreteVectorField operator+(const DiscreteVectorField& other) const;
};

struct VertexFunction {
    std::vector<cplx> values;
    bool real = true;

    static VertexFunction from_real(std::vector<double> values);
};

// --- construction --------------------------------------------------------

MeshComplex load_mesh(const std::string& path);
MeshComplex mesh_from_json(const nlohmann::json& doc);
nlohmann::json mesh_to_json(const MeshComplex& mesh);

// Catalogue of example manifolds. Parameter names per shape:
//   circle: N (>=3)                 torus: Nu, Nv (>=3)
//   sphere: L (>=0, icosahedral)    genus_surface: p (>=1), R (>=2)
//   projective_plane: L (>=0)       annulus: Nr (>=2 rings), Nphi (>=3)
//   cylinder: Nu (>=3 around), Nv (>=2 rings)
// Missing parameters take the defaults listed by catalogue_entries().
MeshComplex catalogue(const std::string& name, const std::map<std::string, double>& params = {});

struct CatalogueEntry {
    std::string name;
    std::map<std::string, double> defaults;
    long euler;
    std::string description;
};
std::vector<CatalogueEntry> catalogue_entries();

// 1->2 edge, 1->4 triangle/quad subdivision. Catalogue surfaces are
// re-embedded on their defining surface.
MeshComplex refine(const MeshComplex& mesh);

// --- discrete vector calculus -------------------------------------------

VertexFunction divergence(const MeshComplex& mesh, const DiscreteVectorField& field);

VertexFunction sample_function(const MeshComplex& mesh, const std::function<double(const Vec3&)>& f);
DiscreteVectorField sample_vector_field(const MeshComplex& mesh,
                                        const std::function<Vec3(const Vec3&)>& field);

// Divergence-free field circulating around faces: w_e X_e = (d2 stream)_e.
DiscreteVectorField stream_field(const MeshComplex& mesh, const std::vector<double>& stream);

// Zeroes the flow on edges whose endpoints both lie outside the mask.
DiscreteVectorField restrict_support(const MeshComplex& mesh, DiscreteVectorField field,
                                     std::vector<bool> mask);

}  // namespace bqk
