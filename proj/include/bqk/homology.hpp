#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bqk/integer_matrix.hpp"
#include "bqk/mesh.hpp"

namespace bqk {

// Integer chain on edges (or faces), indexed by the mesh's internal order.
using Chain = std::vector<long>;

struct HomologyGroup {
    long betti = 0;
    std::vector<long> torsion;  // each >= 2, each divides the next

    bool trivial() const { return betti == 0 && torsion.empty(); }
    bool operator==(const HomologyGroup&) const = default;
    // e.g. "Z^2", "Z_2", "0", "Z + Z_2 + Z_4"
    std::string to_string() const;
};

struct TorsionCycle {
    Chain cycle;     // edge chain z with d1 z = 0
    long order = 0;  // tau with tau * z = d2(witness)
    Chain witness;   // face chain
};

struct CycleBasis {
    std::vector<Chain> free;  // b1 generators of the free part
    std::vector<TorsionCycle> torsion;
    // +1/-1 applied to each lifted generator by the orientation normalization
    std::vector<int> free_sign;
    std::vector<int> torsion_sign;
};

// Boundary operators of the cellular chain complex: d1 is V x E (head +1,
// tail -1) and d2 is E x F (signed incidence). Dense; meant for small meshes.
struct BoundaryMatrices {
    IntegerMatrix d1;
    IntegerMatrix d2;
};
BoundaryMatrices boundary_matrices(const MeshComplex& mesh);

// Spanning-forest / dual-forest reduction of the chain complex. Collapsing a
// spanning forest of the 1-skeleton and a dual forest of the faces leaves a
// small relation matrix whose Smith form carries H1 and H^2. Also used to
// solve for edge phases with prescribed face sums.
struct ChainReduction {
    std::vector<bool> tree_edge;
    std::vector<int> vertex_parent_edge;  // -1 at forest roots
    std::vector<int> vertex_parent;
    std::vector<int> vertex_depth;
    std::vector<int> vertex_component;
    int num_vertex_components = 0;

    struct FaceTree {
        int root = -1;
        std::vector<int> order;        // BFS order from the root
        int free_boundary_edge = -1;   // boundary edge collapsed with the root, or -1
    };
    std::vector<FaceTree> face_trees;
    std::vector<int> face_parent_edge;  // dual-tree edge towards the parent face, -1 at roots
    std::vector<int> face_parent;
    std::vector<int> face_sign;         // sign of each face in its tree's root column
    std::vector<bool> dual_tree_edge;

    std::vector<int> surviving_edges;   // rows of the relation matrix
    std::vector<int> relation_trees;    // face trees that survive as relation columns
    IntegerMatrix relations;            // surviving_edges x relation_trees

    long rank_d2() const;
};

ChainReduction reduce_chain_complex(const MeshComplex& mesh);

// Homology H_k for k = 0, 1, 2 and the integral cohomology H^2 computed from
// the transposed boundary (cochain) complex.
HomologyGroup homology(const MeshComplex& mesh, int k);
HomologyGroup cohomology_h2(const MeshComplex& mesh);

struct HomologySummary {
    HomologyGroup h0, h1, h2;
    HomologyGroup H2;  // cohomology
    CycleBasis basis;
};
HomologySummary compute_homology(const MeshComplex& mesh);

CycleBasis cycle_basis(const MeshComplex& mesh);

// d1 applied to an edge chain (vertex coefficients) and d2 to a face chain.
Chain boundary_of_edges(const MeshComplex& mesh, const Chain& edges);
Chain boundary_of_faces(const MeshComplex& mesh, const Chain& faces);
bool is_cycle(const MeshComplex& mesh, const Chain& edges);

// Lifts a chain on the reduction's surviving edges to an edge cycle by closing
// every surviving edge through the spanning forest.
Chain lift_cycle(const MeshComplex& mesh, const ChainReduction& red, const std::vector<Integer>& coeffs);

}  // namespace bqk
