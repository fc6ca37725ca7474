#include "bqk/homology.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numbers>
#include <sstream>

#include "bqk/error.hpp"

namespace bqk {

std::string HomologyGroup::to_string() const {
    std::vector<std::string> parts;
    if (betti == 1) parts.push_back("Z");
    else if (betti > 1) parts.push_back("Z^" + std::to_string(betti));
    for (long t : torsion) parts.push_back("Z_" + std::to_string(t));
    if (parts.empty()) return "0";
    std::string out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out += " + " + parts[i];
    return out;
}

BoundaryMatrices boundary_matrices(const MeshComplex& mesh) {
    BoundaryMatrices out{IntegerMatrix(mesh.num_vertices(), mesh.num_edges()),
                         IntegerMatrix(mesh.num_edges(), mesh.num_faces())};
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        out.d1(mesh.edge(e).head, e) += 1;
        out.d1(mesh.edge(e).tail, e) -= 1;
    }
    for (std::size_t f = 0; f < mesh.num_faces(); ++f)
        for (const auto& s : mesh.face(f)) out.d2(s.edge, f) += s.sign;
    return out;
}

Chain boundary_of_edges(const MeshComplex& mesh, const Chain& edges) {
    if (edges.size() != mesh.num_edges()) throw InputError("edge chain does not match mesh");
    Chain out(mesh.num_vertices(), 0);
    for (std::size_t e = 0; e < edges.size(); ++e) {
        out[mesh.edge(e).head] += edges[e];
        out[mesh.edge(e).tail] -= edges[e];
    }
    return out;
}

Chain boundary_of_faces(const MeshComplex& mesh, const Chain& faces) {
    if (faces.size() != mesh.num_faces()) throw InputError("face chain does not match mesh");
    Chain out(mesh.num_edges(), 0);
    for (std::size_t f = 0; f < faces.size(); ++f)
        if (faces[f] != 0)
            for (const auto& s : mesh.face(f)) out[s.edge] += s.sign * faces[f];
    return out;
}

bool is_cycle(const MeshComplex& mesh, const Chain& edges) {
    const Chain b = boundary_of_edges(mesh, edges);
    return std::all_of(b.begin(), b.end(), [](long x) { return x == 0; });
}

long ChainReduction::rank_d2() const {
    long rank = 0;
    for (const auto& t : face_trees) rank += static_cast<long>(t.order.size()) - 1 + (t.free_boundary_edge >= 0 ? 1 : 0);
    if (relations.rows() > 0 && relations.cols() > 0) rank += static_cast<long>(smith_normal_form(relations).rank);
    return rank;
}

ChainReduction reduce_chain_complex(const MeshComplex& mesh) {
    const std::size_t nv = mesh.num_vertices();
    const std::size_t ne = mesh.num_edges();
    const std::size_t nf = mesh.num_faces();
    ChainReduction red;

    // spanning forest of the 1-skeleton
    red.tree_edge.assign(ne, false);
    red.vertex_parent_edge.assign(nv, -1);
    red.vertex_parent.assign(nv, -1);
    red.vertex_depth.assign(nv, 0);
    red.vertex_component.assign(nv, -1);
    for (std::size_t start = 0; start < nv; ++start) {
        if (red.vertex_component[start] >= 0) continue;
        const int comp = red.num_vertex_components++;
        std::deque<int> queue{static_cast<int>(start)};
        red.vertex_component[start] = comp;
        while (!queue.empty()) {
            const int v = queue.front();
            queue.pop_front();
            for (const auto& ve : mesh.vertex_edges(v)) {
                const Edge& e = mesh.edge(ve.edge);
                const int w = ve.sign > 0 ? e.head : e.tail;
                if (red.vertex_component[w] >= 0) continue;
                red.vertex_component[w] = comp;
                red.vertex_parent[w] = v;
                red.vertex_parent_edge[w] = ve.edge;
                red.vertex_depth[w] = red.vertex_depth[v] + 1;
                red.tree_edge[ve.edge] = true;
                queue.push_back(w);
            }
        }
    }

    // dual forest over non-tree edges shared by exactly two faces
    auto dual_edge = [&](int e) {
        if (red.tree_edge[e]) return false;
        const auto inc = mesh.edge_faces(e);
        return inc.size() == 2 && std::abs(inc[0].coefficient) == 1 && std::abs(inc[1].coefficient) == 1;
    };
    auto free_edge = [&](int e) {
        if (red.tree_edge[e]) return false;
        const auto inc = mesh.edge_faces(e);
        return inc.size() == 1 && std::abs(inc[0].coefficient) == 1;
    };
    auto coefficient = [&](int f, int e) {
        for (const auto& inc : mesh.edge_faces(e))
            if (inc.face == f) return inc.coefficient;
        return 0;
    };

    std::vector<int> component(nf, -1);
    std::vector<std::vector<int>> comps;
    for (std::size_t start = 0; start < nf; ++start) {
        if (component[start] >= 0) continue;
        const int cid = static_cast<int>(comps.size());
        comps.emplace_back();
        std::deque<int> queue{static_cast<int>(start)};
        component[start] = cid;
        while (!queue.empty()) {
            const int f = queue.front();
            queue.pop_front();
            comps[cid].push_back(f);
            for (const auto& s : mesh.face(f)) {
                if (!dual_edge(s.edge)) continue;
                for (const auto& inc : mesh.edge_faces(s.edge))
                    if (component[inc.face] < 0) {
                        component[inc.face] = cid;
                        queue.push_back(inc.face);
                    }
            }
        }
    }

    red.face_parent_edge.assign(nf, -1);
    red.face_parent.assign(nf, -1);
    red.face_sign.assign(nf, 0);
    red.dual_tree_edge.assign(ne, false);
    std::vector<bool> collapsed(ne, false);
    for (auto& faces : comps) {
        ChainReduction::FaceTree tree;
        int root = *std::min_element(faces.begin(), faces.end());
        for (int f : faces)
            for (const auto& s : mesh.face(f))
                if (free_edge(s.edge) && (tree.free_boundary_edge < 0 || s.edge < tree.free_boundary_edge)) {
                    tree.free_boundary_edge = s.edge;
                    root = f;
                }
        tree.root = root;
        if (tree.free_boundary_edge >= 0) collapsed[tree.free_boundary_edge] = true;
        std::deque<int> queue{root};
        red.face_sign[root] = 1;
        std::vector<bool> seen_local;  // membership via face_sign != 0
        while (!queue.empty()) {
            const int f = queue.front();
            queue.pop_front();
            tree.order.push_back(f);
            for (const auto& s : mesh.face(f)) {
                if (!dual_edge(s.edge)) continue;
                for (const auto& inc : mesh.edge_faces(s.edge)) {
                    const int g = inc.face;
                    if (g == f || red.face_sign[g] != 0) continue;
                    red.face_sign[g] = -red.face_sign[f] * coefficient(f, s.edge) * inc.coefficient;
                    red.face_parent[g] = f;
                    red.face_parent_edge[g] = s.edge;
                    red.dual_tree_edge[s.edge] = true;
                    queue.push_back(g);
                }
            }
        }
        red.face_trees.push_back(std::move(tree));
    }

    for (std::size_t e = 0; e < ne; ++e)
        if (!red.tree_edge[e] && !red.dual_tree_edge[e] && !collapsed[e]) red.surviving_edges.push_back(static_cast<int>(e));
    for (std::size_t t = 0; t < red.face_trees.size(); ++t)
        if (red.face_trees[t].free_boundary_edge < 0) red.relation_trees.push_back(static_cast<int>(t));

    std::vector<int> row_of(ne, -1);
    for (std::size_t r = 0; r < red.surviving_edges.size(); ++r) row_of[red.surviving_edges[r]] = static_cast<int>(r);
    red.relations = IntegerMatrix(red.surviving_edges.size(), red.relation_trees.size());
    for (std::size_t c = 0; c < red.relation_trees.size(); ++c)
        for (int f : red.face_trees[red.relation_trees[c]].order)
            for (const auto& s : mesh.face(f))
                if (row_of[s.edge] >= 0) red.relations(row_of[s.edge], c) += red.face_sign[f] * s.sign;
    return red;
}

namespace {

HomologyGroup group_from_smith(const SmithForm& snf, std::size_t generators) {
    HomologyGroup g;
    g.betti = static_cast<long>(generators - snf.rank);
    for (const auto& d : snf.invariant_factors())
        if (d > 1) {
            if (!d.fits_slong_p()) throw InvariantError("torsion coefficient exceeds machine range");
            g.torsion.push_back(d.get_si());
        }
    return g;
}

HomologyGroup h1_from(const ChainReduction& red) {
    return group_from_smith(smith_normal_form(red.relations), red.relations.rows());
}

HomologyGroup h2_cohomology_from(const MeshComplex& mesh, const ChainReduction& red) {
    // coker of the transposed boundary: free rank F - rank d2, torsion from
    // the invariant factors of the transposed relation matrix
    const SmithForm snf = smith_normal_form(red.relations.transpose());
    HomologyGroup g = group_from_smith(snf, 0);
    g.betti = static_cast<long>(mesh.num_faces()) - red.rank_d2();
    return g;
}

int normalize_sign(const MeshComplex& mesh, Chain& chain, Chain* witness = nullptr) {
    int orientation = 0;
    if (mesh.has_positions()) {
        double winding = 0.0;
        for (std::size_t e = 0; e < chain.size(); ++e) {
            if (chain[e] == 0) continue;
            const Vec3& a = mesh.positions()[mesh.edge(e).tail];
            const Vec3& b = mesh.positions()[mesh.edge(e).head];
            double d = std::atan2(b.y(), b.x()) - std::atan2(a.y(), a.x());
            d = std::remainder(d, 2.0 * std::numbers::pi);
            winding += static_cast<double>(chain[e]) * d;
        }
        const long turns = std::lround(winding / (2.0 * std::numbers::pi));
        orientation = turns > 0 ? 1 : (turns < 0 ? -1 : 0);
    }
    if (orientation == 0)
        for (long c : chain)
            if (c != 0) {
                orientation = c > 0 ? 1 : -1;
                break;
            }
    if (orientation < 0) {
        for (long& c : chain) c = -c;
        if (witness)
            for (long& c : *witness) c = -c;
        return -1;
    }
    return 1;
}

long to_long(const Integer& x) {
    if (!x.fits_slong_p()) throw InvariantError("chain coefficient exceeds machine range");
    return x.get_si();
}

CycleBasis basis_from(const MeshComplex& mesh, const ChainReduction& red) {
    CycleBasis basis;
    const SmithForm snf = smith_normal_form(red.relations);
    const std::size_t rows = red.relations.rows();
    for (std::size_t i = 0; i < rows; ++i) {
        const bool free = i >= snf.rank;
        if (!free && snf.S(i, i) == 1) continue;
        std::vector<Integer> coeffs(rows);
        for (std::size_t r = 0; r < rows; ++r) coeffs[r] = snf.U_inv(r, i);
        Chain cycle = lift_cycle(mesh, red, coeffs);
        if (free) {
            basis.free_sign.push_back(normalize_sign(mesh, cycle));
            basis.free.push_back(std::move(cycle));
            continue;
        }
        TorsionCycle tc;
        tc.order = to_long(snf.S(i, i));
        tc.witness.assign(mesh.num_faces(), 0);
        for (std::size_t c = 0; c < red.relation_trees.size(); ++c) {
            const long v = to_long(snf.V(c, i));
            if (v == 0) continue;
            for (int f : red.face_trees[red.relation_trees[c]].order) tc.witness[f] += v * red.face_sign[f];
        }
        tc.cycle = std::move(cycle);
        basis.torsion_sign.push_back(normalize_sign(mesh, tc.cycle, &tc.witness));
        basis.torsion.push_back(std::move(tc));
    }
    return basis;
}

}  // namespace

Chain lift_cycle(const MeshComplex& mesh, const ChainReduction& red, const std::vector<Integer>& coeffs) {
    Chain chain(mesh.num_edges(), 0);
    // walking from x to the forest root, accumulating the traversed edges
    auto add_path_to_root = [&](int x, long c) {
        while (red.vertex_parent[x] >= 0) {
            const int pe = red.vertex_parent_edge[x];
            chain[pe] += mesh.edge(pe).tail == x ? c : -c;
            x = red.vertex_parent[x];
        }
    };
    for (std::size_t r = 0; r < red.surviving_edges.size(); ++r) {
        const long c = to_long(coeffs[r]);
        if (c == 0) continue;
        const int e = red.surviving_edges[r];
        chain[e] += c;
        // close through the forest: head -> root -> tail
        add_path_to_root(mesh.edge(e).head, c);
        add_path_to_root(mesh.edge(e).tail, -c);
    }
    return chain;
}

HomologyGroup homology(const MeshComplex& mesh, int k) {
    if (k < 0 || k > 2) throw InputError("homology degree must be 0, 1 or 2");
    const ChainReduction red = reduce_chain_complex(mesh);
    if (k == 0) return {red.num_vertex_components, {}};
    if (k == 1) return h1_from(red);
    return {static_cast<long>(mesh.num_faces()) - red.rank_d2(), {}};
}

HomologyGroup cohomology_h2(const MeshComplex& mesh) { return h2_cohomology_from(mesh, reduce_chain_complex(mesh)); }

CycleBasis cycle_basis(const MeshComplex& mesh) { return basis_from(mesh, reduce_chain_complex(mesh)); }

HomologySummary compute_homology(const MeshComplex& mesh) {
    const ChainReduction red = reduce_chain_complex(mesh);
    HomologySummary out;
    out.h0 = {red.num_vertex_components, {}};
    out.h1 = h1_from(red);
    out.h2 = {static_cast<long>(mesh.num_faces()) - red.rank_d2(), {}};
    out.H2 = h2_cohomology_from(mesh, red);
    out.basis = basis_from(mesh, red);
    return out;
}

}  // namespace bqk
