#include "bqk/gauge.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "bqk/error.hpp"

namespace bqk {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double two_pi = 2.0 * std::numbers::pi;

int coefficient(const MeshComplex& mesh, int f, int e) {
    for (const auto& inc : mesh.edge_faces(e))
        if (inc.face == f) return inc.coefficient;
    return 0;
}

double face_sum_except(const MeshComplex& mesh, const std::vector<double>& a, int f, int skip) {
    double s = 0.0;
    for (const auto& step : mesh.face(f))
        if (step.edge != skip) s += step.sign * a[step.edge];
    return s;
}

double distance_to_lattice(double x, double spacing) { return std::abs(std::remainder(x, spacing)); }

void require_same_mesh(const ConnectionU1& conn) {
    if (!conn.mesh) throw InputError("connection has no mesh");
    if (conn.phases.size() != conn.mesh->num_edges()) throw InputError("connection does not match its mesh");
}

}  // namespace

bool ChernClass::operator==(const ChernClass& o) const {
    if (components.size() != o.components.size()) return false;
    for (std::size_t i = 0; i < components.size(); ++i)
        if (components[i].value != o.components[i].value || components[i].modulus != o.components[i].modulus) return false;
    return true;
}

ConnectionU1 trivial_connection(MeshPtr mesh) {
    ConnectionU1 conn;
    conn.phases.assign(mesh->num_edges(), 0.0);
    conn.mesh = std::move(mesh);
    conn.gauge = "trivial";
    return conn;
}

ConnectionU1 connection_from_phases(MeshPtr mesh, std::vector<double> phases, std::string gauge) {
    if (phases.size() != mesh->num_edges()) throw InputError("phase count does not match the number of edges");
    for (double a : phases)
        if (!std::isfinite(a)) throw InputError("connection phases must be finite");
    return {std::move(mesh), std::move(phases), std::move(gauge)};
}

std::vector<double> solve_face_sums(const MeshComplex& mesh, const ChainReduction& red, const std::vector<double>& targets,
                                    const std::vector<double>& surviving_values) {
    if (targets.size() != mesh.num_faces()) throw InputError("face targets do not match the mesh");
    std::vector<double> a(mesh.num_edges(), 0.0);
    if (!surviving_values.empty()) {
        if (surviving_values.size() != red.surviving_edges.size()) throw InputError("surviving edge values have the wrong size");
        for (std::size_t r = 0; r < red.surviving_edges.size(); ++r) a[red.surviving_edges[r]] = surviving_values[r];
    }
    for (const auto& tree : red.face_trees) {
        // leaves first, so every face sees its children's edges already fixed
        for (auto it = tree.order.rbegin(); it != tree.order.rend(); ++it) {
            const int f = *it;
            const int e = f == tree.root ? tree.free_boundary_edge : red.face_parent_edge[f];
            if (e < 0) continue;
            a[e] = coefficient(mesh, f, e) * (targets[f] - face_sum_except(mesh, a, f, e));
        }
    }
    return a;
}

ConnectionU1 monopole_connection(MeshPtr mesh, long n) {
    const MeshComplex& m = *mesh;
    const auto comps = m.face_components();
    if (m.num_faces() == 0 || comps.size() != 1 || !comps[0].closed || !comps[0].orientable || !m.pseudo_manifold() ||
        m.euler_characteristic() != 2)
        throw InvariantError("monopole requires a closed orientable sphere-topology mesh (H^2 = Z)");
    double total_area = 0.0;
    for (double area : m.face_areas()) total_area += area;
    std::vector<double> targets(m.num_faces());
    double largest = 0.0;
    for (std::size_t f = 0; f < m.num_faces(); ++f) {
        targets[f] = two_pi * static_cast<double>(n) * m.face_orientation()[f] * m.face_areas()[f] / total_area;
        largest = std::max(largest, std::abs(targets[f]));
    }
    if (largest >= pi) {
        std::ostringstream msg;
        msg << "flux bound violated: monopole n=" << n << " puts " << largest << " >= pi through one face; refine the mesh";
        throw InvariantError(msg.str());
    }
    const ChainReduction red = reduce_chain_complex(m);
    return {mesh, solve_face_sums(m, red, targets), "spanning-tree"};
}

ConnectionU1 flat_connection(MeshPtr mesh, const std::vector<double>& thetas, const std::vector<long>& torsion_chars) {
    const MeshComplex& m = *mesh;
    const ChainReduction red = reduce_chain_complex(m);
    const SmithForm snf = smith_normal_form(red.relations);
    const CycleBasis basis = cycle_basis(m);
    if (thetas.size() != basis.free.size())
        throw InputError("expected " + std::to_string(basis.free.size()) + " theta value(s), got " + std::to_string(thetas.size()));
    if (!torsion_chars.empty() && torsion_chars.size() != basis.torsion.size())
        throw InputError("expected " + std::to_string(basis.torsion.size()) + " torsion character(s), got " +
                         std::to_string(torsion_chars.size()));

    // target periods on the Smith basis of the surviving edges
    const std::size_t rows = red.relations.rows();
    std::vector<double> p(rows, 0.0);
    std::size_t free_k = 0, tors_k = 0;
    for (std::size_t i = 0; i < rows; ++i) {
        if (i >= snf.rank) {
            p[i] = two_pi * basis.free_sign[free_k] * thetas[free_k];
            ++free_k;
        } else if (snf.S(i, i) != 1) {
            const long tau = basis.torsion[tors_k].order;
            const long mchar = torsion_chars.empty() ? 0 : torsion_chars[tors_k];
            if (mchar < 0 || mchar >= tau)
                throw InputError("torsion character " + std::to_string(mchar) + " outside Z_" + std::to_string(tau));
            p[i] = two_pi * basis.torsion_sign[tors_k] * static_cast<double>(mchar) / static_cast<double>(tau);
            ++tors_k;
        }
    }
    // x = U^T p puts period p_i on the lifted generator column i of U^{-1}
    std::vector<double> x(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
        if (p[i] == 0.0) continue;
        for (std::size_t r = 0; r < rows; ++r) x[r] += snf.U(i, r).get_d() * p[i];
    }
    return {mesh, solve_face_sums(m, red, std::vector<double>(m.num_faces(), 0.0), x), "spanning-tree"};
}

ConnectionU1 aharonov_bohm_connection(MeshPtr mesh, double theta) {
    if (!std::isfinite(theta)) throw InputError("theta must be finite");
    const CycleBasis basis = cycle_basis(*mesh);
    if (basis.free.empty()) throw InvariantError("no cycle to thread: the mesh has b1 = 0");
    const Shape shape = mesh->info().shape;
    const bool angular = mesh->has_positions() && basis.free.size() == 1 &&
                         (shape == Shape::circle || shape == Shape::annulus || shape == Shape::cylinder);
    if (angular) {
        std::vector<double> a(mesh->num_edges());
        for (std::size_t e = 0; e < a.size(); ++e) {
            const Vec3& p = mesh->positions()[mesh->edge(e).tail];
            const Vec3& q = mesh->positions()[mesh->edge(e).head];
            a[e] = theta * std::remainder(std::atan2(q.y(), q.x()) - std::atan2(p.y(), p.x()), two_pi);
        }
        return {mesh, std::move(a), "angular"};
    }
    std::vector<double> thetas(basis.free.size(), 0.0);
    thetas[0] = theta;
    return flat_connection(std::move(mesh), thetas);
}

double period(const ConnectionU1& conn, const Chain& cycle) {
    require_same_mesh(conn);
    if (cycle.size() != conn.phases.size()) throw InputError("cycle does not match the connection's mesh");
    double s = 0.0;
    for (std::size_t e = 0; e < cycle.size(); ++e)
        if (cycle[e] != 0) s += static_cast<double>(cycle[e]) * conn.phases[e];
    return s;
}

cplx holonomy(const ConnectionU1& conn, const Chain& cycle) {
    require_same_mesh(conn);
    if (!is_cycle(*conn.mesh, cycle)) throw InputError("holonomy: chain is not a cycle");
    return std::polar(1.0, period(conn, cycle));
}

CurvatureField curvature(const MeshComplex& mesh, const std::vector<double>& phases) {
    if (phases.size() != mesh.num_edges()) throw InputError("cochain does not match the mesh");
    CurvatureField out;
    const std::size_t nf = mesh.num_faces();
    out.raw.resize(nf);
    out.flux.resize(nf);
    out.winding.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const double raw = face_sum_except(mesh, phases, static_cast<int>(f), -1);
        const long n = static_cast<long>(std::ceil((raw - pi) / two_pi));
        out.raw[f] = raw;
        out.winding[f] = n;
        out.flux[f] = raw - two_pi * static_cast<double>(n);
    }
    for (const auto& comp : mesh.face_components()) {
        if (!comp.closed || !comp.orientable) continue;
        double total = 0.0;
        for (int f : comp.faces) total += mesh.face_orientation()[f] * out.flux[f];
        out.component_flux.push_back(total);
    }
    return out;
}

CurvatureField curvature(const ConnectionU1& conn) {
    require_same_mesh(conn);
    return curvature(*conn.mesh, conn.phases);
}

ChernClass chern_number(const ConnectionU1& conn, const Tolerances& tol) {
    require_same_mesh(conn);
    const MeshComplex& m = *conn.mesh;
    if (!m.pseudo_manifold()) throw InputError("chern number needs every edge on at most two faces");
    const CurvatureField F = curvature(conn);
    ChernClass out;
    for (const auto& comp : m.face_components()) {
        if (!comp.closed) continue;
        ChernClass::Component c;
        if (comp.orientable) {
            long wraps = 0;
            double flux = 0.0;
            for (int f : comp.faces) {
                wraps += m.face_orientation()[f] * F.winding[f];
                flux += m.face_orientation()[f] * F.flux[f];
            }
            c.value = -wraps;
            const double deviation = std::abs(flux / two_pi - static_cast<double>(c.value));
            if (deviation > tol.flux) {
                std::ostringstream msg;
                msg << "non-integral flux: total flux / 2pi = " << flux / two_pi << " deviates by " << deviation;
                throw InvariantError(msg.str());
            }
        } else {
            long wraps = 0;
            for (int f : comp.faces) wraps += F.winding[f];
            c.value = ((wraps % 2) + 2) % 2;
            c.modulus = 2;
        }
        out.components.push_back(c);
    }
    return out;
}

bool is_flat(const ConnectionU1& conn, double tol) {
    const CurvatureField F = curvature(conn);
    for (double phi : F.flux)
        if (std::abs(phi) > tol) return false;
    return true;
}

ConnectionU1 gauge_transform(const ConnectionU1& conn, const GaugeTransform& g) {
    require_same_mesh(conn);
    if (g.chi.size() != conn.mesh->num_vertices()) throw InputError("gauge transform does not match the mesh");
    ConnectionU1 out = conn;
    for (std::size_t e = 0; e < out.phases.size(); ++e) {
        const Edge& edge = conn.mesh->edge(e);
        out.phases[e] += g.chi[edge.head] - g.chi[edge.tail];
    }
    return out;
}

GaugeTransform trivializing_gauge(const ConnectionU1& conn) {
    require_same_mesh(conn);
    const MeshComplex& m = *conn.mesh;
    const ChainReduction red = reduce_chain_complex(m);
    std::vector<int> order(m.num_vertices());
    for (std::size_t v = 0; v < order.size(); ++v) order[v] = static_cast<int>(v);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return red.vertex_depth[a] != red.vertex_depth[b] ? red.vertex_depth[a] < red.vertex_depth[b] : a < b;
    });
    GaugeTransform g{std::vector<double>(m.num_vertices(), 0.0)};
    for (int v : order) {
        const int pe = red.vertex_parent_edge[v];
        if (pe < 0) continue;
        const Edge& e = m.edge(pe);
        // a_e + chi_head - chi_tail = 0 along the tree
        if (e.head == v) g.chi[v] = g.chi[e.tail] - conn.phases[pe];
        else g.chi[v] = g.chi[e.head] + conn.phases[pe];
    }
    return g;
}

bool is_log_exact(const MeshComplex& mesh, const std::vector<double>& cochain, double tol) {
    const CurvatureField F = curvature(mesh, cochain);
    for (double phi : F.flux)
        if (std::abs(phi) > tol) return false;
    const CycleBasis basis = cycle_basis(mesh);
    auto periodic = [&](const Chain& z) {
        double s = 0.0;
        for (std::size_t e = 0; e < z.size(); ++e) s += static_cast<double>(z[e]) * cochain[e];
        return distance_to_lattice(s, two_pi) <= tol;
    };
    for (const auto& z : basis.free)
        if (!periodic(z)) return false;
    for (const auto& t : basis.torsion)
        if (!periodic(t.cycle)) return false;
    return true;
}

nlohmann::json connection_to_json(const ConnectionU1& conn) {
    require_same_mesh(conn);
    nlohmann::json phases = nlohmann::json::object();
    for (std::size_t e = 0; e < conn.phases.size(); ++e) phases[std::to_string(conn.mesh->edge_ids()[e])] = conn.phases[e];
    return {{"mesh", conn.mesh->fingerprint()},
            {"name", conn.mesh->info().name},
            {"gauge", conn.gauge},
            {"edge_phases", std::move(phases)}};
}

ConnectionU1 connection_from_json(MeshPtr mesh, const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("edge_phases") || !doc["edge_phases"].is_object())
        throw InputError("parse error: connection needs an 'edge_phases' object");
    if (!doc.contains("mesh") || !doc["mesh"].is_string()) throw InputError("parse error: connection needs a 'mesh' string");
    const std::string tag = doc["mesh"].get<std::string>();
    if (tag != mesh->fingerprint() && tag != mesh->info().name)
        throw InputError("connection mesh mismatch: '" + tag + "' is neither the mesh name nor its fingerprint");

    std::map<long, int> index;
    for (std::size_t e = 0; e < mesh->num_edges(); ++e) index[mesh->edge_ids()[e]] = static_cast<int>(e);
    std::vector<double> phases(mesh->num_edges(), 0.0);
    std::vector<int> seen(mesh->num_edges(), 0);  // bit 1: forward key, bit 2: reversed key
    for (const auto& [key, value] : doc["edge_phases"].items()) {
        long id = 0;
        std::size_t used = 0;
        try {
            id = std::stol(key, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != key.size() || id == 0) throw InputError("parse error: edge key '" + key + "' is not an edge id");
        auto it = index.find(id < 0 ? -id : id);
        if (it == index.end()) throw InputError("parse error: connection references unknown edge " + key);
        if (!value.is_number()) throw InputError("parse error: phase for edge " + key + " is not a number");
        const double a = value.get<double>();
        if (!std::isfinite(a)) throw InputError("connection phases must be finite (edge " + key + ")");
        const int e = it->second;
        const double forward = id < 0 ? -a : a;
        if (seen[e] != 0 && phases[e] != forward)
            throw InputError("antisymmetry violated: edge " + std::to_string(id < 0 ? -id : id) + " and its reverse disagree");
        seen[e] |= id < 0 ? 2 : 1;
        phases[e] = forward;
    }
    return {std::move(mesh), std::move(phases), doc.value("gauge", std::string("file"))};
}

ConnectionU1 load_connection(MeshPtr mesh, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open connection file '" + path + "'");
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(std::string("parse error: ") + e.what());
    }
    return connection_from_json(std::move(mesh), doc);
}

}  // namespace bqk
