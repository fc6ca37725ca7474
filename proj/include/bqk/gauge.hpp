#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bqk/homology.hpp"
#include "bqk/mesh.hpp"
#include "bqk/tolerances.hpp"

namespace bqk {

// Discrete U(1) connection: a_e = (e/hbar) * integral of the vector potential
// along edge e in its stored orientation. The reversed edge carries -a_e.
struct ConnectionU1 {
    MeshPtr mesh;
    std::vector<double> phases;
    // which representative of the gauge class was built ("trivial",
    // "spanning-tree", "angular", "file", ...)
    std::string gauge = "trivial";

    const MeshComplex& complex() const { return *mesh; }
    // phase along edge e traversed with the given sign
    double phase(int e, int sign) const { return sign > 0 ? phases[e] : -phases[e]; }
};

struct CurvatureField {
    std::vector<double> raw;    // signed edge sum around each face
    std::vector<double> flux;   // principal value in (-pi, pi]
    std::vector<long> winding;  // raw = flux + 2 pi winding
    // total principal flux of each closed orientable face component
    std::vector<double> component_flux;
};

// Chern class of a line bundle over each closed face component. On an
// orientable component the value is the integer flux quantum; on a
// non-orientable one it is a residue mod 2.
struct ChernClass {
    struct Component {
        long value = 0;
        int modulus = 0;  // 0 for Z, 2 for Z_2
    };
    std::vector<Component> components;

    // single-component summary; 0 on meshes without closed components
    long value() const { return components.empty() ? 0 : components.front().value; }
    bool operator==(const ChernClass& o) const;
};

struct GaugeTransform {
    std::vector<double> chi;  // per vertex
};

ConnectionU1 trivial_connection(MeshPtr mesh);
ConnectionU1 connection_from_phases(MeshPtr mesh, std::vector<double> phases, std::string gauge = "user");

// Flux 2 pi n spread over the faces in proportion to their area, solved for
// edge phases on the spanning-tree/dual-tree reduction. The last face of the
// dual tree absorbs the Dirac string (-2 pi n, invisible mod 2 pi).
ConnectionU1 monopole_connection(MeshPtr mesh, long n);

// Flat connection with holonomy exp(2 pi i theta) around the hole generator.
// Embedded meshes get the angular gauge a_e = theta * (change of azimuth).
ConnectionU1 aharonov_bohm_connection(MeshPtr mesh, double theta);

// Flat connection with periods 2 pi theta_j on the free generators of the
// cycle basis and holonomy exp(2 pi i m_i / tau_i) on the torsion ones.
ConnectionU1 flat_connection(MeshPtr mesh, const std::vector<double>& thetas, const std::vector<long>& torsion_chars = {});

// Edge phases whose face sums equal `targets` on every face except the roots
// of closed face trees. Phases on the surviving edges are taken from
// `surviving_values` (zero when empty); tree edges are zero.
std::vector<double> solve_face_sums(const MeshComplex& mesh, const ChainReduction& red,
                                    const std::vector<double>& targets,
                                    const std::vector<double>& surviving_values = {});

// Sum of chain_e * a_e, unreduced; exp(i * period) is the holonomy.
double period(const ConnectionU1& conn, const Chain& cycle);
cplx holonomy(const ConnectionU1& conn, const Chain& cycle);

CurvatureField curvature(const ConnectionU1& conn);
CurvatureField curvature(const MeshComplex& mesh, const std::vector<double>& phases);
ChernClass chern_number(const ConnectionU1& conn, const Tolerances& tol = {});
bool is_flat(const ConnectionU1& conn, double tol = 1e-9);

// a'_e = a_e + chi_head - chi_tail. Sections transform as psi' = exp(-i chi) psi.
ConnectionU1 gauge_transform(const ConnectionU1& conn, const GaugeTransform& g);

// True when the cochain is flat and all periods on the cycle basis, torsion
// generators included, lie in 2 pi Z; such a cochain is d(log) of a U(1)-valued
// vertex function.
bool is_log_exact(const MeshComplex& mesh, const std::vector<double>& cochain, double tol = 1e-9);

// Vertex phases that move a flat connection to phases in 2 pi Z on the
// spanning forest; used to verify log-exactness constructively.
GaugeTransform trivializing_gauge(const ConnectionU1& conn);

nlohmann::json connection_to_json(const ConnectionU1& conn);
// The "mesh" field must match the mesh's name or fingerprint. Keys "-k"
// denote the reversed edge and must be consistent with "k" when both appear.
ConnectionU1 connection_from_json(MeshPtr mesh, const nlohmann::json& doc);
ConnectionU1 load_connection(MeshPtr mesh, const std::string& path);

}  // namespace bqk
