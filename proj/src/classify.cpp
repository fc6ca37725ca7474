#include "bqk/classify.hpp"

#include <cmath>
#include <numbers>

#include "bqk/error.hpp"

namespace bqk {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::optional<std::string> pi1_of(const MeshInfo& info) {
    switch (info.shape) {
        case Shape::circle:
        case Shape::annulus:
        case Shape::cylinder: return "Z";
        case Shape::sphere: return "1";
        case Shape::torus: return "Z^2";
        case Shape::projective_plane: return "Z_2";
        case Shape::genus_surface: {
            const long p = std::lround(info.params.count("p") ? info.params.at("p") : 1.0);
            std::string gens, rel;
            for (long i = 1; i <= p; ++i) {
                const std::string k = std::to_string(i);
                gens += (i > 1 ? ", " : "") + std::string("a") + k + ", b" + k;
                rel += "[a" + k + ",b" + k + "]";
            }
            return "<" + gens + " | " + rel + ">";
        }
        case Shape::custom: break;
    }
    return std::nullopt;
}

std::string theta_label(long b1) {
    if (b1 == 1) return "theta in [0,1)";
    if (b1 == 2) return "theta_1, theta_2 in [0,1)";
    return "theta_1, ..., theta_" + std::to_string(b1) + " in [0,1)";
}

std::string reading(const MeshInfo& info, const ClassificationCard& card) {
    switch (info.shape) {
        case Shape::circle:
        case Shape::annulus:
        case Shape::cylinder:
            return "Aharonov-Bohm: theta = e*Phi/(2*pi*hbar) mod 1 for the flux Phi threading the hole; "
                   "fluxes differing by whole quanta give the same quantum system.";
        case Shape::sphere:
            return "Dirac monopole: n = e*g/(2*pi*hbar) flux quanta through the sphere.";
        case Shape::torus:
        case Shape::genus_surface:
            return "n flux quanta through the surface; theta_j = flux angle threading the j-th handle cycle.";
        case Shape::projective_plane:
            return "Two indistinguishable particles: m = 0 bosonic, m = 1 fermionic exchange sign. "
                   "In two space dimensions a continuous family of anyonic quantizations also exists; it is not computed here.";
        case Shape::custom: break;
    }
    std::string out = "monopole charge ranges over " + card.chern_range;
    if (card.num_thetas > 0) out += "; " + std::to_string(card.num_thetas) + " flux angle(s)";
    if (!card.torsion_orders.empty()) out += "; discrete holonomy characters of the torsion cycles";
    return out + ".";
}

nlohmann::json group_json(const HomologyGroup& g) { return {{"betti", g.betti}, {"torsion", g.torsion}}; }

}  // namespace

double wrap_theta(double x) {
    double t = x - std::floor(x);
    // periods are sums of many phases; a residue within rounding of 1 is 0
    if (t >= 1.0 - 1e-12) t = 0.0;
    return t;
}

ClassificationCard enumerate_classes(const MeshComplex& mesh) {
    const HomologySummary hs = compute_homology(mesh);
    ClassificationCard card;
    card.manifold = mesh.info().name;
    card.pi1 = pi1_of(mesh.info());
    card.h1 = hs.h1;
    card.h2 = hs.H2;
    card.chern_range = hs.H2.to_string();
    card.num_thetas = hs.h1.betti;
    card.torsion_orders = hs.h1.torsion;

    if (hs.H2.betti > 0) card.quantum_numbers.push_back(hs.H2.betti == 1 ? "n in Z" : "n_1, ..., n_" + std::to_string(hs.H2.betti) + " in Z");
    if (hs.h1.betti > 0) card.quantum_numbers.push_back(theta_label(hs.h1.betti));
    // on a closed surface the torsion of H^2 is fixed by the torsion characters
    for (long tau : hs.h1.torsion) card.quantum_numbers.push_back("m in Z_" + std::to_string(tau));
    card.physical_reading = reading(mesh.info(), card);
    return card;
}

nlohmann::json card_to_json(const ClassificationCard& card) {
    nlohmann::json doc;
    doc["manifold"] = card.manifold;
    doc["pi1"] = card.pi1 ? nlohmann::json(*card.pi1) : nlohmann::json(nullptr);
    doc["H1"] = group_json(card.h1);
    doc["H2"] = group_json(card.h2);
    doc["classes"] = {{"chern", card.chern_range}, {"thetas", card.num_thetas}, {"torsion", card.torsion_orders}, {"c", "R"}};
    doc["quantum_numbers"] = card.quantum_numbers;
    doc["physical_reading"] = card.physical_reading;
    return doc;
}

QuantumNumbers classify_connection(const ConnectionU1& conn, double c, const Tolerances& tol) {
    if (!std::isfinite(c)) throw InputError("c must be finite");
    const MeshComplex& mesh = conn.complex();
    QuantumNumbers q;
    q.c = c;
    q.chern = chern_number(conn, tol);
    const CycleBasis basis = cycle_basis(mesh);
    for (const auto& z : basis.free) q.thetas.push_back(wrap_theta(period(conn, z) / two_pi));
    if (!basis.torsion.empty()) {
        const CurvatureField F = curvature(conn);
        for (const auto& t : basis.torsion) {
            // tau * z bounds the witness, so tau * period - sum(witness * flux)
            // is 2 pi times an integer; its residue is the character
            const double p = period(conn, t.cycle);
            double enclosed = 0.0;
            for (std::size_t f = 0; f < t.witness.size(); ++f) enclosed += static_cast<double>(t.witness[f]) * F.flux[f];
            const long k = std::lround((static_cast<double>(t.order) * p - enclosed) / two_pi);
            q.torsion_chars.push_back(((k % t.order) + t.order) % t.order);
            q.torsion_orders.push_back(t.order);
            q.torsion_holonomy.push_back(std::polar(1.0, p));
        }
    }
    return q;
}

bool equivalent(const QuantumNumbers& a, const QuantumNumbers& b, double tol) {
    if (a.thetas.size() != b.thetas.size() || a.torsion_orders != b.torsion_orders ||
        a.chern.components.size() != b.chern.components.size())
        throw InputError("mismatched manifolds: quantum numbers have different shapes");
    if (!(a.chern == b.chern) || a.torsion_chars != b.torsion_chars) return false;
    for (std::size_t j = 0; j < a.thetas.size(); ++j) {
        const double d = std::abs(std::remainder(a.thetas[j] - b.thetas[j], 1.0));
        if (d > tol) return false;
    }
    return std::abs(a.c - b.c) <= tol;
}

nlohmann::json quantum_numbers_to_json(const QuantumNumbers& q) {
    nlohmann::json chern = nlohmann::json::array();
    for (const auto& comp : q.chern.components)
        chern.push_back({{"value", comp.value}, {"group", comp.modulus == 0 ? "Z" : "Z_" + std::to_string(comp.modulus)}});
    nlohmann::json hol = nlohmann::json::array();
    for (const auto& h : q.torsion_holonomy) hol.push_back({h.real(), h.imag()});
    return {{"chern", chern},
            {"thetas", q.thetas},
            {"torsion_chars", q.torsion_chars},
            {"torsion_orders", q.torsion_orders},
            {"torsion_holonomy", hol},
            {"c", q.c}};
}

std::vector<ConnectionU1> build_flat_bundle_r(MeshPtr mesh, const std::vector<QuantumNumbers>& characters) {
    std::vector<ConnectionU1> out;
    for (const auto& q : characters) {
        // torsion Chern classes are carried by flat bundles; integral flux is not
        for (const auto& comp : q.chern.components)
            if (comp.modulus == 0 && comp.value != 0)
                throw InputError("flat bundle requested for a character with nonzero Chern class");
        out.push_back(flat_connection(mesh, q.thetas, q.torsion_chars));
    }
    return out;
}

}  // namespace bqk
