#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bqk/gauge.hpp"
#include "bqk/homology.hpp"

namespace bqk {

// A point of H^2(M,Z) x H^1(M,U(1)) x R for a given mesh.
struct QuantumNumbers {
    ChernClass chern;
    std::vector<double> thetas;          // in [0,1), one per free H1 generator
    std::vector<long> torsion_chars;     // m_i in {0, ..., tau_i - 1}
    std::vector<long> torsion_orders;    // tau_i
    std::vector<cplx> torsion_holonomy;  // exp(i * period) of each torsion generator
    double c = 0.0;
};

struct ClassificationCard {
    std::string manifold;
    std::optional<std::string> pi1;  // only for catalogue shapes
    HomologyGroup h1;
    HomologyGroup h2;  // cohomology H^2(M,Z)
    std::string chern_range;       // "Z", "Z_2", "0", ...
    long num_thetas = 0;
    std::vector<long> torsion_orders;
    std::vector<std::string> quantum_numbers;  // table-style labels
    std::string physical_reading;
};

ClassificationCard enumerate_classes(const MeshComplex& mesh);
nlohmann::json card_to_json(const ClassificationCard& card);

// Throws InvariantError on non-integral total flux.
QuantumNumbers classify_connection(const ConnectionU1& conn, double c = 0.0, const Tolerances& tol = {});

// Throws InputError when the two refer to different cohomology shapes.
bool equivalent(const QuantumNumbers& a, const QuantumNumbers& b, double tol = 1e-8);

nlohmann::json quantum_numbers_to_json(const QuantumNumbers& q);

// One flat line connection per character; their direct sum is a diagonal flat
// rank-r bundle. Every character must have vanishing Chern class.
std::vector<ConnectionU1> build_flat_bundle_r(MeshPtr mesh, const std::vector<QuantumNumbers>& characters);

// theta in [0,1)
double wrap_theta(double x);

}  // namespace bqk
