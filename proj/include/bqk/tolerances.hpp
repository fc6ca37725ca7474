#pragma once

#include <string>

namespace bqk {

struct Tolerances {
    double flux = 1e-9;            // integrality of Chern numbers and flatness
    double theta = 1e-8;           // equivalence of theta angles (mod 1)
    double hermitian = 1e-12;      // relative Hermiticity defect
    double eigen_residual = 1e-8;  // ||A psi - lambda psi|| / ||psi||
    double cluster_gap = 0.05;     // relative gap separating degeneracy clusters
    double cluster_floor = 1e-9;   // absolute floor for the cluster gap
};

// Parses "key=value,key=value" or a bare number (which sets `flux`).
Tolerances parse_tolerances(const std::string& spec, Tolerances base = {});

// Defaults, overridden by the BQK_TOL environment variable when set.
Tolerances default_tolerances();

struct PhysicalConstants {
    double hbar = 1.0;
    double charge = 1.0;
    double mass = 0.5;

    double kinetic_prefactor() const { return hbar * hbar / (2.0 * mass); }
    // theta = e Phi / (2 pi hbar)
    double theta_from_flux(double flux) const;
};

}  // namespace bqk
