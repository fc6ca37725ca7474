#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bqk/gauge.hpp"
#include "bqk/operators.hpp"
#include "bqk/tolerances.hpp"

namespace bqk {

struct EigenOptions {
    double gap_threshold = 0.05;  // relative gap separating clusters
    double gap_floor = 1e-9;      // gaps below this never separate clusters
    double residual_tol = 1e-8;
    std::uint64_t seed = 0;
    Eigen::Index dense_threshold = 512;
    int max_restarts = 60;
    bool positive_semidefinite = false;  // lets the shift sit just below zero
    bool keep_vectors = false;

    static EigenOptions from(const Tolerances& tol, std::uint64_t seed = 0);
};

struct Cluster {
    int begin = 0;
    int size = 0;
    double mean = 0.0;
    // false when the cluster touches the last computed eigenvalue and may
    // continue beyond it
    bool complete = true;
};

struct SpectrumResult {
    std::vector<double> values;  // ascending
    std::vector<double> residuals;
    std::vector<Cluster> clusters;
    std::vector<Section> vectors;  // when requested
    std::string method;            // "dense" or "shift-invert block Krylov"
    int iterations = 0;
    int restarts = 0;
    double shift = 0.0;
};

// Magnetic Laplacian: (H psi)_v = (hbar^2 / 2m) (1/mu_v) sum over edges e
// leaving v of w_e (psi_v - exp(i a_e) psi_head).
SparseOperator magnetic_hamiltonian(const ConnectionU1& conn, const PhysicalConstants& k = {});

// Lowest k eigenpairs of a Hermitian operator. Throws SolverError when the
// residual contract cannot be met.
SpectrumResult eigen(const SparseOperator& op, int k, const EigenOptions& opt = {});

std::vector<Cluster> cluster_values(const std::vector<double>& values, double threshold, double floor, bool last_open);
// relative gap (l_{i+1} - l_i) / max(|l_i|, |l_{i+1}|)
double relative_gap(double a, double b);

struct ThetaRow {
    double theta = 0.0;
    std::vector<long> modes;
    std::vector<double> momentum;  // hbar (k - theta) per mode
    std::vector<double> energy;    // per mode
    std::vector<double> sorted;    // energies ascending
};
std::vector<ThetaRow> theta_sweep_circle(int K, const std::vector<double>& thetas, const PhysicalConstants& k = {});

struct DegeneracyLevel {
    int level = 0;  // subdivision level (list position when unknown)
    std::size_t vertices = 0;
    std::vector<double> values;
    int lowest_cluster = 0;
    double gap_after = 0.0;  // relative gap after the lowest cluster
};
struct DegeneracyReport {
    long n = 0;
    int expected = 0;  // |n| + 1
    std::vector<DegeneracyLevel> levels;
    bool stabilized = false;  // finest level matches the expectation
    std::string note;
};
// One entry per mesh (coarse to fine).
DegeneracyReport monopole_degeneracy(const std::vector<MeshPtr>& meshes, long n, int modes, const EigenOptions& opt = {},
                                     const PhysicalConstants& k = {});

nlohmann::json spectrum_to_json(const SpectrumResult& r);
std::string spectrum_to_csv(const SpectrumResult& r);
nlohmann::json degeneracy_to_json(const DegeneracyReport& r);

}  // namespace bqk
