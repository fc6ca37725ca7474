#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <nlohmann/json.hpp>

#include "bqk/gauge.hpp"
#include "bqk/mesh.hpp"
#include "bqk/tolerances.hpp"

namespace bqk {

using Section = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cplx>;

// Operator on sections with the weighted inner product <psi, phi> =
// sum_v weights_v conj(psi_v) phi_v. For rank-r bundles the weights repeat
// once per block.
struct SparseOperator {
    SparseMatrix matrix;
    std::vector<double> weights;
    bool hermitian = false;
    int stencil_radius = 0;  // graph distance reached by one application
    std::string label;

    Eigen::Index dim() const { return matrix.rows(); }
    Section apply(const Section& psi) const { return matrix * psi; }
};

cplx inner_product(const std::vector<double>& weights, const Section& a, const Section& b);
double weighted_norm(const std::vector<double>& weights, const Section& a);

// Adjoint with respect to the weighted inner product: W^{-1} A^H W.
SparseOperator adjoint(const SparseOperator& op);
// max |A - A^dagger| relative to max(1, max |A|)
double hermiticity_defect(const SparseOperator& op);
SparseOperator hermitize(SparseOperator op);

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(cplx s, const SparseOperator& a);
SparseOperator compose(const SparseOperator& a, const SparseOperator& b);  // a after b
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

SparseOperator identity_operator(const MeshComplex& mesh);

// (Q psi)_v = f_v psi_v. Hermitian iff f is real; demanding Hermiticity for a
// complex f is an error.
SparseOperator position_operator(const MeshComplex& mesh, const VertexFunction& f, bool require_hermitian = false);

// (nabla_X psi)_v = 1/(2 mu_v) * sum over edges e leaving v (both stored
// orientations) of w_e X_e (exp(i a_e) psi_head - psi_v).
SparseOperator covariant_derivative(const ConnectionU1& conn, const DiscreteVectorField& X);

// A = -i hbar nabla_X + (-i hbar / 2 + hbar c) Q(div X), returned as (A + A^dagger)/2.
SparseOperator momentum_operator(const ConnectionU1& conn, const DiscreteVectorField& X, double c,
                                 const PhysicalConstants& k = {});

// Direct sum acting block-wise on rank-r sections.
SparseOperator block_diagonal(const std::vector<SparseOperator>& blocks);
SparseOperator momentum_operator_bundle(const std::vector<ConnectionU1>& lines, const DiscreteVectorField& X, double c,
                                        const PhysicalConstants& k = {});

// Multiplication by exp(-i chi_v): conjugating by it realizes a gauge transform.
SparseOperator gauge_unitary(const MeshComplex& mesh, const GaugeTransform& g);

// Circle in the Fourier basis k = -K..K: P = hbar (k - theta), H = P^2 / 2m.
struct FourierCircle {
    std::vector<long> modes;
    SparseOperator P;
    SparseOperator H;
    double theta = 0.0;
};
FourierCircle fourier_backend_circle(int K, double theta, const PhysicalConstants& k = {});
// Q(exp(i p phi)) shifts mode k to k + p, dropping modes beyond the cutoff.
SparseOperator fourier_exp_position(int K, int p);
// max-entry residual of [Q(e^{i p phi}), P] - i hbar Q(d/dphi e^{i p phi}) on
// the modes that stay inside the cutoff.
double fourier_heisenberg_residual(int K, double theta, int p, const PhysicalConstants& k = {});

using ScalarField = std::function<double(const Vec3&)>;
using AmbientField = std::function<Vec3(const Vec3&)>;
using TestSection = std::function<cplx(const Vec3&)>;

struct ResidualLevel {
    std::size_t dimension = 0;
    double residual = 0.0;
};
struct ConvergenceReport {
    std::vector<ResidualLevel> levels;
    std::vector<double> orders;  // log2(r_l / r_{l+1})
    double min_order() const;
};

// Residual of [Q(f), P(X)] = i hbar Q(Xf) on a sequence of refinements, with
// (Xf) computed by the same stencil as nabla_X. The norm is the largest
// ||R psi|| / ||psi|| over smooth test sections (defaults: x, y, z, a plane wave).
ConvergenceReport heisenberg_residual(const std::vector<ConnectionU1>& levels, const ScalarField& f, const AmbientField& X,
                                      double c, const PhysicalConstants& k = {}, std::vector<TestSection> tests = {});

// Lie bracket of two ambient fields by central differences.
AmbientField lie_bracket(AmbientField X, AmbientField Y, double step = 1e-5);

// ([P(X), P(Y)] + i hbar P([X,Y])) / (-hbar^2), the discrete curvature operator.
SparseOperator curvature_from_commutators(const ConnectionU1& conn, const DiscreteVectorField& X,
                                          const DiscreteVectorField& Y, const DiscreteVectorField& XY, double c,
                                          const PhysicalConstants& k = {});

// Compares R(X,Y) with multiplication by i * g on the span of the given
// sections (orthonormalized internally); returns ||Pi R Pi - i Pi g Pi||_F
// divided by ||Pi g Pi||_F (or unnormalized when g vanishes).
double compare_on_subspace(const SparseOperator& R, const std::vector<double>& g, const std::vector<Section>& basis);

// Sparse triplets {"rows","cols","re","im","hermitian","dim"}; CSV has
// header "row,col,re,im".
nlohmann::json operator_to_json(const SparseOperator& op);
std::string operator_to_csv(const SparseOperator& op);

}  // namespace bqk
