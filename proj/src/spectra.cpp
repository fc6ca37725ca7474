#include "bqk/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "bqk/error.hpp"

namespace bqk {

namespace {

using Triplet = Eigen::Triplet<cplx>;
using Dense = Eigen::MatrixXcd;

// Deterministic uniform in [-1, 1) independent of the standard library's
// distribution implementation.
class Uniform {
public:
    explicit Uniform(std::uint64_t seed) : gen_(seed) {}
    double operator()() { return 2.0 * static_cast<double>(gen_() >> 11) * 0x1.0p-53 - 1.0; }

private:
    std::mt19937_64 gen_;
};

Dense random_block(Eigen::Index n, Eigen::Index b, Uniform& rng) {
    Dense X(n, b);
    for (Eigen::Index j = 0; j < b; ++j)
        for (Eigen::Index i = 0; i < n; ++i) {
            const double re = rng();
            X(i, j) = cplx(re, rng());
        }
    return X;
}

// Appends the columns of W to Q after two passes of Gram-Schmidt against Q and
// each other. Columns that collapse are dropped. Returns the number appended.
Eigen::Index extend_basis(Dense& Q, Eigen::Index used, Dense W) {
    Eigen::Index added = 0;
    for (Eigen::Index j = 0; j < W.cols(); ++j) {
        Eigen::VectorXcd v = W.col(j);
        const double start = v.norm();
        if (start == 0.0) continue;
        for (int pass = 0; pass < 2; ++pass)
            if (used + added > 0) {
                const auto basis = Q.leftCols(used + added);
                v -= basis * (basis.adjoint() * v);
            }
        const double nrm = v.norm();
        if (nrm <= 1e-10 * start) continue;
        if (used + added >= Q.cols()) break;
        Q.col(used + added) = v / nrm;
        ++added;
    }
    return added;
}

struct Ritz {
    Eigen::VectorXd values;
    Dense vectors;
    Eigen::VectorXd residuals;
};

Ritz rayleigh_ritz(const SparseMatrix& S, const Dense& Q) {
    const Dense SQ = S * Q;
    Dense H = Q.adjoint() * SQ;
    H = 0.5 * (H + H.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Dense> es(H);
    Ritz r;
    r.values = es.eigenvalues();
    r.vectors = Q * es.eigenvectors();
    const Dense SX = SQ * es.eigenvectors();
    r.residuals.resize(r.values.size());
    for (Eigen::Index i = 0; i < r.values.size(); ++i)
        r.residuals[i] = (SX.col(i) - r.values[i] * r.vectors.col(i)).norm() / r.vectors.col(i).norm();
    return r;
}

std::string diagnostics_json(const std::string& method, int restarts, const Eigen::VectorXd& residuals, int k, double shift) {
    nlohmann::json d;
    d["method"] = method;
    d["restarts"] = restarts;
    d["shift"] = shift;
    std::vector<double> r;
    for (int i = 0; i < k && i < residuals.size(); ++i) r.push_back(residuals[i]);
    d["residuals"] = r;
    return d.dump();
}

}  // namespace

EigenOptions EigenOptions::from(const Tolerances& tol, std::uint64_t seed) {
    EigenOptions o;
    o.gap_threshold = tol.cluster_gap;
    o.gap_floor = tol.cluster_floor;
    o.residual_tol = tol.eigen_residual;
    o.seed = seed;
    return o;
}

SparseOperator magnetic_hamiltonian(const ConnectionU1& conn, const PhysicalConstants& k) {
    const MeshComplex& mesh = conn.complex();
    const auto mu = mesh.measure();
    const auto w = mesh.edge_weights();
    const double pref = k.kinetic_prefactor();
    std::vector<Triplet> t;
    t.reserve(4 * mesh.num_edges());
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        const int a = mesh.edge(e).tail;
        const int b = mesh.edge(e).head;
        const cplx phase = std::polar(1.0, conn.phases[e]);
        t.emplace_back(a, a, pref * w[e] / mu[a]);
        t.emplace_back(a, b, -pref * w[e] / mu[a] * phase);
        t.emplace_back(b, b, pref * w[e] / mu[b]);
        t.emplace_back(b, a, -pref * w[e] / mu[b] * std::conj(phase));
    }
    SparseOperator H;
    const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
    H.matrix.resize(n, n);
    H.matrix.setFromTriplets(t.begin(), t.end());
    H.matrix.makeCompressed();
    H.weights.assign(mu.begin(), mu.end());
    H.hermitian = true;
    H.stencil_radius = 1;
    H.label = "H";
    return H;
}

double relative_gap(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale > 0.0 ? (b - a) / scale : 0.0;
}

std::vector<Cluster> cluster_values(const std::vector<double>& values, double threshold, double floor, bool last_open) {
    std::vector<Cluster> out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const bool split = i == 0 || (values[i] - values[i - 1] > floor &&
                                      values[i] - values[i - 1] > threshold * std::max(std::abs(values[i]), std::abs(values[i - 1])));
        if (split) out.push_back({static_cast<int>(i), 0, 0.0, true});
        out.back().size += 1;
        out.back().mean += values[i];
    }
    for (auto& c : out) c.mean /= c.size;
    if (last_open && !out.empty()) out.back().complete = false;
    return out;
}

SpectrumResult eigen(const SparseOperator& op, int k, const EigenOptions& opt) {
    if (!op.hermitian) throw InputError("eigen: operator is not flagged Hermitian");
    const Eigen::Index n = op.dim();
    if (k < 1 || k > n) throw InputError("eigen: requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) + "-dimensional operator");
    if (static_cast<Eigen::Index>(op.weights.size()) != n) throw InputError("eigen: operator weights do not match its dimension");

    // symmetric form S = W^{1/2} A W^{-1/2}
    Eigen::VectorXd sq(n), isq(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        sq[i] = std::sqrt(op.weights[static_cast<std::size_t>(i)]);
        isq[i] = 1.0 / sq[i];
    }
    SparseMatrix S = sq.asDiagonal() * op.matrix * isq.asDiagonal();
    S = 0.5 * (S + SparseMatrix(S.adjoint()));
    S.makeCompressed();

    SpectrumResult out;
    Eigen::VectorXd values;
    Dense vectors;
    Eigen::VectorXd residuals;

    if (n < opt.dense_threshold) {
        Eigen::SelfAdjointEigenSolver<Dense> es{Dense(S)};
        if (es.info() != Eigen::Success) throw SolverError("dense eigensolver failed", R"({"method":"dense"})");
        values = es.eigenvalues().head(k);
        vectors = es.eigenvectors().leftCols(k);
        residuals.resize(k);
        const Dense SX = S * vectors;
        for (int i = 0; i < k; ++i) residuals[i] = (SX.col(i) - values[i] * vectors.col(i)).norm();
        out.method = "dense";
    } else {
        // shift below the spectrum, then block Krylov on (S - sigma)^{-1}
        double sigma = 0.0;
        {
            double gersh = std::numeric_limits<double>::infinity(), mean_diag = 0.0;
            for (int c = 0; c < S.outerSize(); ++c) {
                double diag = 0.0, off = 0.0;
                for (SparseMatrix::InnerIterator it(S, c); it; ++it) {
                    if (it.row() == it.col()) diag = it.value().real();
                    else off += std::abs(it.value());
                }
                gersh = std::min(gersh, diag - off);
                mean_diag += std::abs(diag);
            }
            mean_diag = std::max(mean_diag / static_cast<double>(n), 1e-300);
            sigma = opt.positive_semidefinite ? -1e-3 * mean_diag : gersh - 1e-3 * std::max(std::abs(gersh), mean_diag);
        }
        SparseMatrix shifted = S;
        for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
        Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower> ldlt(shifted);
        if (ldlt.info() != Eigen::Success)
            throw SolverError("shift-invert factorization failed", diagnostics_json("shift-invert block Krylov", 0, {}, k, sigma));

        const Eigen::Index block = std::min<Eigen::Index>(n, k + std::max(4, k / 2));
        const int steps = 4;
        const Eigen::Index cap = std::min<Eigen::Index>(n, block * (steps + 1));
        Uniform rng(opt.seed);
        Dense X = random_block(n, block, rng);
        Ritz ritz;
        bool converged = false;
        int restart = 0;
        auto krylov = [&](const Dense& start, const Dense* deflate) {
            Dense Q = Dense::Zero(n, cap + (deflate ? deflate->cols() : 0));
            Eigen::Index used = 0;
            if (deflate) {
                Q.leftCols(deflate->cols()) = *deflate;
                used = deflate->cols();
            }
            const Eigen::Index offset = used;
            Eigen::Index added = extend_basis(Q, used, start);
            Eigen::Index prev_begin = used;
            used += added;
            for (int s = 0; s < steps && added > 0 && used < Q.cols(); ++s) {
                Dense W(n, added);
                for (Eigen::Index j = 0; j < added; ++j) W.col(j) = ldlt.solve(Q.col(prev_begin + j));
                prev_begin = used;
                added = extend_basis(Q, used, W);
                used += added;
            }
            return Dense(Q.middleCols(offset, used - offset));
        };
        for (; restart <= opt.max_restarts; ++restart) {
            const Dense Q = krylov(X, nullptr);
            ritz = rayleigh_ritz(S, Q);
            converged = ritz.values.size() >= k;
            for (int i = 0; i < k && converged; ++i) converged = ritz.residuals[i] <= opt.residual_tol * 0.5;
            if (converged) {
                // look for eigenvalues the block missed, in the complement of the found ones
                const Dense found = ritz.vectors.leftCols(k);
                const Dense probe = krylov(random_block(n, std::min<Eigen::Index>(block, n - k), rng), &found);
                if (probe.cols() == 0) break;
                const Ritz extra = rayleigh_ritz(S, probe);
                if (extra.values[0] >= ritz.values[k - 1] - opt.residual_tol) break;
                converged = false;
                Dense merged(n, block);
                const Eigen::Index take_extra = std::min<Eigen::Index>(extra.vectors.cols(), block - k);
                merged << found, extra.vectors.leftCols(take_extra), Dense::Zero(n, block - k - take_extra);
                X = merged;
                continue;
            }
            X = ritz.vectors.leftCols(std::min<Eigen::Index>(block, ritz.vectors.cols()));
        }
        if (!converged)
            throw SolverError("eigensolver did not converge",
                              diagnostics_json("shift-invert block Krylov", restart, ritz.residuals, k, sigma));
        values = ritz.values.head(k);
        vectors = ritz.vectors.leftCols(k);
        residuals = ritz.residuals.head(k);
        out.method = "shift-invert block Krylov";
        out.restarts = restart;
        out.iterations = (restart + 1) * steps;
        out.shift = sigma;
    }

    for (int i = 0; i < k; ++i)
        if (!(residuals[i] <= opt.residual_tol))
            throw SolverError("eigenpair residual above tolerance", diagnostics_json(out.method, out.restarts, residuals, k, out.shift));

    out.values.assign(values.data(), values.data() + k);
    out.residuals.assign(residuals.data(), residuals.data() + k);
    out.clusters = cluster_values(out.values, opt.gap_threshold, opt.gap_floor, k < n);
    if (opt.keep_vectors)
        for (int i = 0; i < k; ++i) out.vectors.push_back(isq.asDiagonal() * vectors.col(i));
    return out;
}

std::vector<ThetaRow> theta_sweep_circle(int K, const std::vector<double>& thetas, const PhysicalConstants& k) {
    std::vector<ThetaRow> rows;
    for (double theta : thetas) {
        const FourierCircle fc = fourier_backend_circle(K, theta, k);
        ThetaRow row;
        row.theta = theta;
        row.modes = fc.modes;
        for (std::size_t i = 0; i < fc.modes.size(); ++i) {
            const auto j = static_cast<Eigen::Index>(i);
            row.momentum.push_back(fc.P.matrix.coeff(j, j).real());
            row.energy.push_back(fc.H.matrix.coeff(j, j).real());
        }
        row.sorted = row.energy;
        std::sort(row.sorted.begin(), row.sorted.end());
        rows.push_back(std::move(row));
    }
    return rows;
}

DegeneracyReport monopole_degeneracy(const std::vector<MeshPtr>& meshes, long n, int modes, const EigenOptions& opt,
                                     const PhysicalConstants& k) {
    if (meshes.empty()) throw InputError("monopole_degeneracy needs at least one mesh");
    DegeneracyReport report;
    report.n = n;
    report.expected = static_cast<int>(std::abs(n) + 1);
    EigenOptions o = opt;
    o.positive_semidefinite = true;
    std::ostringstream note;
    note << "lowest cluster size per level:";
    for (std::size_t l = 0; l < meshes.size(); ++l) {
        const ConnectionU1 conn = monopole_connection(meshes[l], n);
        const SpectrumResult r = eigen(magnetic_hamiltonian(conn, k), std::min<int>(modes, static_cast<int>(meshes[l]->num_vertices())), o);
        DegeneracyLevel lv;
        // icosahedral level when known, otherwise the position in the list
        const auto& params = meshes[l]->info().params;
        lv.level = params.count("L") ? static_cast<int>(std::lround(params.at("L"))) : static_cast<int>(l);
        lv.vertices = meshes[l]->num_vertices();
        lv.values = r.values;
        lv.lowest_cluster = r.clusters.front().size;
        if (r.clusters.size() > 1) lv.gap_after = relative_gap(r.values[lv.lowest_cluster - 1], r.values[lv.lowest_cluster]);
        note << ' ' << lv.lowest_cluster << (r.clusters.front().complete ? "" : "+");
        report.levels.push_back(std::move(lv));
    }
    const DegeneracyLevel& finest = report.levels.back();
    report.stabilized = finest.lowest_cluster == report.expected && finest.gap_after > 0.0;
    note << "; continuum value |n|+1 = " << report.expected;
    report.note = note.str();
    return report;
}

nlohmann::json spectrum_to_json(const SpectrumResult& r) {
    nlohmann::json clusters = nlohmann::json::array();
    for (const auto& c : r.clusters)
        clusters.push_back({{"begin", c.begin}, {"size", c.size}, {"mean", c.mean}, {"complete", c.complete}});
    return {{"eigenvalues", r.values},
            {"residuals", r.residuals},
            {"clusters", clusters},
            {"solver", {{"method", r.method}, {"iterations", r.iterations}, {"restarts", r.restarts}, {"shift", r.shift}}}};
}

std::string spectrum_to_csv(const SpectrumResult& r) {
    std::vector<int> cluster_of(r.values.size(), 0);
    for (std::size_t c = 0; c < r.clusters.size(); ++c)
        for (int i = 0; i < r.clusters[c].size; ++i) cluster_of[r.clusters[c].begin + i] = static_cast<int>(c);
    std::ostringstream out;
    out.precision(17);
    out << "index,eigenvalue,cluster,residual\n";
    for (std::size_t i = 0; i < r.values.size(); ++i)
        out << i << ',' << r.values[i] << ',' << cluster_of[i] << ',' << r.residuals[i] << '\n';
    return out.str();
}

nlohmann::json degeneracy_to_json(const DegeneracyReport& r) {
    nlohmann::json levels = nlohmann::json::array();
    for (const auto& l : r.levels)
        levels.push_back({{"level", l.level},
                          {"vertices", l.vertices},
                          {"eigenvalues", l.values},
                          {"lowest_cluster", l.lowest_cluster},
                          {"relative_gap", l.gap_after}});
    return {{"n", r.n}, {"expected", r.expected}, {"levels", levels}, {"stabilized", r.stabilized}, {"note", r.note}};
}

}  // namespace bqk
