#include "bqk/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <tuple>

#include "bqk/error.hpp"

namespace bqk {

namespace {

using Triplet = Eigen::Triplet<cplx>;
constexpr cplx I(0.0, 1.0);

SparseOperator make_operator(Eigen::Index n, const std::vector<Triplet>& triplets, std::vector<double> weights,
                             std::string label, int radius) {
    SparseOperator op;
    op.matrix.resize(n, n);
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    op.weights = std::move(weights);
    op.label = std::move(label);
    op.stencil_radius = radius;
    return op;
}

SparseMatrix diagonal(const std::vector<double>& d) {
    SparseMatrix m(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    std::vector<Triplet> t;
    t.reserve(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(static_cast<int>(i), static_cast<int>(i), d[i]);
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

std::vector<double> mesh_weights(const MeshComplex& mesh) { return {mesh.measure().begin(), mesh.measure().end()}; }

void require_compatible(const SparseOperator& a, const SparseOperator& b) {
    if (a.dim() != b.dim()) throw InputError("operator dimensions differ");
}

Section sample_section(const MeshComplex& mesh, const TestSection& f) {
    Section s(static_cast<Eigen::Index>(mesh.num_vertices()));
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) s[static_cast<Eigen::Index>(v)] = f(mesh.positions()[v]);
    return s;
}

}  // namespace

cplx inner_product(const std::vector<double>& weights, const Section& a, const Section& b) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) s += weights[static_cast<std::size_t>(i)] * std::conj(a[i]) * b[i];
    return s;
}

double weighted_norm(const std::vector<double>& weights, const Section& a) {
    return std::sqrt(std::max(0.0, inner_product(weights, a, a).real()));
}

SparseOperator adjoint(const SparseOperator& op) {
    std::vector<double> inv(op.weights.size());
    for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / op.weights[i];
    SparseOperator out = op;
    out.matrix = diagonal(inv) * SparseMatrix(op.matrix.adjoint()) * diagonal(op.weights);
    out.label = op.label + "^dagger";
    return out;
}

double hermiticity_defect(const SparseOperator& op) {
    const SparseMatrix diff = op.matrix - adjoint(op).matrix;
    double worst = 0.0, scale = 1.0;
    for (int k = 0; k < diff.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
    return worst / scale;
}

SparseOperator hermitize(SparseOperator op) {
    const SparseMatrix adj = adjoint(op).matrix;
    op.matrix = 0.5 * (op.matrix + adj);
    op.matrix.prune(cplx(0.0));
    op.hermitian = true;
    return op;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    require_compatible(a, b);
    SparseOperator out = a;
    out.matrix = a.matrix + b.matrix;
    out.hermitian = a.hermitian && b.hermitian;
    out.stencil_radius = std::max(a.stencil_radius, b.stencil_radius);
    return out;
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    require_compatible(a, b);
    SparseOperator out = a;
    out.matrix = a.matrix - b.matrix;
    out.hermitian = a.hermitian && b.hermitian;
    out.stencil_radius = std::max(a.stencil_radius, b.stencil_radius);
    return out;
}

SparseOperator operator*(cplx s, const SparseOperator& a) {
    SparseOperator out = a;
    out.matrix = s * a.matrix;
    out.hermitian = a.hermitian && s.imag() == 0.0;
    return out;
}

SparseOperator compose(const SparseOperator& a, const SparseOperator& b) {
    require_compatible(a, b);
    SparseOperator out = a;
    out.matrix = (a.matrix * b.matrix).pruned();
    out.hermitian = false;
    out.stencil_radius = a.stencil_radius + b.stencil_radius;
    out.label = a.label + "*" + b.label;
    return out;
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
    SparseOperator out = compose(a, b) - compose(b, a);
    out.hermitian = false;
    out.label = "[" + a.label + "," + b.label + "]";
    return out;
}

SparseOperator identity_operator(const MeshComplex& mesh) {
    return position_operator(mesh, VertexFunction::from_real(std::vector<double>(mesh.num_vertices(), 1.0)));
}

SparseOperator position_operator(const MeshComplex& mesh, const VertexFunction& f, bool require_hermitian) {
    if (f.values.size() != mesh.num_vertices()) throw InputError("position operator: function does not match the mesh");
    bool real = true;
    for (const auto& x : f.values) real = real && x.imag() == 0.0;
    if (require_hermitian && !real) throw InputError("position operator: complex function cannot give a Hermitian operator");
    std::vector<Triplet> t;
    for (std::size_t v = 0; v < f.values.size(); ++v)
        if (f.values[v] != 0.0) t.emplace_back(static_cast<int>(v), static_cast<int>(v), f.values[v]);
    SparseOperator op = make_operator(static_cast<Eigen::Index>(mesh.num_vertices()), t, mesh_weights(mesh), "Q", 0);
    op.hermitian = real;
    return op;
}

SparseOperator covariant_derivative(const ConnectionU1& conn, const DiscreteVectorField& X) {
    const MeshComplex& mesh = conn.complex();
    if (X.flow.size() != mesh.num_edges()) throw InputError("vector field does not match the connection's mesh");
    const auto mu = mesh.measure();
    const auto w = mesh.edge_weights();
    std::vector<Triplet> t;
    t.reserve(4 * mesh.num_edges());
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
        if (X.flow[e] == 0.0) continue;
        const int a = mesh.edge(e).tail;
        const int b = mesh.edge(e).head;
        const double ka = w[e] * X.flow[e] / (2.0 * mu[a]);
        const double kb = w[e] * X.flow[e] / (2.0 * mu[b]);
        const cplx phase = std::polar(1.0, conn.phases[e]);
        // leaving a along e, and leaving b along -e (flow and phase reversed)
        t.emplace_back(a, b, ka * phase);
        t.emplace_back(a, a, -ka);
        t.emplace_back(b, a, -kb * std::conj(phase));
        t.emplace_back(b, b, kb);
    }
    return make_operator(static_cast<Eigen::Index>(mesh.num_vertices()), t, mesh_weights(mesh), "nabla_X", 1);
}

SparseOperator momentum_operator(const ConnectionU1& conn, const DiscreteVectorField& X, double c, const PhysicalConstants& k) {
    const MeshComplex& mesh = conn.complex();
    const VertexFunction div = divergence(mesh, X);
    std::vector<cplx> shift(mesh.num_vertices());
    for (std::size_t v = 0; v < shift.size(); ++v) shift[v] = (-I * k.hbar / 2.0 + k.hbar * c) * div.values[v];
    const SparseOperator nabla = covariant_derivative(conn, X);
    SparseOperator A = (-I * k.hbar) * nabla + position_operator(mesh, VertexFunction{shift, false});
    SparseOperator P = hermitize(std::move(A));
    P.label = "P_X";
    P.stencil_radius = 1;
    return P;
}

SparseOperator block_diagonal(const std::vector<SparseOperator>& blocks) {
    if (blocks.empty()) throw InputError("block_diagonal: no blocks");
    Eigen::Index n = 0;
    for (const auto& b : blocks) n += b.dim();
    std::vector<Triplet> t;
    std::vector<double> weights;
    Eigen::Index offset = 0;
    bool herm = true;
    int radius = 0;
    for (const auto& b : blocks) {
        for (int k = 0; k < b.matrix.outerSize(); ++k)
            for (SparseMatrix::InnerIterator it(b.matrix, k); it; ++it)
                t.emplace_back(static_cast<int>(it.row() + offset), static_cast<int>(it.col() + offset), it.value());
        weights.insert(weights.end(), b.weights.begin(), b.weights.end());
        offset += b.dim();
        herm = herm && b.hermitian;
        radius = std::max(radius, b.stencil_radius);
    }
    SparseOperator op = make_operator(n, t, std::move(weights), blocks.front().label + "^(" + std::to_string(blocks.size()) + ")", radius);
    op.hermitian = herm;
    return op;
}

SparseOperator momentum_operator_bundle(const std::vector<ConnectionU1>& lines, const DiscreteVectorField& X, double c,
                                        const PhysicalConstants& k) {
    std::vector<SparseOperator> blocks;
    for (const auto& line : lines) blocks.push_back(momentum_operator(line, X, c, k));
    return block_diagonal(blocks);
}

SparseOperator gauge_unitary(const MeshComplex& mesh, const GaugeTransform& g) {
    if (g.chi.size() != mesh.num_vertices()) throw InputError("gauge transform does not match the mesh");
    std::vector<cplx> u(g.chi.size());
    for (std::size_t v = 0; v < u.size(); ++v) u[v] = std::polar(1.0, -g.chi[v]);
    SparseOperator op = position_operator(mesh, VertexFunction{u, false});
    op.label = "U_g";
    return op;
}

FourierCircle fourier_backend_circle(int K, double theta, const PhysicalConstants& k) {
    if (K < 1) throw InputError("Fourier backend needs K >= 1");
    if (!std::isfinite(theta)) throw InputError("theta must be finite");
    FourierCircle out;
    out.theta = theta;
    std::vector<Triplet> p, h;
    for (long m = -K; m <= K; ++m) {
        const int i = static_cast<int>(m + K);
        const double pk = k.hbar * (static_cast<double>(m) - theta);
        out.modes.push_back(m);
        p.emplace_back(i, i, pk);
        h.emplace_back(i, i, pk * pk / (2.0 * k.mass));
    }
    const Eigen::Index n = 2 * K + 1;
    const std::vector<double> w(static_cast<std::size_t>(n), 1.0);
    out.P = make_operator(n, p, w, "P_fourier", 0);
    out.H = make_operator(n, h, w, "H_fourier", 0);
    out.P.hermitian = out.H.hermitian = true;
    return out;
}

SparseOperator fourier_exp_position(int K, int p) {
    if (K < 1) throw InputError("Fourier backend needs K >= 1");
    std::vector<Triplet> t;
    for (long m = -K; m <= K; ++m)
        if (std::abs(m + p) <= K) t.emplace_back(static_cast<int>(m + p + K), static_cast<int>(m + K), 1.0);
    const Eigen::Index n = 2 * K + 1;
    return make_operator(n, t, std::vector<double>(static_cast<std::size_t>(n), 1.0), "Q_exp", std::abs(p));
}

double fourier_heisenberg_residual(int K, double theta, int p, const PhysicalConstants& k) {
    const FourierCircle fc = fourier_backend_circle(K, theta, k);
    const SparseOperator Q = fourier_exp_position(K, p);
    // d/dphi exp(i p phi) = i p exp(i p phi), so i hbar Q(Xf) = -hbar p Q
    const SparseMatrix R = Q.matrix * fc.P.matrix - fc.P.matrix * Q.matrix + k.hbar * static_cast<double>(p) * Q.matrix;
    double worst = 0.0;
    for (int c = 0; c < R.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(R, c); it; ++it) worst = std::max(worst, std::abs(it.value()));
    return worst;
}

double ConvergenceReport::min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return m;
}

ConvergenceReport heisenberg_residual(const std::vector<ConnectionU1>& levels, const ScalarField& f, const AmbientField& X,
                                      double c, const PhysicalConstants& k, std::vector<TestSection> tests) {
    if (levels.size() < 2) throw InputError("heisenberg_residual needs at least two refinement levels");
    if (tests.empty()) {
        tests = {[](const Vec3& p) { return cplx(p.x()); }, [](const Vec3& p) { return cplx(p.y()); },
                 [](const Vec3& p) { return cplx(p.z()); },
                 [](const Vec3& p) { return std::polar(1.0, p.x() + 2.0 * p.y() - p.z()); }};
    }
    ConvergenceReport report;
    for (const auto& conn : levels) {
        const MeshComplex& mesh = conn.complex();
        const DiscreteVectorField Xd = sample_vector_field(mesh, X);
        const VertexFunction fv = sample_function(mesh, f);
        const SparseOperator Q = position_operator(mesh, fv);
        const SparseOperator P = momentum_operator(conn, Xd, c, k);
        // X f with the same difference stencil (functions carry no phases)
        const SparseOperator D = covariant_derivative(trivial_connection(conn.mesh), Xd);
        Section fs(static_cast<Eigen::Index>(mesh.num_vertices()));
        for (std::size_t v = 0; v < mesh.num_vertices(); ++v) fs[static_cast<Eigen::Index>(v)] = fv.values[v];
        const Section xf = D.apply(fs);
        const std::vector<double> mu = mesh_weights(mesh);
        double worst = 0.0;
        for (const auto& test : tests) {
            const Section psi = sample_section(mesh, test);
            const double nrm = weighted_norm(mu, psi);
            if (nrm == 0.0) continue;
            const Section r = Q.apply(P.apply(psi)) - P.apply(Q.apply(psi)) - (I * k.hbar) * xf.cwiseProduct(psi);
            worst = std::max(worst, weighted_norm(mu, r) / nrm);
        }
        report.levels.push_back({mesh.num_vertices(), worst});
    }
    for (std::size_t l = 0; l + 1 < report.levels.size(); ++l) {
        const double a = report.levels[l].residual, b = report.levels[l + 1].residual;
        report.orders.push_back(a > 0.0 && b > 0.0 ? std::log2(a / b) : std::numeric_limits<double>::infinity());
    }
    return report;
}

AmbientField lie_bracket(AmbientField X, AmbientField Y, double step) {
    return [X = std::move(X), Y = std::move(Y), step](const Vec3& p) -> Vec3 {
        const Vec3 x = X(p), y = Y(p);
        const Vec3 dYx = (Y(p + step * x) - Y(p - step * x)) / (2.0 * step);
        const Vec3 dXy = (X(p + step * y) - X(p - step * y)) / (2.0 * step);
        return dYx - dXy;
    };
}

SparseOperator curvature_from_commutators(const ConnectionU1& conn, const DiscreteVectorField& X, const DiscreteVectorField& Y,
                                          const DiscreteVectorField& XY, double c, const PhysicalConstants& k) {
    const SparseOperator PX = momentum_operator(conn, X, c, k);
    const SparseOperator PY = momentum_operator(conn, Y, c, k);
    const SparseOperator PXY = momentum_operator(conn, XY, c, k);
    SparseOperator R = (-1.0 / (k.hbar * k.hbar)) * (commutator(PX, PY) + (I * k.hbar) * PXY);
    R.hermitian = false;
    R.label = "R_XY";
    return R;
}

double compare_on_subspace(const SparseOperator& R, const std::vector<double>& g, const std::vector<Section>& basis_in) {
    const std::vector<double>& w = R.weights;
    std::vector<Section> basis;
    for (Section v : basis_in) {
        for (const auto& b : basis) v -= inner_product(w, b, v) * b;
        const double n = weighted_norm(w, v);
        if (n > 1e-10) basis.push_back(v / n);
    }
    const Eigen::Index m = static_cast<Eigen::Index>(basis.size());
    Eigen::MatrixXcd A(m, m), G(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        const Section rb = R.apply(basis[j]);
        Section gb = basis[j];
        for (Eigen::Index v = 0; v < gb.size(); ++v) gb[v] *= g[static_cast<std::size_t>(v)];
        for (Eigen::Index i = 0; i < m; ++i) {
            A(i, j) = inner_product(w, basis[i], rb);
            G(i, j) = inner_product(w, basis[i], gb);
        }
    }
    const double denom = G.norm();
    const double err = (A - I * G).norm();
    return denom > 0.0 ? err / denom : err;
}

nlohmann::json operator_to_json(const SparseOperator& op) {
    std::vector<std::tuple<long, long, cplx>> entries;
    for (int k = 0; k < op.matrix.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(op.matrix, k); it; ++it) entries.emplace_back(it.row(), it.col(), it.value());
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
        return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    std::vector<long> rows, cols;
    std::vector<double> re, im;
    for (const auto& [r, c, v] : entries) {
        rows.push_back(r);
        cols.push_back(c);
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return {{"dim", op.dim()},      {"rows", rows},           {"cols", cols},
            {"re", re},             {"im", im},               {"hermitian", op.hermitian},
            {"label", op.label},    {"stencil_radius", op.stencil_radius}};
}

std::string operator_to_csv(const SparseOperator& op) {
    const nlohmann::json j = operator_to_json(op);
    std::ostringstream out;
    out.precision(17);
    out << "row,col,re,im\n";
    for (std::size_t i = 0; i < j["rows"].size(); ++i)
        out << j["rows"][i].get<long>() << ',' << j["cols"][i].get<long>() << ',' << j["re"][i].get<double>() << ','
            << j["im"][i].get<double>() << '\n';
    return out.str();
}

}  // namespace bqk
