#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bqk/error.hpp"
#include "bqk/operators.hpp"

using namespace bqk;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double max_abs(const SparseMatrix& m) {
    double w = 0.0;
    for (int c = 0; c < m.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(m, c); it; ++it) w = std::max(w, std::abs(it.value()));
    return w;
}

DiscreteVectorField random_field(const MeshComplex& m, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    DiscreteVectorField X;
    for (std::size_t e = 0; e < m.num_edges(); ++e) X.flow.push_back(u(rng));
    return X;
}

}  // namespace

TEST_CASE("Fourier circle: exact momentum and energy") {
    const PhysicalConstants k;  // hbar 1, mass 1/2: E = (k - theta)^2
    const FourierCircle fc = fourier_backend_circle(64, 0.25, k);
    REQUIRE(fc.modes.size() == 129);
    for (std::size_t i = 0; i < fc.modes.size(); ++i) {
        const double kk = static_cast<double>(fc.modes[i]);
        CHECK(std::abs(fc.P.matrix.coeff(i, i).real() - (kk - 0.25)) <= 1e-12);
        CHECK(std::abs(fc.H.matrix.coeff(i, i).real() - (kk - 0.25) * (kk - 0.25)) <= 1e-12);
    }
    PhysicalConstants heavy;
    heavy.hbar = 2.0;
    heavy.mass = 4.0;
    const FourierCircle h = fourier_backend_circle(3, 0.5, heavy);
    // hbar (k - theta) = 2 * 2.5 at k = 3; energy hbar^2 (k - theta)^2 / 2m
    CHECK(h.P.matrix.coeff(6, 6).real() == doctest::Approx(5.0));
    CHECK(h.H.matrix.coeff(6, 6).real() == doctest::Approx(25.0 / 8.0));
}

TEST_CASE("Fourier Heisenberg identity is exact on interior modes") {
    for (int p : {1, 2, -3}) CHECK(fourier_heisenberg_residual(32, 0.25, p) < 1e-12);
}

TEST_CASE("flagged operators are Hermitian") {
    const MeshPtr s = share(catalogue("sphere", {{"L", 2}}));
    const ConnectionU1 a = monopole_connection(s, 2);
    const SparseOperator P = momentum_operator(a, random_field(*s, 1), 0.7);
    CHECK(P.hermitian);
    CHECK(hermiticity_defect(P) <= 1e-12);
    const SparseOperator D = covariant_derivative(a, random_field(*s, 2));
    CHECK(hermiticity_defect(cplx(0.0, -1.0) * D) > 1e-6);  // the divergence term is needed

    std::vector<double> f(s->num_vertices());
    for (std::size_t v = 0; v < f.size(); ++v) f[v] = std::cos(static_cast<double>(v));
    const SparseOperator Q = position_operator(*s, VertexFunction::from_real(f), true);
    CHECK(Q.hermitian);
    CHECK(hermiticity_defect(Q) <= 1e-15);

    VertexFunction g;
    g.values.assign(s->num_vertices(), cplx(0.0, 1.0));
    g.real = false;
    CHECK_FALSE(position_operator(*s, g).hermitian);
    CHECK_THROWS_AS(position_operator(*s, g, true), InputError);
}

TEST_CASE("c is invisible on divergence-free fields") {
    const MeshPtr t = share(catalogue("torus"));
    const ConnectionU1 a = flat_connection(t, {0.3, 0.1});
    std::vector<double> stream;
    for (std::size_t f = 0; f < t->num_faces(); ++f) stream.push_back(std::sin(1.3 * static_cast<double>(f)));
    const DiscreteVectorField X = stream_field(*t, stream);
    const SparseOperator P0 = momentum_operator(a, X, 0.0);
    const SparseOperator P1 = momentum_operator(a, X, 3.5);
    CHECK(max_abs(P0.matrix - P1.matrix) == 0.0);
    // a field with sources does see c
    const DiscreteVectorField Y = random_field(*t, 4);
    CHECK(max_abs(momentum_operator(a, Y, 0.0).matrix - momentum_operator(a, Y, 3.5).matrix) > 1e-3);
}

TEST_CASE("momentum is gauge covariant") {
    const MeshPtr s = share(catalogue("sphere", {{"L", 1}}));
    const ConnectionU1 a = monopole_connection(s, 1);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    GaugeTransform g;
    for (std::size_t v = 0; v < s->num_vertices(); ++v) g.chi.push_back(u(rng));
    const DiscreteVectorField X = random_field(*s, 6);
    const SparseOperator U = gauge_unitary(*s, g);
    const SparseOperator Ui = gauge_unitary(*s, GaugeTransform{[&] {
        std::vector<double> m = g.chi;
        for (auto& x : m) x = -x;
        return m;
    }()});
    const SparseOperator lhs = compose(U, compose(momentum_operator(a, X, 0.2), Ui));
    const SparseOperator rhs = momentum_operator(gauge_transform(a, g), X, 0.2);
    CHECK(max_abs(lhs.matrix - rhs.matrix) < 1e-12);
}

TEST_CASE("Heisenberg residual converges on the torus") {
    const auto f = [](const Vec3& p) { return p.x() / std::hypot(p.x(), p.y()); };
    const auto X = [](const Vec3& p) { return Vec3(-two_pi * p.y(), two_pi * p.x(), 0.0); };
    std::vector<ConnectionU1> levels;
    MeshComplex m = refine(catalogue("torus"));
    for (int l = 0; l < 3; ++l) {
        levels.push_back(trivial_connection(share(m)));
        m = refine(m);
    }
    const ConvergenceReport r = heisenberg_residual(levels, f, X, 0.3);
    REQUIRE(r.orders.size() == 2);
    CHECK(r.min_order() >= 0.9);
    CHECK(r.levels.back().residual < r.levels.front().residual);
    CHECK_THROWS_AS(heisenberg_residual({levels[0]}, f, X, 0.0), InputError);
}

TEST_CASE("Lie bracket of rotations") {
    const AmbientField Lz = [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0.0); };
    const AmbientField Lx = [](const Vec3& p) { return Vec3(0.0, -p.z(), p.y()); };
    const Vec3 p(0.3, -0.4, 0.5);
    const Vec3 b = lie_bracket(Lz, Lx)(p);
    // [Lz, Lx] = (-z, 0, x)
    CHECK(b.x() == doctest::Approx(-0.5).epsilon(1e-8));
    CHECK(std::abs(b.y()) < 1e-8);
    CHECK(b.z() == doctest::Approx(0.3).epsilon(1e-8));
}

TEST_CASE("triplet export is sorted and stable") {
    const MeshPtr c = share(catalogue("circle", {{"N", 4}}));
    const SparseOperator P = momentum_operator(aharonov_bohm_connection(c, 0.25),
                                               sample_vector_field(*c, [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0.0); }), 0.0);
    const nlohmann::json j = operator_to_json(P);
    CHECK(j["dim"] == 4);
    const auto rows = j["rows"].get<std::vector<long>>();
    const auto cols = j["cols"].get<std::vector<long>>();
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK((rows[i - 1] < rows[i] || (rows[i - 1] == rows[i] && cols[i - 1] < cols[i])));
    CHECK(operator_to_csv(P).rfind("row,col,re,im\n", 0) == 0);
    CHECK(operator_to_json(P).dump() == j.dump());
}
