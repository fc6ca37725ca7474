#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bqk/error.hpp"
#include "bqk/spectra.hpp"

using namespace bqk;

namespace {

EigenOptions psd() {
    EigenOptions o;
    o.positive_semidefinite = true;
    return o;
}

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double w = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) w = std::max(w, std::abs(a[i] - b[i]));
    return w;
}

}  // namespace

TEST_CASE("cluster splitting") {
    const auto c = cluster_values({1.0, 1.0 + 1e-12, 2.0, 2.01, 5.0}, 0.05, 1e-9, false);
    REQUIRE(c.size() == 3);
    CHECK(c[0].size == 2);
    CHECK(c[1].size == 2);
    CHECK(c[2].size == 1);
    CHECK(c[1].mean == doctest::Approx(2.005));
    const auto open = cluster_values({0.0, 1.0, 1.0}, 0.05, 1e-9, true);
    CHECK_FALSE(open.back().complete);
    CHECK(relative_gap(1.0, 2.0) == doctest::Approx(0.5));
}

TEST_CASE("round sphere Laplacian levels") {
    // l (l + 1) with multiplicity 2l + 1, hbar^2 / 2m = 1
    const MeshPtr s = share(catalogue("sphere", {{"L", 3}}));
    const SpectrumResult r = eigen(magnetic_hamiltonian(trivial_connection(s)), 9, psd());
    CHECK(std::abs(r.values[0]) < 1e-9);
    for (int i = 1; i < 4; ++i) CHECK(r.values[i] == doctest::Approx(2.0).epsilon(0.02));
    for (int i = 4; i < 9; ++i) CHECK(r.values[i] == doctest::Approx(6.0).epsilon(0.03));
    REQUIRE(r.clusters.size() >= 3);
    CHECK(r.clusters[0].size == 1);
    CHECK(r.clusters[1].size == 3);
    for (double res : r.residuals) CHECK(res <= 1e-8);
}

TEST_CASE("Krylov path agrees with the dense path") {
    const MeshPtr s = share(catalogue("sphere", {{"L", 3}}));  // 642 vertices
    const SparseOperator H = magnetic_hamiltonian(monopole_connection(s, 1));
    EigenOptions dense = psd();
    dense.dense_threshold = 100000;
    const SpectrumResult a = eigen(H, 8, psd());
    const SpectrumResult b = eigen(H, 8, dense);
    CHECK(a.method != b.method);
    CHECK(max_diff(a.values, b.values) < 1e-9);
}

TEST_CASE("monopole ground state degeneracy |n| + 1") {
    std::vector<MeshPtr> levels{share(catalogue("sphere", {{"L", 1}})), share(catalogue("sphere", {{"L", 2}}))};
    for (long n = 0; n <= 2; ++n) {
        const DegeneracyReport r = monopole_degeneracy(levels, n, 8, psd());
        CHECK(r.expected == n + 1);
        CHECK(r.levels.back().lowest_cluster == n + 1);
        CHECK(r.levels.back().gap_after >= 0.05);
        CHECK(r.stabilized);
    }
}

TEST_CASE("time reversal pairs n and -n") {
    const MeshPtr s = share(catalogue("sphere", {{"L", 2}}));
    for (long n = 1; n <= 3; ++n) {
        const auto a = eigen(magnetic_hamiltonian(monopole_connection(s, n)), 8, psd()).values;
        const auto b = eigen(magnetic_hamiltonian(monopole_connection(s, -n)), 8, psd()).values;
        CHECK(max_diff(a, b) < 1e-10);
    }
}

TEST_CASE("spectra are gauge invariant") {
    const MeshPtr t = share(catalogue("torus"));
    const ConnectionU1 a = flat_connection(t, {0.2, 0.6});
    const auto base = eigen(magnetic_hamiltonian(a), 6, psd()).values;
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.2, 3.2);
    GaugeTransform g;
    for (std::size_t v = 0; v < t->num_vertices(); ++v) g.chi.push_back(u(rng));
    CHECK(max_diff(base, eigen(magnetic_hamiltonian(gauge_transform(a, g)), 6, psd()).values) < 1e-10);
}

TEST_CASE("Aharonov-Bohm ring: theta and theta + 1 agree") {
    const MeshPtr ann = share(catalogue("annulus"));
    const auto a = eigen(magnetic_hamiltonian(aharonov_bohm_connection(ann, 0.3)), 6, psd()).values;
    const auto b = eigen(magnetic_hamiltonian(aharonov_bohm_connection(ann, 1.3)), 6, psd()).values;
    const auto c = eigen(magnetic_hamiltonian(aharonov_bohm_connection(ann, 0.0)), 6, psd()).values;
    CHECK(max_diff(a, b) < 1e-10);
    CHECK(max_diff(a, c) > 1e-3);
    // flux can only raise the ground state (diamagnetic inequality)
    CHECK(a[0] > c[0]);
}

TEST_CASE("theta sweep on the circle") {
    const auto rows = theta_sweep_circle(4, {0.0, 0.5, 1.0});
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].sorted[0] == 0.0);
    CHECK(rows[1].sorted[0] == doctest::Approx(0.25));
    CHECK(rows[1].sorted[1] == doctest::Approx(0.25));  // degenerate pair at half flux
    // interior modes at theta and theta + 1 agree as multisets
    for (int i = 0; i < 5; ++i) CHECK(std::abs(rows[0].sorted[i] - rows[2].sorted[i]) < 1e-12);
}

TEST_CASE("eigen preconditions") {
    const MeshPtr c = share(catalogue("circle", {{"N", 8}}));
    const SparseOperator H = magnetic_hamiltonian(trivial_connection(c));
    CHECK_THROWS_AS(eigen(H, 9), InputError);
    CHECK_THROWS_AS(eigen(H, 0), InputError);
    SparseOperator D = covariant_derivative(trivial_connection(c), DiscreteVectorField{std::vector<double>(8, 1.0), {}});
    CHECK_THROWS_AS(eigen(D, 2), InputError);
}

TEST_CASE("serialization is deterministic") {
    const MeshPtr s = share(catalogue("sphere", {{"L", 1}}));
    const SpectrumResult a = eigen(magnetic_hamiltonian(monopole_connection(s, 1)), 5, psd());
    const SpectrumResult b = eigen(magnetic_hamiltonian(monopole_connection(s, 1)), 5, psd());
    CHECK(spectrum_to_json(a).dump() == spectrum_to_json(b).dump());
    CHECK(spectrum_to_csv(a) == spectrum_to_csv(b));
    CHECK(spectrum_to_csv(a).rfind("index,eigenvalue,cluster,residual\n", 0) == 0);
}
