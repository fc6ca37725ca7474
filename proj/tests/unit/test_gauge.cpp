#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bqk/error.hpp"
#include "bqk/gauge.hpp"

using namespace bqk;

namespace {

constexpr double pi = std::numbers::pi;
const std::string data_dir = BQK_TEST_DATA;

MeshPtr sphere(int level) { return share(catalogue("sphere", {{"L", level}})); }

}  // namespace

TEST_CASE("Dirac integrality on refined spheres") {
    for (int level = 1; level <= 2; ++level) {
        const MeshPtr m = sphere(level);
        for (long n = -5; n <= 5; ++n) {
            const ChernClass c = chern_number(monopole_connection(m, n));
            REQUIRE(c.components.size() == 1);
            CHECK(c.components[0].modulus == 0);
            CHECK(c.value() == n);
        }
    }
}

TEST_CASE("monopole flux is spread by area") {
    const MeshPtr m = sphere(1);
    const ConnectionU1 a = monopole_connection(m, 2);
    const CurvatureField F = curvature(a);
    double total = 0.0;
    for (double x : F.flux) total += x;
    // the root face carries its share minus the 2 pi n Dirac string, which
    // the principal branch removes again
    CHECK(std::abs(total - 4.0 * pi) < 1e-9);
    CHECK_FALSE(is_flat(a));
}

TEST_CASE("monopole constructor preconditions") {
    CHECK_THROWS_AS(monopole_connection(share(catalogue("torus")), 1), InvariantError);
    // one face would need a flux above pi
    CHECK_THROWS_AS(monopole_connection(sphere(0), 12), InvariantError);
}

TEST_CASE("trivial connection") {
    const ConnectionU1 t = trivial_connection(sphere(0));
    CHECK(chern_number(t).value() == 0);
    CHECK(is_flat(t));
}

TEST_CASE("Aharonov-Bohm holonomy") {
    const MeshPtr ann = share(catalogue("annulus"));
    const ConnectionU1 a = aharonov_bohm_connection(ann, 0.25);
    CHECK(is_flat(a));
    const CycleBasis b = cycle_basis(*ann);
    REQUIRE(b.free.size() == 1);
    const cplx h = holonomy(a, b.free[0]);
    CHECK(std::abs(h - std::polar(1.0, 2.0 * pi * 0.25)) < 1e-12);
    CHECK_THROWS_AS(aharonov_bohm_connection(sphere(0), 0.25), InvariantError);
}

TEST_CASE("holonomy rejects non-cycles") {
    const MeshPtr ann = share(catalogue("annulus"));
    Chain c(ann->num_edges(), 0);
    c[0] = 1;
    CHECK_THROWS_AS(holonomy(trivial_connection(ann), c), InputError);
}

TEST_CASE("gauge transforms keep curvature and holonomy") {
    const MeshPtr t = share(catalogue("torus"));
    const ConnectionU1 a = flat_connection(t, {0.3, 0.7});
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-pi, pi);
    GaugeTransform g;
    for (std::size_t v = 0; v < t->num_vertices(); ++v) g.chi.push_back(u(rng));
    const ConnectionU1 b = gauge_transform(a, g);
    for (const auto& z : cycle_basis(*t).free) CHECK(std::abs(holonomy(a, z) - holonomy(b, z)) < 1e-12);
    CHECK(is_flat(b));
}

TEST_CASE("log-exact cochains") {
    const MeshPtr ann = share(catalogue("annulus"));
    CHECK(is_log_exact(*ann, aharonov_bohm_connection(ann, 2.0).phases));
    CHECK(is_log_exact(*ann, aharonov_bohm_connection(ann, -1.0).phases));
    CHECK_FALSE(is_log_exact(*ann, aharonov_bohm_connection(ann, 0.5).phases));
    CHECK_FALSE(is_log_exact(*sphere(1), monopole_connection(sphere(1), 1).phases));
}

TEST_CASE("flat torsion character on the projective plane") {
    const MeshPtr rp = share(catalogue("projective_plane"));
    const ConnectionU1 a = flat_connection(rp, {}, {1});
    const CycleBasis b = cycle_basis(*rp);
    REQUIRE(b.torsion.size() == 1);
    CHECK(std::abs(holonomy(a, b.torsion[0].cycle) - cplx(-1.0)) < 1e-12);
    const ChernClass c = chern_number(a);
    REQUIRE(c.components.size() == 1);
    CHECK(c.components[0].modulus == 2);
    CHECK(c.components[0].value == 1);
    CHECK(chern_number(flat_connection(rp, {}, {0})).value() == 0);
    CHECK_THROWS_AS(flat_connection(rp, {}, {2}), InputError);
}

TEST_CASE("connection JSON") {
    const MeshPtr tri = share(load_mesh(data_dir + "/triangle.json"));
    const ConnectionU1 a = load_connection(tri, data_dir + "/triangle_connection.json");
    CHECK(a.phases[0] == doctest::Approx(0.25));
    CHECK(a.phases[2] == doctest::Approx(0.25));  // given as "-3": -0.25
    CHECK(curvature(a).flux[0] == doctest::Approx(0.75));

    const ConnectionU1 back = connection_from_json(tri, connection_to_json(a));
    CHECK(back.phases == a.phases);

    try {
        load_connection(tri, data_dir + "/bad_connection.json");
        FAIL("expected an error");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("antisymmetry violated: edge 1") != std::string::npos);
    }
    const MeshPtr other = share(catalogue("torus"));
    CHECK_THROWS_AS(load_connection(other, data_dir + "/triangle_connection.json"), InputError);
}
