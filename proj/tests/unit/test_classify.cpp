#include <doctest.h>

#include <cmath>
#include <numbers>

#include "bqk/classify.hpp"
#include "bqk/error.hpp"

using namespace bqk;

namespace {
using Labels = std::vector<std::string>;
}

TEST_CASE("cards list the topological quantum numbers") {
    CHECK(enumerate_classes(catalogue("circle")).quantum_numbers == Labels{"theta in [0,1)"});
    CHECK(enumerate_classes(catalogue("annulus")).quantum_numbers == Labels{"theta in [0,1)"});
    CHECK(enumerate_classes(catalogue("sphere")).quantum_numbers == Labels{"n in Z"});
    CHECK(enumerate_classes(catalogue("torus")).quantum_numbers == Labels{"n in Z", "theta_1, theta_2 in [0,1)"});
    CHECK(enumerate_classes(catalogue("genus_surface", {{"p", 2}})).quantum_numbers ==
          Labels{"n in Z", "theta_1, ..., theta_4 in [0,1)"});
    CHECK(enumerate_classes(catalogue("projective_plane")).quantum_numbers == Labels{"m in Z_2"});
}

TEST_CASE("card JSON fields") {
    const nlohmann::json torus = card_to_json(enumerate_classes(catalogue("torus")));
    CHECK(torus["manifold"] == "torus");
    CHECK(torus["pi1"] == "Z^2");
    CHECK(torus["H1"]["betti"] == 2);
    CHECK(torus["H2"]["betti"] == 1);
    CHECK(torus["classes"]["c"] == "R");
    CHECK(torus["classes"]["thetas"] == 2);

    const nlohmann::json rp = card_to_json(enumerate_classes(catalogue("projective_plane")));
    CHECK(rp["pi1"] == "Z_2");
    CHECK(rp["H1"]["torsion"] == nlohmann::json::array({2}));
    CHECK(rp["H2"]["torsion"] == nlohmann::json::array({2}));
    CHECK(rp["physical_reading"].get<std::string>().find("anyonic") != std::string::npos);

    const nlohmann::json k2 = card_to_json(enumerate_classes(catalogue("genus_surface", {{"p", 2}})));
    CHECK(k2["pi1"] == "<a1, b1, a2, b2 | [a1,b1][a2,b2]>");
}

TEST_CASE("flat connections classify back to their characters") {
    const MeshPtr k2 = share(catalogue("genus_surface", {{"p", 2}}));
    const std::vector<double> thetas{0.1, 0.45, 0.0, 0.8};
    const QuantumNumbers q = classify_connection(flat_connection(k2, thetas), 0.5);
    REQUIRE(q.thetas.size() == 4);
    for (std::size_t j = 0; j < 4; ++j) CHECK(q.thetas[j] == doctest::Approx(thetas[j]).epsilon(1e-12));
    CHECK(q.chern.value() == 0);
    CHECK(q.c == 0.5);

    const MeshPtr rp = share(catalogue("projective_plane"));
    const QuantumNumbers m1 = classify_connection(flat_connection(rp, {}, {1}));
    CHECK(m1.torsion_chars == std::vector<long>{1});
    CHECK(m1.torsion_orders == std::vector<long>{2});
    CHECK(std::abs(m1.torsion_holonomy[0] - cplx(-1.0)) < 1e-12);
}

TEST_CASE("Aharonov-Bohm equivalence modulo whole flux quanta") {
    const MeshPtr ann = share(catalogue("annulus"));
    const auto q = [&](double theta) { return classify_connection(aharonov_bohm_connection(ann, theta)); };
    CHECK(equivalent(q(0.3), q(1.3)));
    CHECK(equivalent(q(0.3), q(-0.7)));
    CHECK_FALSE(equivalent(q(0.3), q(0.35)));
    CHECK(q(0.999999999999).thetas[0] >= 0.0);
    CHECK(q(1.0).thetas[0] < 1e-12);
}

TEST_CASE("different c are inequivalent") {
    const MeshPtr s = share(catalogue("sphere", {{"L", 1}}));
    const ConnectionU1 a = monopole_connection(s, 1);
    CHECK(equivalent(classify_connection(a, 0.0), classify_connection(a, 0.0)));
    CHECK_FALSE(equivalent(classify_connection(a, 0.0), classify_connection(a, 0.25)));
    CHECK_FALSE(equivalent(classify_connection(a, 0.0), classify_connection(monopole_connection(s, 2), 0.0)));
}

TEST_CASE("mismatched manifolds") {
    const auto a = classify_connection(trivial_connection(share(catalogue("torus"))));
    const auto b = classify_connection(trivial_connection(share(catalogue("annulus"))));
    CHECK_THROWS_AS(equivalent(a, b), InputError);
}

TEST_CASE("flat bundles from characters") {
    const MeshPtr t = share(catalogue("torus"));
    QuantumNumbers a, b;
    a.thetas = {0.2, 0.0};
    b.thetas = {0.5, 0.5};
    a.chern.components = b.chern.components = {{0, 0}};
    const auto lines = build_flat_bundle_r(t, {a, b});
    REQUIRE(lines.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) CHECK(is_flat(lines[i]));
    CHECK(classify_connection(lines[1]).thetas[0] == doctest::Approx(0.5));
    QuantumNumbers charged = a;
    charged.chern.components = {{1, 0}};
    CHECK_THROWS_AS(build_flat_bundle_r(t, {charged}), InputError);
}

TEST_CASE("wrap_theta") {
    CHECK(wrap_theta(1.25) == doctest::Approx(0.25));
    CHECK(wrap_theta(-0.25) == doctest::Approx(0.75));
    CHECK(wrap_theta(3.0) == 0.0);
}
