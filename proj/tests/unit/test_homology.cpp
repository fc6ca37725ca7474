#include <doctest.h>

#include "bqk/homology.hpp"

using namespace bqk;

namespace {

HomologyGroup Z(long b, std::vector<long> t = {}) { return {b, std::move(t)}; }

bool valid_basis(const MeshComplex& m) {
    const CycleBasis b = cycle_basis(m);
    for (const auto& z : b.free)
        if (!is_cycle(m, z)) return false;
    for (const auto& t : b.torsion) {
        if (!is_cycle(m, t.cycle)) return false;
        Chain scaled = t.cycle;
        for (auto& x : scaled) x *= t.order;
        if (boundary_of_faces(m, t.witness) != scaled) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("homology of the catalogue") {
    const MeshComplex circle = catalogue("circle");
    CHECK(homology(circle, 0) == Z(1));
    CHECK(homology(circle, 1) == Z(1));
    CHECK(homology(circle, 2) == Z(0));

    const MeshComplex annulus = catalogue("annulus");
    CHECK(homology(annulus, 1) == Z(1));
    CHECK(cohomology_h2(annulus) == Z(0));

    const MeshComplex sphere = catalogue("sphere");
    CHECK(homology(sphere, 1) == Z(0));
    CHECK(homology(sphere, 2) == Z(1));
    CHECK(cohomology_h2(sphere) == Z(1));

    const MeshComplex torus = catalogue("torus");
    CHECK(homology(torus, 1) == Z(2));
    CHECK(cohomology_h2(torus) == Z(1));

    const MeshComplex k2 = catalogue("genus_surface", {{"p", 2}});
    CHECK(homology(k2, 1) == Z(4));
    CHECK(cohomology_h2(k2) == Z(1));

    const MeshComplex rp2 = catalogue("projective_plane");
    CHECK(homology(rp2, 1) == Z(0, {2}));
    CHECK(homology(rp2, 2) == Z(0));
    CHECK(cohomology_h2(rp2) == Z(0, {2}));

    CHECK(homology(catalogue("cylinder"), 1) == Z(1));
}

TEST_CASE("group labels") {
    CHECK(Z(0).to_string() == "0");
    CHECK(Z(1).to_string() == "Z");
    CHECK(Z(4).to_string() == "Z^4");
    CHECK(Z(0, {2}).to_string() == "Z_2");
    CHECK(Z(1, {2, 4}).to_string() == "Z + Z_2 + Z_4");
}

TEST_CASE("Euler-Poincare") {
    for (const char* name : {"sphere", "torus", "genus_surface", "projective_plane", "annulus", "cylinder"}) {
        const MeshComplex m = catalogue(name);
        const long b0 = homology(m, 0).betti, b1 = homology(m, 1).betti, b2 = homology(m, 2).betti;
        CHECK_MESSAGE(b0 - b1 + b2 == m.euler_characteristic(), name);
    }
}

TEST_CASE("refinement invariance") {
    for (const char* name : {"sphere", "torus", "projective_plane", "annulus"}) {
        const MeshComplex m = catalogue(name);
        const MeshComplex r = refine(m);
        CHECK_MESSAGE(homology(r, 1) == homology(m, 1), name);
        CHECK_MESSAGE(cohomology_h2(r) == cohomology_h2(m), name);
    }
}

TEST_CASE("cycle bases are cycles and torsion witnesses bound") {
    for (const char* name : {"circle", "torus", "genus_surface", "projective_plane", "annulus"}) CHECK_MESSAGE(valid_basis(catalogue(name)), name);
    const CycleBasis rp = cycle_basis(catalogue("projective_plane"));
    REQUIRE(rp.torsion.size() == 1);
    CHECK(rp.torsion[0].order == 2);
    CHECK(cycle_basis(catalogue("genus_surface", {{"p", 2}})).free.size() == 4);
}

TEST_CASE("boundary matrices compose to zero") {
    const MeshComplex m = catalogue("torus", {{"Nu", 3}, {"Nv", 4}});
    const BoundaryMatrices b = boundary_matrices(m);
    CHECK((b.d1 * b.d2).is_zero());
    CHECK(b.d1.rows() == m.num_vertices());
    CHECK(b.d2.cols() == m.num_faces());
}

TEST_CASE("a single triangle is contractible") {
    MeshData d;
    d.num_vertices = 3;
    d.edges = {{0, 1}, {1, 2}, {2, 0}};
    d.faces = {{{0, 1}, {1, 1}, {2, 1}}};
    const MeshComplex m = MeshComplex::create(d);
    CHECK(homology(m, 1) == Z(0));
    CHECK(homology(m, 2) == Z(0));
    CHECK(cohomology_h2(m) == Z(0));
}
