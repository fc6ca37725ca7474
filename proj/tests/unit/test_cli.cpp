#include <doctest.h>

#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli.hpp"

namespace {

const std::string data_dir = BQK_TEST_DATA;

struct Result {
    int code;
    std::string out, err;
    nlohmann::json json() const { return nlohmann::json::parse(out); }
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = bqk::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::size_t lines(const std::string& s) {
    std::size_t n = 0;
    for (char c : s) n += c == '\n';
    return n;
}

}  // namespace

TEST_CASE("classify cards") {
    const Result t = run({"classify", "--manifold", "torus"});
    REQUIRE(t.code == 0);
    const auto j = t.json();
    CHECK(j["quantum_numbers"] == nlohmann::json::array({"n in Z", "theta_1, theta_2 in [0,1)"}));
    CHECK(j["classes"]["c"] == "R");
    CHECK(j["constants"]["hbar"] == 1.0);
    CHECK(j["constants"]["mass"] == 0.5);

    const Result rp = run({"classify", "--manifold", "projective_plane"});
    REQUIRE(rp.code == 0);
    CHECK(rp.json()["quantum_numbers"] == nlohmann::json::array({"m in Z_2"}));
}

TEST_CASE("classify a connection") {
    const Result r = run({"classify", "--manifold", "annulus", "--theta", "1.25", "--c", "0.5"});
    REQUIRE(r.code == 0);
    const auto q = r.json()["connection_class"];
    CHECK(q["thetas"][0].get<double>() == doctest::Approx(0.25));
    CHECK(q["c"] == 0.5);
    const Result m = run({"classify", "--manifold", "sphere", "--monopole", "-3"});
    REQUIRE(m.code == 0);
    CHECK(m.json()["connection_class"]["chern"][0]["value"] == -3);
}

TEST_CASE("input errors exit 2 with the violation named") {
    const Result bad = run({"classify", "--mesh", data_dir + "/bad_face.json"});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("non-closing face") != std::string::npos);
    CHECK(bad.out.empty());

    const Result corrupt = run({"verify", "--mesh", data_dir + "/triangle.json", "--connection", data_dir + "/bad_connection.json"});
    CHECK(corrupt.code == 2);
    CHECK(corrupt.err.find("antisymmetry violated") != std::string::npos);

    CHECK(run({"classify", "--manifold", "klein"}).code == 2);
    CHECK(run({"classify", "--manifold", "torus", "--mesh", data_dir + "/triangle.json"}).code == 2);
    CHECK(run({"classify"}).code == 2);
    CHECK(run({"classify", "--manifold", "torus", "--bogus"}).code == 2);
    CHECK(run({"spectrum", "--manifold", "circle", "--mass", "-1"}).code == 2);
    CHECK(run({"spectrum", "--manifold", "circle", "--theta", "0.1", "--theta-sweep", "0:1:0.1"}).code == 2);
    CHECK(run({"spectrum", "--manifold", "circle", "--theta-sweep", "0:1"}).code == 2);
    CHECK(run({"spectrum", "--manifold", "circle", "--format", "xml"}).code == 2);
    CHECK(run({}).code == 2);
}

TEST_CASE("invariant violations exit 3") {
    const Result r = run({"spectrum", "--manifold", "torus", "--monopole", "1"});
    CHECK(r.code == 3);
    CHECK(run({"spectrum", "--manifold", "sphere", "--theta", "0.5"}).code == 3);
}

TEST_CASE("Fourier spectrum table") {
    const Result r = run({"spectrum", "--manifold", "circle", "--theta", "0.25", "--modes", "64"});
    REQUIRE(r.code == 0);
    const auto j = r.json();
    CHECK(j["backend"] == "fourier");
    REQUIRE(j["modes"].size() == 129);
    for (const auto& m : j["modes"]) {
        const double k = m["k"].get<double>();
        CHECK(m["energy"].get<double>() == doctest::Approx((k - 0.25) * (k - 0.25)).epsilon(1e-14));
    }
    const Result csv = run({"spectrum", "--manifold", "circle", "--theta", "0.25", "--modes", "64", "--format", "csv"});
    CHECK(csv.out.rfind("k,momentum,energy\n", 0) == 0);
    CHECK(lines(csv.out) == 130);
}

TEST_CASE("theta sweep has one row per angle") {
    const Result r = run({"spectrum", "--manifold", "circle", "--theta-sweep", "0:1:0.05", "--format", "csv"});
    REQUIRE(r.code == 0);
    CHECK(lines(r.out) == 22);  // header + 21
    const Result j = run({"spectrum", "--manifold", "circle", "--theta-sweep", "0:1:0.05"});
    CHECK(j.json()["sweep"].size() == 21);
}

TEST_CASE("monopole spectrum reports the lowest cluster") {
    const Result r = run({"spectrum", "--manifold", "sphere", "--monopole", "2", "--subdiv", "3"});
    REQUIRE(r.code == 0);
    const auto j = r.json();
    CHECK(j["spectrum"]["clusters"][0]["size"] == 3);
    CHECK(j["degeneracy"]["expected"] == 3);
    CHECK(j["degeneracy"]["levels"].size() == 3);
    CHECK(j["degeneracy"]["stabilized"] == true);
}

TEST_CASE("verify") {
    const Result t = run({"verify", "--manifold", "torus"});
    CHECK(t.code == 0);
    const auto j = t.json();
    CHECK(j["pass"] == true);
    std::vector<std::string> names;
    for (const auto& c : j["checks"]) names.push_back(c["name"]);
    CHECK(names == std::vector<std::string>{"classification", "hermiticity", "gauge_invariance", "heisenberg_order",
                                            "curvature_commutator", "divergence_theorem"});

    const Result m = run({"verify", "--manifold", "sphere", "--monopole", "1"});
    CHECK(m.code == 0);
    const auto doc = m.json();
    const auto& curv = doc["checks"][4];
    CHECK(curv["name"] == "curvature_commutator");
    CHECK(curv["status"] == "pass");
    CHECK(curv["measured"]["trend"].size() == 3);

    const Result strict = [] {
        setenv("BQK_TOL", "hermitian=0", 1);
        Result r = run({"verify", "--manifold", "torus", "--theta", "0.3"});
        unsetenv("BQK_TOL");
        return r;
    }();
    CHECK(strict.code == 5);
    CHECK(strict.err.find("hermiticity") != std::string::npos);
}

TEST_CASE("bad BQK_TOL is an input error") {
    setenv("BQK_TOL", "flux=abc", 1);
    const Result r = run({"classify", "--manifold", "torus"});
    unsetenv("BQK_TOL");
    CHECK(r.code == 2);
}

TEST_CASE("catalogue") {
    const Result r = run({"catalogue"});
    REQUIRE(r.code == 0);
    CHECK(r.json()["manifolds"].size() == 7);
    const Result mesh = run({"catalogue", "--manifold", "sphere", "--subdiv", "1"});
    CHECK(mesh.json()["vertices"].size() == 42);
}

TEST_CASE("output is byte identical across runs") {
    const std::vector<std::string> args{"spectrum", "--manifold", "sphere", "--monopole", "1", "--subdiv", "2", "--seed", "3"};
    CHECK(run(args).out == run(args).out);
    const std::vector<std::string> v{"verify", "--manifold", "annulus", "--theta", "0.3", "--seed", "4"};
    CHECK(run(v).out == run(v).out);
}

TEST_CASE("pretty output and files") {
    const Result p = run({"catalogue", "--format", "csv", "--pretty"});
    CHECK(p.code == 0);
    CHECK(p.out.rfind("name              euler", 0) == 0);
    CHECK(run({"classify", "--manifold", "torus", "--out", "/nonexistent/dir/card.json"}).code == 2);
    CHECK(run({"--help"}).code == 0);
}
