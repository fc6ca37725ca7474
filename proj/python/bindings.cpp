#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bqk/classify.hpp"
#include "bqk/error.hpp"
#include "bqk/gauge.hpp"
#include "bqk/homology.hpp"
#include "bqk/spectra.hpp"

namespace py = pybind11;
using namespace bqk;

namespace {

PhysicalConstants constants(double hbar, double e, double mass) {
    PhysicalConstants k;
    k.hbar = hbar;
    k.charge = e;
    k.mass = mass;
    return k;
}

py::tuple group(const HomologyGroup& g) { return py::make_tuple(g.betti, g.torsion); }

// pybind11 holders cannot be shared_ptr<const T>; the mesh stays immutable anyway
using Mesh = std::shared_ptr<MeshComplex>;
Mesh hold(MeshComplex m) { return std::const_pointer_cast<MeshComplex>(share(std::move(m))); }
Mesh hold(const MeshPtr& m) { return std::const_pointer_cast<MeshComplex>(m); }

}  // namespace

PYBIND11_MODULE(_bqk, m) {
    m.doc() = "Discrete Borel quantization core";

    py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
    py::register_exception<InvariantError>(m, "InvariantError", PyExc_RuntimeError);
    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    py::class_<MeshComplex, Mesh>(m, "Mesh")
        .def_property_readonly("name", [](const MeshComplex& x) { return x.info().name; })
        .def_property_readonly("num_vertices", &MeshComplex::num_vertices)
        .def_property_readonly("num_edges", &MeshComplex::num_edges)
        .def_property_readonly("num_faces", &MeshComplex::num_faces)
        .def_property_readonly("euler_characteristic", &MeshComplex::euler_characteristic)
        .def_property_readonly("orientable", &MeshComplex::orientable)
        .def_property_readonly("fingerprint", &MeshComplex::fingerprint)
        .def("to_json", [](const MeshComplex& x) { return mesh_to_json(x).dump(); });

    m.def("catalogue", [](const std::string& name, const std::map<std::string, double>& params) {
        return hold(catalogue(name, params));
    }, py::arg("name"), py::arg("params") = std::map<std::string, double>{});
    m.def("load_mesh", [](const std::string& path) { return hold(load_mesh(path)); });
    m.def("mesh_from_json", [](const std::string& text) { return hold(mesh_from_json(nlohmann::json::parse(text))); });
    m.def("refine", [](const Mesh& mesh) { return hold(refine(*mesh)); });

    m.def("homology", [](const Mesh& mesh, int k) { return group(homology(*mesh, k)); });
    m.def("cohomology_h2", [](const Mesh& mesh) { return group(cohomology_h2(*mesh)); });
    m.def("classification_card", [](const Mesh& mesh) { return card_to_json(enumerate_classes(*mesh)).dump(); });

    py::class_<ConnectionU1>(m, "Connection")
        .def_readonly("phases", &ConnectionU1::phases)
        .def_readonly("gauge", &ConnectionU1::gauge)
        .def_property_readonly("mesh", [](const ConnectionU1& c) { return hold(c.mesh); })
        .def("to_json", [](const ConnectionU1& c) { return connection_to_json(c).dump(); });

    m.def("trivial_connection", [](const Mesh& mesh) { return trivial_connection(mesh); });
    m.def("monopole_connection", [](const Mesh& mesh, long n) { return monopole_connection(mesh, n); }, py::arg("mesh"),
          py::arg("n"));
    m.def("aharonov_bohm_connection", [](const Mesh& mesh, double theta) { return aharonov_bohm_connection(mesh, theta); },
          py::arg("mesh"), py::arg("theta"));
    m.def("flat_connection", [](const Mesh& mesh, const std::vector<double>& thetas, const std::vector<long>& chars) {
        return flat_connection(mesh, thetas, chars);
    }, py::arg("mesh"), py::arg("thetas"), py::arg("torsion_chars") = std::vector<long>{});
    m.def("connection_from_phases", [](const Mesh& mesh, std::vector<double> phases) {
        return connection_from_phases(mesh, std::move(phases));
    });
    m.def("chern", [](const ConnectionU1& c) {
        std::vector<std::pair<long, int>> out;
        for (const auto& comp : chern_number(c, default_tolerances()).components) out.emplace_back(comp.value, comp.modulus);
        return out;
    });
    m.def("is_flat", [](const ConnectionU1& c) { return is_flat(c); });
    m.def("classify", [](const ConnectionU1& c, double cc) {
        return quantum_numbers_to_json(classify_connection(c, cc, default_tolerances())).dump();
    }, py::arg("connection"), py::arg("c") = 0.0);

    m.def("spectrum", [](const ConnectionU1& c, int k, double hbar, double e, double mass, std::uint64_t seed) {
        EigenOptions opt = EigenOptions::from(default_tolerances(), seed);
        opt.positive_semidefinite = true;
        return eigen(magnetic_hamiltonian(c, constants(hbar, e, mass)), k, opt).values;
    }, py::arg("connection"), py::arg("k") = 10, py::arg("hbar") = 1.0, py::arg("e") = 1.0, py::arg("mass") = 0.5,
       py::arg("seed") = 0);

    m.def("fourier_circle", [](int K, double theta, double hbar, double e, double mass) {
        const ThetaRow row = theta_sweep_circle(K, {theta}, constants(hbar, e, mass)).front();
        return py::make_tuple(row.modes, row.momentum, row.energy);
    }, py::arg("K"), py::arg("theta"), py::arg("hbar") = 1.0, py::arg("e") = 1.0, py::arg("mass") = 0.5);
}
