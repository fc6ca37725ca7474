#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "bqk/classify.hpp"
#include "bqk/error.hpp"
#include "bqk/gauge.hpp"
#include "bqk/homology.hpp"
#include "bqk/operators.hpp"
#include "bqk/spectra.hpp"

namespace bqk::cli {

namespace {

using nlohmann::json;

constexpr double two_pi = 2.0 * std::numbers::pi;

struct RunConfig {
    std::string command;
    std::string manifold;
    std::vector<std::string> params;  // key=value catalogue parameters
    std::string mesh_path;
    std::optional<int> subdiv;
    std::string connection_path;
    std::optional<long> monopole;
    std::optional<double> theta;
    std::string theta_sweep;
    double c = 0.0;
    PhysicalConstants constants;
    std::optional<int> modes;
    std::string out_path;
    std::string format = "json";
    std::uint64_t seed = 0;
    bool pretty = false;
};

// Uniform doubles from the raw engine output, identical on every platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double a, double b) {
        const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
        return a + (b - a) * u;
    }
    bool coin() { return (engine_() >> 63) != 0; }

private:
    std::mt19937_64 engine_;
};

std::string number(double x) {
    std::ostringstream s;
    s.precision(17);
    s << x;
    return s.str();
}

// ---- manifold and connection resolution ---------------------------------

struct Resolved {
    MeshPtr mesh;
    std::string source;  // catalogue name or file path
    std::map<std::string, double> params;
    int level = 0;  // refinements applied (or icosahedral level)
};

std::map<std::string, double> parse_params(const std::vector<std::string>& items) {
    std::map<std::string, double> out;
    for (const auto& item : items) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw InputError("--param expects key=value, got '" + item + "'");
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item.substr(eq + 1), &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size() - eq - 1) throw InputError("--param value is not a number: '" + item + "'");
        out[item.substr(0, eq)] = v;
    }
    return out;
}

bool level_param_shape(const std::string& name) { return name == "sphere" || name == "projective_plane"; }

// Mesh for a catalogue manifold at a given refinement level.
MeshComplex catalogue_at(const std::string& name, std::map<std::string, double> params, int level) {
    if (level_param_shape(name)) {
        params["L"] = level;
        return catalogue(name, params);
    }
    if (name == "circle") {
        MeshComplex base = catalogue(name, params);
        const double n = base.info().params.at("N");
        params["N"] = n * std::pow(2.0, level);
        return catalogue(name, params);
    }
    MeshComplex m = catalogue(name, params);
    for (int l = 0; l < level; ++l) m = refine(m);
    return m;
}

Resolved resolve_manifold(const RunConfig& cfg) {
    if (!cfg.manifold.empty() && !cfg.mesh_path.empty()) throw InputError("--manifold and --mesh are mutually exclusive");
    if (cfg.subdiv && *cfg.subdiv < 0) throw InputError("--subdiv must be non-negative");
    Resolved r;
    if (!cfg.mesh_path.empty()) {
        if (!cfg.params.empty()) throw InputError("--param applies to catalogue manifolds only");
        MeshComplex m = load_mesh(cfg.mesh_path);
        r.level = cfg.subdiv.value_or(0);
        for (int l = 0; l < r.level; ++l) m = refine(m);
        r.mesh = share(std::move(m));
        r.source = cfg.mesh_path;
        return r;
    }
    if (cfg.manifold.empty()) throw InputError("no manifold given (use --manifold NAME or --mesh PATH)");
    r.params = parse_params(cfg.params);
    r.source = cfg.manifold;
    if (level_param_shape(cfg.manifold)) {
        if (cfg.subdiv && r.params.count("L")) throw InputError("--subdiv and --param L are mutually exclusive");
        const auto it = r.params.find("L");
        r.level = cfg.subdiv ? *cfg.subdiv : it != r.params.end() ? static_cast<int>(std::lround(it->second)) : -1;
        if (r.level < 0) r.level = static_cast<int>(catalogue(cfg.manifold, r.params).info().params.at("L"));
        r.params.erase("L");
    } else {
        r.level = cfg.subdiv.value_or(0);
    }
    r.mesh = share(catalogue_at(cfg.manifold, r.params, r.level));
    return r;
}

enum class ConnKind { trivial, file, monopole, theta };

struct ConnSpec {
    ConnKind kind = ConnKind::trivial;
    long n = 0;
    double theta = 0.0;
    std::string path;
};

ConnSpec connection_spec(const RunConfig& cfg) {
    int given = 0;
    ConnSpec s;
    if (!cfg.connection_path.empty()) ++given, s.kind = ConnKind::file, s.path = cfg.connection_path;
    if (cfg.monopole) ++given, s.kind = ConnKind::monopole, s.n = *cfg.monopole;
    if (cfg.theta) ++given, s.kind = ConnKind::theta, s.theta = *cfg.theta;
    if (given > 1) throw InputError("--connection, --monopole and --theta are mutually exclusive");
    if (cfg.theta && !cfg.theta_sweep.empty()) throw InputError("--theta and --theta-sweep are mutually exclusive");
    if (s.kind == ConnKind::theta && !std::isfinite(s.theta)) throw InputError("--theta must be finite");
    return s;
}

ConnectionU1 build_connection(const ConnSpec& s, MeshPtr mesh) {
    switch (s.kind) {
        case ConnKind::trivial: return trivial_connection(mesh);
        case ConnKind::file: return load_connection(mesh, s.path);
        case ConnKind::monopole: return monopole_connection(mesh, s.n);
        case ConnKind::theta: return aharonov_bohm_connection(mesh, s.theta);
    }
    return trivial_connection(mesh);
}

std::string describe(const ConnSpec& s) {
    switch (s.kind) {
        case ConnKind::trivial: return "trivial";
        case ConnKind::file: return "file";
        case ConnKind::monopole: return "monopole";
        case ConnKind::theta: return "aharonov-bohm";
    }
    return "trivial";
}

json constants_json(const RunConfig& cfg) {
    return {{"hbar", cfg.constants.hbar}, {"e", cfg.constants.charge}, {"mass", cfg.constants.mass}, {"c", cfg.c}};
}

json manifold_json(const Resolved& r) {
    json p = json::object();
    for (const auto& [k, v] : r.mesh->info().params) p[k] = v;
    return {{"name", r.mesh->info().name},
            {"source", r.source},
            {"params", p},
            {"vertices", r.mesh->num_vertices()},
            {"edges", r.mesh->num_edges()},
            {"faces", r.mesh->num_faces()},
            {"fingerprint", r.mesh->fingerprint()}};
}

json connection_json(const ConnSpec& s, const ConnectionU1& conn) {
    json j = {{"kind", describe(s)}, {"gauge", conn.gauge}};
    if (s.kind == ConnKind::monopole) j["n"] = s.n;
    if (s.kind == ConnKind::theta) j["theta"] = s.theta;
    if (s.kind == ConnKind::file) j["path"] = s.path;
    return j;
}

// ---- output ----------------------------------------------------------------

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

std::string render_csv(const Table& t, bool pretty) {
    std::ostringstream out;
    if (!pretty) {
        auto line = [&](const std::vector<std::string>& cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
            out << '\n';
        };
        line(t.header);
        for (const auto& r : t.rows) line(r);
        return out.str();
    }
    std::vector<std::size_t> width(t.header.size(), 0);
    auto measure = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size() && i < width.size(); ++i) width[i] = std::max(width[i], cells[i].size());
    };
    measure(t.header);
    for (const auto& r : t.rows) measure(r);
    auto line = [&](const std::vector<std::string>& cells) {
        std::string s;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) s += "  ";
            s += cells[i];
            if (i + 1 < cells.size()) s += std::string(width[i] - cells[i].size(), ' ');
        }
        out << s << '\n';
    };
    line(t.header);
    for (const auto& r : t.rows) line(r);
    return out.str();
}

Table csv_table(const std::string& text) {
    Table t;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (first) t.header = cells, first = false;
        else t.rows.push_back(cells);
    }
    return t;
}

struct Output {
    json doc;
    Table table;  // CSV rendering
};

void emit(const RunConfig& cfg, const Output& o, std::ostream& out) {
    std::string text;
    if (cfg.format == "csv") text = render_csv(o.table, cfg.pretty);
    else text = (cfg.pretty ? o.doc.dump(2) : o.doc.dump()) + "\n";
    if (cfg.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(cfg.out_path, std::ios::binary);
    if (!f) throw InputError("cannot write output file '" + cfg.out_path + "'");
    f << text;
}

// ---- catalogue ---------------------------------------------------------------

Output cmd_catalogue(const RunConfig& cfg) {
    Output o;
    if (!cfg.manifold.empty() || !cfg.mesh_path.empty()) {
        // export the resolved mesh
        const Resolved r = resolve_manifold(cfg);
        o.doc = mesh_to_json(*r.mesh);
        o.table.header = {"vertices", "edges", "faces", "euler"};
        o.table.rows.push_back({std::to_string(r.mesh->num_vertices()), std::to_string(r.mesh->num_edges()),
                                std::to_string(r.mesh->num_faces()), std::to_string(r.mesh->euler_characteristic())});
        return o;
    }
    json list = json::array();
    o.table.header = {"name", "euler", "defaults", "description"};
    for (const auto& e : catalogue_entries()) {
        json d = json::object();
        std::string ds;
        for (const auto& [k, v] : e.defaults) {
            d[k] = v;
            ds += (ds.empty() ? "" : " ") + k + "=" + number(v);
        }
        list.push_back({{"name", e.name}, {"euler", e.euler}, {"defaults", d}, {"description", e.description}});
        o.table.rows.push_back({e.name, std::to_string(e.euler), ds, "\"" + e.description + "\""});
    }
    o.doc = {{"command", "catalogue"}, {"manifolds", list}};
    return o;
}

// ---- classify ------------------------------------------------------------------

Output cmd_classify(const RunConfig& cfg, const Tolerances& tol) {
    const Resolved r = resolve_manifold(cfg);
    const ConnSpec spec = connection_spec(cfg);
    const ClassificationCard card = enumerate_classes(*r.mesh);
    Output o;
    o.doc = card_to_json(card);
    o.doc["constants"] = constants_json(cfg);
    o.doc["mesh"] = manifold_json(r);
    o.table.header = {"field", "value"};
    o.table.rows = {{"manifold", card.manifold},
                    {"pi1", card.pi1.value_or("unknown")},
                    {"H1", card.h1.to_string()},
                    {"H2", card.h2.to_string()}};
    for (const auto& q : card.quantum_numbers) o.table.rows.push_back({"quantum_number", "\"" + q + "\""});
    o.table.rows.push_back({"c", "R"});
    if (spec.kind != ConnKind::trivial) {
        const ConnectionU1 conn = build_connection(spec, r.mesh);
        const QuantumNumbers q = classify_connection(conn, cfg.c, tol);
        o.doc["connection"] = connection_json(spec, conn);
        o.doc["connection_class"] = quantum_numbers_to_json(q);
        for (const auto& comp : q.chern.components) o.table.rows.push_back({"chern", std::to_string(comp.value)});
        for (std::size_t j = 0; j < q.thetas.size(); ++j)
            o.table.rows.push_back({"theta_" + std::to_string(j + 1), number(q.thetas[j])});
        for (std::size_t j = 0; j < q.torsion_chars.size(); ++j)
            o.table.rows.push_back({"m_" + std::to_string(j + 1), std::to_string(q.torsion_chars[j])});
    }
    return o;
}

// ---- spectrum ------------------------------------------------------------------

std::vector<double> parse_sweep(const std::string& text) {
    std::vector<double> parts;
    std::stringstream s(text);
    std::string item;
    while (std::getline(s, item, ':')) {
        std::size_t pos = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos == 0 || pos != item.size() || !std::isfinite(v)) throw InputError("--theta-sweep expects a:b:step, got '" + text + "'");
        parts.push_back(v);
    }
    if (parts.size() != 3) throw InputError("--theta-sweep expects a:b:step, got '" + text + "'");
    const double a = parts[0], b = parts[1], step = parts[2];
    if (!(step > 0.0) || b < a) throw InputError("--theta-sweep needs step > 0 and a <= b");
    const long count = static_cast<long>(std::floor((b - a) / step + 1e-9)) + 1;
    if (count > 100000) throw InputError("--theta-sweep has too many points");
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(a + static_cast<double>(i) * step);
    return out;
}

constexpr int sweep_csv_levels = 6;

Output fourier_spectrum(const RunConfig& cfg) {
    const int K = cfg.modes.value_or(16);
    if (K < 1) throw InputError("--modes must be positive");
    Output o;
    json head = {{"command", "spectrum"},
                 {"backend", "fourier"},
                 {"manifold", "circle"},
                 {"constants", constants_json(cfg)},
                 {"cutoff", K},
                 {"note", "div X = 0 for the rotation field, so c does not enter"}};
    if (!cfg.theta_sweep.empty()) {
        const auto rows = theta_sweep_circle(K, parse_sweep(cfg.theta_sweep), cfg.constants);
        json sweep = json::array();
        const int shown = std::min<int>(sweep_csv_levels, 2 * K + 1);
        o.table.header = {"theta"};
        for (int i = 0; i < shown; ++i) o.table.header.push_back("E" + std::to_string(i));
        for (const auto& r : rows) {
            sweep.push_back({{"theta", r.theta}, {"energies", r.sorted}});
            std::vector<std::string> line{number(r.theta)};
            for (int i = 0; i < shown; ++i) line.push_back(number(r.sorted[i]));
            o.table.rows.push_back(line);
        }
        head["sweep"] = sweep;
        o.doc = head;
        return o;
    }
    const double theta = cfg.theta.value_or(0.0);
    const auto row = theta_sweep_circle(K, {theta}, cfg.constants).front();
    json modes = json::array();
    o.table.header = {"k", "momentum", "energy"};
    for (std::size_t i = 0; i < row.modes.size(); ++i) {
        modes.push_back({{"k", row.modes[i]}, {"momentum", row.momentum[i]}, {"energy", row.energy[i]}});
        o.table.rows.push_back({std::to_string(row.modes[i]), number(row.momentum[i]), number(row.energy[i])});
    }
    head["theta"] = theta;
    head["modes"] = modes;
    head["eigenvalues"] = row.sorted;
    o.doc = head;
    return o;
}

Output cmd_spectrum(const RunConfig& cfg, const Tolerances& tol) {
    const ConnSpec spec = connection_spec(cfg);
    const bool fourier = cfg.manifold == "circle" && cfg.mesh_path.empty() && !cfg.subdiv && cfg.params.empty() &&
                         (spec.kind == ConnKind::theta || spec.kind == ConnKind::trivial);
    if (fourier) return fourier_spectrum(cfg);

    const Resolved r = resolve_manifold(cfg);
    const int k = std::min<int>(cfg.modes.value_or(10), static_cast<int>(r.mesh->num_vertices()));
    if (k < 1) throw InputError("--modes must be positive");
    EigenOptions opt = EigenOptions::from(tol, cfg.seed);
    opt.positive_semidefinite = true;

    Output o;
    json head = {{"command", "spectrum"},
                 {"backend", "mesh"},
                 {"mesh", manifold_json(r)},
                 {"constants", constants_json(cfg)},
                 {"modes", k},
                 {"seed", cfg.seed}};

    if (!cfg.theta_sweep.empty()) {
        if (spec.kind != ConnKind::trivial) throw InputError("--theta-sweep cannot be combined with a connection");
        json sweep = json::array();
        const int shown = std::min(k, sweep_csv_levels);
        o.table.header = {"theta"};
        for (int i = 0; i < shown; ++i) o.table.header.push_back("E" + std::to_string(i));
        for (double theta : parse_sweep(cfg.theta_sweep)) {
            const ConnectionU1 conn = aharonov_bohm_connection(r.mesh, theta);
            const SpectrumResult s = eigen(magnetic_hamiltonian(conn, cfg.constants), k, opt);
            sweep.push_back({{"theta", theta}, {"energies", s.values}});
            std::vector<std::string> line{number(theta)};
            for (int i = 0; i < shown; ++i) line.push_back(number(s.values[i]));
            o.table.rows.push_back(line);
        }
        head["sweep"] = sweep;
        o.doc = head;
        return o;
    }

    const ConnectionU1 conn = build_connection(spec, r.mesh);
    const SpectrumResult s = eigen(magnetic_hamiltonian(conn, cfg.constants), k, opt);
    head["connection"] = connection_json(spec, conn);
    head["spectrum"] = spectrum_to_json(s);
    if (spec.kind == ConnKind::monopole && r.mesh->info().shape == Shape::sphere && cfg.mesh_path.empty()) {
        // refinement trend of the lowest cluster over the last three levels
        std::vector<MeshPtr> chain;
        for (int l = std::max(0, r.level - 2); l < r.level; ++l) chain.push_back(share(catalogue_at("sphere", r.params, l)));
        chain.push_back(r.mesh);
        const int dk = std::max<int>(k, static_cast<int>(std::labs(spec.n)) + 2);
        head["degeneracy"] = degeneracy_to_json(monopole_degeneracy(chain, spec.n, dk, opt, cfg.constants));
    }
    o.doc = head;
    o.table = csv_table(spectrum_to_csv(s));
    return o;
}

// ---- verify --------------------------------------------------------------------

struct Check {
    std::string name;
    std::string status;  // "pass", "fail", "skipped"
    json measured;
};

DiscreteVectorField random_field(const MeshComplex& mesh, Rng& rng) {
    DiscreteVectorField X;
    for (std::size_t e = 0; e < mesh.num_edges(); ++e) X.flow.push_back(rng.uniform(-1.0, 1.0));
    return X;
}

Check check_hermiticity(const ConnectionU1& conn, const RunConfig& cfg, const Tolerances& tol, Rng& rng) {
    const MeshComplex& mesh = conn.complex();
    std::vector<std::pair<std::string, SparseOperator>> ops;
    ops.emplace_back("H", magnetic_hamiltonian(conn, cfg.constants));
    ops.emplace_back("P(random field)", momentum_operator(conn, random_field(mesh, rng), cfg.c, cfg.constants));
    if (mesh.num_faces() > 0) {
        std::vector<double> stream;
        for (std::size_t f = 0; f < mesh.num_faces(); ++f) stream.push_back(rng.uniform(-1.0, 1.0));
        ops.emplace_back("P(divergence-free field)", momentum_operator(conn, stream_field(mesh, stream), cfg.c, cfg.constants));
    }
    std::vector<double> f;
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) f.push_back(rng.uniform(-1.0, 1.0));
    ops.emplace_back("Q(random function)", position_operator(mesh, VertexFunction::from_real(f), true));

    Check c{"hermiticity", "pass", json::array()};
    for (const auto& [label, op] : ops) {
        const double d = hermiticity_defect(op);
        const bool pass = op.hermitian && d <= tol.hermitian;
        if (!pass) c.status = "fail";
        c.measured.push_back({{"operator", label}, {"defect", d}, {"tolerance", tol.hermitian}, {"pass", pass}});
    }
    return c;
}

Check check_gauge_invariance(const ConnectionU1& conn, const RunConfig& cfg, const Tolerances& tol, Rng& rng) {
    constexpr double limit = 1e-10;
    constexpr int trials = 3;
    const int k = std::min<int>(cfg.modes.value_or(8), static_cast<int>(conn.complex().num_vertices()));
    EigenOptions opt = EigenOptions::from(tol, cfg.seed);
    opt.positive_semidefinite = true;
    const SpectrumResult base = eigen(magnetic_hamiltonian(conn, cfg.constants), k, opt);
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        GaugeTransform g;
        for (std::size_t v = 0; v < conn.complex().num_vertices(); ++v) g.chi.push_back(rng.uniform(-std::numbers::pi, std::numbers::pi));
        const SpectrumResult s = eigen(magnetic_hamiltonian(gauge_transform(conn, g), cfg.constants), k, opt);
        for (int i = 0; i < k; ++i)
            worst = std::max(worst, std::abs(s.values[i] - base.values[i]) / std::max(1.0, std::abs(base.values[i])));
    }
    return {"gauge_invariance",
            worst <= limit ? "pass" : "fail",
            {{"gauges", trials}, {"eigenvalues", k}, {"max_relative_deviation", worst}, {"tolerance", limit}}};
}

Check check_divergence(const MeshComplex& mesh, const Tolerances&, Rng& rng) {
    constexpr double limit = 1e-12;
    constexpr int trials = 10;
    const auto mu = mesh.measure();
    const auto w = mesh.edge_weights();
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        const DiscreteVectorField X = random_field(mesh, rng);
        std::vector<bool> inside(mesh.num_vertices());
        for (std::size_t v = 0; v < inside.size(); ++v) inside[v] = rng.coin();
        const VertexFunction div = divergence(mesh, X);
        double volume = 0.0, flux = 0.0, scale = 0.0;
        for (std::size_t v = 0; v < inside.size(); ++v)
            if (inside[v]) volume += mu[v] * div.values[v].real();
        for (std::size_t e = 0; e < mesh.num_edges(); ++e) {
            const bool a = inside[mesh.edge(e).tail], b = inside[mesh.edge(e).head];
            scale += std::abs(w[e] * X.flow[e]);
            if (a != b) flux += (a ? 1.0 : -1.0) * w[e] * X.flow[e];
        }
        worst = std::max(worst, std::abs(volume - flux) / std::max(1.0, scale));
    }
    return {"divergence_theorem",
            worst <= limit ? "pass" : "fail",
            {{"fields", trials}, {"max_relative_error", worst}, {"tolerance", limit}}};
}

struct Probe {
    ScalarField f;
    AmbientField X;
    std::string description;
};

std::optional<Probe> heisenberg_probe(Shape shape) {
    auto rotation = [](const Vec3& p) { return Vec3(-two_pi * p.y(), two_pi * p.x(), 0.0); };
    auto cos_u = [](const Vec3& p) { return p.x() / std::hypot(p.x(), p.y()); };
    switch (shape) {
        case Shape::torus:
        case Shape::annulus:
        case Shape::cylinder:
        case Shape::circle: return Probe{cos_u, rotation, "f = cos(2 pi u), X = d/du"};
        case Shape::sphere:
            return Probe{[](const Vec3& p) { return p.x(); }, [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0.0); },
                         "f = x, X = rotation about z"};
        default: return std::nullopt;
    }
}

// Levels used for refinement trends: sphere levels ending at the requested
// one (at least up to 4), otherwise three successive refinements.
std::vector<int> trend_levels(const Resolved& r) {
    if (level_param_shape(r.mesh->info().name)) {
        const int top = std::max(r.level, std::min(r.level + 2, 4));
        std::vector<int> out;
        for (int l = std::max(1, top - 2); l <= top; ++l) out.push_back(l);
        return out;
    }
    return {r.level + 1, r.level + 2, r.level + 3};
}

Check check_heisenberg(const Resolved& r, const ConnSpec& spec, const RunConfig& cfg) {
    constexpr double min_order = 0.9;
    const auto probe = heisenberg_probe(r.mesh->info().shape);
    if (!probe || !cfg.mesh_path.empty())
        return {"heisenberg_order", "skipped", {{"reason", "no probe field for this manifold"}}};
    // smooth test sections need a flat connection; the identity itself is
    // connection independent
    const bool use_spec = spec.kind == ConnKind::theta;
    std::vector<ConnectionU1> levels;
    json dims = json::array();
    for (int l : trend_levels(r)) {
        MeshPtr m = share(catalogue_at(r.source, r.params, l));
        levels.push_back(use_spec ? build_connection(spec, m) : trivial_connection(m));
    }
    const ConvergenceReport rep = heisenberg_residual(levels, probe->f, probe->X, cfg.c, cfg.constants);
    json table = json::array();
    for (const auto& l : rep.levels) table.push_back({{"dimension", l.dimension}, {"residual", l.residual}});
    const double order = rep.min_order();
    return {"heisenberg_order",
            order >= min_order ? "pass" : "fail",
            {{"probe", probe->description},
             {"connection", use_spec ? describe(spec) : "trivial"},
             {"levels", table},
             {"orders", rep.orders},
             {"min_order", order},
             {"required", min_order}}};
}

Check check_curvature(const Resolved& r, const ConnSpec& spec, const RunConfig& cfg, const Tolerances& tol) {
    constexpr double limit = 0.1;
    if (r.mesh->info().shape != Shape::sphere || !cfg.mesh_path.empty() ||
        (spec.kind != ConnKind::monopole && spec.kind != ConnKind::trivial))
        return {"curvature_commutator", "skipped", {{"reason", "needs a monopole or trivial connection on the catalogue sphere"}}};
    const long n = spec.kind == ConnKind::monopole ? spec.n : 0;
    const AmbientField X = [](const Vec3& p) { return Vec3(-p.y(), p.x(), 0.0); };
    const AmbientField Y = [](const Vec3& p) { return Vec3(0.0, -p.z(), p.y()); };
    const AmbientField XY = lie_bracket(X, Y);
    const int k = 6;
    EigenOptions opt = EigenOptions::from(tol, cfg.seed);
    opt.positive_semidefinite = true;
    opt.keep_vectors = true;

    json table = json::array();
    std::vector<double> errors;
    for (int l : trend_levels(r)) {
        MeshPtr m = share(catalogue_at("sphere", r.params, l));
        const ConnectionU1 conn = n != 0 ? monopole_connection(m, n) : trivial_connection(m);
        const SparseOperator R = curvature_from_commutators(conn, sample_vector_field(*m, X), sample_vector_field(*m, Y),
                                                            sample_vector_field(*m, XY), cfg.c, cfg.constants);
        // F(X, Y) = B (X x Y).n with B = n/2 on the unit sphere
        std::vector<double> g;
        for (const auto& p : m->positions()) g.push_back(0.5 * static_cast<double>(n) * X(p).cross(Y(p)).dot(p) / p.norm());
        const SpectrumResult s = eigen(magnetic_hamiltonian(conn, cfg.constants), k, opt);
        const double err = compare_on_subspace(R, g, s.vectors);
        errors.push_back(err);
        table.push_back({{"level", l}, {"vertices", m->num_vertices()}, {"error", err}});
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < errors.size(); ++i) decreasing = decreasing && errors[i] < errors[i - 1];
    const bool pass = decreasing && errors.back() <= limit;
    return {"curvature_commutator",
            pass ? "pass" : "fail",
            {{"fields", "X = rotation about z, Y = rotation about x"},
             {"expected", "R(X,Y) = i F(X,Y) on the lowest " + std::to_string(k) + " eigenvectors of H"},
             {"n", n},
             {"trend", table},
             {"decreasing", decreasing},
             {"finest_error", errors.back()},
             {"tolerance", limit}}};
}

Check check_classification(const ConnectionU1& conn, const RunConfig& cfg, const Tolerances& tol) {
    try {
        return {"classification", "pass", quantum_numbers_to_json(classify_connection(conn, cfg.c, tol))};
    } catch (const InvariantError& e) {
        return {"classification", "fail", {{"error", e.what()}}};
    }
}

Output cmd_verify(const RunConfig& cfg, const Tolerances& tol, std::ostream& err, bool& failed) {
    const Resolved r = resolve_manifold(cfg);
    const ConnSpec spec = connection_spec(cfg);
    const ConnectionU1 conn = build_connection(spec, r.mesh);
    Rng rng(cfg.seed);

    std::vector<Check> checks;
    checks.push_back(check_classification(conn, cfg, tol));
    checks.push_back(check_hermiticity(conn, cfg, tol, rng));
    checks.push_back(check_gauge_invariance(conn, cfg, tol, rng));
    checks.push_back(check_heisenberg(r, spec, cfg));
    checks.push_back(check_curvature(r, spec, cfg, tol));
    checks.push_back(check_divergence(*r.mesh, tol, rng));

    Output o;
    json list = json::array();
    json failures = json::array();
    o.table.header = {"check", "status"};
    for (const auto& c : checks) {
        list.push_back({{"name", c.name}, {"status", c.status}, {"measured", c.measured}});
        o.table.rows.push_back({c.name, c.status});
        if (c.status == "fail") failures.push_back(c.name);
    }
    o.doc = {{"command", "verify"},
             {"mesh", manifold_json(r)},
             {"connection", connection_json(spec, conn)},
             {"constants", constants_json(cfg)},
             {"seed", cfg.seed},
             {"checks", list},
             {"failed", failures},
             {"pass", failures.empty()}};
    failed = !failures.empty();
    if (failed) err << json{{"error", "verification failed"}, {"failed", failures}}.dump() << '\n';
    return o;
}

void validate(const RunConfig& cfg) {
    const auto& k = cfg.constants;
    if (!(k.hbar > 0.0) || !(k.charge > 0.0) || !(k.mass > 0.0) || !std::isfinite(k.hbar) || !std::isfinite(k.charge) ||
        !std::isfinite(k.mass))
        throw InputError("physical constants hbar, e and mass must be positive and finite");
    if (!std::isfinite(cfg.c)) throw InputError("--c must be finite");
    if (cfg.format != "json" && cfg.format != "csv") throw InputError("--format must be json or csv");
}

void error_json(std::ostream& err, const std::string& kind, const std::string& what) {
    err << json{{"error", kind}, {"message", what}}.dump() << '\n';
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    CLI::App app{"Discrete Borel quantization: classification, spectra and verification", "bqk"};
    app.require_subcommand(1, 1);
    app.add_option("--manifold", cfg.manifold, "catalogue manifold name");
    app.add_option("--param", cfg.params, "catalogue parameter key=value (repeatable)");
    app.add_option("--mesh", cfg.mesh_path, "mesh JSON file");
    app.add_option("--subdiv", cfg.subdiv, "refinement level");
    app.add_option("--connection", cfg.connection_path, "connection JSON file");
    app.add_option("--monopole", cfg.monopole, "monopole charge n");
    app.add_option("--theta", cfg.theta, "flux angle for the Aharonov-Bohm connection");
    app.add_option("--theta-sweep", cfg.theta_sweep, "a:b:step list of flux angles");
    app.add_option("--c", cfg.c, "real constant c");
    app.add_option("--hbar", cfg.constants.hbar, "Planck constant");
    app.add_option("-e,--charge", cfg.constants.charge, "charge");
    app.add_option("--mass", cfg.constants.mass, "mass");
    app.add_option("--modes", cfg.modes, "eigenvalues to compute (Fourier backend: mode cutoff K)");
    app.add_option("--out", cfg.out_path, "output file");
    app.add_option("--format", cfg.format, "json or csv");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_flag("--pretty", cfg.pretty, "indented JSON / aligned tables");
    for (const char* name : {"classify", "spectrum", "verify", "catalogue"}) app.add_subcommand(name)->fallthrough();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return ok;
    } catch (const CLI::ParseError& e) {
        error_json(err, "input", e.what());
        return input;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    try {
        validate(cfg);
        const Tolerances tol = default_tolerances();
        bool failed = false;
        Output o;
        if (cfg.command == "catalogue") o = cmd_catalogue(cfg);
        else if (cfg.command == "classify") o = cmd_classify(cfg, tol);
        else if (cfg.command == "spectrum") o = cmd_spectrum(cfg, tol);
        else o = cmd_verify(cfg, tol, err, failed);
        emit(cfg, o, out);
        return failed ? verify_failed : ok;
    } catch (const InputError& e) {
        error_json(err, "input", e.what());
        return input;
    } catch (const InvariantError& e) {
        error_json(err, "invariant", e.what());
        return invariant;
    } catch (const SolverError& e) {
        json diag = json::parse(e.diagnostics(), nullptr, false);
        err << json{{"error", "solver"}, {"message", e.what()}, {"diagnostics", diag.is_discarded() ? json(e.diagnostics()) : diag}}.dump()
            << '\n';
        return solver;
    }
}

}  // namespace bqk::cli
