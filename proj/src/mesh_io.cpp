#include <fstream>
#include <map>
#include <sstream>

#include "bqk/error.hpp"
#include "bqk/mesh.hpp"

namespace bqk {

using nlohmann::json;

namespace {

template <typename T>
T get_field(const json& obj, const char* key, const char* where) {
    if (!obj.is_object() || !obj.contains(key)) throw InputError(std::string("parse error: ") + where + " missing '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw InputError(std::string("parse error: ") + where + " field '" + key + "' has the wrong type");
    }
}

}  // namespace

MeshComplex mesh_from_json(const json& doc) {
    if (!doc.is_object()) throw InputError("parse error: mesh document must be an object");
    MeshData data;
    data.info.name = doc.value("name", std::string("mesh"));

    if (!doc.contains("vertices") || !doc["vertices"].is_array()) throw InputError("parse error: missing 'vertices' array");
    std::map<long, int> vertex_index;
    std::size_t with_pos = 0;
    for (const auto& v : doc["vertices"]) {
        const long id = get_field<long>(v, "id", "vertex");
        if (!vertex_index.emplace(id, static_cast<int>(data.vertex_ids.size())).second)
            throw InputError("parse error: duplicate vertex id " + std::to_string(id));
        data.vertex_ids.push_back(id);
        if (v.contains("pos")) {
            const auto p = get_field<std::vector<double>>(v, "pos", "vertex");
            if (p.size() != 3) throw InputError("parse error: vertex pos must have 3 coordinates");
            data.positions.emplace_back(p[0], p[1], p[2]);
            ++with_pos;
        }
    }
    data.num_vertices = data.vertex_ids.size();
    if (with_pos != 0 && with_pos != data.num_vertices)
        throw InputError("parse error: either all vertices or none carry 'pos'");

    std::map<long, int> edge_index;
    bool any_length = false;
    std::vector<std::optional<double>> lengths;
    if (doc.contains("edges")) {
        for (const auto& e : doc["edges"]) {
            const long id = get_field<long>(e, "id", "edge");
            if (id <= 0) throw InputError("parse error: edge ids must be positive (-k denotes edge k reversed)");
            if (!edge_index.emplace(id, static_cast<int>(data.edges.size())).second)
                throw InputError("parse error: duplicate edge id " + std::to_string(id));
            const long tail = get_field<long>(e, "tail", "edge");
            const long head = get_field<long>(e, "head", "edge");
            auto t = vertex_index.find(tail);
            auto h = vertex_index.find(head);
            if (t == vertex_index.end() || h == vertex_index.end())
                throw InputError("dangling edge: edge " + std::to_string(id) + " references a missing vertex");
            data.edges.push_back({t->second, h->second});
            data.edge_ids.push_back(id);
            if (e.contains("length")) {
                lengths.emplace_back(get_field<double>(e, "length", "edge"));
                any_length = true;
            } else {
                lengths.emplace_back();
            }
        }
    }
    if (any_length) {
        for (std::size_t e = 0; e < lengths.size(); ++e) {
            if (lengths[e]) data.lengths.push_back(*lengths[e]);
            else if (!data.positions.empty())
                data.lengths.push_back((data.positions[data.edges[e].head] - data.positions[data.edges[e].tail]).norm());
            else data.lengths.push_back(1.0);
        }
    }

    if (doc.contains("faces")) {
        for (const auto& f : doc["faces"]) {
            const long id = get_field<long>(f, "id", "face");
            const auto loop_ids = get_field<std::vector<long>>(f, "loop", "face");
            FaceLoop loop;
            for (long signed_id : loop_ids) {
                auto it = edge_index.find(signed_id < 0 ? -signed_id : signed_id);
                if (it == edge_index.end())
                    throw InputError("dangling edge: face " + std::to_string(id) + " references missing edge " +
                                     std::to_string(signed_id));
                loop.push_back({it->second, signed_id < 0 ? -1 : 1});
            }
            data.faces.push_back(std::move(loop));
            data.face_ids.push_back(id);
        }
    }

    if (doc.contains("measure")) {
        data.measure.assign(data.num_vertices, 1.0);
        for (const auto& [key, value] : doc["measure"].items()) {
            long vid = 0;
            try {
                vid = std::stol(key);
            } catch (const std::exception&) {
                throw InputError("parse error: measure key '" + key + "' is not a vertex id");
            }
            auto it = vertex_index.find(vid);
            if (it == vertex_index.end()) throw InputError("parse error: measure for unknown vertex " + key);
            if (!value.is_number()) throw InputError("parse error: measure value must be a number");
            data.measure[it->second] = value.get<double>();
        }
    } else {
        data.measure.assign(data.num_vertices, 1.0);
    }
    return MeshComplex::create(std::move(data));
}

MeshComplex load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open mesh file '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(std::string("parse error: ") + e.what());
    }
    return mesh_from_json(doc);
}

json mesh_to_json(const MeshComplex& mesh) {
    json doc;
    doc["name"] = mesh.info().name;
    json verts = json::array();
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
        json item{{"id", mesh.vertex_ids()[v]}};
        if (mesh.has_positions()) {
            const Vec3& p = mesh.positions()[v];
            item["pos"] = {p.x(), p.y(), p.z()};
        }
        verts.push_back(std::move(item));
    }
    doc["vertices"] = std::move(verts);
    json edges = json::array();
    for (std::size_t e = 0; e < mesh.num_edges(); ++e)
        edges.push_back({{"id", mesh.edge_ids()[e]},
                         {"tail", mesh.vertex_ids()[mesh.edge(e).tail]},
                         {"head", mesh.vertex_ids()[mesh.edge(e).head]},
                         {"length", mesh.edge_lengths()[e]}});
    doc["edges"] = std::move(edges);
    json faces = json::array();
    for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
        json loop = json::array();
        for (const auto& s : mesh.face(f)) loop.push_back(s.sign * mesh.edge_ids()[s.edge]);
        faces.push_back({{"id", mesh.face_ids()[f]}, {"loop", std::move(loop)}});
    }
    doc["faces"] = std::move(faces);
    json measure = json::object();
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) measure[std::to_string(mesh.vertex_ids()[v])] = mesh.measure()[v];
    doc["measure"] = std::move(measure);
    return doc;
}

}  // namespace bqk
