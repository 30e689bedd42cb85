#include "crcg/jsonl.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace crcg::jsonl {

void append_double(std::string& out, double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
    out.append(buf, res.ptr);
}

namespace {

using nlohmann::json;

void append_int_array(std::string& out, const std::vector<int>& values) {
    out += '[';
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(values[i]);
    }
    out += ']';
}

[[noreturn]] void fail(std::size_t line_no, const std::string& what) {
    throw std::runtime_error("line " + std::to_string(line_no) + ": " + what);
}

void require_keys(const json& obj, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, std::size_t line_no,
                  const char* where) {
    for (const char* key : required) {
        if (!obj.contains(key)) fail(line_no, std::string(where) + ": missing key \"" + key + "\"");
    }
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        const auto& k = it.key();
        bool known = false;
        for (const char* key : required) known = known || k == key;
        for (const char* key : optional) known = known || k == key;
        if (!known) fail(line_no, std::string(where) + ": unknown key \"" + k + "\"");
    }
}

Graph parse_graph(const json& j, std::size_t line_no, int expected_id) {
    if (!j.is_object()) fail(line_no, "expected a JSON object");
    require_keys(j, {"id", "label", "num_nodes", "edges", "features", "provenance"}, {}, line_no, "graph");

    if (!j["id"].is_number_integer()) fail(line_no, "id: expected integer");
    if (j["id"].get<int>() != expected_id) {
        fail(line_no, "id " + std::to_string(j["id"].get<int>()) + " does not match position " +
                          std::to_string(expected_id));
    }

    Graph g;
    if (!j["num_nodes"].is_number_integer()) fail(line_no, "num_nodes: expected integer");
    g.node_count = j["num_nodes"].get<int>();
    if (!j["label"].is_number_integer()) fail(line_no, "label: expected integer");
    g.label = j["label"].get<int>();

    if (!j["edges"].is_array()) fail(line_no, "edges: expected array");
    for (const auto& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
            fail(line_no, "edges: expected [u,v] integer pairs");
        }
        g.add_edge(e[0].get<int>(), e[1].get<int>());
    }

    if (!j["features"].is_array()) fail(line_no, "features: expected array");
    const auto& feats = j["features"];
    const Eigen::Index rows = static_cast<Eigen::Index>(feats.size());
    Eigen::Index cols = 0;
    if (rows > 0) {
        if (!feats[0].is_array()) fail(line_no, "features: expected array of rows");
        cols = static_cast<Eigen::Index>(feats[0].size());
    }
    g.features.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = feats[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            fail(line_no, "features: ragged rows");
        }
        for (Eigen::Index c = 0; c < cols; ++c) {
            const auto& cell = row[static_cast<std::size_t>(c)];
            if (!cell.is_number()) fail(line_no, "features: expected numbers");
            g.features(r, c) = cell.get<double>();
        }
    }

    const auto& prov = j["provenance"];
    if (!prov.is_object()) fail(line_no, "provenance: expected object");
    require_keys(prov, {"segments", "noise"}, {"seed"}, line_no, "provenance");
    if (!prov["segments"].is_array()) fail(line_no, "segments: expected array");
    for (const auto& s : prov["segments"]) {
        if (!s.is_object()) fail(line_no, "segment: expected object");
        require_keys(s, {"motif_kind", "node_ids", "role"}, {}, line_no, "segment");
        Segment seg;
        if (!s["motif_kind"].is_string()) fail(line_no, "motif_kind: expected string");
        try {
            seg.motif_kind = motif_kind_from_string(s["motif_kind"].get<std::string>());
            if (!s["role"].is_string()) fail(line_no, "role: expected string");
            seg.role = role_from_string(s["role"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(line_no, e.what());
        }
        if (!s["node_ids"].is_array()) fail(line_no, "node_ids: expected array");
        for (const auto& id : s["node_ids"]) {
            if (!id.is_number_integer()) fail(line_no, "node_ids: expected integers");
            seg.node_ids.push_back(id.get<int>());
        }
        g.provenance.segments.push_back(std::move(seg));
    }
    const auto& noise = prov["noise"];
    if (!noise.is_object()) fail(line_no, "noise: expected object");
    require_keys(noise, {"edges_deleted", "edges_added", "nodes_deleted", "nodes_added"}, {}, line_no, "noise");
    for (const char* key : {"edges_deleted", "edges_added", "nodes_deleted", "nodes_added"}) {
        if (!noise[key].is_number_integer()) fail(line_no, std::string(key) + ": expected integer");
    }
    g.provenance.noise.edges_deleted = noise["edges_deleted"].get<int>();
    g.provenance.noise.edges_added = noise["edges_added"].get<int>();
    g.provenance.noise.nodes_deleted = noise["nodes_deleted"].get<int>();
    g.provenance.noise.nodes_added = noise["nodes_added"].get<int>();
    if (prov.contains("seed")) {
        if (!prov["seed"].is_number_unsigned() && !prov["seed"].is_number_integer()) {
            fail(line_no, "seed: expected integer");
        }
        g.provenance.seed = prov["seed"].get<std::uint64_t>();
    }
    return g;
}

}  // namespace

std::string serialize_graph(const Graph& g, int id) {
    if (!g.label) throw std::invalid_argument("graph " + std::to_string(id) + " has no label");
    std::string out;
    out.reserve(256 + static_cast<std::size_t>(g.features.size()) * 20);
    out += "{\"id\":";
    out += std::to_string(id);
    out += ",\"label\":";
    out += std::to_string(*g.label);
    out += ",\"num_nodes\":";
    out += std::to_string(g.node_count);
    out += ",\"edges\":[";
    for (std::size_t i = 0; i < g.edges.size(); ++i) {
        if (i) out += ',';
        out += '[';
        out += std::to_string(g.edges[i].first);
        out += ',';
        out += std::to_string(g.edges[i].second);
        out += ']';
    }
    out += "],\"features\":[";
    for (Eigen::Index r = 0; r < g.features.rows(); ++r) {
        if (r) out += ',';
        out += '[';
        for (Eigen::Index c = 0; c < g.features.cols(); ++c) {
            if (c) out += ',';
            append_double(out, g.features(r, c));
        }
        out += ']';
    }
    out += "],\"provenance\":{\"segments\":[";
    for (std::size_t i = 0; i < g.provenance.segments.size(); ++i) {
        const auto& seg = g.provenance.segments[i];
        if (i) out += ',';
        out += "{\"motif_kind\":\"";
        out += to_string(seg.motif_kind);
        out += "\",\"node_ids\":";
        append_int_array(out, seg.node_ids);
        out += ",\"role\":\"";
        out += to_string(seg.role);
        out += "\"}";
    }
    out += "],\"noise\":{\"edges_deleted\":";
    out += std::to_string(g.provenance.noise.edges_deleted);
    out += ",\"edges_added\":";
    out += std::to_string(g.provenance.noise.edges_added);
    out += ",\"nodes_deleted\":";
    out += std::to_string(g.provenance.noise.nodes_deleted);
    out += ",\"nodes_added\":";
    out += std::to_string(g.provenance.noise.nodes_added);
    out += '}';
    if (g.provenance.seed) {
        out += ",\"seed\":";
        out += std::to_string(*g.provenance.seed);
    }
    out += "}}";
    return out;
}

void serialize(const Dataset& d, std::ostream& sink) {
    for (std::size_t i = 0; i < d.graphs.size(); ++i) {
        sink << serialize_graph(d.graphs[i], static_cast<int>(i)) << '\n';
        if (!sink) throw std::runtime_error("sink write failure at graph " + std::to_string(i));
    }
}

void serialize_to_file(const Dataset& d, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    serialize(d, out);
    out.flush();
    if (!out) throw std::runtime_error("sink write failure: " + path);
}

Dataset deserialize(std::istream& source) {
    Dataset d;
    std::string line;
    std::size_t line_no = 0;
    int next_id = 0;
    while (std::getline(source, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error& e) {
            fail(line_no, std::string("malformed JSON: ") + e.what());
        }
        d.graphs.push_back(parse_graph(j, line_no, next_id));
        ++next_id;
    }
    int num_classes = 0;
    for (const auto& g : d.graphs) {
        if (g.label) num_classes = std::max(num_classes, *g.label + 1);
    }
    d.num_classes = num_classes;
    const auto violations = validate(d);
    if (!violations.empty()) {
        throw std::runtime_error("invariant violation: " + violations.front());
    }
    return d;
}

Dataset deserialize_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    return deserialize(in);
}

}  // namespace crcg::jsonl
