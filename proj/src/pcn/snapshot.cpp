#include "cryptomaze/pcn/snapshot.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cryptomaze::pcn {

namespace {

using nlohmann::json;

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

const json& field(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw ParseError(where + ": expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw ParseError(where + "." + key + ": missing");
    return *it;
}

std::int64_t int_field(const json& obj, const char* key, const std::string& where) {
    const json& v = field(obj, key, where);
    if (!v.is_number_integer()) throw ParseError(where + "." + key + ": expected an integer");
    return v.get<std::int64_t>();
}

NodeId node_field(const json& obj, const char* key, const std::string& where) {
    const std::int64_t v = int_field(obj, key, where);
    if (v < 0 || v > std::numeric_limits<NodeId>::max()) {
        throw ValidationError(where + "." + key + ": node id out of range");
    }
    return static_cast<NodeId>(v);
}

const json& array_field(const json& root, const char* key, bool required) {
    static const json empty = json::array();
    auto it = root.find(key);
    if (it == root.end()) {
        if (required) throw ParseError(std::string(key) + ": missing");
        return empty;
    }
    if (!it->is_array()) throw ParseError(std::string(key) + ": expected an array");
    return *it;
}

}  // namespace

PaymentGraph parse_snapshot(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError("line " + std::to_string(line_of(text, e.byte)) + ": " + e.what());
    }
    if (!root.is_object()) throw ParseError("line 1: top level must be an object");

    PaymentGraph g;
    const json& nodes = array_field(root, "nodes", true);
    if (nodes.empty()) throw ValidationError("snapshot has no nodes");
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        g.add_node(node_field(nodes[i], "id", "nodes[" + std::to_string(i) + "]"));
    }

    const json& channels = array_field(root, "channels", false);
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const std::string where = "channels[" + std::to_string(i) + "]";
        const std::int64_t id = int_field(channels[i], "id", where);
        if (id < 0) throw ValidationError(where + ".id: negative channel id");
        const NodeId u = node_field(channels[i], "u", where);
        const NodeId v = node_field(channels[i], "v", where);
        const Coins cuv = int_field(channels[i], "cap_uv", where);
        const Coins cvu = int_field(channels[i], "cap_vu", where);
        if (cuv < 0) throw ValidationError(where + ".cap_uv: negative capacity");
        if (cvu < 0) throw ValidationError(where + ".cap_vu: negative capacity");
        try {
            g.add_channel(static_cast<std::uint64_t>(id), u, v, cuv, cvu);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }

    if (auto it = root.find("fee_mode"); it != root.end()) {
        if (*it == "fixed") {
            g.set_fee_mode(FeeMode::fixed);
        } else if (*it == "proportional") {
            g.set_fee_mode(FeeMode::proportional);
        } else {
            throw ParseError("fee_mode: expected \"fixed\" or \"proportional\"");
        }
    }

    const json& fees = array_field(root, "fees", false);
    for (std::size_t i = 0; i < fees.size(); ++i) {
        const std::string where = "fees[" + std::to_string(i) + "]";
        const NodeId n = node_field(fees[i], "node", where);
        const Coins f = int_field(fees[i], "fee", where);
        try {
            g.set_fee(n, f);
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
    }
    return g;
}

PaymentGraph load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_snapshot(ss.str());
}

std::string dump_snapshot(const PaymentGraph& graph) {
    json root;
    json nodes = json::array();
    json fees = json::array();
    for (NodeId n : graph.node_ids()) {
        nodes.push_back({{"id", n}});
        fees.push_back({{"node", n}, {"fee", graph.fee_parameter(n)}});
    }
    json channels = json::array();
    for (const Channel& c : graph.channels()) {
        channels.push_back({{"id", c.number}, {"u", c.u}, {"v", c.v}, {"cap_uv", c.cap_uv}, {"cap_vu", c.cap_vu}});
    }
    root["nodes"] = std::move(nodes);
    root["channels"] = std::move(channels);
    root["fees"] = std::move(fees);
    root["fee_mode"] = graph.fee_mode() == FeeMode::fixed ? "fixed" : "proportional";
    return root.dump();
}

void save_snapshot(const PaymentGraph& graph, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << dump_snapshot(graph);
}

}  // namespace cryptomaze::pcn
