#include "kgrag/persist.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "kgrag/error.hpp"

namespace kgrag {

using nlohmann::json;

namespace {

json literal_to_json(const Value& v) {
    switch (v.index()) {
        case 1: return std::get<std::int64_t>(v);
        case 2: return std::get<double>(v);
        case 3: return std::get<std::string>(v);
        case 4: return std::get<std::vector<double>>(v);
        default: return nullptr;
    }
}

Value literal_from_json(const json& j) {
    if (j.is_number_integer()) return j.get<std::int64_t>();
    if (j.is_number_float()) return j.get<double>();
    if (j.is_string()) return j.get<std::string>();
    if (j.is_array()) {
        std::vector<double> out;
        out.reserve(j.size());
        for (const auto& e : j) {
            if (!e.is_number()) throw CorruptFile("vector literal holds a non-number");
            out.push_back(e.get<double>());
        }
        return out;
    }
    throw CorruptFile("unsupported literal value: " + j.dump());
}

json literals_to_json(const Literals& lits) {
    json o = json::object();
    for (const auto& [k, v] : lits) o[k] = literal_to_json(v);
    return o;
}

Literals literals_from_json(const json& j) {
    if (!j.is_object()) throw CorruptFile("literals must be an object");
    Literals out;
    for (const auto& [k, v] : j.items()) out.emplace(k, literal_from_json(v));
    return out;
}

}  // namespace

std::string to_json_text(const KnowledgeGraph& graph) {
    json doc;
    doc["format_version"] = kFormatVersion;
    doc["embedding_dimension"] = graph.embedding_dimension();
    json nodes = json::array();
    for (const auto& [id, n] : graph.nodes()) {
        nodes.push_back({{"id", id.value},
                         {"label", std::string(to_string(n.label))},
                         {"symbol", n.symbol},
                         {"literals", literals_to_json(n.literals)}});
    }
    doc["nodes"] = std::move(nodes);
    json triples = json::array();
    for (const Triple& t : graph.triples()) {
        json jt = {{"head", t.head.value},
                   {"type", std::string(to_string(t.relation.type))},
                   {"tail", t.tail.value}};
        if (!t.relation.literals.empty()) jt["literals"] = literals_to_json(t.relation.literals);
        triples.push_back(std::move(jt));
    }
    doc["triples"] = std::move(triples);
    return doc.dump(1) + "\n";
}

KnowledgeGraph from_json_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw CorruptFile(std::string("malformed store file: ") + e.what());
    }
    try {
        if (!doc.is_object() || !doc.contains("format_version"))
            throw CorruptFile("missing format_version");
        const auto& ver = doc.at("format_version");
        if (!ver.is_number_integer()) throw CorruptFile("format_version must be an integer");
        if (ver.get<int>() != kFormatVersion)
            throw VersionMismatch("store format_version " + ver.dump() + ", expected " +
                                  std::to_string(kFormatVersion));

        KnowledgeGraph g(doc.at("embedding_dimension").get<std::size_t>());
        for (const auto& jn : doc.at("nodes")) {
            const auto label = parse_label(jn.at("label").get<std::string>());
            if (!label) throw CorruptFile("unknown label " + jn.at("label").dump());
            Node n;
            n.id = NodeId{jn.at("id").get<std::uint64_t>()};
            n.label = *label;
            n.symbol = jn.at("symbol").get<std::string>();
            n.literals = literals_from_json(jn.at("literals"));
            g.restore_node(std::move(n));
        }
        for (const auto& jt : doc.at("triples")) {
            const auto type = parse_relation_type(jt.at("type").get<std::string>());
            if (!type) throw CorruptFile("unknown relation type " + jt.at("type").dump());
            Literals lits;
            if (jt.contains("literals")) lits = literals_from_json(jt.at("literals"));
            g.add_triple(NodeId{jt.at("head").get<std::uint64_t>()}, *type,
                         NodeId{jt.at("tail").get<std::uint64_t>()}, std::move(lits));
        }
        return g;
    } catch (const json::exception& e) {
        throw CorruptFile(std::string("invalid store file: ") + e.what());
    } catch (const SchemaError& e) {
        throw CorruptFile(std::string("inconsistent store file: ") + e.what());
    } catch (const NotFoundError& e) {
        throw CorruptFile(std::string("dangling triple in store file: ") + e.what());
    }
}

void save(const KnowledgeGraph& graph, const std::filesystem::path& destination) {
    const auto tmp = std::filesystem::path(destination.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write " + tmp.string());
        out << to_json_text(graph);
        if (!out.flush()) throw Error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, destination);
}

KnowledgeGraph load(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) throw NotFoundError("cannot open " + source.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return from_json_text(ss.str());
}

}  // namespace kgrag
