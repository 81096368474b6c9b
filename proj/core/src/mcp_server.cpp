#include "palace/mcp_server.hpp"

#include <functional>
#include <istream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

#include "palace/error.hpp"
#include "palace/palace.hpp"
#include "palace/util.hpp"

using nlohmann::json;

namespace palace {

namespace {

constexpr const char* kProtocolVersion = "2024-11-05";
constexpr const char* kServerVersion = "0.1.0";

json identifier_schema() {
    return json{{"type", "string"}, {"pattern", "^[a-z0-9_]+$"}};
}

// Minimal JSON-schema checker covering what the tool schemas use:
// object type, required, property types, pattern, minimum/maximum, enum.
// Unknown properties are rejected so the schema really does validate every
// accepted call.
void validate_against_schema(const json& schema, const json& value, const std::string& where) {
    std::string type = schema.value("type", "object");
    auto fail = [&](const std::string& msg) { raise(ErrorKind::invalid_input, where + ": " + msg); };

    if (type == "object") {
        if (!value.is_object()) fail("expected object");
        const json props = schema.value("properties", json::object());
        if (schema.contains("required")) {
            for (const auto& req : schema["required"]) {
                if (!value.contains(req.get<std::string>())) {
                    fail("missing required property '" + req.get<std::string>() + "'");
                }
            }
        }
        for (const auto& [key, sub] : value.items()) {
            if (!props.contains(key)) fail("unknown property '" + key + "'");
            validate_against_schema(props[key], sub, where + "." + key);
        }
    } else if (type == "string") {
        if (!value.is_string()) fail("expected string");
        if (schema.contains("pattern")) {
            // The only pattern the tools use is the identifier pattern.
            if (schema["pattern"] == "^[a-z0-9_]+$" && !util::is_identifier(value.get<std::string>())) {
                fail("must match [a-z0-9_]+");
            }
        }
        if (schema.contains("enum")) {
            bool ok = false;
            for (const auto& option : schema["enum"]) {
                if (option == value) ok = true;
            }
            if (!ok) fail("not one of the allowed values");
        }
    } else if (type == "integer") {
        if (!value.is_number_integer()) fail("expected integer");
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
            fail("below minimum");
        }
        if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
            fail("above maximum");
        }
    } else if (type == "number") {
        if (!value.is_number()) fail("expected number");
        if (schema.contains("minimum") && value.get<double>() < schema["minimum"].get<double>()) {
            fail("below minimum");
        }
        if (schema.contains("maximum") && value.get<double>() > schema["maximum"].get<double>()) {
            fail("above maximum");
        }
    } else if (type == "boolean") {
        if (!value.is_boolean()) fail("expected boolean");
    }
}

json triple_to_json(const Triple& t) {
    json j;
    j["id"] = t.id;
    j["subject"] = t.subject;
    j["predicate"] = t.predicate;
    j["object"] = t.object;
    j["valid_from"] = t.valid_from ? json(*t.valid_from) : json(nullptr);
    j["valid_to"] = t.valid_to ? json(*t.valid_to) : json(nullptr);
    j["confidence"] = t.confidence;
    j["extracted_at"] = t.extracted_at;
    return j;
}

}  // namespace

struct McpServer::Impl {
    Palace& palace;

    struct Tool {
        std::string description;
        json schema;
        std::function<json(const json&)> run;
    };
    std::map<std::string, Tool> tools;

    explicit Impl(Palace& p) : palace(p) { register_tools(); }

    void register_tools() {
        tools["recall"] = {
            "Semantic + keyword hybrid search over the palace; returns verbatim drawer "
            "content with addresses and scores.",
            {{"type", "object"},
             {"properties",
              {{"query", {{"type", "string"}}},
               {"wing", identifier_schema()},
               {"room", identifier_schema()},
               {"n_results", {{"type", "integer"}, {"minimum", 1}, {"maximum", 100}}},
               {"max_distance", {{"type", "number"}, {"minimum", 0}}},
               {"mode", {{"type", "string"}, {"enum", {"semantic", "keyword", "hybrid"}}}}}},
             {"required", {"query"}}},
            [this](const json& args) { return recall(args); }};

        tools["remember"] = {
            "Store a memory verbatim at wing/room; identical content in the same address "
            "dedupes to the same drawer.",
            {{"type", "object"},
             {"properties",
              {{"content", {{"type", "string"}}},
               {"wing", identifier_schema()},
               {"room", identifier_schema()},
               {"hall", identifier_schema()}}},
             {"required", {"content", "wing", "room"}}},
            [this](const json& args) { return remember(args); }};

        tools["rooms"] = {
            "List rooms, optionally restricted to one wing.",
            {{"type", "object"}, {"properties", {{"wing", identifier_schema()}}}},
            [this](const json& args) {
                std::optional<std::string> wing;
                if (args.contains("wing")) wing = args["wing"].get<std::string>();
                return json{{"rooms", palace.rooms(wing)}};
            }};

        tools["wings"] = {"List all wings.",
                          {{"type", "object"}, {"properties", json::object()}},
                          [this](const json&) { return json{{"wings", palace.wings()}}; }};

        tools["palace_status"] = {
            "Palace summary: wing/room/drawer counts plus the PALACE_PROTOCOL directive.",
            {{"type", "object"}, {"properties", json::object()}},
            [this](const json&) {
                PalaceStatus s = palace.status();
                return json{{"wing_count", s.wing_count},
                            {"room_count", s.room_count},
                            {"drawer_count", s.drawer_count},
                            {"protocol_directive", s.protocol_directive}};
            }};

        tools["kg_add"] = {
            "Add a knowledge-graph triple with optional validity interval; exact "
            "duplicates are rejected.",
            {{"type", "object"},
             {"properties",
              {{"subject", {{"type", "string"}}},
               {"predicate", {{"type", "string"}}},
               {"object", {{"type", "string"}}},
               {"valid_from", {{"type", "string"}}},
               {"valid_to", {{"type", "string"}}},
               {"confidence", {{"type", "number"}, {"minimum", 0}, {"maximum", 1}}}}},
             {"required", {"subject", "predicate", "object"}}},
            [this](const json& args) {
                Triple t;
                t.subject = args["subject"].get<std::string>();
                t.predicate = args["predicate"].get<std::string>();
                t.object = args["object"].get<std::string>();
                if (args.contains("valid_from")) t.valid_from = args["valid_from"].get<std::string>();
                if (args.contains("valid_to")) t.valid_to = args["valid_to"].get<std::string>();
                if (args.contains("confidence")) t.confidence = args["confidence"].get<double>();
                bool added = palace.kg().add_triple(t);
                return json{{"triple_id", KnowledgeGraph::triple_identity(t)}, {"added", added}};
            }};

        tools["kg_query"] = {
            "Query triples by subject (optionally at a point in time) or by predicate.",
            {{"type", "object"},
             {"properties",
              {{"subject", {{"type", "string"}}},
               {"predicate", {{"type", "string"}}},
               {"at_time", {{"type", "string"}}}}}},
            [this](const json& args) {
                std::vector<Triple> found;
                if (args.contains("subject")) {
                    std::optional<std::string> at;
                    if (args.contains("at_time")) at = args["at_time"].get<std::string>();
                    found = palace.kg().query_by_subject(args["subject"].get<std::string>(), at);
                } else if (args.contains("predicate")) {
                    found = palace.kg().query_by_predicate(args["predicate"].get<std::string>());
                } else {
                    raise(ErrorKind::invalid_input, "kg_query needs subject or predicate");
                }
                json triples = json::array();
                for (const auto& t : found) triples.push_back(triple_to_json(t));
                return json{{"triples", triples}};
            }};

        tools["diary_append"] = {
            "Append an immutable entry to an agent's diary.",
            {{"type", "object"},
             {"properties",
              {{"agent_id", identifier_schema()},
               {"session_id", {{"type", "string"}}},
               {"text", {{"type", "string"}}}}},
             {"required", {"agent_id", "text"}}},
            [this](const json& args) {
                auto entry = palace.diary().append(args["agent_id"].get<std::string>(),
                                                   args.value("session_id", ""),
                                                   args["text"].get<std::string>());
                return json{{"agent_id", entry.agent_id},
                            {"session_id", entry.session_id},
                            {"created_at", entry.created_at}};
            }};

        tools["diary_read"] = {
            "Read the most recent diary entries for an agent, oldest first.",
            {{"type", "object"},
             {"properties",
              {{"agent_id", identifier_schema()},
               {"last_n", {{"type", "integer"}, {"minimum", 1}, {"maximum", 1000}}}}},
             {"required", {"agent_id"}}},
            [this](const json& args) {
                size_t last_n = args.value("last_n", 10);
                auto entries = palace.diary().read(args["agent_id"].get<std::string>(), last_n);
                json out = json::array();
                for (const auto& e : entries) {
                    out.push_back({{"agent_id", e.agent_id},
                                   {"session_id", e.session_id},
                                   {"text", e.text},
                                   {"created_at", e.created_at}});
                }
                return json{{"entries", out}};
            }};

        tools["forget"] = {
            "Remove a drawer by id.",
            {{"type", "object"},
             {"properties", {{"drawer_id", {{"type", "string"}}}}},
             {"required", {"drawer_id"}}},
            [this](const json& args) {
                return json{{"forgotten", palace.forget(args["drawer_id"].get<std::string>())}};
            }};
    }

    json recall(const json& args) {
        SearchRequest req;
        req.query = args["query"].get<std::string>();
        if (args.contains("wing")) req.wing = args["wing"].get<std::string>();
        if (args.contains("room")) req.room = args["room"].get<std::string>();
        if (args.contains("n_results")) req.n_results = args["n_results"].get<size_t>();
        if (args.contains("max_distance")) req.max_distance = args["max_distance"].get<double>();
        if (args.contains("mode")) req.mode = search_mode_from_string(args["mode"].get<std::string>());

        json results = json::array();
        for (const SearchResult& r : palace.search_memories(req)) {
            json item;
            item["drawer_id"] = r.drawer_id;
            item["content"] = r.content;
            item["wing"] = r.address.wing;
            item["room"] = r.address.room;
            if (r.address.hall) item["hall"] = *r.address.hall;
            if (r.address.closet) item["closet"] = *r.address.closet;
            item["distance"] = r.distance;
            item["keyword_score"] = r.keyword_score;
            item["fused_score"] = r.fused_score;
            item["provenance"] = to_string(r.provenance);
            if (r.session_id) item["session_id"] = *r.session_id;
            results.push_back(std::move(item));
        }
        return json{{"results", results}};
    }

    json remember(const json& args) {
        PalaceAddress addr;
        addr.wing = args["wing"].get<std::string>();
        addr.room = args["room"].get<std::string>();
        if (args.contains("hall")) addr.hall = args["hall"].get<std::string>();
        auto res = palace.remember(args["content"].get<std::string>(), addr);
        return json{{"drawer_id", res.drawer_id}, {"deduplicated", res.deduplicated}};
    }

    json error_response(const json& id, int code, const std::string& message) {
        return json{{"jsonrpc", "2.0"}, {"id", id}, {"error", {{"code", code}, {"message", message}}}};
    }

    json result_response(const json& id, json result) {
        return json{{"jsonrpc", "2.0"}, {"id", id}, {"result", std::move(result)}};
    }

    std::optional<json> dispatch(const json& request) {
        json id = request.contains("id") ? request["id"] : json(nullptr);
        bool is_notification = !request.contains("id");

        if (!request.contains("method") || !request["method"].is_string()) {
            if (is_notification) return std::nullopt;
            return error_response(id, -32600, "request needs a method");
        }
        std::string method = request["method"].get<std::string>();

        if (method == "initialize") {
            json result{{"protocolVersion", kProtocolVersion},
                        {"capabilities", {{"tools", json::object()}}},
                        {"serverInfo", {{"name", "palace"}, {"version", kServerVersion}}}};
            return result_response(id, std::move(result));
        }
        if (method == "notifications/initialized") return std::nullopt;
        if (method == "ping") return result_response(id, json::object());

        if (method == "tools/list") {
            json list = json::array();
            for (const auto& [name, tool] : tools) {
                list.push_back(
                    {{"name", name}, {"description", tool.description}, {"inputSchema", tool.schema}});
            }
            return result_response(id, json{{"tools", list}});
        }

        if (method == "tools/call") {
            if (!request.contains("params") || !request["params"].is_object() ||
                !request["params"].contains("name")) {
                return error_response(id, -32602, "tools/call needs params.name");
            }
            std::string name = request["params"]["name"].get<std::string>();
            auto it = tools.find(name);
            if (it == tools.end()) return error_response(id, -32601, "unknown tool: " + name);

            json args = request["params"].value("arguments", json::object());
            try {
                validate_against_schema(it->second.schema, args, name);
                json payload = it->second.run(args);
                json result{{"content", json::array({{{"type", "text"}, {"text", payload.dump()}}})},
                            {"isError", false}};
                return result_response(id, std::move(result));
            } catch (const Error& e) {
                switch (e.kind()) {
                    case ErrorKind::invalid_input:
                    case ErrorKind::not_found:
                    case ErrorKind::parse:
                    case ErrorKind::config:
                        return error_response(id, -32602, e.what());
                    default:
                        return error_response(id, -32603, e.what());
                }
            } catch (const std::exception& e) {
                return error_response(id, -32603, e.what());
            }
        }

        if (is_notification) return std::nullopt;
        return error_response(id, -32601, "unknown method: " + method);
    }
};

McpServer::McpServer(Palace& palace) : impl_(std::make_unique<Impl>(palace)) {}
McpServer::~McpServer() = default;

std::optional<std::string> McpServer::handle_line(const std::string& line) {
    json request;
    try {
        request = json::parse(line);
    } catch (const json::exception&) {
        return impl_->error_response(nullptr, -32700, "parse error").dump();
    }
    if (!request.is_object()) {
        return impl_->error_response(nullptr, -32600, "request must be an object").dump();
    }
    auto response = impl_->dispatch(request);
    if (!response) return std::nullopt;
    return response->dump();
}

void McpServer::serve(std::istream& in, std::ostream& out) {
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto response = handle_line(line);
        if (response) {
            out << *response << "\n";
            out.flush();
        }
    }
}

std::vector<ToolDescriptor> McpServer::tools() const {
    std::vector<ToolDescriptor> out;
    for (const auto& [name, tool] : impl_->tools) {
        out.push_back({name, tool.description, tool.schema.dump()});
    }
    return out;
}

}  // namespace palace
