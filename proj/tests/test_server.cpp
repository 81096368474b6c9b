#include "doctest.h"

#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "palace/mcp_server.hpp"
#include "palace/palace.hpp"

#include "testutil.hpp"

using namespace palace;
using nlohmann::json;

namespace {

json rpc(McpServer& server, const json& request) {
    auto line = server.handle_line(request.dump());
    REQUIRE(line.has_value());
    return json::parse(*line);
}

json call_tool(McpServer& server, int id, const std::string& name, const json& args) {
    return rpc(server, json{{"jsonrpc", "2.0"},
                            {"id", id},
                            {"method", "tools/call"},
                            {"params", {{"name", name}, {"arguments", args}}}});
}

json tool_payload(const json& response) {
    REQUIRE(response.contains("result"));
    return json::parse(response["result"]["content"][0]["text"].get<std::string>());
}

}  // namespace

TEST_CASE("initialize handshake advertises tools") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    auto response = rpc(server, {{"jsonrpc", "2.0"}, {"id", 1}, {"method", "initialize"}});
    CHECK(response["id"] == 1);
    CHECK(response["result"].contains("protocolVersion"));
    CHECK(response["result"]["capabilities"].contains("tools"));
    CHECK(response["result"]["serverInfo"]["name"] == "palace");

    SUBCASE("notifications get no response") {
        CHECK_FALSE(server.handle_line(
            json{{"jsonrpc", "2.0"}, {"method", "notifications/initialized"}}.dump()));
    }
}

TEST_CASE("tools/list exposes the core tool set") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    auto response = rpc(server, {{"jsonrpc", "2.0"}, {"id", 2}, {"method", "tools/list"}});
    std::set<std::string> names;
    for (const auto& t : response["result"]["tools"]) {
        names.insert(t["name"].get<std::string>());
        CHECK(t.contains("inputSchema"));
    }
    for (const char* expected : {"recall", "remember", "rooms", "wings", "palace_status", "kg_add",
                                 "kg_query", "diary_append", "diary_read", "forget"}) {
        CHECK(names.count(expected) == 1);
    }
    CHECK(names.size() == 10);
}

TEST_CASE("protocol errors") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    SUBCASE("malformed JSON is -32700") {
        auto line = server.handle_line("{nope");
        REQUIRE(line.has_value());
        CHECK(json::parse(*line)["error"]["code"] == -32700);
    }
    SUBCASE("unknown method is -32601") {
        auto r = rpc(server, {{"jsonrpc", "2.0"}, {"id", 3}, {"method", "no/such"}});
        CHECK(r["error"]["code"] == -32601);
    }
    SUBCASE("unknown tool is -32601") {
        auto r = call_tool(server, 4, "imaginary", json::object());
        CHECK(r["error"]["code"] == -32601);
    }
    SUBCASE("missing required arg is -32602") {
        auto r = call_tool(server, 5, "recall", json::object());
        CHECK(r["error"]["code"] == -32602);
    }
    SUBCASE("wrong arg type is -32602") {
        auto r = call_tool(server, 6, "recall", {{"query", 42}});
        CHECK(r["error"]["code"] == -32602);
    }
    SUBCASE("unknown property is -32602") {
        auto r = call_tool(server, 7, "recall", {{"query", "x"}, {"bogus", true}});
        CHECK(r["error"]["code"] == -32602);
    }
    SUBCASE("invalid address pattern is -32602") {
        auto r = call_tool(server, 8, "remember",
                           {{"content", "x"}, {"wing", "Bad Wing"}, {"room", "r"}});
        CHECK(r["error"]["code"] == -32602);
    }
}

TEST_CASE("remember/recall round trip through the server") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    std::string content = "the deploy key lives in vault \xc3\xa9";
    auto remembered = tool_payload(
        call_tool(server, 10, "remember", {{"content", content}, {"wing", "dev"}, {"room", "api"}}));
    CHECK(remembered["deduplicated"] == false);
    CHECK(remembered["drawer_id"] == derive_drawer_id("dev", "api", content));

    SUBCASE("duplicate remember dedupes") {
        auto again = tool_payload(call_tool(
            server, 11, "remember", {{"content", content}, {"wing", "dev"}, {"room", "api"}}));
        CHECK(again["deduplicated"] == true);
        CHECK(again["drawer_id"] == remembered["drawer_id"]);
    }

    SUBCASE("recall returns the verbatim bytes") {
        auto recalled =
            tool_payload(call_tool(server, 12, "recall", {{"query", "deploy key vault"}}));
        REQUIRE(!recalled["results"].empty());
        CHECK(recalled["results"][0]["content"].get<std::string>() == content);
    }

    SUBCASE("recall on empty palace is an empty result, not an error") {
        TempDir other;
        Palace::init(other.sub("p"));
        Palace empty = Palace::open(other.sub("p"));
        McpServer empty_server(empty);
        auto recalled = tool_payload(call_tool(empty_server, 13, "recall", {{"query", "anything"}}));
        CHECK(recalled["results"].empty());
    }

    SUBCASE("n_results is a ceiling") {
        for (int i = 0; i < 8; i++) {
            call_tool(server, 20 + i, "remember",
                      {{"content", "filler memory " + std::to_string(i)},
                       {"wing", "dev"},
                       {"room", "api"}});
        }
        auto recalled = tool_payload(
            call_tool(server, 30, "recall", {{"query", "filler memory"}, {"n_results", 3}}));
        CHECK(recalled["results"].size() <= 3);
    }
}

TEST_CASE("palace_status carries the directive and live counts") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    auto before = tool_payload(call_tool(server, 40, "palace_status", json::object()));
    CHECK(before["drawer_count"] == 0);
    CHECK(before["wing_count"] == 0);
    CHECK(before["protocol_directive"].get<std::string>().find("search before claiming ignorance") !=
          std::string::npos);

    call_tool(server, 41, "remember", {{"content", "a fact"}, {"wing", "dev"}, {"room", "api"}});
    auto after = tool_payload(call_tool(server, 42, "palace_status", json::object()));
    CHECK(after["drawer_count"] == 1);
    CHECK(after["wing_count"] == 1);
    CHECK(after["room_count"] == 1);
}

TEST_CASE("kg and diary tools") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    auto added = tool_payload(call_tool(
        server, 50, "kg_add",
        {{"subject", "alice"}, {"predicate", "works_at"}, {"object", "acme"}, {"confidence", 0.9}}));
    CHECK(added["added"] == true);

    auto dup = tool_payload(call_tool(
        server, 51, "kg_add",
        {{"subject", "alice"}, {"predicate", "works_at"}, {"object", "acme"}, {"confidence", 0.9}}));
    CHECK(dup["added"] == false);

    auto queried = tool_payload(call_tool(server, 52, "kg_query", {{"subject", "alice"}}));
    REQUIRE(queried["triples"].size() == 1);
    CHECK(queried["triples"][0]["object"] == "acme");

    SUBCASE("kg_query without subject or predicate is -32602") {
        auto r = call_tool(server, 53, "kg_query", json::object());
        CHECK(r["error"]["code"] == -32602);
    }

    auto appended = tool_payload(call_tool(
        server, 54, "diary_append", {{"agent_id", "helper"}, {"text", "session went fine"}}));
    CHECK(appended["agent_id"] == "helper");
    auto entries =
        tool_payload(call_tool(server, 55, "diary_read", {{"agent_id", "helper"}, {"last_n", 5}}));
    REQUIRE(entries["entries"].size() == 1);
    CHECK(entries["entries"][0]["text"] == "session went fine");
}

TEST_CASE("forget removes a drawer") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);

    auto remembered = tool_payload(call_tool(
        server, 60, "remember", {{"content", "ephemeral"}, {"wing", "dev"}, {"room", "api"}}));
    auto forgotten = tool_payload(
        call_tool(server, 61, "forget", {{"drawer_id", remembered["drawer_id"].get<std::string>()}}));
    CHECK(forgotten["forgotten"] == true);
    auto again = tool_payload(
        call_tool(server, 62, "forget", {{"drawer_id", remembered["drawer_id"].get<std::string>()}}));
    CHECK(again["forgotten"] == false);
    CHECK(p.drawer_count() == 0);
}

TEST_CASE("tool calls and direct library calls produce the same state") {
    TempDir dir;
    Palace::init(dir.sub("via_server"));
    Palace::init(dir.sub("via_lib"));
    Palace server_palace = Palace::open(dir.sub("via_server"));
    Palace lib_palace = Palace::open(dir.sub("via_lib"));
    McpServer server(server_palace);

    const std::vector<std::pair<std::string, std::string>> memories = {
        {"dev", "first note about the gateway"},
        {"dev", "second note about the scheduler"},
        {"docs", "third note about onboarding"},
    };
    int id = 70;
    for (const auto& [wing, content] : memories) {
        call_tool(server, id++, "remember", {{"content", content}, {"wing", wing}, {"room", "r"}});
        lib_palace.remember(content, {wing, "r", {}, {}});
    }
    call_tool(server, id++, "forget",
              {{"drawer_id", derive_drawer_id("dev", "r", "first note about the gateway")}});
    lib_palace.forget(derive_drawer_id("dev", "r", "first note about the gateway"));

    CHECK(server_palace.drawer_count() == lib_palace.drawer_count());
    CHECK(server_palace.wings() == lib_palace.wings());
    auto ids_of = [](Palace& p) {
        std::set<std::string> out;
        for (const auto& d : p.drawers_by_recency()) out.insert(d.id);
        return out;
    };
    CHECK(ids_of(server_palace) == ids_of(lib_palace));
}

TEST_CASE("schema-conforming fuzzed calls never hit internal errors") {
    TempDir dir;
    Palace::init(dir.sub("p"));
    Palace p = Palace::open(dir.sub("p"));
    McpServer server(p);
    std::mt19937_64 rng(777);

    auto ident = [&] {
        std::string s;
        size_t n = 1 + rng() % 8;
        for (size_t i = 0; i < n; i++) s += static_cast<char>('a' + rng() % 26);
        return s;
    };
    auto text = [&] {
        std::string s;
        size_t n = 1 + rng() % 10;
        for (size_t i = 0; i < n; i++) {
            if (i) s += " ";
            s += ident();
        }
        return s;
    };

    int id = 100;
    for (int i = 0; i < 300; i++) {
        json args;
        std::string tool;
        switch (rng() % 7) {
            case 0:
                tool = "remember";
                args = {{"content", text()}, {"wing", ident()}, {"room", ident()}};
                break;
            case 1:
                tool = "recall";
                args = {{"query", text()}};
                if (rng() % 2) args["wing"] = ident();
                if (rng() % 2) args["n_results"] = static_cast<int>(1 + rng() % 10);
                break;
            case 2:
                tool = "rooms";
                args = json::object();
                if (rng() % 2) args["wing"] = ident();
                break;
            case 3:
                tool = "palace_status";
                args = json::object();
                break;
            case 4:
                tool = "kg_add";
                args = {{"subject", ident()}, {"predicate", ident()}, {"object", ident()}};
                break;
            case 5:
                tool = "diary_append";
                args = {{"agent_id", ident()}, {"text", text()}};
                break;
            default:
                tool = "forget";
                args = {{"drawer_id", ident()}};
                break;
        }
        auto response = call_tool(server, id++, tool, args);
        if (response.contains("error")) {
            // schema-valid calls may fail validation deeper in (they should
            // not), but never with an internal error
            CHECK(response["error"]["code"] != -32603);
            FAIL_CHECK("unexpected error for ", tool, ": ", response["error"].dump());
        }
    }
}
