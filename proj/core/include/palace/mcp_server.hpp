#pragma once

#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace palace {

class Palace;

struct ToolDescriptor {
    std::string name;
    std::string description;
    std::string input_schema_json;  // JSON-schema object, serialized
};

// Tool-protocol server: JSON-RPC 2.0 over stdio, newline-delimited, one
// request at a time. Implements the initialize handshake, tools/list and
// tools/call for the ten core tools (recall, remember, rooms, wings,
// palace_status, kg_add, kg_query, diary_append, diary_read, forget).
// Malformed JSON answers -32700, unknown methods/tools -32601, schema
// violations -32602.
class McpServer {
public:
    explicit McpServer(Palace& palace);
    ~McpServer();

    McpServer(const McpServer&) = delete;
    McpServer& operator=(const McpServer&) = delete;

    // Processes one raw request line. Returns the response line, or
    // nullopt for notifications (which get no response).
    std::optional<std::string> handle_line(const std::string& line);

    // Serial request loop; returns on EOF.
    void serve(std::istream& in, std::ostream& out);

    std::vector<ToolDescriptor> tools() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace palace
