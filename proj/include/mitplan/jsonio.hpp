#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace mitplan {

using Json = nlohmann::json;

// Parse a JSON document from disk; wraps parse failures in ParseError with
// the file path and the parser's line/byte context.
Json load_json(const std::filesystem::path& path);

// Pretty-print to disk (2-space indent, trailing newline).
void save_json(const std::filesystem::path& path, const Json& doc);

// Fetch a required field, throwing ParseError naming `where` when absent.
const Json& require(const Json& obj, const std::string& key, const std::string& where);

// Reject unknown keys; keys starting with '_' are documentation and ignored.
void reject_unknown_keys(const Json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where);

}  // namespace mitplan
