// toml_lite.hpp — reader and writer for the TOML subset used by run configs
//
// Supported: comments, [table] headers, bare keys, basic strings with the
// usual escapes, booleans, integers, floats and (possibly multi-line)
// arrays of scalars. Dotted keys, inline tables, dates and literal strings
// are rejected with a line-numbered error.

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace rabiqpt::cli {

// Carries "<source>:<line>: message" lines, one per problem found.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& report) : std::runtime_error(report) {}
};

struct TomlValue;
using TomlArray = std::vector<TomlValue>;

struct TomlValue {
    std::variant<bool, std::int64_t, double, std::string, TomlArray> data;

    bool is_number() const;
    const char* type_name() const;
};

struct TomlEntry {
    std::string key;
    TomlValue value;
    int line = 0;
};

struct TomlTable {
    std::string name;  // empty for the root table
    int line = 0;
    std::vector<TomlEntry> entries;

    const TomlEntry* find(const std::string& key) const;
};

struct TomlDocument {
    std::string source;
    std::vector<TomlTable> tables;  // root first, then in file order

    const TomlTable* find(const std::string& name) const;
};

TomlDocument parse_toml(const std::string& text, const std::string& source = "<config>");

// Shortest decimal that reads back to the same double ("%.17g" fallback).
std::string format_double(double v);

}  // namespace rabiqpt::cli
