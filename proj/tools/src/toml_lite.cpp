// toml_lite.cpp — line-oriented parser for the config subset

#include "rabiqpt/cli/toml_lite.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <sstream>

namespace rabiqpt::cli {

bool TomlValue::is_number() const {
    return std::holds_alternative<std::int64_t>(data) || std::holds_alternative<double>(data);
}

const char* TomlValue::type_name() const {
    switch (data.index()) {
        case 0: return "boolean";
        case 1: return "integer";
        case 2: return "float";
        case 3: return "string";
        default: return "array";
    }
}

const TomlEntry* TomlTable::find(const std::string& key) const {
    for (const auto& e : entries) {
        if (e.key == key) return &e;
    }
    return nullptr;
}

const TomlTable* TomlDocument::find(const std::string& name) const {
    for (const auto& t : tables) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

std::string format_double(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    std::string s(buf);
    // Keep floats recognizable as floats on re-read.
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

namespace {

bool is_bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Parser {
public:
    Parser(const std::string& text, std::string source) : text_(text), source_(std::move(source)) {}

    TomlDocument run() {
        TomlDocument doc;
        doc.source = source_;
        doc.tables.push_back(TomlTable{});
        std::set<std::string> seen_tables{""};
        while (pos_ < text_.size()) {
            skip_blank();
            if (pos_ >= text_.size()) break;
            const char c = text_[pos_];
            if (c == '\n') {
                advance_line();
                continue;
            }
            if (c == '#') {
                skip_comment();
                continue;
            }
            if (c == '[') {
                const int header_line = line_;
                ++pos_;
                skip_blank();
                std::string name = read_key("table name");
                while (peek() == '.') {
                    ++pos_;
                    name += "." + read_key("table name");
                }
                skip_blank();
                expect(']', "expected ']' after table name");
                end_of_line();
                if (!seen_tables.insert(name).second) fail(header_line, "duplicate table [" + name + "]");
                doc.tables.push_back(TomlTable{name, header_line, {}});
                continue;
            }
            const int key_line = line_;
            std::string key = read_key("key");
            skip_blank();
            if (peek() == '.') fail(line_, "dotted keys are not supported; use a [table] header");
            expect('=', "expected '=' after key '" + key + "'");
            skip_blank();
            TomlValue value = read_value();
            end_of_line();
            auto& table = doc.tables.back();
            if (table.find(key)) fail(key_line, "duplicate key '" + key + "'");
            table.entries.push_back(TomlEntry{std::move(key), std::move(value), key_line});
        }
        return doc;
    }

private:
    [[noreturn]] void fail(int line, const std::string& msg) const {
        std::ostringstream out;
        out << source_ << ":" << line << ": " << msg;
        throw ConfigError(out.str());
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    void advance_line() {
        ++pos_;
        ++line_;
    }

    void skip_blank() {
        while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r')) ++pos_;
    }

    void skip_comment() {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }

    // Whitespace and comments inside arrays, including newlines.
    void skip_space_multiline() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r') {
                ++pos_;
            } else if (c == '\n') {
                advance_line();
            } else if (c == '#') {
                skip_comment();
            } else {
                break;
            }
        }
    }

    void expect(char c, const std::string& msg) {
        if (peek() != c) fail(line_, msg);
        ++pos_;
    }

    void end_of_line() {
        skip_blank();
        if (peek() == '#') skip_comment();
        if (pos_ >= text_.size()) return;
        if (text_[pos_] != '\n') fail(line_, std::string("unexpected character '") + text_[pos_] + "' after value");
        advance_line();
    }

    std::string read_key(const char* what) {
        if (peek() == '"') fail(line_, std::string("quoted ") + what + "s are not supported");
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_bare_key_char(text_[pos_])) ++pos_;
        if (pos_ == start) fail(line_, std::string("expected a ") + what);
        return text_.substr(start, pos_ - start);
    }

    TomlValue read_value() {
        const char c = peek();
        if (c == '"') return TomlValue{read_string()};
        if (c == '\'') fail(line_, "literal strings are not supported; use double quotes");
        if (c == '[') return TomlValue{read_array()};
        if (c == '{') fail(line_, "inline tables are not supported");
        return read_scalar_token();
    }

    std::string read_string() {
        if (text_.compare(pos_, 3, "\"\"\"") == 0) fail(line_, "multi-line strings are not supported");
        ++pos_;
        std::string out;
        while (true) {
            if (pos_ >= text_.size() || text_[pos_] == '\n') fail(line_, "unterminated string");
            const char c = text_[pos_++];
            if (c == '"') break;
            if (c != '\\') {
                out += c;
                continue;
            }
            if (pos_ >= text_.size()) fail(line_, "unterminated escape");
            switch (text_[pos_++]) {
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case 'r': out += '\r'; break;
                default: fail(line_, "unsupported escape sequence in string");
            }
        }
        return out;
    }

    TomlArray read_array() {
        ++pos_;
        TomlArray out;
        while (true) {
            skip_space_multiline();
            if (peek() == ']') {
                ++pos_;
                return out;
            }
            if (pos_ >= text_.size()) fail(line_, "unterminated array");
            TomlValue v = read_value();
            if (std::holds_alternative<TomlArray>(v.data)) fail(line_, "nested arrays are not supported");
            out.push_back(std::move(v));
            skip_space_multiline();
            if (peek() == ',') {
                ++pos_;
            } else if (peek() != ']') {
                fail(line_, "expected ',' or ']' in array");
            }
        }
    }

    TomlValue read_scalar_token() {
        const std::size_t start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ',' || c == ']' || c == '#' || c == '\n' || c == ' ' || c == '\t' || c == '\r') break;
            ++pos_;
        }
        std::string tok = text_.substr(start, pos_ - start);
        if (tok.empty()) fail(line_, "missing value");
        if (tok == "true") return TomlValue{true};
        if (tok == "false") return TomlValue{false};
        if (tok == "inf" || tok == "+inf" || tok == "-inf" || tok == "nan" || tok == "+nan" || tok == "-nan") {
            fail(line_, "non-finite number '" + tok + "'");
        }
        std::string digits;
        for (std::size_t i = 0; i < tok.size(); ++i) {
            if (tok[i] == '_') {
                const bool ok = i > 0 && i + 1 < tok.size() && std::isdigit(static_cast<unsigned char>(tok[i - 1])) &&
                                std::isdigit(static_cast<unsigned char>(tok[i + 1]));
                if (!ok) fail(line_, "misplaced '_' in number '" + tok + "'");
                continue;
            }
            digits += tok[i];
        }
        if (!digits.empty() && digits[0] == '+') digits.erase(0, 1);
        const bool is_float = digits.find_first_of(".eE") != std::string::npos;
        if (!is_float) {
            std::int64_t v = 0;
            const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
            if (r.ec == std::errc{} && r.ptr == digits.data() + digits.size()) return TomlValue{v};
            if (r.ec == std::errc::result_out_of_range) fail(line_, "integer out of range '" + tok + "'");
            fail(line_, "invalid value '" + tok + "' (strings need double quotes)");
        }
        double v = 0.0;
        const auto r = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        const bool dot_ok = [&] {
            const auto dot = digits.find('.');
            if (dot == std::string::npos) return true;
            return dot > 0 && std::isdigit(static_cast<unsigned char>(digits[dot - 1])) && dot + 1 < digits.size() &&
                   std::isdigit(static_cast<unsigned char>(digits[dot + 1]));
        }();
        if (r.ec != std::errc{} || r.ptr != digits.data() + digits.size() || !dot_ok || !std::isfinite(v)) {
            fail(line_, "invalid number '" + tok + "'");
        }
        return TomlValue{v};
    }

    const std::string& text_;
    std::string source_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

}  // namespace

TomlDocument parse_toml(const std::string& text, const std::string& source) { return Parser(text, source).run(); }

}  // namespace rabiqpt::cli
