// output.hpp — output directory writer, CSV formatting and the run manifest

#pragma once

#include "rabiqpt/hilbert.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <mutex>
#include <string>
#include <variant>
#include <vector>

namespace rabiqpt::cli {

using Json = nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes);

// Shortest round-trip decimal with '.' separator, independent of the locale.
std::string format_number(double v);

// Header row plus rows; cells are numbers or text, joined with ','.
class CsvTable {
public:
    using Cell = std::variant<double, std::int64_t, std::string>;

    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<Cell> row);  // throws DomainError on a width mismatch
    std::string str() const;
    std::size_t rows() const { return rows_.size(); }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

// Complex matrix as {"dim", "re": [[...]], "im": [[...]]}.
Json matrix_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

struct ManifestEntry {
    std::string path;
    std::string sha256;
    std::uint64_t bytes = 0;
};

// All files of one run pass through here; writes are serialized and each
// relative path may be written once.
class OutputDir {
public:
    explicit OutputDir(std::string root);

    void write(const std::string& relative, const std::string& content);
    void write_json(const std::string& relative, const Json& j) { write(relative, j.dump(2) + "\n"); }
    void write_csv(const std::string& relative, const CsvTable& t) { write(relative, t.str()); }

    // Writes manifest.json; it lists itself last without a checksum.
    void finish(const std::string& command, const std::string& config_text, std::uint64_t seed);

    const std::string& root() const noexcept { return root_; }
    std::vector<ManifestEntry> entries() const;

private:
    std::string root_;
    mutable std::mutex mutex_;
    std::vector<ManifestEntry> entries_;
};

// UTC timestamp from SOURCE_DATE_EPOCH, or the epoch itself when unset so
// reruns stay byte-identical.
std::string manifest_timestamp();

}  // namespace rabiqpt::cli
