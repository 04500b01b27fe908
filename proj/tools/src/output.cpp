// output.cpp — file emission, checksums and CSV/JSON encoding

#include "rabiqpt/cli/output.hpp"

#include "rabiqpt/errors.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <memory>

#ifndef RABIQPT_VERSION
#define RABIQPT_VERSION "unknown"
#endif

namespace rabiqpt::cli {

namespace fs = std::filesystem;

std::string sha256_hex(const std::string& bytes) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1) {
        throw std::runtime_error("SHA-256 computation failed");
    }
    static const char* kHex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += kHex[digest[i] >> 4];
        out += kHex[digest[i] & 0xF];
    }
    return out;
}

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    std::array<char, 32> buf{};
    const auto r = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), r.ptr);
}

void CsvTable::add_row(std::vector<Cell> row) {
    if (row.size() != header_.size()) throw DomainError("CSV row width does not match the header");
    rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
    std::string out;
    for (std::size_t i = 0; i < header_.size(); ++i) out += (i ? "," : "") + header_[i];
    out += "\n";
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            if (const auto* d = std::get_if<double>(&row[i])) {
                out += format_number(*d);
            } else if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
                out += std::to_string(*n);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += "\n";
    }
    return out;
}

Json matrix_json(const Matrix& m) {
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        Json rr = Json::array(), ii = Json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            rr.push_back(std::real(m(i, j)));
            ii.push_back(std::imag(m(i, j)));
        }
        re.push_back(std::move(rr));
        im.push_back(std::move(ii));
    }
    return Json{{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}, {"im", std::move(im)}};
}

Matrix matrix_from_json(const Json& j) {
    const auto rows = j.at("rows").get<Eigen::Index>();
    const auto cols = j.at("cols").get<Eigen::Index>();
    const Json& re = j.at("re");
    const Json& im = j.at("im");
    if (rows < 1 || cols < 1 || re.size() != static_cast<std::size_t>(rows) || im.size() != re.size()) {
        throw DomainError("matrix JSON: row count does not match 'rows'");
    }
    Matrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (re[i].size() != static_cast<std::size_t>(cols) || im[i].size() != re[i].size()) {
            throw DomainError("matrix JSON: column count does not match 'cols'");
        }
        for (Eigen::Index j2 = 0; j2 < cols; ++j2) m(i, j2) = cd{re[i][j2].get<double>(), im[i][j2].get<double>()};
    }
    return m;
}

OutputDir::OutputDir(std::string root) : root_(std::move(root)) { fs::create_directories(root_); }

void OutputDir::write(const std::string& relative, const std::string& content) {
    std::lock_guard lock(mutex_);
    for (const auto& e : entries_) {
        if (e.path == relative) throw std::logic_error("output file written twice: " + relative);
    }
    const fs::path full = fs::path(root_) / relative;
    if (full.has_parent_path()) fs::create_directories(full.parent_path());
    std::ofstream out(full, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write " + full.string());
    entries_.push_back({relative, sha256_hex(content), content.size()});
}

std::vector<ManifestEntry> OutputDir::entries() const {
    std::lock_guard lock(mutex_);
    return entries_;
}

std::string manifest_timestamp() {
    std::time_t t = 0;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v >= 0) t = static_cast<std::time_t>(v);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void OutputDir::finish(const std::string& command, const std::string& config_text, std::uint64_t seed) {
    Json files = Json::array();
    for (const auto& e : entries()) files.push_back(Json{{"path", e.path}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    files.push_back(Json{{"path", "manifest.json"}, {"sha256", nullptr}, {"bytes", nullptr}});
    const Json manifest{{"tool", "rabiqpt"},
                        {"version", RABIQPT_VERSION},
                        {"command", command},
                        {"config_sha256", sha256_hex(config_text)},
                        {"seed", seed},
                        {"created_utc", manifest_timestamp()},
                        {"files", std::move(files)}};
    const std::string text = manifest.dump(2) + "\n";
    std::lock_guard lock(mutex_);
    std::ofstream out(fs::path(root_) / "manifest.json", std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw std::runtime_error("cannot write manifest.json");
}

}  // namespace rabiqpt::cli
