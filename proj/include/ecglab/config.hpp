#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ecglab {

/// Bad or missing configuration; the command line maps it to exit status 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Flat key=value settings grouped under [section] headers. Keys are addressed
/// as "section.key"; keys before any header live in the "" section and are
/// addressed by bare name. '#' and ';' start comment lines.
class Config {
public:
    static Config parse(std::istream& is, const std::string& source = "<config>");
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value);
    [[nodiscard]] bool has(const std::string& key) const;
    [[nodiscard]] std::optional<std::string> get(const std::string& key) const;

    [[nodiscard]] std::string require(const std::string& key) const;
    [[nodiscard]] std::string get_string(const std::string& key, const std::string& fallback) const;
    [[nodiscard]] double get_double(const std::string& key, double fallback) const;
    [[nodiscard]] long long get_int(const std::string& key, long long fallback) const;
    [[nodiscard]] std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    [[nodiscard]] bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated numbers.
    [[nodiscard]] std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback) const;

    /// Canonical text: sections and keys sorted, so equal configs serialize identically.
    [[nodiscard]] std::string serialize() const;
    [[nodiscard]] const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

    /// Entries under `section`, with the prefix stripped.
    [[nodiscard]] Config section(const std::string& section) const;

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace ecglab
