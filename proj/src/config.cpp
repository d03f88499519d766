#include "ecglab/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace ecglab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T, class Parse>
T parse_whole(const std::string& key, const std::string& text, const char* what, Parse parse) {
    std::size_t used = 0;
    T v{};
    try {
        v = parse(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size()) {
        throw ConfigError("'" + key + "' must be " + what + ", got '" + text + "'");
    }
    return v;
}

}  // namespace

Config Config::parse(std::istream& is, const std::string& source) {
    Config c;
    std::string section;
    std::string line;
    for (std::size_t lineno = 1; std::getline(is, line); ++lineno) {
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError(source + ":" + std::to_string(lineno) + ": malformed section header");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError(source + ":" + std::to_string(lineno) + ": expected key=value");
        const std::string key = trim(t.substr(0, eq));
        if (key.empty()) throw ConfigError(source + ":" + std::to_string(lineno) + ": empty key");
        const std::string full = section.empty() ? key : section + "." + key;
        if (c.entries_.count(full)) throw ConfigError(source + ":" + std::to_string(lineno) + ": duplicate key '" + full + "'");
        c.entries_[full] = trim(t.substr(eq + 1));
    }
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config " + path.string());
    return parse(is, path.string());
}

void Config::set(const std::string& key, const std::string& value) { entries_[key] = value; }

bool Config::has(const std::string& key) const { return entries_.count(key) != 0; }

std::optional<std::string> Config::get(const std::string& key) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::string Config::require(const std::string& key) const {
    auto v = get(key);
    if (!v || v->empty()) throw ConfigError("missing required setting '" + key + "'");
    return *v;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    return get(key).value_or(fallback);
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    const double d = parse_whole<double>(key, *v, "a number",
                                         [](const std::string& s, std::size_t* u) { return std::stod(s, u); });
    if (!std::isfinite(d)) throw ConfigError("'" + key + "' must be finite");
    return d;
}

long long Config::get_int(const std::string& key, long long fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    return parse_whole<long long>(key, *v, "an integer",
                                  [](const std::string& s, std::size_t* u) { return std::stoll(s, u); });
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (!v->empty() && (*v)[0] == '-') throw ConfigError("'" + key + "' must be non-negative");
    return parse_whole<std::uint64_t>(key, *v, "a non-negative integer",
                                      [](const std::string& s, std::size_t* u) { return std::stoull(s, u); });
}

bool Config::get_bool(const std::string& key, bool fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "1" || *v == "yes") return true;
    if (*v == "false" || *v == "0" || *v == "no") return false;
    throw ConfigError("'" + key + "' must be true or false, got '" + *v + "'");
}

std::vector<double> Config::get_list(const std::string& key, const std::vector<double>& fallback) const {
    const auto v = get(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::stringstream ss(*v);
    for (std::string item; std::getline(ss, item, ',');) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_whole<double>(key, item, "a list of numbers",
                                          [](const std::string& s, std::size_t* u) { return std::stod(s, u); }));
    }
    return out;
}

std::string Config::serialize() const {
    std::map<std::string, std::map<std::string, std::string>> grouped;
    for (const auto& [k, v] : entries_) {
        const auto dot = k.find('.');
        if (dot == std::string::npos) {
            grouped[""][k] = v;
        } else {
            grouped[k.substr(0, dot)][k.substr(dot + 1)] = v;
        }
    }
    std::string out;
    for (const auto& [sec, kv] : grouped) {
        if (!sec.empty()) out += (out.empty() ? "[" : "\n[") + sec + "]\n";
        for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    }
    return out;
}

Config Config::section(const std::string& name) const {
    Config c;
    const std::string prefix = name + ".";
    for (const auto& [k, v] : entries_) {
        if (k.rfind(prefix, 0) == 0) c.entries_[k.substr(prefix.size())] = v;
    }
    return c;
}

}  // namespace ecglab
