#include "config.hpp"

#include "errors.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace jdlab {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_num(const std::string& section, const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ValidationError("config: [" + section + "] " + key + " = '" + v +
                              "' is not a number");
    return x;
}

} // namespace

Config Config::parse(const std::string& text) {
    Config cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ValidationError("config: malformed section header at line " +
                                      std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ValidationError("config: empty section name at line " +
                                      std::to_string(lineno));
            cfg.sections_[section];
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected key = value at line " +
                                  std::to_string(lineno));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw ValidationError("config: empty key at line " + std::to_string(lineno));
        cfg.sections_[section][key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse(text);
}

bool Config::has(const std::string& section, const std::string& key) const {
    auto s = sections_.find(section);
    return s != sections_.end() && s->second.count(key) > 0;
}

std::string Config::get_str(const std::string& section, const std::string& key,
                            const std::string& fallback) const {
    auto s = sections_.find(section);
    if (s == sections_.end()) return fallback;
    auto k = s->second.find(key);
    return k == s->second.end() ? fallback : k->second;
}

std::string Config::require_str(const std::string& section, const std::string& key) const {
    if (!has(section, key))
        throw ValidationError("config: missing required key [" + section + "] " + key);
    return get_str(section, key, "");
}

double Config::get_num(const std::string& section, const std::string& key,
                       double fallback) const {
    if (!has(section, key)) return fallback;
    return parse_num(section, key, get_str(section, key, ""));
}

double Config::require_num(const std::string& section, const std::string& key) const {
    return parse_num(section, key, require_str(section, key));
}

long long Config::get_int(const std::string& section, const std::string& key,
                          long long fallback) const {
    if (!has(section, key)) return fallback;
    const double v = require_num(section, key);
    return static_cast<long long>(v);
}

bool Config::get_bool(const std::string& section, const std::string& key,
                      bool fallback) const {
    if (!has(section, key)) return fallback;
    const std::string v = get_str(section, key, "");
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("config: [" + section + "] " + key + " must be true or false");
}

std::vector<double> Config::require_list(const std::string& section,
                                         const std::string& key) const {
    const std::string v = require_str(section, key);
    std::vector<double> out;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_num(section, key, item));
    }
    if (out.empty())
        throw ValidationError("config: [" + section + "] " + key + " is an empty list");
    return out;
}

std::vector<double> Config::get_list(const std::string& section, const std::string& key,
                                     const std::vector<double>& fallback) const {
    if (!has(section, key)) return fallback;
    return require_list(section, key);
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
    sections_[section][key] = value;
}

std::string Config::dump() const {
    std::ostringstream out;
    bool first = true;
    for (const auto& [name, kv] : sections_) {
        if (!first) out << "\n";
        first = false;
        out << "[" << name << "]\n";
        for (const auto& [k, v] : kv) out << k << " = " << v << "\n";
    }
    return out.str();
}

} // namespace jdlab
