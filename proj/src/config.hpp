#pragma once

#include <map>
#include <string>
#include <vector>

namespace jdlab {

// Minimal sectioned key=value configuration: [section] headers, one
// key = value pair per line, '#' comments, comma-separated numeric lists.
class Config {
public:
    static Config parse(const std::string& text);
    static Config parse_file(const std::string& path);

    bool has(const std::string& section, const std::string& key) const;

    std::string get_str(const std::string& section, const std::string& key,
                        const std::string& fallback) const;
    std::string require_str(const std::string& section, const std::string& key) const;
    double get_num(const std::string& section, const std::string& key, double fallback) const;
    double require_num(const std::string& section, const std::string& key) const;
    long long get_int(const std::string& section, const std::string& key,
                      long long fallback) const;
    bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
    std::vector<double> require_list(const std::string& section, const std::string& key) const;
    std::vector<double> get_list(const std::string& section, const std::string& key,
                                 const std::vector<double>& fallback) const;

    void set(const std::string& section, const std::string& key, const std::string& value);

    // canonical text form, sections and keys sorted; embedded in manifests
    std::string dump() const;

private:
    std::map<std::string, std::map<std::string, std::string>> sections_;
};

} // namespace jdlab
