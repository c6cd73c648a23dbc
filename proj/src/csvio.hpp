#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace jdlab {

// Shortest exact decimal form that round-trips the double.
std::string format_double(double v);

class CsvWriter {
public:
    explicit CsvWriter(const std::string& filename);
    void header(const std::vector<std::string>& names);
    void row(std::initializer_list<double> values);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& cells);

private:
    std::ofstream out_;
    std::string filename_;
};

// Flat key=value manifest, one entry per line, keys written in call order.
class ManifestWriter {
public:
    explicit ManifestWriter(const std::string& filename);
    void set(const std::string& key, const std::string& value);
    void set(const std::string& key, double value);
    void set(const std::string& key, long long value);
    void write();

private:
    std::string filename_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

bool files_identical(const std::string& a, const std::string& b);

} // namespace jdlab
