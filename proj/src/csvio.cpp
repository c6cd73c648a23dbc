#include "csvio.hpp"

#include "errors.hpp"

#include <charconv>
#include <cmath>

namespace jdlab {

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) return "nan";
    return std::string(buf, ptr);
}

CsvWriter::CsvWriter(const std::string& filename) : out_(filename), filename_(filename) {
    if (!out_) throw IoError("cannot open for writing: " + filename);
}

void CsvWriter::header(const std::vector<std::string>& names) { raw_row(names); }

void CsvWriter::row(std::initializer_list<double> values) {
    row(std::vector<double>(values));
}

void CsvWriter::row(const std::vector<double>& values) {
    std::string line;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) line += ',';
        line += format_double(values[i]);
    }
    line += '\n';
    out_ << line;
    if (!out_) throw IoError("write failed: " + filename_);
}

void CsvWriter::raw_row(const std::vector<std::string>& cells) {
    std::string line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) line += ',';
        line += cells[i];
    }
    line += '\n';
    out_ << line;
    if (!out_) throw IoError("write failed: " + filename_);
}

ManifestWriter::ManifestWriter(const std::string& filename) : filename_(filename) {}

void ManifestWriter::set(const std::string& key, const std::string& value) {
    entries_.emplace_back(key, value);
}

void ManifestWriter::set(const std::string& key, double value) {
    entries_.emplace_back(key, format_double(value));
}

void ManifestWriter::set(const std::string& key, long long value) {
    entries_.emplace_back(key, std::to_string(value));
}

void ManifestWriter::write() {
    std::ofstream out(filename_);
    if (!out) throw IoError("cannot open for writing: " + filename_);
    for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
    if (!out) throw IoError("write failed: " + filename_);
}

bool files_identical(const std::string& a, const std::string& b) {
    std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
    if (!fa || !fb) throw IoError("cannot open files for comparison");
    std::string ca((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
    std::string cb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
    return ca == cb;
}

} // namespace jdlab
