#include "dense_bloch/csv.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace dense_bloch {

std::string format_number(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.12g", value);
    return buffer;
}

void CsvWriter::add_metadata(const std::string& key, const std::string& value) {
    metadata_.emplace_back(key, value);
}

void CsvWriter::add_metadata(const std::string& key, double value) {
    metadata_.emplace_back(key, format_number(value));
}

void CsvWriter::set_header(std::vector<std::string> columns) { header_ = std::move(columns); }

void CsvWriter::add_row(const std::vector<double>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            row += ',';
        row += format_number(values[i]);
    }
    rows_.push_back(std::move(row));
}

void CsvWriter::add_row_mixed(const std::vector<std::string>& values) {
    std::string row;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i)
            row += ',';
        row += values[i];
    }
    rows_.push_back(std::move(row));
}

std::string CsvWriter::str() const {
    std::string out;
    for (const auto& [key, value] : metadata_)
        out += "# " + key + " = " + value + "\n";
    if (!header_.empty()) {
        for (std::size_t i = 0; i < header_.size(); ++i) {
            if (i)
                out += ',';
            out += header_[i];
        }
        out += '\n';
    }
    for (const auto& row : rows_)
        out += row + "\n";
    return out;
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream file(path, std::ios::binary);
    if (!file)
        throw std::runtime_error("cannot open output file: " + path);
    file << str();
    if (!file)
        throw std::runtime_error("failed writing output file: " + path);
}

} // namespace dense_bloch
