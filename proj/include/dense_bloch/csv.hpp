#ifndef DENSE_BLOCH_CSV_HPP
#define DENSE_BLOCH_CSV_HPP

#include <string>
#include <utility>
#include <vector>

// CSV output with a reproducible numeric format: 12 significant digits,
// '.' radix, comma separator, LF line endings. Every file starts with
// '# key = value' comment lines carrying the fully resolved configuration.

namespace dense_bloch {

std::string format_number(double value);

class CsvWriter {
  public:
    void add_metadata(const std::string& key, const std::string& value);
    void add_metadata(const std::string& key, double value);
    void set_header(std::vector<std::string> columns);
    void add_row(const std::vector<double>& values);
    void add_row_mixed(const std::vector<std::string>& values);

    std::string str() const;
    void write(const std::string& path) const;

  private:
    std::vector<std::pair<std::string, std::string>> metadata_;
    std::vector<std::string> header_;
    std::vector<std::string> rows_;
};

} // namespace dense_bloch

#endif
