#pragma once

#include <cstdio>
#include <string>
#include <unordered_map>
#include <vector>

namespace lhiem::csv {

// Minimal delimited-table support for the plain tables this project ships
// (no quoting; fields never contain the delimiter).
struct Table {
    std::string path;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Column index by name; throws DataError naming the column and file.
    std::size_t col(const std::string& name) const;
    bool has_col(const std::string& name) const;

    const std::string& cell(std::size_t row, std::size_t column) const;
    double num(std::size_t row, std::size_t column) const;
    long integer(std::size_t row, std::size_t column) const;
};

Table read_file(const std::string& path, char delim = ',');
Table parse(const std::string& text, const std::string& origin, char delim = ',');

// Shortest round-trip decimal formatting so snapshots are byte-stable.
std::string format_double(double v);

class Writer {
  public:
    Writer(const std::string& path, char delim = ',');
    ~Writer();
    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    void field(const std::string& v);
    void field(double v);
    void field(long v);
    void field(int v) { field(static_cast<long>(v)); }
    void end_row();

  private:
    std::FILE* f_;
    char delim_;
    bool row_started_ = false;
    std::string path_;
};

} // namespace lhiem::csv
