#include "lhiem/csv.hpp"

#include "lhiem/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

namespace lhiem::csv {

std::size_t Table::col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return i;
    }
    throw DataError(path + ": missing column '" + name + "'");
}

bool Table::has_col(const std::string& name) const {
    for (const auto& h : header) {
        if (h == name) return true;
    }
    return false;
}

const std::string& Table::cell(std::size_t row, std::size_t column) const {
    if (row >= rows.size() || column >= rows[row].size()) {
        throw DataError(path + ": out-of-range cell (row " + std::to_string(row + 2) + ", col " +
                        std::to_string(column + 1) + ")");
    }
    return rows[row][column];
}

double Table::num(std::size_t row, std::size_t column) const {
    const std::string& s = cell(row, column);
    char* end = nullptr;
    errno = 0;
    double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == s.c_str() || *end != '\0') {
        throw DataError(path + ": row " + std::to_string(row + 2) + ", column '" +
                        header[column] + "': expected a number, got '" + s + "'");
    }
    return v;
}

long Table::integer(std::size_t row, std::size_t column) const {
    const std::string& s = cell(row, column);
    long v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
        throw DataError(path + ": row " + std::to_string(row + 2) + ", column '" +
                        header[column] + "': expected an integer, got '" + s + "'");
    }
    return v;
}

namespace {
void split_line(const std::string& line, char delim, std::vector<std::string>& out) {
    out.clear();
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            std::string f = line.substr(start, i - start);
            if (!f.empty() && f.back() == '\r') f.pop_back();
            out.push_back(std::move(f));
            start = i + 1;
        }
    }
}
} // namespace

Table parse(const std::string& text, const std::string& origin, char delim) {
    Table t;
    t.path = origin;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        split_line(line, delim, fields);
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
            continue;
        }
        if (fields.size() != t.header.size()) {
            throw DataError(origin + ": row " + std::to_string(lineno) + " has " +
                            std::to_string(fields.size()) + " fields, expected " +
                            std::to_string(t.header.size()));
        }
        t.rows.push_back(std::move(fields));
    }
    if (!have_header) throw DataError(origin + ": empty table (no header row)");
    return t;
}

Table read_file(const std::string& path, char delim) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path, delim);
}

std::string format_double(double v) {
    char buf[40];
    // %.17g always round-trips; prefer the shortest form that does.
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

Writer::Writer(const std::string& path, char delim) : delim_(delim), path_(path) {
    f_ = std::fopen(path.c_str(), "wb");
    if (!f_) throw DataError("cannot open file for writing: " + path);
}

Writer::~Writer() {
    if (f_) std::fclose(f_);
}

void Writer::field(const std::string& v) {
    if (row_started_) std::fputc(delim_, f_);
    std::fwrite(v.data(), 1, v.size(), f_);
    row_started_ = true;
}

void Writer::field(double v) { field(format_double(v)); }

void Writer::field(long v) { field(std::to_string(v)); }

void Writer::end_row() {
    std::fputc('\n', f_);
    row_started_ = false;
}

} // namespace lhiem::csv
