#include "lngca/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lngca {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos
                                                                                            : comma - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

}  // namespace

CsvTable parse_csv(const std::string& text, bool header, const std::string& source) {
    std::istringstream in(text);
    std::string line;
    std::vector<std::vector<double>> rows;
    CsvTable out;
    std::size_t width = 0;
    int lineno = 0;
    bool need_header = header;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (need_header) {
            out.header = cells;
            width = cells.size();
            need_header = false;
            continue;
        }
        if (width == 0) width = cells.size();
        if (cells.size() != width) {
            std::ostringstream msg;
            msg << source << ":" << lineno << ": expected " << width << " columns, found " << cells.size();
            throw InputError(msg.str());
        }
        std::vector<double> row(width);
        for (std::size_t c = 0; c < width; ++c) {
            const std::string& cell = cells[c];
            double v = 0.0;
            const char* first = cell.data();
            const char* last = first + cell.size();
            if (!cell.empty() && *first == '+') ++first;
            auto [ptr, ec] = std::from_chars(first, last, v);
            if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(v)) {
                std::ostringstream msg;
                msg << source << ":" << lineno << ": column " << c + 1 << ": not a finite number: '" << cell << "'";
                throw InputError(msg.str());
            }
            row[c] = v;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw InputError(source + ": no data rows");
    out.data.resize(static_cast<Index>(rows.size()), static_cast<Index>(width));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < width; ++c) out.data(static_cast<Index>(r), static_cast<Index>(c)) = rows[r][c];
    return out;
}

CsvTable read_csv(const std::string& path, bool header) {
    return parse_csv(read_text(path), header, path);
}

std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string format_csv(const Matrix& m, const std::vector<std::string>& header) {
    std::string out;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) out += ',';
        out += header[c];
    }
    if (!header.empty()) out += '\n';
    for (Index r = 0; r < m.rows(); ++r) {
        for (Index c = 0; c < m.cols(); ++c) {
            if (c) out += ',';
            out += format_number(m(r, c));
        }
        out += '\n';
    }
    return out;
}

void write_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header) {
    write_text(path, format_csv(m, header));
}

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json out = nlohmann::json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(std::move(row));
    }
    return out;
}

Matrix matrix_from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw InputError("matrix JSON must be an array of rows");
    const Index rows = static_cast<Index>(j.size());
    const Index cols = rows ? static_cast<Index>(j[0].size()) : 0;
    Matrix m(rows, cols);
    for (Index r = 0; r < rows; ++r) {
        if (!j[r].is_array() || static_cast<Index>(j[r].size()) != cols)
            throw InputError("matrix JSON rows must be arrays of equal length");
        for (Index c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

nlohmann::json read_json(const std::string& path) {
    try {
        return nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw InputError(path + ": invalid JSON: " + e.what());
    }
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError(path + ": cannot open for writing");
    out << text;
    if (!out) throw InputError(path + ": write failed");
}

}  // namespace lngca
