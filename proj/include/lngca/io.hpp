#pragma once

#include "lngca/types.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace lngca {

struct CsvTable {
    Matrix data;
    std::vector<std::string> header;   ///< empty unless read with header = true
};

/// Reads a comma-separated numeric table, one row per line. Blank lines are
/// skipped. Ragged rows and non-numeric cells raise InputError naming the file,
/// line and column.
CsvTable read_csv(const std::string& path, bool header = false);
CsvTable parse_csv(const std::string& text, bool header = false, const std::string& source = "<string>");

/// Writes m with 12 significant digits per cell.
void write_csv(const std::string& path, const Matrix& m, const std::vector<std::string>& header = {});
std::string format_csv(const Matrix& m, const std::vector<std::string>& header = {});

/// Shortest-form double with 12 significant digits.
std::string format_number(double v);

/// Row-major nested arrays.
nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const Vector& v);

nlohmann::json read_json(const std::string& path);
void write_json(const std::string& path, const nlohmann::json& j);

std::string read_text(const std::string& path);
void write_text(const std::string& path, const std::string& text);

}  // namespace lngca
