#include "lngca/io.hpp"
#include "lngca/rng.hpp"

#include <doctest.h>

#include <filesystem>

using namespace lngca;

namespace {

std::string message_of(const std::string& text, bool header = false) {
    try {
        parse_csv(text, header, "in.csv");
    } catch (const InputError& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("CSV parsing") {
    const CsvTable t = parse_csv("1,2\n3, 4.5\n\n-1e3,+7\n");
    CHECK(t.data.rows() == 3);
    CHECK(t.data(1, 1) == 4.5);
    CHECK(t.data(2, 0) == -1000.0);
    CHECK(t.data(2, 1) == 7.0);

    const CsvTable h = parse_csv("\xEF\xBB\xBFx,y\r\n1,2\r\n", true);
    CHECK(h.header == std::vector<std::string>{"x", "y"});
    CHECK(h.data.rows() == 1);
    CHECK(h.data(0, 1) == 2.0);
}

TEST_CASE("CSV errors name the line and column") {
    CHECK(message_of("1,2\n3\n") == "in.csv:2: expected 2 columns, found 1");
    CHECK(message_of("1,2\n3,abc\n").find("in.csv:2: column 2") == 0);
    CHECK(message_of("1,nan\n").find("in.csv:1: column 2") == 0);
    CHECK(message_of("a,b\n", true).find("no data rows") != std::string::npos);
    CHECK(message_of("1,\n").find("column 2") != std::string::npos);
    CHECK_THROWS_AS(read_csv("/nonexistent/file.csv"), InputError);
}

TEST_CASE("CSV round trip keeps 12 significant digits") {
    Rng rng(401);
    const Matrix m = standard_normal(20, 3, rng) * 1e3;
    const CsvTable back = parse_csv(format_csv(m, {"a", "b", "c"}), true);
    CHECK(back.header.size() == 3);
    CHECK(((back.data - m).array() / m.array()).abs().maxCoeff() < 1e-11);
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.333333333333");
}

TEST_CASE("JSON matrices") {
    Matrix m(2, 3);
    m << 1, 2, 3, 4, 5, 6.5;
    const nlohmann::json j = matrix_to_json(m);
    CHECK(j[1][2] == 6.5);
    CHECK(matrix_from_json(j) == m);
    CHECK_THROWS_AS(matrix_from_json(nlohmann::json::parse("[[1,2],[3]]")), InputError);
    const auto path = (std::filesystem::temp_directory_path() / "lngca_io_test.json").string();
    write_json(path, {{"m", j}});
    CHECK(matrix_from_json(read_json(path)["m"]) == m);
    write_text(path, "{not json");
    CHECK_THROWS_AS(read_json(path), InputError);
}
