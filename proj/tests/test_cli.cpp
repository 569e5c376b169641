#include "lngca/cli.hpp"
#include "lngca/experiments.hpp"
#include "lngca/io.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace lngca;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path workdir() {
    static const fs::path dir = [] {
        const fs::path d = fs::temp_directory_path() / "lngca_test_cli";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string at(const std::string& name) {
    return (workdir() / name).string();
}

std::string bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

// Writes a planted mixture of the given sources; returns the mixing matrix path.
std::string planted_csv(const std::string& name, const std::string& sources, Index p, Index n, std::uint64_t seed) {
    Rng rng(seed);
    const PlantedData d = planted_mixture(source_specs(sources), p, n, rng);
    write_csv(at(name + ".csv"), d.X.data() * d.A.transpose());
    write_csv(at(name + "_A.csv"), d.A);
    return at(name + "_A.csv");
}

// Re-runs a manifest into a fresh prefix and compares every output byte for byte.
void check_rerun(const std::string& prefix) {
    const json m = read_json(prefix + "manifest.json");
    const std::string other = prefix + "rerun_";
    REQUIRE(run_cli({"rerun", prefix + "manifest.json", "--out-prefix", other}) == 0);
    for (const auto& out : m["outputs"]) {
        const std::string path = out.get<std::string>();
        if (path.find("timing.csv") != std::string::npos) continue;
        CAPTURE(path);
        CHECK(bytes(path) == bytes(other + path.substr(prefix.size())));
    }
}

}  // namespace

TEST_CASE("whiten command") {
    Rng rng(501);
    Matrix X = standard_normal(400, 2, rng);
    write_csv(at("white.csv"), X, {"u", "v"});
    REQUIRE(run_cli({"whiten", at("white.csv"), "--header", "--out-prefix", at("w_")}) == 0);
    const Matrix Z = read_csv(at("w_Z.csv")).data;
    const json h = read_json(at("w_H.json"));
    const Matrix H = matrix_from_json(h["H"]);
    const Matrix Hinv = matrix_from_json(h["Hinv"]);
    Vector mean(2);
    mean << h["mean"][0].get<double>(), h["mean"][1].get<double>();
    CHECK((H - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 0.2);
    CHECK(Z.colwise().mean().cwiseAbs().maxCoeff() < 1e-8);
    CHECK(((Z.transpose() * Z) / 400.0 - Matrix::Identity(2, 2)).norm() < 1e-8);
    const Matrix back = (Z * Hinv.transpose()).rowwise() + mean.transpose();
    CHECK((back - X).cwiseAbs().maxCoeff() < 1e-8);

    const json m = read_json(at("w_manifest.json"));
    CHECK(m["command"] == "whiten");
    CHECK(m["version"] == kVersion);
    CHECK(m["outputs"].size() == 2);
    check_rerun(at("w_"));
}

TEST_CASE("input errors exit with code 2") {
    write_text(at("ragged.csv"), "1,2\n3,4\n5\n");
    CHECK(run_cli({"whiten", at("ragged.csv"), "-o", at("r_")}) == 2);
    CHECK(run_cli({"whiten", at("missing.csv"), "-o", at("r_")}) == 2);
    CHECK(run_cli({"frobnicate"}) == 2);
    CHECK(run_cli({}) == 2);
    CHECK(run_cli({"--help"}) == 0);
    CHECK(run_cli({"estimate", at("white.csv"), "--header", "--q", "3", "-o", at("r_")}) == 2);
    CHECK(run_cli({"estimate", at("white.csv"), "--header", "--q", "1", "--kind", "spline", "-o", at("r_")}) == 2);
    CHECK(run_cli({"test-q", at("white.csv"), "--header", "--B", "0", "-o", at("r_")}) == 2);
    CHECK(run_cli({"simulate", "--experiment", "4", "-o", at("r_")}) == 2);
    CHECK(run_cli({"rerun", at("ragged.csv")}) == 2);
}

TEST_CASE("estimate command") {
    const std::string A = planted_csv("planted", "cg", 4, 3000, 503);
    const std::vector<std::string> base{"estimate", at("planted.csv"), "--q", "2", "--kind", "jb", "--restarts", "4",
                                        "--seed", "11", "--truth", A};
    auto args = base;
    args.insert(args.end(), {"-o", at("e1_")});
    REQUIRE(run_cli(args) == 0);
    args = base;
    args.insert(args.end(), {"-o", at("e2_")});
    REQUIRE(run_cli(args) == 0);
    for (const char* f : {"W.csv", "components.csv", "disc.json", "unmixing.csv"})
        CHECK(bytes(at(std::string("e1_") + f)) == bytes(at(std::string("e2_") + f)));

    const json d = read_json(at("e1_disc.json"));
    const auto disc = d["disc"].get<std::vector<double>>();
    REQUIRE(disc.size() == 4);
    for (std::size_t j = 1; j < disc.size(); ++j) CHECK(disc[j - 1] >= disc[j]);
    CHECK(d["truth_error"].get<double>() < 0.1);
    CHECK(d["converged"].get<bool>());
    CHECK(read_csv(at("e1_W.csv")).data.rows() == 4);
    check_rerun(at("e1_"));

    REQUIRE(run_cli({"estimate", at("planted.csv"), "--q", "2", "--estimator", "max", "--kind", "gpois", "-o",
                     at("e3_")}) == 0);
    CHECK(read_csv(at("e3_W.csv")).data.rows() == 2);
    CHECK(read_json(at("e3_disc.json"))["estimator"] == "max");
}

TEST_CASE("test-q command") {
    planted_csv("tq", "ce", 4, 1500, 505);
    REQUIRE(run_cli({"test-q", at("tq.csv"), "--kind", "jb", "--B", "20", "--seed", "3", "-o", at("t_")}) == 0);
    const json s = read_json(at("t_selection.json"));
    CHECK(s["q_selected"] == 2);
    CHECK(s["alpha_corrected"] == 0.05);
    for (const auto& t : s["tests"]) {
        const double pv = t["p_curr"];
        CHECK(std::abs(pv * 20 - std::round(pv * 20)) < 1e-12);
        CHECK(t["resampled_curr"].size() == 20);
    }
    check_rerun(at("t_"));

    Rng rng(507);
    write_csv(at("gauss.csv"), standard_normal(600, 3, rng));
    REQUIRE(run_cli({"test-q", at("gauss.csv"), "--B", "20", "--search", "binary", "-o", at("g_")}) == 0);
    const json g = read_json(at("g_selection.json"));
    CHECK(g["q_selected"] == 0);
    CHECK(g["search"] == "binary");
    CHECK(g["alpha_corrected"] == 0.025);
}

TEST_CASE("simulate command") {
    REQUIRE(run_cli({"simulate", "--experiment", "1", "--trials", "5", "--sources", "ce", "--n", "400",
                     "--restarts", "1", "--kinds", "jb", "-o", at("s1_")}) == 0);
    const std::string results = bytes(at("s1_results.csv"));
    CHECK(results.rfind("trial,sources,kind,estimator,error,converged,iterations\n", 0) == 0);
    CHECK(std::count(results.begin(), results.end(), '\n') == 1 + 2 * 5 * 2);
    const json s = read_json(at("s1_summary.json"));
    CHECK(s["by_source"].size() == 4);
    for (const auto& row : s["by_source"]) CHECK(row["count"] == 5);
    CHECK(s["pooled"].size() == 2);
    check_rerun(at("s1_"));

    REQUIRE(run_cli({"simulate", "--experiment", "3", "--trials", "2", "--n", "500", "--B", "5", "--kinds",
                     "jb,skew", "-o", at("s3_")}) == 0);
    const json t = read_json(at("s3_summary.json"));
    CHECK(t["rejection"].size() == 2 * 2 * 4);
    check_rerun(at("s3_"));
}

TEST_CASE("image commands") {
    REQUIRE(run_cli({"demo-images", "--size", "64", "--independent", "-o", at("sym_")}) == 0);
    REQUIRE(run_cli({"unmix-images", at("sym_image_1.pgm"), at("sym_image_2.pgm"), at("sym_image_3.pgm"),
                     "--identity-mixing", "--noise", "0", "--no-test", "--kind", "jb", "-o", at("id_")}) == 0);
    const json id = read_json(at("id_report.json"));
    CHECK(id["exact_recovery"] == true);
    CHECK(id["selection"].is_null());

    REQUIRE(run_cli({"unmix-images", "--demo", "--size", "40", "--kind", "jb", "--B", "10", "--seed", "4", "-o",
                     at("u_")}) == 0);
    const json u = read_json(at("u_report.json"));
    CHECK(u["p"] == 6);
    for (int j = 1; j <= 6; ++j) CHECK(fs::exists(at("u_component_" + std::to_string(j) + ".pgm")));
    CHECK(u["selection"]["tests"].size() >= 1);
    CHECK(u["relative_errors"].size() == 3);
    check_rerun(at("u_"));

    CHECK(run_cli({"unmix-images", at("sym_image_1.pgm"), at("u_component_1.pgm"), "-o", at("bad_")}) == 2);
}
