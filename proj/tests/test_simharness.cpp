#include "lngca/experiments.hpp"
#include "lngca/image.hpp"
#include "lngca/io.hpp"
#include "lngca/sources.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>

using namespace lngca;

namespace {

ExperimentConfig small_experiment() {
    ExperimentConfig c;
    c.trials = 1;
    c.n = 500;
    c.restarts = 1;
    c.seed = 17;
    c.threads = 1;
    return c;
}

std::string temp_path(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / "lngca_test_simharness";
    std::filesystem::create_directories(dir);
    return (dir / name).string();
}

}  // namespace

TEST_CASE("source library") {
    const auto& lib = source_library();
    REQUIRE(lib.size() == 18);
    for (std::size_t i = 0; i < lib.size(); ++i) CHECK(lib[i].id == static_cast<char>('a' + i));
    CHECK(source_spec('c').family == "uniform");
    CHECK_THROWS_AS(source_spec('s'), InputError);
    CHECK_THROWS_AS(source_specs("ab!"), InputError);
    CHECK(source_specs("all").size() == 18);
    CHECK(source_specs("a,c").size() == 2);
}

TEST_CASE("population moments match a 10^6 sample") {
    Rng rng(301);
    const Index n = 1000000;
    for (const auto& spec : source_library()) {
        CAPTURE(spec.id);
        const Vector x = draw_source(spec, n, rng);
        const double mean = x.mean();
        const double var = (x.array() - mean).square().mean();
        CHECK(std::abs(mean) < 0.01);
        if (spec.id == 'a') {
            // t3: finite variance only; heavy tails make the sample variance noisy.
            CHECK(std::abs(var - 1.0) < 0.5);
            continue;
        }
        CHECK(std::abs(var - 1.0) < 0.02);
        const double m3 = (x.array() - mean).pow(3).mean() / std::pow(var, 1.5);
        const double m4 = (x.array() - mean).pow(4).mean() / (var * var);
        // Tolerances scale with the spread of the higher moments.
        const double tol3 = spec.kurtosis > 5 ? 0.15 : 0.02;
        const double tol4 = spec.kurtosis > 5 ? 0.15 * spec.kurtosis : 0.03;
        CHECK(std::abs(m3 - spec.skewness) < tol3);
        CHECK(std::abs(m4 - spec.kurtosis) < tol4);
    }
}

TEST_CASE("gen_sources standardizes and is reproducible") {
    Rng a(303), b(303);
    const auto specs = source_specs("cgm");
    const SampleMatrix S = gen_sources(specs, 5000, a);
    CHECK(S.data() == gen_sources(specs, 5000, b).data());
    for (Index j = 0; j < 3; ++j) {
        CHECK(std::abs(S.col(j).mean()) < 1e-12);
        CHECK(S.col(j).squaredNorm() / 5000 == doctest::Approx(1.0).epsilon(1e-12));
        // Symmetric mixtures: sample skewness near zero.
        CHECK(std::abs(S.col(j).array().pow(3).mean()) < 0.1);
    }
    Rng rng(1);
    CHECK_THROWS_AS(gen_sources(specs, 1, rng), InputError);
    const Matrix G = gaussian_noise(100, 2, rng);
    CHECK(std::abs(G.col(1).mean()) < 1e-12);
}

TEST_CASE("planted mixtures compose exactly") {
    Rng rng(305);
    const PlantedData d = planted_mixture(source_specs("be"), 4, 2000, rng);
    const Matrix& Z = d.white.Z.data();
    const Matrix& X = d.X.data();
    const Matrix HA = d.white.H * d.A;
    Matrix Xc = X.rowwise() - X.colwise().mean();
    CHECK((Z - Xc * HA.transpose()).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((Z * d.W0.transpose() - Xc).cwiseAbs().maxCoeff() < 1e-8);
    CHECK(signed_perm_error(d.W0, d.W0).err < 1e-14);
    // Z is white, so W0 W0^T is the sample covariance of X.
    CHECK((d.W0 * d.W0.transpose() - sample_covariance(X)).norm() < 1e-8);
}

TEST_CASE("experiment 1 accounting and reproducibility") {
    ExperimentConfig c = small_experiment();
    c.sources = "ce";
    const auto recs = run_experiment1(c);
    CHECK(recs.size() == 2 * 2 * 2);
    for (const auto& r : recs) {
        CHECK(r.error >= 0.0);
        CHECK(r.sources.size() == 2);
        CHECK(r.sources[0] == r.sources[1]);
    }
    CHECK(recs[0].sources == "cc");
    CHECK(recs.back().sources == "ee");
    const auto again = run_experiment1(c);
    for (std::size_t i = 0; i < recs.size(); ++i) {
        CHECK(recs[i].error == again[i].error);
        CHECK(recs[i].iterations == again[i].iterations);
    }
    c.threads = 3;
    const auto par = run_experiment1(c);
    for (std::size_t i = 0; i < recs.size(); ++i) CHECK(recs[i].error == par[i].error);

    const auto summary = summarize_errors(recs, true);
    CHECK(summary.size() == 2 * 2 * 2);
    const auto pooled = summarize_errors(recs, false);
    CHECK(pooled.size() == 4);
    for (const auto& s : pooled) CHECK(s.count == 2);
}

TEST_CASE("experiment 1 with trials = 5 gives 5 records per cell") {
    ExperimentConfig c = small_experiment();
    c.trials = 5;
    c.sources = "c";
    c.kinds = {DiscrepancyKind{DiscrepancyTag::JB}};
    const auto recs = run_experiment1(c);
    CHECK(recs.size() == 10);
    for (const auto& s : summarize_errors(recs)) CHECK(s.count == 5);
}

TEST_CASE("experiment 2 draws distinct sources") {
    ExperimentConfig c = small_experiment();
    c.q = 3;
    c.p = 6;
    c.n = 1500;
    c.trials = 3;
    c.kinds = {DiscrepancyKind{DiscrepancyTag::JB}};
    const auto recs = run_experiment2(c);
    CHECK(recs.size() == 6);
    for (const auto& r : recs) {
        CHECK(r.sources.size() == 3);
        CHECK(r.sources[0] != r.sources[1]);
        CHECK(r.sources[1] != r.sources[2]);
        CHECK(r.sources[0] != r.sources[2]);
    }
}

TEST_CASE("experiment 3 table schema") {
    ExperimentConfig c = small_experiment();
    c.trials = 2;
    c.n = 600;
    c.kinds = {DiscrepancyKind{DiscrepancyTag::JB}, DiscrepancyKind{DiscrepancyTag::Skew}};
    TestConfig tc;
    tc.B = 4;
    const Experiment3Result res = run_experiment3(c, tc);
    CHECK(res.records.size() == 2 * 2 * 4);
    CHECK(res.table.size() == 2 * 2 * 4);
    for (const auto& r : res.table) {
        CHECK(r.trials == 2);
        CHECK(r.rate >= 0.0);
        CHECK(r.rate <= 1.0);
    }
    const auto again = run_experiment3(c, tc);
    for (std::size_t i = 0; i < res.records.size(); ++i) CHECK(res.records[i].p_curr == again.records[i].p_curr);
}

TEST_CASE("rejection_table counts p-values below alpha") {
    std::vector<TestTrialRecord> recs;
    for (int t = 0; t < 10; ++t) recs.push_back({t, "ab", DiscrepancyKind{}, 3, t < 3 ? 0.01 : 0.5, t < 1 ? 0.0 : 0.9});
    const auto table = rejection_table(recs, 0.05);
    REQUIRE(table.size() == 2);
    for (const auto& r : table) CHECK(r.rate == (r.mode == TestMode::Current ? 0.3 : 0.1));
}

TEST_CASE("image helpers") {
    const auto imgs = demo_images(32);
    CHECK(imgs.size() == 3);
    for (const auto& img : imgs) {
        CHECK(img.rows() == 32);
        CHECK(img.pixels.minCoeff() >= 0.0);
        CHECK(img.pixels.maxCoeff() <= 255.0);
    }
    const Matrix& m = imgs[0].pixels;
    CHECK(unvectorize(vectorize(m), 32, 32) == m);
    CHECK(vectorize(m)(1) == m(1, 0));

    GrayImage rounded{imgs[1].pixels.array().round().matrix()};
    const std::string path = temp_path("bars.pgm");
    write_pgm(path, rounded);
    CHECK(read_pgm(path).pixels == rounded.pixels);
    CHECK(read_image(path).pixels == rounded.pixels);

    const std::string csv = temp_path("img.csv");
    write_csv(csv, rounded.pixels);
    CHECK(read_image(csv).pixels == rounded.pixels);

    write_text(temp_path("bad.pgm"), "P2\n2 2\n255\n0 0 0 0\n");
    CHECK_THROWS_AS(read_pgm(temp_path("bad.pgm")), InputError);
    write_text(temp_path("short.pgm"), "P5\n4 4\n255\nab");
    CHECK_THROWS_AS(read_pgm(temp_path("short.pgm")), InputError);
}

TEST_CASE("unmixing unmixed independent images is exact") {
    ImageUnmixConfig cfg;
    cfg.identity_mixing = true;
    cfg.noise_images = 0;
    cfg.select_q = false;
    cfg.test.kind = DiscrepancyKind{DiscrepancyTag::JB};
    cfg.seed = 5;
    const ImageUnmixResult res = image_unmix(independent_images(64), cfg);
    CHECK(res.exact_recovery);
    CHECK(res.error_norms.maxCoeff() < 1e-6);
}

TEST_CASE("image unmixing recovers the demo images") {
    ImageUnmixConfig cfg;
    cfg.select_q = false;
    cfg.test.kind = DiscrepancyKind{DiscrepancyTag::JB};
    cfg.seed = 7;
    const ImageUnmixResult res = image_unmix(demo_images(48), cfg);
    CHECK(res.truth.cols() == 6);
    CHECK(res.recovered.cols() == 6);
    for (Index i = 0; i < 3; ++i) CHECK(res.error_norms(i) < 0.4 * res.image_norms(i));

    std::vector<GrayImage> bad = demo_images(16);
    bad[1] = demo_images(20)[0];
    CHECK_THROWS_AS(image_unmix(bad, cfg), InputError);
}
