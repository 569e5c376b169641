#include "lngca/experiments.hpp"
#include "lngca/linalg.hpp"
#include "lngca/qtest.hpp"

#include <doctest.h>

#include <cmath>

using namespace lngca;

namespace {

// Fake test that rejects exactly the k in `rejects`.
KTestFn fake(const std::vector<bool>& rejects) {
    return [rejects](int k) {
        KTestResult r;
        r.k = k;
        r.p_curr = r.p_cumu = rejects.at(static_cast<std::size_t>(k - 1)) ? 0.0 : 0.5;
        return r;
    };
}

std::vector<bool> boundary(int p, int q) {
    std::vector<bool> out(static_cast<std::size_t>(p));
    for (int k = 1; k <= p; ++k) out[static_cast<std::size_t>(k - 1)] = k <= q;
    return out;
}

TestConfig small_config(DiscrepancyTag tag, int B, std::uint64_t seed) {
    TestConfig tc;
    tc.kind = DiscrepancyKind{tag};
    tc.B = B;
    tc.seed = seed;
    tc.threads = 1;
    return tc;
}

}  // namespace

TEST_CASE("p-value counting rule") {
    Vector r = Vector::LinSpaced(200, 1.0, 200.0);
    CHECK(resample_p_value(r, 0.5) == 1.0);
    CHECK(resample_p_value(r, 1000.0) == 0.0);
    CHECK(resample_p_value(r, 191.0) == 0.05);
    CHECK(resample_p_value(r, 190.5) == 0.05);
    CHECK_THROWS_AS(resample_p_value(Vector(), 1.0), InputError);
}

TEST_CASE("Bonferroni level") {
    CHECK(bonferroni_alpha(0.05, 125) == 0.05 / 7);
    CHECK(std::abs(bonferroni_alpha(0.05, 125) - 0.00714285714285714) < 1e-15);
    CHECK(bonferroni_alpha(0.05, 1) == 0.05);
    CHECK(bonferroni_alpha(0.05, 2) == 0.05);
    CHECK(bonferroni_alpha(0.05, 4) == 0.025);
    CHECK(bonferroni_alpha(0.05, 5) == 0.05 / 3);
}

TEST_CASE("config validation and names") {
    TestConfig tc;
    tc.B = 0;
    CHECK_THROWS_AS(tc.validate(), InputError);
    tc.B = 10;
    tc.alpha = 1.0;
    CHECK_THROWS_AS(tc.validate(), InputError);
    CHECK(parse_mode("cumulative") == TestMode::Cumulative);
    CHECK(parse_search("binary") == SearchMode::Binary);
    CHECK_THROWS_AS(parse_mode("both"), InputError);
    CHECK(mode_name(TestMode::Current) == "current");
}

TEST_CASE("sweep stops at the first non-rejection") {
    const TestConfig tc;
    CHECK(select_q_sweep(6, tc, fake(boundary(6, 3))).q_selected == 3);
    CHECK(select_q_sweep(6, tc, fake(boundary(6, 3))).path == std::vector<int>{1, 2, 3, 4});
    CHECK(select_q_sweep(6, tc, fake(boundary(6, 0))).q_selected == 0);
    CHECK(select_q_sweep(6, tc, fake(boundary(6, 0))).path.size() == 1);
    CHECK(select_q_sweep(4, tc, fake(boundary(4, 4))).q_selected == 4);
    CHECK(select_q_sweep(5, tc, fake({true, true, false, true, true})).q_selected == 2);
    CHECK(select_q_sweep(1, tc, fake({true})).path.size() == 1);
    CHECK(select_q_sweep(6, tc, fake(boundary(6, 3))).alpha_corrected == tc.alpha);
}

TEST_CASE("binary search finds every boundary within floor(log2 p) + 1 tests") {
    TestConfig tc;
    for (int p = 1; p <= 70; ++p) {
        for (int q = 0; q <= p; ++q) {
            const SelectionResult s = select_q_binary(p, tc, fake(boundary(p, q)));
            CAPTURE(p);
            CAPTURE(q);
            CHECK(s.q_selected == q);
            CHECK(s.path.size() <= static_cast<std::size_t>(std::floor(std::log2(p))) + 1);
            CHECK(s.path.size() <= static_cast<std::size_t>(std::ceil(std::log2(p + 1.0))));
            CHECK(s.alpha_corrected == bonferroni_alpha(tc.alpha, p));
        }
    }
}

TEST_CASE("binary search at p = 125") {
    TestConfig tc;
    const SelectionResult s = select_q_binary(125, tc, fake(boundary(125, 114)));
    CHECK(s.q_selected == 114);
    CHECK(s.path.size() <= 7);
    CHECK(std::abs(s.alpha_corrected - 0.05 / 7) < 1e-12);
    const SelectionResult b115 = select_q_binary(125, tc, fake(boundary(125, 115)));
    CHECK(b115.q_selected == 115);
    CHECK(b115.path == std::vector<int>{63, 94, 110, 118, 114, 116, 115});
    const SelectionResult one = select_q_binary(1, tc, fake({true}));
    CHECK(one.path == std::vector<int>{1});
    CHECK(one.q_selected == 1);
}

TEST_CASE("binary search uses the corrected level") {
    TestConfig tc;
    KTestFn borderline = [](int k) {
        KTestResult r;
        r.k = k;
        r.p_curr = r.p_cumu = 0.03;
        return r;
    };
    // 0.03 < 0.05 but not below 0.05 / 2.
    CHECK(select_q_binary(4, tc, borderline).q_selected == 0);
    CHECK(select_q_sweep(4, tc, borderline).q_selected == 4);
}

TEST_CASE("test_k on planted data") {
    Rng rng(201);
    const PlantedData d = planted_mixture(source_specs("cb"), 4, 1000, rng);
    const TestConfig tc = small_config(DiscrepancyTag::JB, 20, 77);
    const KTestResult a = test_k(d.white.Z, 2, tc);
    const KTestResult b = test_k(d.white.Z, 2, tc);
    CHECK(a.k == 2);
    CHECK(a.resampled_curr == b.resampled_curr);
    CHECK(a.resampled_cumu == b.resampled_cumu);
    CHECK(a.observed_curr == b.observed_curr);
    CHECK(a.p_curr == resample_p_value(a.resampled_curr, a.observed_curr));
    CHECK(a.p_cumu == resample_p_value(a.resampled_cumu, a.observed_cumu));
    for (double pv : {a.p_curr, a.p_cumu}) {
        CHECK(pv >= 0.0);
        CHECK(pv <= 1.0);
        CHECK(std::abs(pv * 20 - std::round(pv * 20)) < 1e-12);
    }
    CHECK(a.observed_cumu >= a.observed_curr);
    // Two strong signals: the second is found.
    CHECK(a.p_curr < 0.05);

    TestConfig par = tc;
    par.threads = 3;
    CHECK(test_k(d.white.Z, 2, par).resampled_curr == a.resampled_curr);

    CHECK_THROWS_AS(test_k(d.white.Z, 0, tc), InputError);
    CHECK_THROWS_AS(test_k(d.white.Z, 5, tc), InputError);
}

TEST_CASE("sweep on Gaussian data selects zero components") {
    Rng rng(203);
    int zeros = 0;
    for (int rep = 0; rep < 10; ++rep) {
        const SampleMatrix Z = whiten(SampleMatrix(standard_normal(500, 2, rng))).Z;
        const SelectionResult s = select_q_sweep(Z, small_config(DiscrepancyTag::JB, 20, rep));
        zeros += s.q_selected == 0;
    }
    CHECK(zeros >= 8);
}

TEST_CASE("sweep on a planted instance") {
    Rng rng(205);
    const PlantedData d = planted_mixture(source_specs("ce"), 4, 2000, rng);
    const SelectionResult s = select_q_sweep(d.white.Z, small_config(DiscrepancyTag::JB, 40, 9));
    CHECK(s.q_selected == 2);
    CHECK(s.path == std::vector<int>{1, 2, 3});
}
