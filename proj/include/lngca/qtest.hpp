#pragma once

#include "lngca/estimator.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lngca {

enum class TestMode { Current, Cumulative };
enum class SearchMode { Sweep, Binary };

std::string mode_name(TestMode mode);
TestMode parse_mode(std::string_view text);
std::string search_name(SearchMode search);
SearchMode parse_search(std::string_view text);

struct TestConfig {
    DiscrepancyKind kind;               ///< overrides estimator.kind
    int B = 200;
    double alpha = 0.05;
    EstimatorOptions estimator = [] {
        EstimatorOptions o;
        o.restarts = 1;
        return o;
    }();
    TestMode mode = TestMode::Current;
    std::uint64_t seed = 0;
    unsigned threads = 0;               ///< workers for replicates; 0 means default_thread_count()

    void validate() const;
};

struct KTestResult {
    int k = 0;
    double observed_curr = 0.0;         ///< discrepancy of the k-th ordered component
    double observed_cumu = 0.0;         ///< sum over the first k ordered components
    Vector resampled_curr;
    Vector resampled_cumu;
    double p_curr = 1.0;
    double p_cumu = 1.0;

    double p_value(TestMode mode) const { return mode == TestMode::Current ? p_curr : p_cumu; }
};

struct SelectionResult {
    int q_selected = 0;
    std::vector<KTestResult> tests_run;  ///< in the order they were run
    double alpha_corrected = 0.0;
    std::vector<int> path;               ///< k values visited
    SearchMode search = SearchMode::Sweep;
    TestMode mode = TestMode::Current;
};

/// Fraction of resampled values at least as large as the observed one.
double resample_p_value(const Vector& resampled, double observed);

/// alpha divided by max(1, ceil(log2 p)).
double bonferroni_alpha(double alpha, Index p);

/// Tests H0: exactly k - 1 non-Gaussian components, against at least k.
/// Fits max-min with q = k - 1, replaces the trailing p - k + 1 components by
/// fresh standardized Gaussians, remixes with the fitted W, refits, and
/// compares the k-th (and cumulative) discrepancy with the B replicates.
/// Replicate b draws from child stream (seed, k, b).
KTestResult test_k(const SampleMatrix& Z, int k, const TestConfig& cfg);

using KTestFn = std::function<KTestResult(int k)>;

/// Tests k = 1, 2, ... and stops at the first non-rejection at level alpha.
/// q_selected is the last rejected k (0 if k = 1 is not rejected, p if every
/// k is rejected).
SelectionResult select_q_sweep(Index p, const TestConfig& cfg, const KTestFn& test);
SelectionResult select_q_sweep(const SampleMatrix& Z, const TestConfig& cfg);

/// Binary search for the boundary between rejection at k and non-rejection
/// at k + 1 using the Bonferroni-corrected level. Visits at most
/// floor(log2 p) + 1 values of k.
SelectionResult select_q_binary(Index p, const TestConfig& cfg, const KTestFn& test);
SelectionResult select_q_binary(const SampleMatrix& Z, const TestConfig& cfg);

}  // namespace lngca
