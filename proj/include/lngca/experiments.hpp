#pragma once

#include "lngca/estimator.hpp"
#include "lngca/linalg.hpp"
#include "lngca/qtest.hpp"
#include "lngca/sources.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lngca {

struct ExperimentConfig {
    Index q = 2;
    Index p = 4;
    Index n = 1000;
    int trials = 100;
    std::vector<DiscrepancyKind> kinds{DiscrepancyKind{DiscrepancyTag::JB}, DiscrepancyKind{DiscrepancyTag::GPois}};
    std::vector<EstimatorType> estimators{EstimatorType::Max, EstimatorType::MaxMin};
    int restarts = 4;             ///< m; 0 means p
    std::string sources = "all";  ///< letters looped over by experiment 1
    std::uint64_t seed = 0;
    unsigned threads = 0;

    void validate() const;
};

struct TrialRecord {
    int trial = 0;
    std::string sources;          ///< letters of the signal columns
    DiscrepancyKind kind;
    EstimatorType estimator = EstimatorType::MaxMin;
    double error = 0.0;
    double runtime = 0.0;         ///< seconds; not part of the reproducible output
    bool converged = false;
    int iterations = 0;
};

/// Mixed, whitened data with known ground truth.
struct PlantedData {
    SampleMatrix X;               ///< sources followed by Gaussian noise
    Matrix A;                     ///< mixing matrix, Y = X A^T
    WhiteningResult white;
    Matrix W0;                    ///< B Hhat^{-1} with B = A^{-1}: X = Z W0^T
};

/// Builds [S, N] with S from the given sources and p - q standardized
/// Gaussian columns, mixes with random_mixing and whitens.
PlantedData planted_mixture(const std::vector<SourceSpec>& signal, Index p, Index n, Rng& rng);

/// Experiment 1: for every letter in cfg.sources, both signal columns from
/// that distribution. Records are ordered by (source, trial, kind, estimator).
std::vector<TrialRecord> run_experiment1(const ExperimentConfig& cfg);

/// Experiment 2: q distinct randomly chosen distributions per trial.
std::vector<TrialRecord> run_experiment2(const ExperimentConfig& cfg);

struct TestTrialRecord {
    int trial = 0;
    std::string sources;
    DiscrepancyKind kind;
    int k = 0;
    double p_curr = 1.0;
    double p_cumu = 1.0;
};

struct RejectionRate {
    DiscrepancyKind kind;
    TestMode mode = TestMode::Current;
    int k = 0;
    double rate = 0.0;
    int trials = 0;
};

struct Experiment3Result {
    std::vector<TestTrialRecord> records;
    std::vector<RejectionRate> table;   ///< per kind x mode x k
};

/// Experiment 3: q distinct random distributions per trial, test_k at each
/// k in ks for every kind. test_cfg supplies B, alpha and estimator options;
/// its kind and seed are replaced per cell.
Experiment3Result run_experiment3(const ExperimentConfig& cfg, const TestConfig& test_cfg,
                                  const std::vector<int>& ks = {1, 2, 3, 4});

/// Rejection rates at level alpha from per-trial p-values.
std::vector<RejectionRate> rejection_table(const std::vector<TestTrialRecord>& records, double alpha);

struct ErrorSummary {
    std::string sources;
    DiscrepancyKind kind;
    EstimatorType estimator = EstimatorType::MaxMin;
    int count = 0;
    double median = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double converged_rate = 0.0;
};

/// Median and quartiles of the error per (sources, kind, estimator). Pass
/// by_source = false to pool every source into one cell per kind x estimator.
std::vector<ErrorSummary> summarize_errors(const std::vector<TrialRecord>& records, bool by_source = true);

}  // namespace lngca
