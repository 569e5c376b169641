#pragma once

#include "lngca/discrepancy.hpp"
#include "lngca/rng.hpp"
#include "lngca/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace lngca {

enum class EstimatorType { Max, MaxMin };

std::string estimator_name(EstimatorType type);
/// Parses "max" or "maxmin" (also "max-min").
EstimatorType parse_estimator(std::string_view text);

struct EstimatorOptions {
    DiscrepancyKind kind;
    int max_iter = 100;
    double tol = 1e-7;
    int restarts = 0;          ///< 0 means one restart per dimension (m = p)
    std::uint64_t seed = 0;
    unsigned threads = 0;      ///< workers for restarts; 0 means default_thread_count()

    void validate() const;
    int restarts_for(Index p) const { return restarts > 0 ? restarts : static_cast<int>(p); }
};

struct Estimate {
    OrthonormalRows W;         ///< rows sorted by discrepancy, descending
    SampleMatrix components;   ///< standardized Z W^T, columns in the order of W
    Vector disc;               ///< per-component discrepancy, non-increasing
    double objective = 0.0;
    std::vector<double> trace; ///< objective before each fixed-point step
    int iterations = 0;
    bool converged = false;
    int restart_index = 0;
    int q = 0;
    EstimatorType type = EstimatorType::MaxMin;
};

/// Discrepancy values and scores of the standardized projections Z w_j^T.
std::vector<ComponentEvaluation> evaluate_rows(const Matrix& W, const Matrix& Z, const DiscrepancyKind& kind);

/// One fixed-point update from precomputed scores:
/// u_j = signs_j ((1/n) Z^T h1_j - h2bar_j w_j^T), followed by symmetric
/// orthogonalization. A rank-deficient update is jittered once with 1e-8
/// Gaussian noise drawn from rng before giving up with EstimationError.
OrthonormalRows fixed_point_update(const Matrix& W, const Matrix& Z, const std::vector<int>& signs,
                                   const std::vector<ComponentEvaluation>& evals, Rng& rng);

/// Evaluates the rows of W and applies fixed_point_update.
OrthonormalRows fixed_point_step(const OrthonormalRows& W, const SampleMatrix& Z, const std::vector<int>& signs,
                                 const DiscrepancyKind& kind, Rng& rng);

/// 1 - mean |diag(A B^T)| over the first `rows` rows.
double alignment_change(const Matrix& A, const Matrix& B, Index rows);

/// Max estimator from a given q x p starting point.
Estimate estimate_max(const SampleMatrix& Z, const OrthonormalRows& W0, const EstimatorOptions& opts,
                      std::uint64_t jitter_seed = 0);
/// Max estimator from a random start drawn from restart stream 0 of opts.seed.
Estimate estimate_max(const SampleMatrix& Z, Index q, const EstimatorOptions& opts);

/// Max-min estimator from a given p x p starting point.
Estimate estimate_maxmin(const SampleMatrix& Z, Index q, const OrthonormalRows& W0, const EstimatorOptions& opts,
                         std::uint64_t jitter_seed = 0);
/// Max-min estimator from a random start drawn from restart stream 0 of opts.seed.
Estimate estimate_maxmin(const SampleMatrix& Z, Index q, const EstimatorOptions& opts);

/// Runs the estimator from opts.restarts_for(p) random starts (restart r uses
/// child stream r of opts.seed) and keeps the largest objective, lowest
/// restart index on ties. Throws EstimationError only if every restart fails.
Estimate multi_restart(const SampleMatrix& Z, Index q, const EstimatorOptions& opts, EstimatorType type);

}  // namespace lngca
