#include "lngca/estimator.hpp"

#include "lngca/linalg.hpp"
#include "lngca/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <optional>
#include <sstream>

namespace lngca {

std::string estimator_name(EstimatorType type) {
    return type == EstimatorType::Max ? "max" : "maxmin";
}

EstimatorType parse_estimator(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (lower == "max") return EstimatorType::Max;
    if (lower == "maxmin" || lower == "max-min") return EstimatorType::MaxMin;
    throw InputError("unknown estimator '" + std::string(text) + "' (max|maxmin)");
}

void EstimatorOptions::validate() const {
    kind.validate();
    if (max_iter < 1) throw InputError("max_iter must be at least 1");
    if (!(tol > 0.0)) throw InputError("tol must be positive");
    if (restarts < 0) throw InputError("restarts must be at least 1 (or 0 for one per dimension)");
}

std::vector<ComponentEvaluation> evaluate_rows(const Matrix& W, const Matrix& Z, const DiscrepancyKind& kind) {
    const Matrix X = Z * W.transpose();
    std::vector<ComponentEvaluation> out(static_cast<std::size_t>(W.rows()));
    for (Index j = 0; j < W.rows(); ++j) out[j] = evaluate(kind, standardize(X.col(j)));
    return out;
}

OrthonormalRows fixed_point_update(const Matrix& W, const Matrix& Z, const std::vector<int>& signs,
                                   const std::vector<ComponentEvaluation>& evals, Rng& rng) {
    const Index rows = W.rows();
    if (static_cast<Index>(signs.size()) != rows || static_cast<Index>(evals.size()) != rows)
        throw InputError("fixed_point_update: signs and scores must match the rows of W");
    if (W.cols() != Z.cols()) throw InputError("fixed_point_update: W and Z dimensions differ");

    const Index n = Z.rows();
    Matrix H(n, rows);
    Vector h2(rows);
    for (Index j = 0; j < rows; ++j) {
        H.col(j) = evals[j].score.h1;
        h2(j) = evals[j].score.h2bar;
    }
    Matrix U = (H.transpose() * Z) / static_cast<double>(n);
    U -= h2.asDiagonal() * W;
    for (Index j = 0; j < rows; ++j) U.row(j) *= signs[j];

    try {
        return sym_orthogonalize(U);
    } catch (const InputError&) {
        // Exactly symmetric samples give zero Skew scores.
        U += 1e-8 * standard_normal(U.rows(), U.cols(), rng);
        try {
            return sym_orthogonalize(U);
        } catch (const InputError& e) {
            throw EstimationError(std::string("fixed-point update is rank deficient after jitter: ") + e.what());
        }
    }
}

OrthonormalRows fixed_point_step(const OrthonormalRows& W, const SampleMatrix& Z, const std::vector<int>& signs,
                                 const DiscrepancyKind& kind, Rng& rng) {
    const auto evals = evaluate_rows(W.matrix(), Z.data(), kind);
    return fixed_point_update(W.matrix(), Z.data(), signs, evals, rng);
}

double alignment_change(const Matrix& A, const Matrix& B, Index rows) {
    rows = std::min({rows, A.rows(), B.rows()});
    if (rows <= 0) return 0.0;
    double sum = 0.0;
    for (Index j = 0; j < rows; ++j) sum += std::abs(A.row(j).dot(B.row(j)));
    return 1.0 - sum / static_cast<double>(rows);
}

namespace {

// Row order by discrepancy, descending; ties keep the current order.
std::vector<int> descending_order(const std::vector<ComponentEvaluation>& evals) {
    std::vector<int> order(evals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return evals[a].value > evals[b].value; });
    return order;
}

double signed_objective(const std::vector<ComponentEvaluation>& sorted, Index q) {
    double total = 0.0;
    for (std::size_t j = 0; j < sorted.size(); ++j)
        total += static_cast<Index>(j) < q ? sorted[j].value : -sorted[j].value;
    return total;
}

Estimate run(const SampleMatrix& Z, Index q, const OrthonormalRows& W0, const EstimatorOptions& opts,
             EstimatorType type, std::uint64_t jitter_seed) {
    opts.validate();
    const Index p = Z.p();
    if (W0.cols() != p) throw InputError("initial W has the wrong number of columns");
    if (type == EstimatorType::Max) {
        if (q < 1 || q > p) throw InputError("max estimator needs 1 <= q <= p");
        if (W0.rows() != q) throw InputError("initial W for the max estimator must have q rows");
    } else {
        if (q < 0 || q > p) throw InputError("max-min estimator needs 0 <= q <= p");
        if (W0.rows() != p) throw InputError("initial W for the max-min estimator must be p x p");
    }

    const Index rows = W0.rows();
    std::vector<int> signs(static_cast<std::size_t>(rows));
    for (Index j = 0; j < rows; ++j) signs[j] = j < q ? 1 : -1;

    Rng rng(jitter_seed);
    Matrix W = W0.matrix();
    Estimate est;
    est.type = type;
    est.q = static_cast<int>(q);

    auto sort_rows = [&](std::vector<ComponentEvaluation>& evals) {
        const auto order = descending_order(evals);
        Matrix sorted(W.rows(), W.cols());
        std::vector<ComponentEvaluation> sorted_evals(evals.size());
        for (std::size_t j = 0; j < order.size(); ++j) {
            sorted.row(static_cast<Index>(j)) = W.row(order[j]);
            sorted_evals[j] = std::move(evals[order[j]]);
        }
        W = std::move(sorted);
        evals = std::move(sorted_evals);
    };

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        auto evals = evaluate_rows(W, Z.data(), opts.kind);
        sort_rows(evals);
        est.trace.push_back(signed_objective(evals, q));
        const Matrix next = fixed_point_update(W, Z.data(), signs, evals, rng).matrix();
        const double change = alignment_change(next, W, rows);
        W = next;
        est.iterations = iter;
        if (change < opts.tol) {
            est.converged = true;
            break;
        }
    }

    auto evals = evaluate_rows(W, Z.data(), opts.kind);
    sort_rows(evals);
    est.objective = signed_objective(evals, q);
    est.disc.resize(rows);
    for (Index j = 0; j < rows; ++j) est.disc(j) = evals[j].value;
    const Matrix X = Z.data() * W.transpose();
    Matrix components(X.rows(), X.cols());
    for (Index j = 0; j < rows; ++j) components.col(j) = standardize(X.col(j));
    est.components = SampleMatrix(std::move(components));
    est.W = OrthonormalRows(std::move(W));
    return est;
}

Estimate run_restart(const SampleMatrix& Z, Index q, const EstimatorOptions& opts, EstimatorType type, int r) {
    Rng init(derive_seed(opts.seed, {static_cast<std::uint64_t>(r)}));
    const Index rows = type == EstimatorType::Max ? q : Z.p();
    if (rows < 1 || rows > Z.p()) throw InputError("q is out of range for this estimator");
    const OrthonormalRows W0 = random_orthonormal(Z.p(), rows, init);
    const std::uint64_t jitter = derive_seed(opts.seed, {static_cast<std::uint64_t>(r), 1});
    Estimate est = run(Z, q, W0, opts, type, jitter);
    est.restart_index = r;
    return est;
}

}  // namespace

Estimate estimate_max(const SampleMatrix& Z, const OrthonormalRows& W0, const EstimatorOptions& opts,
                      std::uint64_t jitter_seed) {
    return run(Z, W0.rows(), W0, opts, EstimatorType::Max, jitter_seed);
}

Estimate estimate_max(const SampleMatrix& Z, Index q, const EstimatorOptions& opts) {
    return run_restart(Z, q, opts, EstimatorType::Max, 0);
}

Estimate estimate_maxmin(const SampleMatrix& Z, Index q, const OrthonormalRows& W0, const EstimatorOptions& opts,
                         std::uint64_t jitter_seed) {
    return run(Z, q, W0, opts, EstimatorType::MaxMin, jitter_seed);
}

Estimate estimate_maxmin(const SampleMatrix& Z, Index q, const EstimatorOptions& opts) {
    return run_restart(Z, q, opts, EstimatorType::MaxMin, 0);
}

Estimate multi_restart(const SampleMatrix& Z, Index q, const EstimatorOptions& opts, EstimatorType type) {
    opts.validate();
    const int m = opts.restarts_for(Z.p());
    std::vector<std::optional<Estimate>> results(static_cast<std::size_t>(m));
    std::vector<std::string> failures(static_cast<std::size_t>(m));
    parallel_for(
        static_cast<std::size_t>(m),
        [&](std::size_t r) {
            try {
                results[r] = run_restart(Z, q, opts, type, static_cast<int>(r));
            } catch (const InputError&) {
                throw;
            } catch (const std::exception& e) {
                failures[r] = e.what();
            }
        },
        opts.threads);

    std::optional<Estimate> best;
    for (auto& r : results) {
        if (r && (!best || r->objective > best->objective)) best = std::move(r);
    }
    if (!best) {
        std::ostringstream msg;
        msg << "all " << m << " restarts failed:";
        for (int r = 0; r < m; ++r) msg << "\n  restart " << r << ": " << failures[r];
        throw EstimationError(msg.str());
    }
    return std::move(*best);
}

}  // namespace lngca
