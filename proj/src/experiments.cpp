#include "lngca/experiments.hpp"

#include "lngca/linalg.hpp"
#include "lngca/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <numeric>
#include <tuple>

namespace lngca {

namespace {

std::uint64_t tag_of(const DiscrepancyKind& kind) {
    return static_cast<std::uint64_t>(kind.tag);
}

std::string letters(const std::vector<SourceSpec>& specs) {
    std::string out;
    for (const auto& s : specs) out += s.id;
    return out;
}

// q distinct letters, drawn without replacement.
std::vector<SourceSpec> random_sources(Index q, Rng& rng) {
    std::vector<SourceSpec> lib = source_library();
    if (q > static_cast<Index>(lib.size())) throw InputError("more distinct sources requested than the library holds");
    for (Index i = 0; i < q; ++i) {
        std::uniform_int_distribution<Index> pick(i, static_cast<Index>(lib.size()) - 1);
        std::swap(lib[i], lib[pick(rng)]);
    }
    lib.resize(q);
    return lib;
}

double quantile(std::vector<double> v, double prob) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const double pos = prob * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, v.size() - 1);
    return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

// Runs every (kind, estimator) pair on one planted instance.
std::vector<TrialRecord> estimate_cell(const PlantedData& data, const ExperimentConfig& cfg, int trial,
                                       const std::string& sources, std::uint64_t cell_seed) {
    std::vector<TrialRecord> out;
    const Matrix truth = data.W0.topRows(cfg.q);
    for (const auto& kind : cfg.kinds) {
        for (const auto type : cfg.estimators) {
            EstimatorOptions opts;
            opts.kind = kind;
            opts.restarts = cfg.restarts;
            opts.threads = 1;
            opts.seed = derive_seed(cell_seed, {tag_of(kind), static_cast<std::uint64_t>(type)});
            const auto t0 = std::chrono::steady_clock::now();
            const Estimate est = multi_restart(data.white.Z, cfg.q, opts, type);
            const auto t1 = std::chrono::steady_clock::now();
            TrialRecord rec;
            rec.trial = trial;
            rec.sources = sources;
            rec.kind = kind;
            rec.estimator = type;
            rec.error = signed_perm_error(truth, est.W.matrix().topRows(cfg.q)).err;
            rec.runtime = std::chrono::duration<double>(t1 - t0).count();
            rec.converged = est.converged;
            rec.iterations = est.iterations;
            out.push_back(std::move(rec));
        }
    }
    return out;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (q < 1 || q > p) throw InputError("experiment needs 1 <= q <= p");
    if (n < 2) throw InputError("experiment needs n >= 2");
    if (trials < 1) throw InputError("trials must be at least 1");
    if (kinds.empty()) throw InputError("no discrepancy kinds selected");
    if (estimators.empty()) throw InputError("no estimators selected");
    if (restarts < 0) throw InputError("restarts must be non-negative");
    for (const auto& k : kinds) k.validate();
}

PlantedData planted_mixture(const std::vector<SourceSpec>& signal, Index p, Index n, Rng& rng) {
    const Index q = static_cast<Index>(signal.size());
    if (q > p) throw InputError("planted_mixture: more sources than dimensions");
    Matrix X(n, p);
    X.leftCols(q) = gen_sources(signal, n, rng).data();
    X.rightCols(p - q) = gaussian_noise(n, p - q, rng);
    Matrix A = random_mixing(p, rng);
    const Matrix Y = X * A.transpose();
    WhiteningResult white = whiten(SampleMatrix(Y));
    Matrix W0 = A.inverse() * white.Hinv;
    return {SampleMatrix(std::move(X)), std::move(A), std::move(white), std::move(W0)};
}

std::vector<TrialRecord> run_experiment1(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto specs = source_specs(cfg.sources);
    const std::size_t cells = specs.size() * static_cast<std::size_t>(cfg.trials);
    std::vector<std::vector<TrialRecord>> per_cell(cells);
    parallel_for(
        cells,
        [&](std::size_t c) {
            const SourceSpec& spec = specs[c / cfg.trials];
            const int trial = static_cast<int>(c % cfg.trials);
            const std::uint64_t cell_seed =
                derive_seed(cfg.seed, {static_cast<std::uint64_t>(spec.id), static_cast<std::uint64_t>(trial)});
            Rng rng(cell_seed);
            const std::vector<SourceSpec> signal(static_cast<std::size_t>(cfg.q), spec);
            const PlantedData data = planted_mixture(signal, cfg.p, cfg.n, rng);
            per_cell[c] = estimate_cell(data, cfg, trial, letters(signal), cell_seed);
        },
        cfg.threads);
    std::vector<TrialRecord> out;
    for (auto& v : per_cell) out.insert(out.end(), v.begin(), v.end());
    return out;
}

std::vector<TrialRecord> run_experiment2(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<std::vector<TrialRecord>> per_trial(static_cast<std::size_t>(cfg.trials));
    parallel_for(
        per_trial.size(),
        [&](std::size_t t) {
            const std::uint64_t cell_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(t)});
            Rng rng(cell_seed);
            const auto signal = random_sources(cfg.q, rng);
            const PlantedData data = planted_mixture(signal, cfg.p, cfg.n, rng);
            per_trial[t] = estimate_cell(data, cfg, static_cast<int>(t), letters(signal), cell_seed);
        },
        cfg.threads);
    std::vector<TrialRecord> out;
    for (auto& v : per_trial) out.insert(out.end(), v.begin(), v.end());
    return out;
}

Experiment3Result run_experiment3(const ExperimentConfig& cfg, const TestConfig& test_cfg,
                                  const std::vector<int>& ks) {
    cfg.validate();
    test_cfg.validate();
    for (int k : ks)
        if (k < 1 || k > cfg.p) throw InputError("experiment 3: every k must lie in [1, p]");
    std::vector<std::vector<TestTrialRecord>> per_trial(static_cast<std::size_t>(cfg.trials));
    parallel_for(
        per_trial.size(),
        [&](std::size_t t) {
            const std::uint64_t cell_seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(t)});
            Rng rng(cell_seed);
            const auto signal = random_sources(cfg.q, rng);
            const PlantedData data = planted_mixture(signal, cfg.p, cfg.n, rng);
            for (const auto& kind : cfg.kinds) {
                TestConfig tc = test_cfg;
                tc.kind = kind;
                tc.seed = derive_seed(cell_seed, {tag_of(kind)});
                tc.threads = 1;
                for (int k : ks) {
                    const KTestResult r = test_k(data.white.Z, k, tc);
                    per_trial[t].push_back({static_cast<int>(t), letters(signal), kind, k, r.p_curr, r.p_cumu});
                }
            }
        },
        cfg.threads);
    Experiment3Result out;
    for (auto& v : per_trial) out.records.insert(out.records.end(), v.begin(), v.end());
    out.table = rejection_table(out.records, test_cfg.alpha);
    return out;
}

std::vector<RejectionRate> rejection_table(const std::vector<TestTrialRecord>& records, double alpha) {
    // Keyed by (kind, mode, k) in first-seen kind order.
    std::vector<DiscrepancyKind> kinds;
    std::map<std::tuple<std::size_t, int, int>, std::pair<int, int>> counts;
    for (const auto& r : records) {
        auto it = std::find(kinds.begin(), kinds.end(), r.kind);
        const std::size_t ki = static_cast<std::size_t>(it - kinds.begin());
        if (it == kinds.end()) kinds.push_back(r.kind);
        for (int mode = 0; mode < 2; ++mode) {
            const double pv = mode == 0 ? r.p_curr : r.p_cumu;
            auto& c = counts[{ki, mode, r.k}];
            c.first += pv < alpha;
            c.second += 1;
        }
    }
    std::vector<RejectionRate> out;
    for (const auto& [key, c] : counts) {
        RejectionRate rate;
        rate.kind = kinds[std::get<0>(key)];
        rate.mode = std::get<1>(key) == 0 ? TestMode::Current : TestMode::Cumulative;
        rate.k = std::get<2>(key);
        rate.trials = c.second;
        rate.rate = static_cast<double>(c.first) / static_cast<double>(c.second);
        out.push_back(rate);
    }
    return out;
}

std::vector<ErrorSummary> summarize_errors(const std::vector<TrialRecord>& records, bool by_source) {
    std::vector<ErrorSummary> out;
    std::vector<std::vector<double>> errors;
    std::vector<int> converged;
    for (const auto& r : records) {
        const std::string src = by_source ? r.sources : "all";
        auto it = std::find_if(out.begin(), out.end(), [&](const ErrorSummary& s) {
            return s.sources == src && s.kind == r.kind && s.estimator == r.estimator;
        });
        std::size_t idx = static_cast<std::size_t>(it - out.begin());
        if (it == out.end()) {
            ErrorSummary s;
            s.sources = src;
            s.kind = r.kind;
            s.estimator = r.estimator;
            out.push_back(s);
            errors.emplace_back();
            converged.push_back(0);
        }
        errors[idx].push_back(r.error);
        converged[idx] += r.converged;
    }
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i].count = static_cast<int>(errors[i].size());
        out[i].median = quantile(errors[i], 0.5);
        out[i].q25 = quantile(errors[i], 0.25);
        out[i].q75 = quantile(errors[i], 0.75);
        out[i].converged_rate = static_cast<double>(converged[i]) / static_cast<double>(out[i].count);
    }
    return out;
}

}  // namespace lngca
