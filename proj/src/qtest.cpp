#include "lngca/qtest.hpp"

#include "lngca/parallel.hpp"
#include "lngca/sources.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace lngca {

namespace {

std::string lowered(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::string mode_name(TestMode mode) {
    return mode == TestMode::Current ? "current" : "cumulative";
}

TestMode parse_mode(std::string_view text) {
    const std::string s = lowered(text);
    if (s == "current" || s == "curr") return TestMode::Current;
    if (s == "cumulative" || s == "cumu") return TestMode::Cumulative;
    throw InputError("unknown test mode '" + std::string(text) + "' (current|cumulative)");
}

std::string search_name(SearchMode search) {
    return search == SearchMode::Sweep ? "sweep" : "binary";
}

SearchMode parse_search(std::string_view text) {
    const std::string s = lowered(text);
    if (s == "sweep") return SearchMode::Sweep;
    if (s == "binary") return SearchMode::Binary;
    throw InputError("unknown search '" + std::string(text) + "' (sweep|binary)");
}

void TestConfig::validate() const {
    kind.validate();
    if (B < 1) throw InputError("B must be at least 1");
    if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
    estimator.validate();
}

double resample_p_value(const Vector& resampled, double observed) {
    if (resampled.size() == 0) throw InputError("resample_p_value: no resampled values");
    Index count = 0;
    for (Index b = 0; b < resampled.size(); ++b) count += resampled(b) >= observed;
    return static_cast<double>(count) / static_cast<double>(resampled.size());
}

double bonferroni_alpha(double alpha, Index p) {
    if (p < 1) throw InputError("bonferroni_alpha: p must be positive");
    const int tests = static_cast<int>(std::ceil(std::log2(static_cast<double>(p))));
    return alpha / std::max(1, tests);
}

KTestResult test_k(const SampleMatrix& Z, int k, const TestConfig& cfg) {
    cfg.validate();
    const Index n = Z.n();
    const Index p = Z.p();
    if (k < 1 || k > p) throw InputError("test_k: k must lie in [1, p]");
    const Index q = k - 1;

    EstimatorOptions opts = cfg.estimator;
    opts.kind = cfg.kind;
    opts.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(k)});
    const Estimate fit = multi_restart(Z, q, opts, EstimatorType::MaxMin);

    KTestResult out;
    out.k = k;
    out.observed_curr = fit.disc(k - 1);
    out.observed_cumu = fit.disc.head(k).sum();
    out.resampled_curr.resize(cfg.B);
    out.resampled_cumu.resize(cfg.B);

    const Matrix& W = fit.W.matrix();
    const Matrix signal = fit.components.data().leftCols(q);
    opts.threads = 1;

    parallel_for(
        static_cast<std::size_t>(cfg.B),
        [&](std::size_t b) {
            Rng rng(derive_seed(cfg.seed, {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(b)}));
            for (int attempt = 0;; ++attempt) {
                Matrix Xb(n, p);
                Xb.leftCols(q) = signal;
                Xb.rightCols(p - q) = gaussian_noise(n, p - q, rng);
                EstimatorOptions local = opts;
                local.seed = rng();
                try {
                    const Estimate rb = multi_restart(SampleMatrix(Xb * W), q, local, EstimatorType::MaxMin);
                    out.resampled_curr(b) = rb.disc(k - 1);
                    out.resampled_cumu(b) = rb.disc.head(k).sum();
                    return;
                } catch (const InputError&) {
                    throw;
                } catch (const std::exception& e) {
                    if (attempt >= 1)
                        throw EstimationError("test_k: replicate " + std::to_string(b) + " at k = " +
                                              std::to_string(k) + " failed twice: " + e.what());
                }
            }
        },
        cfg.threads);

    out.p_curr = resample_p_value(out.resampled_curr, out.observed_curr);
    out.p_cumu = resample_p_value(out.resampled_cumu, out.observed_cumu);
    return out;
}

SelectionResult select_q_sweep(Index p, const TestConfig& cfg, const KTestFn& test) {
    cfg.validate();
    if (p < 1) throw InputError("select_q_sweep: p must be positive");
    SelectionResult out;
    out.search = SearchMode::Sweep;
    out.mode = cfg.mode;
    out.alpha_corrected = cfg.alpha;
    for (int k = 1; k <= p; ++k) {
        out.path.push_back(k);
        out.tests_run.push_back(test(k));
        if (!(out.tests_run.back().p_value(cfg.mode) < cfg.alpha)) break;
        out.q_selected = k;
    }
    return out;
}

SelectionResult select_q_sweep(const SampleMatrix& Z, const TestConfig& cfg) {
    return select_q_sweep(Z.p(), cfg, [&](int k) { return test_k(Z, k, cfg); });
}

SelectionResult select_q_binary(Index p, const TestConfig& cfg, const KTestFn& test) {
    cfg.validate();
    if (p < 1) throw InputError("select_q_binary: p must be positive");
    SelectionResult out;
    out.search = SearchMode::Binary;
    out.mode = cfg.mode;
    out.alpha_corrected = bonferroni_alpha(cfg.alpha, p);
    int lo = 1, hi = static_cast<int>(p);
    while (lo <= hi) {
        const int mid = (lo + hi) / 2;
        out.path.push_back(mid);
        out.tests_run.push_back(test(mid));
        if (out.tests_run.back().p_value(cfg.mode) < out.alpha_corrected) {
            out.q_selected = mid;
            lo = mid + 1;
        } else {
            hi = mid - 1;
        }
    }
    return out;
}

SelectionResult select_q_binary(const SampleMatrix& Z, const TestConfig& cfg) {
    return select_q_binary(Z.p(), cfg, [&](int k) { return test_k(Z, k, cfg); });
}

}  // namespace lngca
