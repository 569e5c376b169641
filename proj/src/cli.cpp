#include "lngca/cli.hpp"

#include "lngca/experiments.hpp"
#include "lngca/image.hpp"
#include "lngca/io.hpp"
#include "lngca/linalg.hpp"
#include "lngca/parallel.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>

namespace lngca {

using nlohmann::json;

namespace {

// State shared by every command: where outputs go and what was written.
struct Run {
    std::string command;
    std::string out_prefix = "lngca_";
    std::uint64_t seed = 1;
    unsigned threads = 0;
    json config = json::object();
    std::vector<std::string> outputs;

    std::string path(const std::string& name) {
        const std::string p = out_prefix + name;
        const auto parent = std::filesystem::path(p).parent_path();
        if (!parent.empty()) std::filesystem::create_directories(parent);
        outputs.push_back(p);
        return p;
    }
};

// Arguments with the output prefix removed, so a manifest can be replayed
// into a different location.
std::vector<std::string> strip_prefix(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--out-prefix" || a == "-o") {
            ++i;
            continue;
        }
        if (a.rfind("--out-prefix=", 0) == 0) continue;
        out.push_back(a);
    }
    return out;
}

std::vector<DiscrepancyKind> parse_kinds(const std::vector<std::string>& names) {
    std::vector<DiscrepancyKind> out;
    for (const auto& n : names) out.push_back(DiscrepancyKind::parse(n));
    if (out.empty()) throw InputError("at least one --kind is required");
    return out;
}

json kind_json(const DiscrepancyKind& kind) {
    json j{{"name", kind.name()}};
    if (kind.tag == DiscrepancyTag::GPois) {
        j["gpois_df"] = kind.gpois_df;
        j["gpois_grid"] = kind.gpois_grid;
    }
    return j;
}

json estimator_options_json(const EstimatorOptions& o) {
    return {{"kind", kind_json(o.kind)}, {"max_iter", o.max_iter}, {"tol", o.tol}, {"restarts", o.restarts}};
}

json perm_json(const SignedPermutation& q) {
    return {{"perm", q.perm}, {"signs", q.signs}};
}

json selection_json(const SelectionResult& sel, const TestConfig& cfg) {
    const double level = sel.alpha_corrected;
    json tests = json::array();
    for (const auto& t : sel.tests_run) {
        tests.push_back({{"k", t.k},
                         {"observed_curr", t.observed_curr},
                         {"observed_cumu", t.observed_cumu},
                         {"p_curr", t.p_curr},
                         {"p_cumu", t.p_cumu},
                         {"rejected", t.p_value(sel.mode) < level},
                         {"resampled_curr", vector_to_json(t.resampled_curr)},
                         {"resampled_cumu", vector_to_json(t.resampled_cumu)}});
    }
    return {{"q_selected", sel.q_selected},
            {"kind", cfg.kind.name()},
            {"B", cfg.B},
            {"alpha", cfg.alpha},
            {"alpha_corrected", sel.alpha_corrected},
            {"mode", mode_name(sel.mode)},
            {"search", search_name(sel.search)},
            {"path", sel.path},
            {"tests", tests}};
}

SampleMatrix read_samples(const std::string& path, bool header) {
    CsvTable t = read_csv(path, header);
    if (t.data.rows() < 2) throw InputError(path + ": need at least 2 rows of data");
    return SampleMatrix(std::move(t.data));
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

// ---------------------------------------------------------------- commands

struct WhitenArgs {
    std::string input;
    bool header = false;
};

void cmd_whiten(Run& run, const WhitenArgs& a) {
    run.config = {{"input", a.input}, {"header", a.header}};
    const WhiteningResult w = whiten(read_samples(a.input, a.header));
    write_csv(run.path("Z.csv"), w.Z.data());
    write_json(run.path("H.json"),
               {{"H", matrix_to_json(w.H)}, {"Hinv", matrix_to_json(w.Hinv)}, {"mean", vector_to_json(w.mean)}});
}

struct EstimateArgs {
    std::string input;
    bool header = false;
    int q = 1;
    std::string kind = "jb";
    std::string estimator = "maxmin";
    int restarts = 0;
    int max_iter = 100;
    double tol = 1e-7;
    std::string truth;
};

void cmd_estimate(Run& run, const EstimateArgs& a) {
    EstimatorOptions opts;
    opts.kind = DiscrepancyKind::parse(a.kind);
    opts.restarts = a.restarts;
    opts.max_iter = a.max_iter;
    opts.tol = a.tol;
    opts.seed = derive_seed(run.seed, "estimate");
    opts.threads = run.threads;
    const EstimatorType type = parse_estimator(a.estimator);
    run.config = {{"input", a.input}, {"header", a.header}, {"q", a.q}, {"estimator", estimator_name(type)},
                  {"options", estimator_options_json(opts)}, {"truth", a.truth}};

    const WhiteningResult w = whiten(read_samples(a.input, a.header));
    const Index p = w.Z.p();
    if (a.q < 0 || a.q > p) throw InputError("--q must lie in [0, " + std::to_string(p) + "]");
    if (type == EstimatorType::Max && a.q < 1) throw InputError("the max estimator needs --q >= 1");
    const Estimate est = multi_restart(w.Z, a.q, opts, type);

    write_csv(run.path("W.csv"), est.W.matrix());
    write_csv(run.path("unmixing.csv"), est.W.matrix() * w.H);
    write_csv(run.path("components.csv"), est.components.data());
    json disc{{"kind", opts.kind.name()},
              {"estimator", estimator_name(type)},
              {"q", a.q},
              {"disc", vector_to_json(est.disc)},
              {"objective", est.objective},
              {"iterations", est.iterations},
              {"converged", est.converged},
              {"restart_index", est.restart_index},
              {"restarts", opts.restarts_for(p)},
              {"trace", est.trace}};
    if (!a.truth.empty()) {
        const Matrix A = read_csv(a.truth).data;
        if (A.rows() != p || A.cols() != p) throw InputError(a.truth + ": mixing matrix must be " +
                                                             std::to_string(p) + " x " + std::to_string(p));
        const Index q = std::max(a.q, 1);
        const Matrix W0 = (A.inverse() * w.Hinv).topRows(q);
        const SignedPermError e = signed_perm_error(W0, est.W.matrix().topRows(q));
        disc["truth_error"] = e.err;
        disc["truth_alignment"] = perm_json(e.Q);
    }
    write_json(run.path("disc.json"), disc);
}

struct TestArgs {
    std::string input;
    bool header = false;
    std::string kind = "jb";
    int B = 200;
    double alpha = 0.05;
    std::string mode = "current";
    std::string search = "sweep";
    int restarts = 1;
    int max_iter = 100;
    double tol = 1e-7;
};

TestConfig make_test_config(const Run& run, const std::string& kind, int B, double alpha, const std::string& mode,
                            int restarts, int max_iter, double tol) {
    TestConfig tc;
    tc.kind = DiscrepancyKind::parse(kind);
    tc.B = B;
    tc.alpha = alpha;
    tc.mode = parse_mode(mode);
    tc.estimator.kind = tc.kind;
    tc.estimator.restarts = restarts;
    tc.estimator.max_iter = max_iter;
    tc.estimator.tol = tol;
    tc.estimator.threads = 1;
    tc.threads = run.threads;
    tc.validate();
    return tc;
}

json test_config_json(const TestConfig& tc) {
    return {{"kind", kind_json(tc.kind)}, {"B", tc.B}, {"alpha", tc.alpha}, {"mode", mode_name(tc.mode)},
            {"estimator", estimator_options_json(tc.estimator)}};
}

void cmd_test_q(Run& run, const TestArgs& a) {
    TestConfig tc = make_test_config(run, a.kind, a.B, a.alpha, a.mode, a.restarts, a.max_iter, a.tol);
    tc.seed = derive_seed(run.seed, "test");
    const SearchMode search = parse_search(a.search);
    run.config = {{"input", a.input}, {"header", a.header}, {"search", search_name(search)}, {"test", test_config_json(tc)}};
    const WhiteningResult w = whiten(read_samples(a.input, a.header));
    const SelectionResult sel = search == SearchMode::Sweep ? select_q_sweep(w.Z, tc) : select_q_binary(w.Z, tc);
    write_json(run.path("selection.json"), selection_json(sel, tc));
}

struct SimulateArgs {
    int experiment = 1;
    int trials = 100;
    Index n = 0;
    Index q = 0;
    Index p = 0;
    std::vector<std::string> kinds{"jb", "gpois"};
    std::vector<std::string> estimators{"max", "maxmin"};
    int restarts = 4;
    std::string sources = "all";
    int B = 200;
    double alpha = 0.05;
    std::vector<int> ks{1, 2, 3, 4};
    int test_restarts = 1;
};

void cmd_simulate(Run& run, const SimulateArgs& a) {
    if (a.experiment < 1 || a.experiment > 3) throw InputError("--experiment must be 1, 2 or 3");
    ExperimentConfig cfg;
    cfg.q = a.q > 0 ? a.q : 2;
    cfg.p = a.p > 0 ? a.p : 2 * cfg.q;
    cfg.n = a.n > 0 ? a.n : (a.experiment == 1 ? 1000 : a.experiment == 2 ? 500 * cfg.q : 2000);
    cfg.trials = a.trials;
    cfg.kinds = parse_kinds(a.kinds);
    cfg.estimators.clear();
    for (const auto& e : a.estimators) cfg.estimators.push_back(parse_estimator(e));
    cfg.restarts = a.restarts;
    cfg.sources = a.sources;
    cfg.seed = derive_seed(run.seed, "simulate");
    cfg.threads = run.threads;
    cfg.validate();

    std::vector<std::string> est_names;
    for (auto e : cfg.estimators) est_names.push_back(estimator_name(e));
    std::vector<std::string> kind_names;
    for (const auto& k : cfg.kinds) kind_names.push_back(k.name());
    run.config = {{"experiment", a.experiment}, {"trials", cfg.trials}, {"n", cfg.n}, {"q", cfg.q}, {"p", cfg.p},
                  {"kinds", kind_names}, {"restarts", cfg.restarts}};
    if (a.experiment == 1) run.config["sources"] = cfg.sources;
    if (a.experiment != 3) run.config["estimators"] = est_names;

    if (a.experiment == 3) {
        TestConfig tc = make_test_config(run, kind_names.front(), a.B, a.alpha, "current", a.test_restarts, 100, 1e-7);
        run.config["B"] = tc.B;
        run.config["alpha"] = tc.alpha;
        run.config["ks"] = a.ks;
        run.config["test_restarts"] = a.test_restarts;
        const Experiment3Result res = run_experiment3(cfg, tc, a.ks);
        std::ostringstream csv;
        csv << "trial,sources,kind,k,p_curr,p_cumu\n";
        for (const auto& r : res.records)
            csv << r.trial << ',' << csv_field(r.sources) << ',' << r.kind.name() << ',' << r.k << ','
                << format_number(r.p_curr) << ',' << format_number(r.p_cumu) << '\n';
        write_text(run.path("results.csv"), csv.str());
        json table = json::array();
        for (const auto& r : res.table)
            table.push_back({{"kind", r.kind.name()}, {"mode", mode_name(r.mode)}, {"k", r.k}, {"rate", r.rate},
                             {"trials", r.trials}, {"role", r.k <= cfg.q ? "power" : "size"}});
        write_json(run.path("summary.json"), {{"experiment", 3}, {"alpha", tc.alpha}, {"rejection", table}});
        return;
    }

    const std::vector<TrialRecord> records = a.experiment == 1 ? run_experiment1(cfg) : run_experiment2(cfg);
    std::ostringstream csv, timing;
    csv << "trial,sources,kind,estimator,error,converged,iterations\n";
    timing << "trial,sources,kind,estimator,runtime_seconds\n";
    for (const auto& r : records) {
        csv << r.trial << ',' << csv_field(r.sources) << ',' << r.kind.name() << ',' << estimator_name(r.estimator)
            << ',' << format_number(r.error) << ',' << (r.converged ? 1 : 0) << ',' << r.iterations << '\n';
        timing << r.trial << ',' << csv_field(r.sources) << ',' << r.kind.name() << ','
               << estimator_name(r.estimator) << ',' << format_number(r.runtime) << '\n';
    }
    write_text(run.path("results.csv"), csv.str());
    write_text(run.path("timing.csv"), timing.str());

    auto summary_rows = [](const std::vector<ErrorSummary>& rows) {
        json out = json::array();
        for (const auto& s : rows)
            out.push_back({{"sources", s.sources}, {"kind", s.kind.name()}, {"estimator", estimator_name(s.estimator)},
                           {"count", s.count}, {"median", s.median}, {"q25", s.q25}, {"q75", s.q75},
                           {"converged_rate", s.converged_rate}});
        return out;
    };
    write_json(run.path("summary.json"), {{"experiment", a.experiment},
                                          {"by_source", summary_rows(summarize_errors(records, true))},
                                          {"pooled", summary_rows(summarize_errors(records, false))}});
}

struct UnmixArgs {
    std::vector<std::string> images;
    bool demo = false;
    Index size = 128;
    bool identity_mixing = false;
    int noise = 3;
    bool no_test = false;
    std::string kind = "gpois";
    int B = 100;
    double alpha = 0.05;
    std::string mode = "current";
    std::string search = "sweep";
    int restarts = 3;
    int test_restarts = 1;
    int max_iter = 100;
    double tol = 1e-7;
};

void cmd_unmix_images(Run& run, const UnmixArgs& a) {
    if (a.demo == !a.images.empty()) throw InputError("give either image files or --demo");
    std::vector<GrayImage> images;
    if (a.demo) {
        images = demo_images(a.size);
    } else {
        for (const auto& f : a.images) images.push_back(read_image(f));
    }

    ImageUnmixConfig cfg;
    cfg.test = make_test_config(run, a.kind, a.B, a.alpha, a.mode, a.test_restarts, a.max_iter, a.tol);
    cfg.search = parse_search(a.search);
    cfg.estimator.kind = cfg.test.kind;
    cfg.estimator.restarts = a.restarts;
    cfg.estimator.max_iter = a.max_iter;
    cfg.estimator.tol = a.tol;
    cfg.estimator.threads = run.threads;
    cfg.noise_images = a.noise;
    cfg.identity_mixing = a.identity_mixing;
    cfg.select_q = !a.no_test;
    cfg.seed = derive_seed(run.seed, "unmix");
    run.config = {{"images", a.demo ? json("demo") : json(a.images)},
                  {"size", a.demo ? json(a.size) : json(nullptr)},
                  {"noise_images", cfg.noise_images},
                  {"identity_mixing", cfg.identity_mixing},
                  {"select_q", cfg.select_q},
                  {"search", search_name(cfg.search)},
                  {"test", test_config_json(cfg.test)},
                  {"estimator", estimator_options_json(cfg.estimator)}};

    const ImageUnmixResult res = image_unmix(images, cfg);
    const Index p = res.truth.cols();
    const Matrix mixed = res.truth * res.A.transpose();
    for (Index j = 0; j < p; ++j)
        write_pgm_scaled(run.path("mixed_" + std::to_string(j + 1) + ".pgm"),
                         unvectorize(mixed.col(j), res.rows, res.cols));
    // Components in the order of the truth columns they align with.
    const Matrix& ordered = res.recovered;
    for (Index j = 0; j < p; ++j)
        write_pgm_scaled(run.path("component_" + std::to_string(j + 1) + ".pgm"),
                         unvectorize(ordered.col(j), res.rows, res.cols));

    json report{{"rows", res.rows},
                {"cols", res.cols},
                {"true_images", res.true_images},
                {"p", p},
                {"alignment", perm_json(res.alignment)},
                {"alignment_error", res.alignment_error},
                {"error_norms", vector_to_json(res.error_norms)},
                {"image_norms", vector_to_json(res.image_norms)},
                {"relative_errors", vector_to_json(res.error_norms.cwiseQuotient(res.image_norms))},
                {"exact_recovery", res.exact_recovery},
                {"disc", vector_to_json(res.estimate.disc)},
                {"objective", res.estimate.objective},
                {"converged", res.estimate.converged},
                {"mixing", matrix_to_json(res.A)}};
    report["selection"] = cfg.select_q ? selection_json(res.selection, cfg.test) : json(nullptr);
    write_json(run.path("report.json"), report);
}

struct DemoArgs {
    Index size = 128;
    bool independent = false;
};

void cmd_demo_images(Run& run, const DemoArgs& a) {
    run.config = {{"size", a.size}, {"independent", a.independent}};
    const auto images = a.independent ? independent_images(a.size) : demo_images(a.size);
    for (std::size_t i = 0; i < images.size(); ++i) {
        const std::string name = "image_" + std::to_string(i + 1) + ".pgm";
        write_pgm(run.path(name), images[i]);
    }
}

void write_manifest(const Run& run, const std::vector<std::string>& args, double seconds) {
    json m{{"command", run.command},
           {"args", strip_prefix(args)},
           {"out_prefix", run.out_prefix},
           {"config", run.config},
           {"seed", run.seed},
           {"version", kVersion},
           {"wall_time_seconds", seconds},
           {"outputs", run.outputs}};
    const std::string p = run.out_prefix + "manifest.json";
    const auto parent = std::filesystem::path(p).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    write_json(p, m);
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
    CLI::App app{"Linear non-Gaussian component analysis", "lngca"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    Run run;
    std::string rerun_manifest;
    std::string rerun_prefix;
    std::function<void()> action;

    auto common = [&](CLI::App* sub, bool seeded) {
        sub->add_option("-o,--out-prefix", run.out_prefix, "Prefix prepended to every output file name")
            ->capture_default_str();
        if (seeded) sub->add_option("--seed", run.seed, "Master seed for all randomness")->capture_default_str();
        sub->add_option("--threads", run.threads, "Worker threads (0: LNGCA_THREADS or hardware)");
    };

    WhitenArgs wa;
    auto* w = app.add_subcommand("whiten", "Center and whiten a CSV matrix (Z.csv, H.json)");
    w->add_option("input", wa.input, "CSV, one observation per row")->required();
    w->add_flag("--header", wa.header, "First line is a header");
    common(w, false);
    w->callback([&] { action = [&] { cmd_whiten(run, wa); }; });

    EstimateArgs ea;
    auto* e = app.add_subcommand("estimate", "Estimate q non-Gaussian components (W.csv, components.csv, disc.json)");
    e->add_option("input", ea.input, "CSV, one observation per row")->required();
    e->add_flag("--header", ea.header, "First line is a header");
    e->add_option("-q,--q", ea.q, "Number of non-Gaussian components")->required();
    e->add_option("--kind", ea.kind, "skew|kurt|jb|gpois")->capture_default_str();
    e->add_option("--estimator", ea.estimator, "max|maxmin")->capture_default_str();
    e->add_option("--restarts", ea.restarts, "Random starts (0: one per dimension)")->capture_default_str();
    e->add_option("--max-iter", ea.max_iter)->capture_default_str();
    e->add_option("--tol", ea.tol)->capture_default_str();
    e->add_option("--truth", ea.truth, "CSV with the true p x p mixing matrix A (Y = X A^T, signals first)");
    common(e, true);
    e->callback([&] { action = [&] { cmd_estimate(run, ea); }; });

    TestArgs ta;
    auto* t = app.add_subcommand("test-q", "Select the number of non-Gaussian components (selection.json)");
    t->add_option("input", ta.input, "CSV, one observation per row")->required();
    t->add_flag("--header", ta.header, "First line is a header");
    t->add_option("--kind", ta.kind, "skew|kurt|jb|gpois")->capture_default_str();
    t->add_option("--B", ta.B, "Resamples per test")->capture_default_str();
    t->add_option("--alpha", ta.alpha)->capture_default_str();
    t->add_option("--mode", ta.mode, "current|cumulative")->capture_default_str();
    t->add_option("--search", ta.search, "sweep|binary")->capture_default_str();
    t->add_option("--restarts", ta.restarts, "Random starts per fit")->capture_default_str();
    t->add_option("--max-iter", ta.max_iter)->capture_default_str();
    t->add_option("--tol", ta.tol)->capture_default_str();
    common(t, true);
    t->callback([&] { action = [&] { cmd_test_q(run, ta); }; });

    SimulateArgs sa;
    auto* s = app.add_subcommand("simulate", "Run a simulation experiment (results.csv, summary.json)");
    s->add_option("--experiment", sa.experiment, "1, 2 or 3")->required();
    s->add_option("--trials", sa.trials)->capture_default_str();
    s->add_option("--n", sa.n, "Sample size (default 1000, 500q, 2000 for experiments 1, 2, 3)");
    s->add_option("--q", sa.q, "Non-Gaussian components (default 2)");
    s->add_option("--p", sa.p, "Dimension (default 2q)");
    s->add_option("--kinds", sa.kinds, "Comma-separated discrepancy kinds")->delimiter(',')->capture_default_str();
    s->add_option("--estimators", sa.estimators, "Comma-separated: max,maxmin")->delimiter(',')->capture_default_str();
    s->add_option("--restarts", sa.restarts, "Random starts m (0: p)")->capture_default_str();
    s->add_option("--sources", sa.sources, "Source letters for experiment 1, or 'all'")->capture_default_str();
    s->add_option("--B", sa.B, "Resamples per test (experiment 3)")->capture_default_str();
    s->add_option("--alpha", sa.alpha)->capture_default_str();
    s->add_option("--ks", sa.ks, "Comma-separated k values (experiment 3)")->delimiter(',')->capture_default_str();
    s->add_option("--test-restarts", sa.test_restarts, "Random starts per fit inside tests")->capture_default_str();
    common(s, true);
    s->callback([&] { action = [&] { cmd_simulate(run, sa); }; });

    UnmixArgs ua;
    auto* u = app.add_subcommand("unmix-images", "Mix, test and unmix grayscale images (component_*.pgm, report.json)");
    u->add_option("images", ua.images, "Same-size PGM (P5) or numeric CSV images");
    u->add_flag("--demo", ua.demo, "Use the built-in structured test images");
    u->add_option("--size", ua.size, "Side length of the demo images")->capture_default_str();
    u->add_flag("--identity-mixing", ua.identity_mixing, "Skip the random mixing");
    u->add_option("--noise", ua.noise, "Gaussian noise images to add")->capture_default_str();
    u->add_flag("--no-test", ua.no_test, "Skip q selection");
    u->add_option("--kind", ua.kind, "skew|kurt|jb|gpois")->capture_default_str();
    u->add_option("--B", ua.B, "Resamples per test")->capture_default_str();
    u->add_option("--alpha", ua.alpha)->capture_default_str();
    u->add_option("--mode", ua.mode, "current|cumulative")->capture_default_str();
    u->add_option("--search", ua.search, "sweep|binary")->capture_default_str();
    u->add_option("--restarts", ua.restarts, "Random starts for the final fit")->capture_default_str();
    u->add_option("--test-restarts", ua.test_restarts, "Random starts per fit inside tests")->capture_default_str();
    u->add_option("--max-iter", ua.max_iter)->capture_default_str();
    u->add_option("--tol", ua.tol)->capture_default_str();
    common(u, true);
    u->callback([&] { action = [&] { cmd_unmix_images(run, ua); }; });

    DemoArgs da;
    auto* d = app.add_subcommand("demo-images", "Write the built-in test images as PGM");
    d->add_option("--size", da.size)->capture_default_str();
    d->add_flag("--independent", da.independent, "Exactly independent images for exact-recovery checks");
    common(d, false);
    d->callback([&] { action = [&] { cmd_demo_images(run, da); }; });

    auto* r = app.add_subcommand("rerun", "Re-execute the command recorded in a manifest");
    r->add_option("manifest", rerun_manifest, "manifest.json written by an earlier run")->required();
    r->add_option("-o,--out-prefix", rerun_prefix, "Output prefix (default: the recorded one)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& err) {
        const int code = app.exit(err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (r->parsed()) {
            const json m = read_json(rerun_manifest);
            if (!m.contains("args") || !m.contains("out_prefix"))
                throw InputError(rerun_manifest + ": not a manifest (missing args or out_prefix)");
            std::vector<std::string> replay = m.at("args").get<std::vector<std::string>>();
            replay.push_back("--out-prefix");
            replay.push_back(rerun_prefix.empty() ? m.at("out_prefix").get<std::string>() : rerun_prefix);
            return run_cli(replay);
        }
        run.command = app.get_subcommands().front()->get_name();
        const auto t0 = std::chrono::steady_clock::now();
        action();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        write_manifest(run, args, seconds);
        for (const auto& o : run.outputs) std::cout << o << '\n';
        return 0;
    } catch (const InputError& err) {
        std::cerr << "lngca: input error: " << err.what() << '\n';
        return 2;
    } catch (const SingularityError& err) {
        std::cerr << "lngca: " << err.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& err) {
        std::cerr << "lngca: malformed JSON: " << err.what() << '\n';
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "lngca: error: " << err.what() << '\n';
        return 1;
    }
}

}  // namespace lngca
