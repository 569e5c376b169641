#include "lngca/sources.hpp"

#include "lngca/discrepancy.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <random>

namespace lngca {
namespace {

struct Mixture {
    std::vector<double> weights;
    std::vector<double> means;
    std::vector<double> sds;

    double mean() const {
        double m = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) m += weights[i] * means[i];
        return m;
    }

    // k-th central moment of the mixture, k in {2, 3, 4}.
    double central(int k) const {
        const double c = mean();
        double out = 0.0;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            const double d = means[i] - c;
            const double s2 = sds[i] * sds[i];
            double m = 0.0;
            if (k == 2) m = d * d + s2;
            if (k == 3) m = d * d * d + 3.0 * d * s2;
            if (k == 4) m = d * d * d * d + 6.0 * d * d * s2 + 3.0 * s2 * s2;
            out += weights[i] * m;
        }
        return out;
    }

    double sample(Rng& rng) const {
        std::discrete_distribution<int> pick(weights.begin(), weights.end());
        std::normal_distribution<double> normal(0.0, 1.0);
        const int i = pick(rng);
        return means[i] + sds[i] * normal(rng);
    }
};

struct Entry {
    SourceSpec spec;
    double mean = 0.0;
    double sd = 1.0;
    std::function<double(Rng&)> sample;
};

Entry mixture_entry(char id, const std::string& params, Mixture mix) {
    Entry e;
    e.spec.id = id;
    e.spec.family = "gaussian-mixture";
    e.spec.params = params;
    const double var = mix.central(2);
    e.spec.skewness = mix.central(3) / std::pow(var, 1.5);
    e.spec.kurtosis = mix.central(4) / (var * var);
    e.mean = mix.mean();
    e.sd = std::sqrt(var);
    e.sample = [mix](Rng& rng) { return mix.sample(rng); };
    return e;
}

Entry simple_entry(char id, std::string family, std::string params, double mean, double var, double skew,
                   double kurt, std::function<double(Rng&)> sample) {
    Entry e;
    e.spec = {id, std::move(family), std::move(params), skew, kurt};
    e.mean = mean;
    e.sd = std::sqrt(var);
    e.sample = std::move(sample);
    return e;
}

std::vector<Entry> build_library() {
    const double inf = std::numeric_limits<double>::infinity();
    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<Entry> lib;
    lib.push_back(simple_entry('a', "student-t", "df=3", 0.0, 3.0, nan, inf, [](Rng& rng) {
        return std::student_t_distribution<double>(3.0)(rng);
    }));
    lib.push_back(simple_entry('b', "laplace", "scale=1", 0.0, 2.0, 0.0, 6.0, [](Rng& rng) {
        const double e = std::exponential_distribution<double>(1.0)(rng);
        return std::bernoulli_distribution(0.5)(rng) ? e : -e;
    }));
    lib.push_back(simple_entry('c', "uniform", "[-1,1]", 0.0, 1.0 / 3.0, 0.0, 1.8, [](Rng& rng) {
        return std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    }));
    lib.push_back(simple_entry('d', "student-t", "df=5", 0.0, 5.0 / 3.0, 0.0, 9.0, [](Rng& rng) {
        return std::student_t_distribution<double>(5.0)(rng);
    }));
    lib.push_back(simple_entry('e', "exponential", "rate=1", 1.0, 1.0, 2.0, 9.0, [](Rng& rng) {
        return std::exponential_distribution<double>(1.0)(rng);
    }));
    // Laplace(scale 0.5) bumps at +-1: E x^2 = 1.5, E x^4 = 5.5.
    lib.push_back(simple_entry('f', "laplace-mixture", "centers=+-1,scale=0.5", 0.0, 1.5, 0.0, 5.5 / 2.25,
                               [](Rng& rng) {
                                   const double e = std::exponential_distribution<double>(2.0)(rng);
                                   const double c = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
                                   return c + (std::bernoulli_distribution(0.5)(rng) ? e : -e);
                               }));
    lib.push_back(mixture_entry('g', "w=(.5,.5) mu=(-.5,.5) sd=.15", {{0.5, 0.5}, {-0.5, 0.5}, {0.15, 0.15}}));
    lib.push_back(mixture_entry('h', "w=(.5,.5) mu=(-.5,.5) sd=.4", {{0.5, 0.5}, {-0.5, 0.5}, {0.4, 0.4}}));
    lib.push_back(mixture_entry('i', "w=(.5,.5) mu=(-.5,.5) sd=.5", {{0.5, 0.5}, {-0.5, 0.5}, {0.5, 0.5}}));
    lib.push_back(mixture_entry('j', "w=(.25,.75) mu=(-.5,.5) sd=.15", {{0.25, 0.75}, {-0.5, 0.5}, {0.15, 0.15}}));
    lib.push_back(mixture_entry('k', "w=(.25,.75) mu=(-.7,.5) sd=.4", {{0.25, 0.75}, {-0.7, 0.5}, {0.4, 0.4}}));
    lib.push_back(mixture_entry('l', "w=(.25,.75) mu=(-.7,.5) sd=.5", {{0.25, 0.75}, {-0.7, 0.5}, {0.5, 0.5}}));
    const std::vector<double> equal(4, 0.25);
    const std::vector<double> ramp{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> m_mu{-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    const std::vector<double> n_mu{-1.0, -0.2, 0.2, 1.0};
    const std::vector<double> o_mu{-0.7, -0.2, 0.2, 0.7};
    lib.push_back(mixture_entry('m', "w=equal mu=(-1,-1/3,1/3,1) sd=.16", {equal, m_mu, std::vector<double>(4, 0.16)}));
    lib.push_back(mixture_entry('n', "w=equal mu=(-1,-.2,.2,1) sd=.2", {equal, n_mu, std::vector<double>(4, 0.2)}));
    lib.push_back(mixture_entry('o', "w=equal mu=(-.7,-.2,.2,.7) sd=.2", {equal, o_mu, std::vector<double>(4, 0.2)}));
    lib.push_back(mixture_entry('p', "w=(.1,.2,.3,.4) mu=(-1,-1/3,1/3,1) sd=.16", {ramp, m_mu, std::vector<double>(4, 0.16)}));
    lib.push_back(mixture_entry('q', "w=(.1,.2,.3,.4) mu=(-1,-.2,.2,1) sd=.2", {ramp, n_mu, std::vector<double>(4, 0.2)}));
    lib.push_back(mixture_entry('r', "w=(.1,.2,.3,.4) mu=(-.7,-.2,.2,.7) sd=.2", {ramp, o_mu, std::vector<double>(4, 0.2)}));
    return lib;
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> lib = build_library();
    return lib;
}

const Entry& entry(char id) {
    if (id < 'a' || id > 'r') throw InputError(std::string("unknown source id '") + id + "' (expected a..r)");
    return entries()[static_cast<std::size_t>(id - 'a')];
}

}  // namespace

const std::vector<SourceSpec>& source_library() {
    static const std::vector<SourceSpec> specs = [] {
        std::vector<SourceSpec> out;
        for (const auto& e : entries()) out.push_back(e.spec);
        return out;
    }();
    return specs;
}

const SourceSpec& source_spec(char id) {
    return entry(id).spec;
}

std::vector<SourceSpec> source_specs(std::string_view ids) {
    if (ids == "all") return source_library();
    std::vector<SourceSpec> out;
    for (char c : ids) {
        if (c == ',' || c == ' ') continue;
        out.push_back(source_spec(c));
    }
    if (out.empty()) throw InputError("no source ids given");
    return out;
}

Vector draw_source(const SourceSpec& spec, Index n, Rng& rng) {
    const Entry& e = entry(spec.id);
    Vector out(n);
    for (Index i = 0; i < n; ++i) out(i) = (e.sample(rng) - e.mean) / e.sd;
    return out;
}

SampleMatrix gen_sources(const std::vector<SourceSpec>& specs, Index n, Rng& rng) {
    if (n < 2) throw InputError("gen_sources: n must be at least 2");
    if (specs.empty()) throw InputError("gen_sources: no sources requested");
    Matrix S(n, static_cast<Index>(specs.size()));
    for (std::size_t j = 0; j < specs.size(); ++j) S.col(static_cast<Index>(j)) = standardize(draw_source(specs[j], n, rng));
    return SampleMatrix(std::move(S));
}

Matrix gaussian_noise(Index n, Index cols, Rng& rng) {
    Matrix G = standard_normal(n, cols, rng);
    for (Index j = 0; j < cols; ++j) G.col(j) = standardize(G.col(j));
    return G;
}

}  // namespace lngca
