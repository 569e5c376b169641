#include "lngca/discrepancy.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace lngca {

void DiscrepancyKind::validate() const {
    if (tag == DiscrepancyTag::GPois) {
        if (gpois_df < 2) throw InputError("gpois_df must be at least 2");
        if (gpois_grid < 50) throw InputError("gpois_grid must be at least 50");
    }
}

std::string DiscrepancyKind::name() const {
    switch (tag) {
        case DiscrepancyTag::Skew: return "Skew";
        case DiscrepancyTag::Kurt: return "Kurt";
        case DiscrepancyTag::JB: return "JB";
        case DiscrepancyTag::GPois: return "GPois";
    }
    return "?";
}

DiscrepancyKind DiscrepancyKind::parse(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    DiscrepancyKind kind;
    if (lower == "skew") kind.tag = DiscrepancyTag::Skew;
    else if (lower == "kurt") kind.tag = DiscrepancyTag::Kurt;
    else if (lower == "jb") kind.tag = DiscrepancyTag::JB;
    else if (lower == "gpois") kind.tag = DiscrepancyTag::GPois;
    else throw InputError("unknown discrepancy kind '" + std::string(text) + "' (skew|kurt|jb|gpois)");
    return kind;
}

Vector standardize(const Eigen::Ref<const Vector>& x) {
    const double mean = x.mean();
    Vector out = x.array() - mean;
    const double var = out.squaredNorm() / static_cast<double>(out.size());
    if (!(var > 0.0)) throw InputError("cannot standardize a constant component");
    out /= std::sqrt(var);
    return out;
}

namespace {

struct Moments {
    double m1 = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
};

Moments raw_moments(const Eigen::Ref<const Vector>& x) {
    Moments m;
    for (Index i = 0; i < x.size(); ++i) {
        const double v = x(i);
        const double v2 = v * v;
        m.m1 += v;
        m.m2 += v2;
        m.m3 += v2 * v;
        m.m4 += v2 * v2;
    }
    const double n = static_cast<double>(x.size());
    m.m1 /= n;
    m.m2 /= n;
    m.m3 /= n;
    m.m4 /= n;
    return m;
}

void add_skew_score(const Eigen::Ref<const Vector>& x, const Moments& m, double weight, Score& s) {
    const double c = weight * 6.0 * m.m3;
    s.h1.array() += c * x.array().square();
    s.h2bar += weight * 12.0 * m.m3 * m.m1;
}

void add_kurt_score(const Eigen::Ref<const Vector>& x, const Moments& m, double weight, Score& s) {
    const double c = weight * 8.0 * (m.m4 - 3.0);
    s.h1.array() += c * x.array().cube();
    s.h2bar += weight * 24.0 * (m.m4 - 3.0) * m.m2;
}

}  // namespace

double skew_stat(const Eigen::Ref<const Vector>& x) {
    const double m3 = raw_moments(x).m3;
    return m3 * m3;
}

double kurt_stat(const Eigen::Ref<const Vector>& x) {
    const double e = raw_moments(x).m4 - 3.0;
    return e * e;
}

double jb_stat(const Eigen::Ref<const Vector>& x) {
    const Moments m = raw_moments(x);
    const double e = m.m4 - 3.0;
    return m.m3 * m.m3 + 0.25 * e * e;
}

double statistic(const DiscrepancyKind& kind, const Eigen::Ref<const Vector>& x) {
    switch (kind.tag) {
        case DiscrepancyTag::Skew: return skew_stat(x);
        case DiscrepancyTag::Kurt: return kurt_stat(x);
        case DiscrepancyTag::JB: return jb_stat(x);
        case DiscrepancyTag::GPois: return gpois_stat(x, kind);
    }
    return 0.0;
}

ComponentEvaluation evaluate(const DiscrepancyKind& kind, const Eigen::Ref<const Vector>& x) {
    ComponentEvaluation out;
    if (kind.tag == DiscrepancyTag::GPois) {
        const TiltModel fit = gpois_fit(x, kind);
        const Index n = x.size();
        out.score.h1.resize(n);
        double gsum = 0.0, g2sum = 0.0;
        for (Index i = 0; i < n; ++i) {
            const TiltPoint v = fit.at(x(i));
            gsum += v.g;
            out.score.h1(i) = v.g1;
            g2sum += v.g2;
        }
        out.value = gsum / static_cast<double>(n);
        out.score.h2bar = g2sum / static_cast<double>(n);
        return out;
    }

    const Moments m = raw_moments(x);
    out.score.h1 = Vector::Zero(x.size());
    const double skew = m.m3 * m.m3;
    const double kurt = (m.m4 - 3.0) * (m.m4 - 3.0);
    switch (kind.tag) {
        case DiscrepancyTag::Skew:
            out.value = skew;
            add_skew_score(x, m, 1.0, out.score);
            break;
        case DiscrepancyTag::Kurt:
            out.value = kurt;
            add_kurt_score(x, m, 1.0, out.score);
            break;
        case DiscrepancyTag::JB:
            out.value = skew + 0.25 * kurt;
            add_skew_score(x, m, 1.0, out.score);
            add_kurt_score(x, m, 0.25, out.score);
            break;
        case DiscrepancyTag::GPois:
            break;
    }
    return out;
}

Score score(const DiscrepancyKind& kind, const Eigen::Ref<const Vector>& x) {
    return evaluate(kind, x).score;
}

double directional_derivative(const DiscrepancyKind& kind, const Matrix& Z,
                              const Eigen::Ref<const Vector>& w, const Eigen::Ref<const Vector>& d) {
    if (w.size() != Z.cols() || d.size() != Z.cols())
        throw InputError("directional_derivative: dimension mismatch");
    const double n = static_cast<double>(Z.rows());
    const Vector raw = Z * w;
    const Vector draw = Z * d;
    const double sigma = std::sqrt((raw.array() - raw.mean()).square().sum() / n);
    const Vector x = standardize(raw);
    // d/de of (raw + e draw - mean) / sd at e = 0.
    const Vector dc = draw.array() - draw.mean();
    const double cov = x.dot(dc) / n;
    const Vector dx = (dc - cov * x) / sigma;
    const Score s = score(kind, x);
    return s.h1.dot(dx) / n;
}

}  // namespace lngca
