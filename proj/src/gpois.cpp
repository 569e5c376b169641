// Log-tilt estimation for the GPois discrepancy.
//
// The sample is binned on an equal-width grid and the counts are modelled as
// Poisson with log mean  log n + log(bin width) + log phi(center) + g(center).
// g is a cubic B-spline on uniform knots spanning the grid, fitted by
// penalized IRLS with roughness penalty lambda * int g''^2. lambda is chosen
// so that the smoother trace at the converged weights equals df + 1 (df counts
// the linear and nonlinear parts, +1 for the level).

#include "lngca/discrepancy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

namespace lngca {
namespace {

constexpr int kBasisSize = 20;
constexpr int kMaxIrls = 20;
constexpr double kDevianceTol = 1e-6;
constexpr double kRangePad = 0.1;
constexpr int kMaxLambdaSteps = 8;
constexpr int kMaxHalvings = 30;
constexpr double kDfTol = 0.02;

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

using BasisMatrix = Eigen::Matrix<double, kBasisSize, kBasisSize>;
using BasisVector = Eigen::Matrix<double, kBasisSize, 1>;

// Uniform cubic B-spline pieces on local coordinate u in [0, 1).
std::array<double, 4> bspline_values(double u) {
    const double v = 1.0 - u;
    return {v * v * v / 6.0, (3.0 * u * u * u - 6.0 * u * u + 4.0) / 6.0,
            (-3.0 * u * u * u + 3.0 * u * u + 3.0 * u + 1.0) / 6.0, u * u * u / 6.0};
}

std::array<double, 4> bspline_first(double u) {
    return {-0.5 * (1.0 - u) * (1.0 - u), 0.5 * (3.0 * u * u - 4.0 * u),
            0.5 * (-3.0 * u * u + 2.0 * u + 1.0), 0.5 * u * u};
}

std::array<double, 4> bspline_second(double u) {
    return {1.0 - u, 3.0 * u - 2.0, 1.0 - 3.0 * u, u};
}

// int_0^1 g''(t)^2 dt in basis coefficients, knots spaced 1 / (K - 3).
BasisMatrix roughness_penalty() {
    constexpr int intervals = kBasisSize - 3;
    const double h = 1.0 / intervals;
    // Products of linear pieces integrate exactly under Simpson's rule.
    const auto b0 = bspline_second(0.0);
    const auto bm = bspline_second(0.5);
    const auto b1 = bspline_second(1.0);
    BasisMatrix P = BasisMatrix::Zero();
    for (int s = 0; s < intervals; ++s)
        for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b)
                P(s + a, s + b) += (b0[a] * b0[b] + 4.0 * bm[a] * bm[b] + b1[a] * b1[b]) / (6.0 * h * h * h);
    return P;
}

struct GridPoint {
    int first;  // index of the first of four active basis functions
    double u;   // local coordinate within the knot interval
};

double smoother_trace(const BasisVector& eig, double log_lambda) {
    const double lambda = std::exp(log_lambda);
    double sum = 0.0;
    for (int i = 0; i < kBasisSize; ++i) sum += 1.0 / (1.0 + lambda * std::max(eig(i), 0.0));
    return sum;
}

double solve_log_lambda(const BasisVector& eig, double target_df) {
    double lo = -40.0, hi = 60.0;
    if (smoother_trace(eig, lo) <= target_df) return lo;
    if (smoother_trace(eig, hi) >= target_df) return hi;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (smoother_trace(eig, mid) > target_df) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TiltPoint TiltModel::at(double x) const {
    constexpr int intervals = kBasisSize - 3;
    const double t = (x - lo) / width * intervals;
    const int s = std::clamp(static_cast<int>(std::floor(t)), 0, intervals - 1);
    const double u = t - s;
    const auto b0 = bspline_values(u);
    const auto b1 = bspline_first(u);
    const auto b2 = bspline_second(u);
    TiltPoint out;
    for (int a = 0; a < 4; ++a) {
        out.g += b0[a] * coef(s + a);
        out.g1 += b1[a] * coef(s + a);
        out.g2 += b2[a] * coef(s + a);
    }
    const double du = intervals / width;
    out.g += level;
    out.g1 *= du;
    out.g2 *= du * du;
    return out;
}

double TiltModel::interpolate(const Vector& values, double x) const {
    const double x0 = grid(0);
    const double step = grid(1) - grid(0);
    const double pos = (x - x0) / step;
    const Index last = grid.size() - 2;
    const Index l = std::clamp<Index>(static_cast<Index>(std::floor(pos)), 0, last);
    const double f = std::clamp(pos - static_cast<double>(l), 0.0, 1.0);
    return values(l) + f * (values(l + 1) - values(l));
}

double TiltModel::mass() const {
    const double step = grid(1) - grid(0);
    double sum = 0.0;
    for (Index l = 0; l < grid.size(); ++l) {
        const double dens = std::exp(g(l) - 0.5 * grid(l) * grid(l) - kLogSqrt2Pi);
        sum += (l == 0 || l == grid.size() - 1) ? 0.5 * dens : dens;
    }
    return sum * step;
}

TiltModel gpois_fit(const Eigen::Ref<const Vector>& x, const DiscrepancyKind& kind) {
    kind.validate();
    const Index n = x.size();
    if (n < 2) throw InputError("gpois_fit: need at least 2 samples");
    if (!x.allFinite()) throw InputError("gpois_fit: non-finite sample");

    const int L = kind.gpois_grid;
    const double lo = x.minCoeff() - kRangePad;
    const double hi = x.maxCoeff() + kRangePad;
    const double width = hi - lo;
    const double step = width / L;

    Vector counts = Vector::Zero(L);
    for (Index i = 0; i < n; ++i) {
        const int bin = std::min(L - 1, static_cast<int>((x(i) - lo) / step));
        counts(bin) += 1.0;
    }

    TiltModel model;
    model.grid.resize(L);
    Vector offset(L);
    std::vector<GridPoint> points(L);
    std::vector<std::array<double, 4>> basis(L);
    constexpr int intervals = kBasisSize - 3;
    for (int l = 0; l < L; ++l) {
        const double c = lo + (l + 0.5) * step;
        model.grid(l) = c;
        offset(l) = std::log(static_cast<double>(n) * step) - 0.5 * c * c - kLogSqrt2Pi;
        const double t = (l + 0.5) / L * intervals;
        const int s = std::min(intervals - 1, static_cast<int>(t));
        points[l] = {s, t - s};
        basis[l] = bspline_values(t - s);
    }

    const BasisMatrix P = roughness_penalty();
    const double target_df = std::min<double>(kind.gpois_df + 1, kBasisSize);

    Vector eta = (counts.array() + 0.1).log();
    Vector mu = eta.array().exp();
    BasisVector coef = BasisVector::Zero();
    BasisMatrix G;
    BasisVector rhs;

    // Weighted normal equations of the current IRLS working model.
    auto build = [&] {
        G.setZero();
        rhs.setZero();
        for (int l = 0; l < L; ++l) {
            const double w = mu(l);
            const double z = eta(l) - offset(l) + (counts(l) - mu(l)) / mu(l);
            const auto& b = basis[l];
            const int s = points[l].first;
            for (int a = 0; a < 4; ++a) {
                const double wb = w * b[a];
                rhs(s + a) += wb * z;
                for (int c = 0; c <= a; ++c) G(s + a, s + c) += wb * b[c];
            }
        }
        for (int a = 0; a < kBasisSize; ++a)
            for (int c = a + 1; c < kBasisSize; ++c) G(a, c) = G(c, a);
        // Tail basis functions may carry almost no weight.
        G.diagonal().array() += 1e-10 * G.diagonal().maxCoeff();
    };

    // Eigenvalues of the penalty in the metric of G: the smoother trace at
    // any lambda is sum 1 / (1 + lambda e_i).
    auto penalty_spectrum = [&]() -> BasisVector {
        Eigen::LLT<BasisMatrix> llt(G);
        if (llt.info() != Eigen::Success)
            throw ConvergenceError("gpois_fit: weighted Gram matrix is not positive definite", 0.0);
        const BasisMatrix Linv = llt.matrixL().solve(BasisMatrix::Identity());
        return Eigen::SelfAdjointEigenSolver<BasisMatrix>(Linv * P * Linv.transpose(), Eigen::EigenvaluesOnly)
            .eigenvalues();
    };

    // Moves the linear predictor to coef and returns the deviance.
    auto update = [&](const BasisVector& c) {
        double deviance = 0.0;
        for (int l = 0; l < L; ++l) {
            const auto& b = basis[l];
            const int s = points[l].first;
            double gl = 0.0;
            for (int a = 0; a < 4; ++a) gl += b[a] * c(s + a);
            eta(l) = std::min(offset(l) + gl, 700.0);
            mu(l) = std::exp(eta(l));
            const double y = counts(l);
            deviance += (y > 0.0 ? y * std::log(y / mu(l)) : 0.0) - (y - mu(l));
        }
        return 2.0 * deviance;
    };

    // Penalized IRLS at fixed lambda, warm-started from the current state.
    // A step that raises the penalized deviance is halved until it does not.
    bool have_coef = false;
    auto irls = [&](double lambda) {
        double objective = std::numeric_limits<double>::infinity();
        if (have_coef) objective = update(coef) + lambda * coef.dot(P * coef);
        double change = std::numeric_limits<double>::infinity();
        for (int iter = 1; iter <= kMaxIrls; ++iter) {
            build();
            Eigen::LLT<BasisMatrix> solver(G + lambda * P);
            if (solver.info() != Eigen::Success)
                throw ConvergenceError("gpois_fit: penalized system is not positive definite", change);
            BasisVector next = solver.solve(rhs);
            double next_objective = update(next) + lambda * next.dot(P * next);
            for (int half = 0; have_coef && half < kMaxHalvings && !(next_objective <= objective); ++half) {
                next = 0.5 * (next + coef);
                next_objective = update(next) + lambda * next.dot(P * next);
            }
            if (!std::isfinite(next_objective))
                throw ConvergenceError("gpois_fit: deviance is not finite", change);
            coef = next;
            have_coef = true;
            change = std::abs(next_objective - objective) / (std::abs(next_objective) + 0.1);
            objective = next_objective;
            model.irls_iterations += 1;
            if (change < kDevianceTol) return;
        }
        std::ostringstream msg;
        msg << "gpois_fit: penalized IRLS did not converge in " << kMaxIrls
            << " iterations (last relative deviance change " << change << ")";
        throw ConvergenceError(msg.str(), change);
    };

    // The df-matching lambda depends on the converged weights, which depend
    // on lambda. Plain substitution oscillates on heavy tails, so the fixed
    // point is found by secant steps on r(s) = selected(s) - s, s = log lambda.
    build();
    double log_lambda = solve_log_lambda(penalty_spectrum(), target_df);
    double prev_log_lambda = 0.0, prev_residual = 0.0;
    for (int outer = 0; outer < kMaxLambdaSteps; ++outer) {
        irls(std::exp(log_lambda));
        build();
        const BasisVector spectrum = penalty_spectrum();
        model.lambda = std::exp(log_lambda);
        model.effective_df = smoother_trace(spectrum, log_lambda);
        if (std::abs(model.effective_df - target_df) < kDfTol) break;
        const double residual = solve_log_lambda(spectrum, target_df) - log_lambda;
        double next = log_lambda + residual;
        if (outer > 0 && std::abs(residual - prev_residual) > 1e-12)
            next = log_lambda - residual * (log_lambda - prev_log_lambda) / (residual - prev_residual);
        prev_log_lambda = log_lambda;
        prev_residual = residual;
        log_lambda = std::clamp(next, log_lambda - 3.0, log_lambda + 3.0);
    }

    model.coef = coef;
    model.lo = lo;
    model.width = width;
    model.g.resize(L);
    model.g1.resize(L);
    model.g2.resize(L);
    for (int l = 0; l < L; ++l) {
        const TiltPoint v = model.at(model.grid(l));
        model.g(l) = v.g;
        model.g1(l) = v.g1;
        model.g2(l) = v.g2;
    }
    const double shift = -std::log(model.mass());
    model.level = shift;
    model.g.array() += shift;
    return model;
}

double gpois_stat(const Eigen::Ref<const Vector>& x, const DiscrepancyKind& kind) {
    DiscrepancyKind k = kind;
    k.tag = DiscrepancyTag::GPois;
    return evaluate(k, x).value;
}

}  // namespace lngca
