#pragma once

#include "lngca/types.hpp"

#include <string>
#include <string_view>

namespace lngca {

enum class DiscrepancyTag { Skew, Kurt, JB, GPois };

/// Which discrepancy-from-Gaussianity measure to use. The GPois fields only
/// matter for the GPois tag.
struct DiscrepancyKind {
    DiscrepancyTag tag = DiscrepancyTag::JB;
    int gpois_df = 6;
    int gpois_grid = 500;

    void validate() const;
    std::string name() const;
    /// Parses "skew", "kurt", "jb" or "gpois" (case-insensitive).
    static DiscrepancyKind parse(std::string_view text);

    friend bool operator==(const DiscrepancyKind&, const DiscrepancyKind&) = default;
};

struct TiltPoint {
    double g = 0.0;
    double g1 = 0.0;
    double g2 = 0.0;
};

/// Exponentially tilted Gaussian fit phi(x) exp(g(x)), tabulated on the bin
/// centers of the histogram used for the fit. The cubic spline itself is kept
/// so that g and its derivatives can be evaluated exactly anywhere.
struct TiltModel {
    Vector grid;
    Vector g;
    Vector g1;
    Vector g2;
    int irls_iterations = 0;
    double lambda = 0.0;      ///< roughness penalty weight selected for the target df
    double effective_df = 0.0;

    Vector coef;              ///< B-spline coefficients on uniform knots over [lo, lo + width]
    double lo = 0.0;
    double width = 1.0;
    double level = 0.0;       ///< constant added after fitting so the density integrates to 1

    /// g, g' and g'' of the fitted spline at x (end pieces extended outside the range).
    TiltPoint at(double x) const;
    /// Linear interpolation of a tabulated curve at x (clamped to the grid).
    double interpolate(const Vector& values, double x) const;
    /// Trapezoid-rule integral of phi * exp(g) over the grid.
    double mass() const;
};

/// Fixed-point ingredients for one component: per-sample first derivative of
/// the component's contribution and the mean second derivative.
struct Score {
    Vector h1;
    double h2bar = 0.0;
};

struct ComponentEvaluation {
    double value = 0.0;
    Score score;
};

/// Rescales x to mean 0 and (1/n) variance 1. Throws InputError on a
/// constant vector.
Vector standardize(const Eigen::Ref<const Vector>& x);

/// Squared third moment ((1/n) sum x^3)^2 of a standardized sample.
double skew_stat(const Eigen::Ref<const Vector>& x);
/// Squared excess kurtosis ((1/n) sum x^4 - 3)^2 of a standardized sample.
double kurt_stat(const Eigen::Ref<const Vector>& x);
/// skew_stat + kurt_stat / 4.
double jb_stat(const Eigen::Ref<const Vector>& x);

/// Penalized Poisson regression of histogram counts onto a cubic spline log
/// tilt, smoothed to kind.gpois_df effective degrees of freedom.
TiltModel gpois_fit(const Eigen::Ref<const Vector>& x, const DiscrepancyKind& kind = {DiscrepancyTag::GPois});
/// Mean of the fitted log tilt at the data.
double gpois_stat(const Eigen::Ref<const Vector>& x, const DiscrepancyKind& kind = {DiscrepancyTag::GPois});

/// Statistic of the requested kind on a standardized sample.
double statistic(const DiscrepancyKind& kind, const Eigen::Ref<const Vector>& x);

/// Score of the requested kind. Moment kinds freeze m3 and m4 at their
/// current values (Skew: h = 2 m3 x^3; Kurt: h = 2 (m4 - 3) x^4).
Score score(const DiscrepancyKind& kind, const Eigen::Ref<const Vector>& x);

/// Statistic and score from a single fit.
ComponentEvaluation evaluate(const DiscrepancyKind& kind, const Eigen::Ref<const Vector>& x);

/// Analytic derivative along d of statistic(standardize(Z w)) with respect
/// to w, assembled from the score and the Jacobian of the standardization.
double directional_derivative(const DiscrepancyKind& kind, const Matrix& Z,
                              const Eigen::Ref<const Vector>& w, const Eigen::Ref<const Vector>& d);

}  // namespace lngca
