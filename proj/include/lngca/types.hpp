#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace lngca {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Malformed or out-of-contract input (shapes, non-finite values, bad flags).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Covariance too close to singular to whiten.
class SingularityError : public std::runtime_error {
public:
    SingularityError(const std::string& what, double eigenvalue)
        : std::runtime_error(what), eigenvalue_(eigenvalue) {}
    double eigenvalue() const noexcept { return eigenvalue_; }

private:
    double eigenvalue_;
};

/// An iterative solver stopped without meeting its convergence rule.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_change)
        : std::runtime_error(what), last_change_(last_change) {}
    double last_change() const noexcept { return last_change_; }

private:
    double last_change_;
};

/// Estimator failure that could not be recovered by jitter or restarts.
class EstimationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// n x p block of observations, one row per sample. Construction checks
/// n >= 2, p >= 1 and that every entry is finite.
class SampleMatrix {
public:
    SampleMatrix() = default;
    explicit SampleMatrix(Matrix data);

    const Matrix& data() const noexcept { return data_; }
    Index n() const noexcept { return data_.rows(); }
    Index p() const noexcept { return data_.cols(); }
    auto col(Index j) const { return data_.col(j); }

private:
    Matrix data_;
};

/// q x p matrix whose rows are orthonormal (W W^T = I_q within 1e-8).
class OrthonormalRows {
public:
    static constexpr double kTolerance = 1e-8;

    OrthonormalRows() = default;
    explicit OrthonormalRows(Matrix w);

    const Matrix& matrix() const noexcept { return w_; }
    Index rows() const noexcept { return w_.rows(); }
    Index cols() const noexcept { return w_.cols(); }
    auto row(Index i) const { return w_.row(i); }

private:
    Matrix w_;
};

/// Row reordering plus sign flips. Row i of the reference is matched with
/// row perm[i] of the candidate, multiplied by signs[i].
struct SignedPermutation {
    std::vector<int> perm;
    std::vector<int> signs;

    std::size_t size() const noexcept { return perm.size(); }
    bool valid() const;
    /// Applies the permutation to the rows of m: out.row(i) = signs[i] * m.row(perm[i]).
    Matrix apply_rows(const Matrix& m) const;
    /// Same reordering applied to columns: out.col(i) = signs[i] * m.col(perm[i]).
    Matrix apply_cols(const Matrix& m) const;
    static SignedPermutation identity(std::size_t q);
};

}  // namespace lngca
