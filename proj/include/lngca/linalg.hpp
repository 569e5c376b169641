#pragma once

#include "lngca/rng.hpp"
#include "lngca/types.hpp"

#include <utility>

namespace lngca {

/// Centered data and the uncorrelating map H = Sigma^{-1/2} (symmetric root).
struct WhiteningResult {
    SampleMatrix Z;
    Matrix H;
    Matrix Hinv;
    Vector mean;
};

/// Relative eigenvalue floor below which a covariance is treated as singular.
inline constexpr double kSingularityFloor = 1e-12;

/// Column means (1/n).
Vector column_means(const Matrix& X);

/// Sample covariance with divisor n, about the column means.
Matrix sample_covariance(const Matrix& X);

/// Subtracts column means. Returns the centered data and the means removed.
std::pair<SampleMatrix, Vector> center(const SampleMatrix& X);

/// Centers X and maps it to identity sample covariance: Z = (X - mean) H^T
/// with H the symmetric inverse square root of the covariance, obtained from
/// its eigendecomposition. Throws SingularityError when the smallest
/// eigenvalue is below kSingularityFloor times the largest.
WhiteningResult whiten(const SampleMatrix& X);

/// Symmetric orthogonalization (W W^T)^{-1/2} W computed from the thin SVD
/// W = U S V^T as U V^T. Preserves the row space. Throws InputError if W is
/// rank deficient (smallest singular value below 1e-12 of the largest).
OrthonormalRows sym_orthogonalize(const Matrix& W);

/// q x p matrix with orthonormal rows: the symmetric orthogonalization of a
/// matrix of independent standard Gaussians.
OrthonormalRows random_orthonormal(Index p, Index q, Rng& rng);

/// p x p mixing matrix U D V^T with U, V random orthogonal and singular
/// values spaced linearly on [1, c], c ~ Uniform[1, 2].
Matrix random_mixing(Index p, Rng& rng);

struct Assignment {
    std::vector<int> cols;  ///< cols[i] = column assigned to row i
    double total = 0.0;
};

/// Minimum-cost perfect matching on a square cost matrix (Hungarian method
/// with potentials, O(q^3)).
Assignment hungarian(const Matrix& cost);

struct SignedPermError {
    double err = 0.0;
    SignedPermutation Q;
};

/// (1/sqrt(pq)) min over row signed permutations of ||W0 - Q(What)||_F^2.
/// The matching is solved exactly with hungarian on
/// c[i][j] = min(||w0_i - w_j||^2, ||w0_i + w_j||^2).
SignedPermError signed_perm_error(const Matrix& W0, const Matrix& What);
inline SignedPermError signed_perm_error(const OrthonormalRows& W0, const OrthonormalRows& What) {
    return signed_perm_error(W0.matrix(), What.matrix());
}

}  // namespace lngca
