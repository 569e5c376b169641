#include "lngca/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace lngca {

SampleMatrix::SampleMatrix(Matrix data) : data_(std::move(data)) {
    if (data_.rows() < 2) throw InputError("sample matrix needs at least 2 rows");
    if (data_.cols() < 1) throw InputError("sample matrix needs at least 1 column");
    if (!data_.allFinite()) throw InputError("sample matrix contains non-finite entries");
}

OrthonormalRows::OrthonormalRows(Matrix w) : w_(std::move(w)) {
    if (w_.rows() > w_.cols())
        throw InputError("orthonormal rows: more rows than columns");
    if (!w_.allFinite()) throw InputError("orthonormal rows: non-finite entries");
    const Index q = w_.rows();
    const double dev = (w_ * w_.transpose() - Matrix::Identity(q, q)).norm();
    if (dev > kTolerance) {
        std::ostringstream msg;
        msg << "rows are not orthonormal (||W W^T - I||_F = " << dev << ")";
        throw InputError(msg.str());
    }
}

bool SignedPermutation::valid() const {
    if (perm.size() != signs.size()) return false;
    std::vector<char> seen(perm.size(), 0);
    for (std::size_t i = 0; i < perm.size(); ++i) {
        const int j = perm[i];
        if (j < 0 || static_cast<std::size_t>(j) >= perm.size() || seen[j]) return false;
        seen[j] = 1;
        if (signs[i] != 1 && signs[i] != -1) return false;
    }
    return true;
}

Matrix SignedPermutation::apply_rows(const Matrix& m) const {
    Matrix out(static_cast<Index>(perm.size()), m.cols());
    for (std::size_t i = 0; i < perm.size(); ++i)
        out.row(static_cast<Index>(i)) = signs[i] * m.row(perm[i]);
    return out;
}

Matrix SignedPermutation::apply_cols(const Matrix& m) const {
    Matrix out(m.rows(), static_cast<Index>(perm.size()));
    for (std::size_t i = 0; i < perm.size(); ++i)
        out.col(static_cast<Index>(i)) = signs[i] * m.col(perm[i]);
    return out;
}

SignedPermutation SignedPermutation::identity(std::size_t q) {
    SignedPermutation out;
    out.perm.resize(q);
    std::iota(out.perm.begin(), out.perm.end(), 0);
    out.signs.assign(q, 1);
    return out;
}

Vector column_means(const Matrix& X) {
    return X.colwise().mean().transpose();
}

Matrix sample_covariance(const Matrix& X) {
    const Matrix Xc = X.rowwise() - X.colwise().mean();
    return (Xc.transpose() * Xc) / static_cast<double>(X.rows());
}

std::pair<SampleMatrix, Vector> center(const SampleMatrix& X) {
    Vector mean = column_means(X.data());
    Matrix Xc = X.data().rowwise() - mean.transpose();
    return {SampleMatrix(std::move(Xc)), std::move(mean)};
}

WhiteningResult whiten(const SampleMatrix& X) {
    auto [Xc, mean] = center(X);
    const Matrix cov = (Xc.data().transpose() * Xc.data()) / static_cast<double>(Xc.n());

    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) throw SingularityError("covariance eigendecomposition failed", 0.0);
    const Vector& lambda = eig.eigenvalues();  // ascending
    const double largest = lambda(lambda.size() - 1);
    const double smallest = lambda(0);
    if (!(largest > 0.0) || smallest < kSingularityFloor * largest) {
        std::ostringstream msg;
        msg << "sample covariance is singular: smallest eigenvalue " << smallest
            << " (largest " << largest << ")";
        throw SingularityError(msg.str(), smallest);
    }

    const Matrix& V = eig.eigenvectors();
    const Vector inv_root = lambda.array().rsqrt();
    const Vector root = lambda.array().sqrt();
    WhiteningResult out;
    out.H = V * inv_root.asDiagonal() * V.transpose();
    out.Hinv = V * root.asDiagonal() * V.transpose();
    out.Z = SampleMatrix(Xc.data() * out.H.transpose());
    out.mean = std::move(mean);
    return out;
}

OrthonormalRows sym_orthogonalize(const Matrix& W) {
    if (W.rows() == 0 || W.rows() > W.cols())
        throw InputError("sym_orthogonalize: need 1 <= rows <= cols");
    if (!W.allFinite()) throw InputError("sym_orthogonalize: non-finite entries");
    Eigen::BDCSVD<Matrix> svd(W, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Vector& s = svd.singularValues();
    if (!(s(0) > 0.0) || s(s.size() - 1) < 1e-12 * s(0)) {
        std::ostringstream msg;
        msg << "sym_orthogonalize: rank-deficient input (singular values " << s(0) << " .. "
            << s(s.size() - 1) << ")";
        throw InputError(msg.str());
    }
    return OrthonormalRows(svd.matrixU() * svd.matrixV().transpose());
}

OrthonormalRows random_orthonormal(Index p, Index q, Rng& rng) {
    if (p < 1 || q < 1) throw InputError("random_orthonormal: p and q must be positive");
    if (q > p) throw InputError("random_orthonormal: q must not exceed p");
    const Matrix G = standard_normal(p, q, rng);
    return sym_orthogonalize(G.transpose());
}

Matrix random_mixing(Index p, Rng& rng) {
    if (p < 1) throw InputError("random_mixing: p must be positive");
    std::uniform_real_distribution<double> unif(1.0, 2.0);
    const double cond = unif(rng);
    const Matrix U = random_orthonormal(p, p, rng).matrix();
    const Matrix V = random_orthonormal(p, p, rng).matrix();
    Vector d(p);
    for (Index i = 0; i < p; ++i)
        d(i) = p == 1 ? 1.0 : cond - (cond - 1.0) * static_cast<double>(i) / static_cast<double>(p - 1);
    return U * d.asDiagonal() * V.transpose();
}

Assignment hungarian(const Matrix& cost) {
    if (cost.rows() != cost.cols()) throw InputError("hungarian: cost matrix must be square");
    if (!cost.allFinite()) throw InputError("hungarian: cost matrix has non-finite entries");
    const int n = static_cast<int>(cost.rows());
    Assignment out;
    if (n == 0) return out;

    // Shortest augmenting path with row/column potentials; 1-based scratch.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            double delta = inf;
            int j1 = 0;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    out.cols.assign(n, -1);
    for (int j = 1; j <= n; ++j) out.cols[match[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i) out.total += cost(i, out.cols[i]);
    return out;
}

SignedPermError signed_perm_error(const Matrix& W0, const Matrix& What) {
    if (W0.rows() != What.rows() || W0.cols() != What.cols())
        throw InputError("signed_perm_error: dimension mismatch");
    if (W0.rows() == 0 || W0.cols() == 0) throw InputError("signed_perm_error: empty input");
    const Index q = W0.rows();
    const Index p = W0.cols();

    Matrix cost(q, q);
    Eigen::MatrixXi sign(q, q);
    for (Index i = 0; i < q; ++i) {
        for (Index j = 0; j < q; ++j) {
            const double plus = (W0.row(i) - What.row(j)).squaredNorm();
            const double minus = (W0.row(i) + What.row(j)).squaredNorm();
            cost(i, j) = std::min(plus, minus);
            sign(i, j) = minus < plus ? -1 : 1;
        }
    }
    const Assignment a = hungarian(cost);

    SignedPermError out;
    out.Q.perm = a.cols;
    out.Q.signs.resize(q);
    for (Index i = 0; i < q; ++i) out.Q.signs[i] = sign(i, a.cols[i]);
    out.err = a.total / std::sqrt(static_cast<double>(p * q));
    return out;
}

}  // namespace lngca
