#pragma once

#include <cmath>
#include <vector>

#include "ymh/common.hpp"
#include "ymh/rng.hpp"

namespace ymh {

// Tolerances for the manifold membership checks.
inline constexpr double kOrthTol = 1e-10;
inline constexpr double kSkewTol = 1e-12;
inline constexpr double kSphereTol = 1e-12;

/// Hilbert-Schmidt inner product Tr(a b^t).
inline double hs_inner(const Matrix& a, const Matrix& b) {
    require(a.rows() == b.rows() && a.cols() == b.cols(), "hs_inner: dimension mismatch");
    return (a.array() * b.array()).sum();
}

inline double hs_norm(const Matrix& a) { return a.norm(); }

inline bool is_special_orthogonal(const Matrix& q, double tol = kOrthTol) {
    if (q.rows() != q.cols()) return false;
    const int n = static_cast<int>(q.rows());
    if ((q * q.transpose() - Matrix::Identity(n, n)).norm() > tol) return false;
    return q.determinant() >= 0.5;
}

inline bool is_skew(const Matrix& x, double tol = kSkewTol) {
    return x.rows() == x.cols() && (x + x.transpose()).norm() <= tol;
}

inline bool is_unit_vector(const Vector& v, double tol = kSphereTol) {
    return std::abs(v.squaredNorm() - 1.0) <= tol;
}

/// Orthonormal basis of so(n) under the HS inner product, ordered
/// lexicographically over index pairs (m, k) with m < k:
/// v_{mk} = (e_{mk} - e_{km}) / sqrt(2).
inline std::vector<Matrix> so_basis(int n) {
    require(n >= 2, "so_basis: invalid-dimension (n must be >= 2)");
    std::vector<Matrix> basis;
    basis.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    const double s = 1.0 / std::sqrt(2.0);
    for (int m = 0; m < n; ++m) {
        for (int k = m + 1; k < n; ++k) {
            Matrix v = Matrix::Zero(n, n);
            v(m, k) = s;
            v(k, m) = -s;
            basis.push_back(std::move(v));
        }
    }
    return basis;
}

/// Orthogonal projection of a square matrix onto the skew part.
inline Matrix project_skew(const Matrix& m) {
    require(m.rows() == m.cols(), "project_skew: square input required");
    return 0.5 * (m - m.transpose());
}

/// Matrix exponential by scaling-and-squaring with a Taylor series summed
/// to machine precision. Inputs are skew matrices of modest norm (drift
/// increments), for which this is accurate to ~1e-15 and cheap. Reuses a
/// per-thread workspace since this sits inside every sweep and step.
inline void matrix_exp_into(Matrix& result, const Matrix& x) {
    thread_local Matrix a, term, tmp;
    const int n = static_cast<int>(x.rows());
    const double norm = x.norm();
    int squarings = 0;
    double scale = 1.0;
    if (norm > 0.25) {
        squarings = static_cast<int>(std::ceil(std::log2(norm / 0.25)));
        scale = std::ldexp(1.0, -squarings);
    }
    a = scale * x;
    result = Matrix::Identity(n, n);
    term = Matrix::Identity(n, n);
    tmp.resize(n, n);
    for (int k = 1; k <= 30; ++k) {
        tmp.noalias() = term * a;
        term = tmp / static_cast<double>(k);
        result += term;
        if (term.norm() <= 1e-17 * result.norm()) break;
    }
    for (int i = 0; i < squarings; ++i) {
        tmp.noalias() = result * result;
        result.swap(tmp);
    }
}

inline Matrix matrix_exp(const Matrix& x) {
    Matrix result;
    matrix_exp_into(result, x);
    return result;
}

/// exp(x) for skew x; lands on SO(n).
inline Matrix group_exp(const Matrix& x) {
    require(x.rows() == x.cols(), "group_exp: square input required");
    return matrix_exp(x);
}

/// Nearest orthogonal matrix (polar factor), computed from the symmetric
/// square root of m^t m. Repairs numerical drift off the group.
inline Matrix retract_orthogonal(const Matrix& m) {
    require(m.rows() == m.cols(), "retract_orthogonal: square input required");
    const int n = static_cast<int>(m.rows());
    Eigen::SelfAdjointEigenSolver<Matrix> es(m.transpose() * m);
    if (es.info() != Eigen::Success)
        throw NumericError("retraction-failure: eigendecomposition failed");
    const Vector& ev = es.eigenvalues();
    if (ev(0) <= 1e-12)
        throw NumericError("retraction-failure: input nearly singular");
    Vector inv_sqrt = ev.array().sqrt().inverse();
    Matrix q = m * es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().transpose();
    if (q.determinant() < 0.0)
        throw NumericError("retraction-failure: negative-determinant input");
    return q;
}

/// Haar sample on SO(n): QR of a Gaussian matrix with the R-diagonal sign
/// fix, then a last-column flip if the determinant landed on -1.
inline Matrix haar_sample(int n, Rng& rng) {
    require(n >= 2, "haar_sample: invalid-dimension");
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.gaussian();
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j)
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    if (q.determinant() < 0.0) q.col(n - 1) = -q.col(n - 1);
    return q;
}

/// Gaussian element of so(n): X = sum_a xi_a v_a over the orthonormal
/// basis with iid centered coefficients of the given variance. Then
/// E<X,A><X,B> = variance * <A,B> and E[X^2] = -variance*(n-1)/2 * I.
inline void algebra_gaussian_into(Matrix& x, int n, double variance, Rng& rng) {
    require(n >= 2, "algebra_gaussian: invalid-dimension");
    require(variance >= 0.0, "algebra_gaussian: negative variance");
    x = Matrix::Zero(n, n);
    if (variance == 0.0) return;
    const double sd = std::sqrt(variance / 2.0);
    for (int m = 0; m < n; ++m) {
        for (int k = m + 1; k < n; ++k) {
            const double c = sd * rng.gaussian();
            x(m, k) = c;
            x(k, m) = -c;
        }
    }
}

inline Matrix algebra_gaussian(int n, double variance, Rng& rng) {
    Matrix x;
    algebra_gaussian_into(x, n, variance, rng);
    return x;
}

/// Projection of v onto the tangent plane of the unit sphere at base.
inline Vector sphere_tangent_project(const Vector& base, const Vector& v) {
    require(base.size() == v.size(), "sphere_tangent_project: dimension mismatch");
    return v - base.dot(v) * base;
}

/// Geodesic exponential on the unit sphere:
/// cos(|v|) base + sin(|v|) v/|v|, with v tangent at base.
inline Vector sphere_exp(const Vector& base, const Vector& v) {
    require(base.size() == v.size(), "sphere_exp: dimension mismatch");
    const double r = v.norm();
    if (r == 0.0) return base;
    return std::cos(r) * base + (std::sin(r) / r) * v;
}

}  // namespace ymh
