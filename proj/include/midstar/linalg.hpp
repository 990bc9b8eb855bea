#pragma once

#include <array>
#include <cmath>
#include <complex>

#include "midstar/errors.hpp"
#include "midstar/vec.hpp"

namespace midstar {

template <int N>
using Mat = std::array<std::array<double, N>, N>;
template <int N>
using CMat = std::array<std::array<Complex, N>, N>;
template <int N>
using CVecN = std::array<Complex, N>;

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.  Eigenvalues are
/// returned ascending with matching orthonormal columns in `vectors`.
template <int N>
struct SymmetricEigen {
    std::array<double, N> values{};
    Mat<N> vectors{};  // vectors[i][k] = component i of eigenvector k
};

template <int N>
SymmetricEigen<N> jacobi_eigen(Mat<N> a) {
    Mat<N> v{};
    for (int i = 0; i < N; ++i) v[i][i] = 1.0;
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-300) break;
        for (int p = 0; p < N; ++p)
            for (int q = p + 1; q < N; ++q) {
                if (a[p][q] == 0.0) continue;
                double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                for (int k = 0; k < N; ++k) {
                    double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < N; ++k) {
                    double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < N; ++k) {
                    double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    SymmetricEigen<N> out;
    std::array<int, N> order{};
    for (int i = 0; i < N; ++i) order[i] = i;
    for (int i = 0; i < N; ++i)
        for (int j = i + 1; j < N; ++j)
            if (a[order[j]][order[j]] < a[order[i]][order[i]]) std::swap(order[i], order[j]);
    for (int k = 0; k < N; ++k) {
        out.values[k] = a[order[k]][order[k]];
        for (int i = 0; i < N; ++i) out.vectors[i][k] = v[i][order[k]];
    }
    return out;
}

/// Solves a x = b by partial-pivot LU; throws SingularHessian on a zero pivot.
template <int N>
std::array<double, N> lu_solve(Mat<N> a, std::array<double, N> b) {
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (std::abs(a[piv][col]) < 1e-14)
            throw SingularHessianError("singular linear system");
        std::swap(a[col], a[piv]);
        std::swap(b[col], b[piv]);
        for (int r = col + 1; r < N; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::array<double, N> x{};
    for (int r = N - 1; r >= 0; --r) {
        double s = b[r];
        for (int c = r + 1; c < N; ++c) s -= a[r][c] * x[c];
        x[r] = s / a[r][r];
    }
    return x;
}

template <int N>
double determinant(Mat<N> a) {
    double det = 1.0;
    for (int col = 0; col < N; ++col) {
        int piv = col;
        for (int r = col + 1; r < N; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        if (a[piv][col] == 0.0) return 0.0;
        if (piv != col) {
            std::swap(a[col], a[piv]);
            det = -det;
        }
        det *= a[col][col];
        for (int r = col + 1; r < N; ++r) {
            double f = a[r][col] / a[col][col];
            for (int c = col; c < N; ++c) a[r][c] -= f * a[col][c];
        }
    }
    return det;
}

/// Gaussian integral of exp(-z^T A z / 2 + b^T z + c) over R^N for complex
/// symmetric A with positive semidefinite real part: the result is
/// (2 pi)^{N/2} det(A)^{-1/2} exp(b^T A^{-1} b / 2 + c), with the branch of
/// det^{-1/2} obtained from the principal square roots of the complex LDL^T
/// pivots (the analytic continuation from the real positive-definite case).
/// Throws IllConditioned when a pivot is too small.
template <int N>
Complex gaussian_integral(CMat<N> a, CVecN<N> b, Complex c) {
    double scale = 0.0;
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) scale = std::max(scale, std::abs(a[i][j]));
    if (scale == 0.0) throw IllConditionedError("zero quadratic form");

    Complex half_log_det = 0.0;
    CVecN<N> y = b;
    // LDL^T without pivoting (valid for Re(A) >= 0); solve L D L^T x = b on the fly.
    for (int k = 0; k < N; ++k) {
        Complex d = a[k][k];
        if (std::abs(d) < 1e-12 * scale)
            throw IllConditionedError("near-singular quadratic form");
        half_log_det += std::log(std::sqrt(d));
        for (int r = k + 1; r < N; ++r) {
            Complex f = a[r][k] / d;
            for (int c2 = k; c2 < N; ++c2) a[r][c2] -= f * a[k][c2];
            a[r][k] = f;  // store multiplier
            y[r] -= f * y[k];
        }
        a[k][k] = d;
    }
    // b^T A^{-1} b = sum_k y_k^2 / d_k with y = L^{-1} b.
    Complex quad = 0.0;
    for (int k = 0; k < N; ++k) quad += y[k] * y[k] / a[k][k];
    double n_half = 0.5 * N;
    return std::exp(c + 0.5 * quad + n_half * std::log(2.0 * M_PI) - half_log_det);
}

}  // namespace midstar
