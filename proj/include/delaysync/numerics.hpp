#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "delaysync/error.hpp"

namespace dsync {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// Outcome of an iterative complex root search. Failure is data, not an
/// exception: `converged` is false and `residual` holds the last |F(z)|.
struct RootResult {
    Complex root{};
    double residual = std::numeric_limits<double>::infinity();
    int iterations = 0;
    bool converged = false;
};

struct Minimum {
    double argmin = 0.0;
    double value = 0.0;
};

inline constexpr double kRootTolerance = 1e-10;
inline constexpr double kEigenResidual = 1e-8;

inline bool is_finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

/// Lexicographic (real, imag) order used for every eigenvalue list.
inline bool complex_less(Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
}

namespace detail {
std::vector<Complex> eig_dense(const ComplexMatrix& m);
}

/// Eigenvalues of a small dense square matrix, sorted by (real, imag).
/// Closed forms for q <= 2, Hessenberg reduction plus shifted QR above.
template <typename Derived>
std::vector<Complex> eig_complex(const Eigen::MatrixBase<Derived>& m) {
    return detail::eig_dense(m.template cast<Complex>());
}

/// Determinant: closed form for q = 1, 2; LU with partial pivoting otherwise.
template <typename Derived>
typename Derived::Scalar det_complex(const Eigen::MatrixBase<Derived>& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InvalidInput("det_complex: matrix must be square and non-empty");
    switch (m.rows()) {
        case 1: return m(0, 0);
        case 2: return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        default: return m.eval().partialPivLu().determinant();
    }
}

/// d/dlambda det M(lambda) by Jacobi's formula written as the sum of the
/// determinants with row i of M replaced by row i of M'.
template <typename DerivedM, typename DerivedD>
typename DerivedM::Scalar det_derivative(const Eigen::MatrixBase<DerivedM>& m, const Eigen::MatrixBase<DerivedD>& dm) {
    using Scalar = typename DerivedM::Scalar;
    if (m.rows() == 2) {
        return dm(0, 0) * m(1, 1) + m(0, 0) * dm(1, 1) - dm(0, 1) * m(1, 0) - m(0, 1) * dm(1, 0);
    }
    Scalar sum(0);
    auto work = m.eval();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        work.row(i) = dm.row(i);
        sum += det_complex(work);
        work.row(i) = m.row(i);
    }
    return sum;
}

/// Newton iteration on a holomorphic F with caller-supplied derivative.
/// Converged iff |F(z)| <= tol within max_iter steps; a vanishing derivative
/// or a non-finite iterate stops the search and is reported, never thrown.
template <typename F, typename DF>
RootResult newton_complex(F&& f, DF&& df, Complex z0, double tol = kRootTolerance, int max_iter = 100) {
    RootResult out;
    Complex z = z0;
    Complex fz = f(z);
    int it = 0;
    while (is_finite(fz) && std::abs(fz) > tol && it < max_iter) {
        const Complex d = df(z);
        if (!is_finite(d) || std::abs(d) < 1e-300) break;
        z -= fz / d;
        fz = f(z);
        ++it;
        if (!is_finite(z)) break;
    }
    out.root = z;
    out.iterations = it;
    out.residual = is_finite(fz) ? std::abs(fz) : std::numeric_limits<double>::infinity();
    out.converged = is_finite(z) && out.residual <= tol;
    return out;
}

/// Newton with a central difference derivative, step 1e-7 * max(1, |z|).
template <typename F>
RootResult newton_complex(F&& f, Complex z0, double tol = kRootTolerance, int max_iter = 100) {
    auto df = [&f](Complex z) {
        const double h = 1e-7 * std::max(1.0, std::abs(z));
        return (f(z + h) - f(z - h)) / (2.0 * h);
    };
    return newton_complex(f, df, z0, tol, max_iter);
}

namespace detail {

template <typename F>
Minimum golden_section(F& f, double a, double b, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 300; ++it) {
        const double floor = 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(c));
        if (b - a <= std::max(tol, floor)) break;
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? Minimum{c, fc} : Minimum{d, fd};
}

}  // namespace detail

/// Global-ish minimum of a continuous f on [lo, hi]: uniform grid scan with
/// at least 512 intervals, then golden-section refinement inside the
/// brackets of the best few grid minima.
template <typename F>
Minimum minimize_1d(F&& f, double lo, double hi, double tol = 1e-10, int grid = 512) {
    if (!(lo < hi)) throw InvalidInput("minimize_1d: requires lo < hi");
    grid = std::max(grid, 512);
    std::vector<double> xs(grid + 1), fs(grid + 1);
    for (int i = 0; i <= grid; ++i) {
        xs[i] = (i == grid) ? hi : lo + (hi - lo) * static_cast<double>(i) / grid;
        fs[i] = f(xs[i]);
    }
    std::vector<int> candidates;
    for (int i = 0; i <= grid; ++i) {
        const bool left = (i == 0) || fs[i] <= fs[i - 1];
        const bool right = (i == grid) || fs[i] <= fs[i + 1];
        if (left && right) candidates.push_back(i);
    }
    std::stable_sort(candidates.begin(), candidates.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    if (candidates.size() > 8) candidates.resize(8);

    Minimum best{xs[candidates.front()], fs[candidates.front()]};
    for (int i : candidates) {
        const double a = xs[std::max(i - 1, 0)];
        const double b = xs[std::min(i + 1, grid)];
        const Minimum m = detail::golden_section(f, a, b, tol);
        if (m.value < best.value) best = m;
    }
    return best;
}

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m);

/// Ratio of extreme singular values; infinity for singular input.
double condition_number(const ComplexMatrix& m);

}  // namespace dsync
