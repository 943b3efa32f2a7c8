#include "delaysync/numerics.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace dsync {

namespace detail {

std::vector<Complex> eig_dense(const ComplexMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) throw InvalidInput("eig_complex: matrix must be square and non-empty");
    if (m.rows() > 64) throw InvalidInput("eig_complex: dense method limited to q <= 64");
    if (!m.allFinite()) throw InvalidInput("eig_complex: non-finite entries");

    std::vector<Complex> out;
    if (m.rows() == 1) {
        out.push_back(m(0, 0));
    } else if (m.rows() == 2) {
        // lambda = h +- sqrt(h^2 - det); the smaller root comes from det / larger
        // to avoid cancellation.
        const Complex half_trace = 0.5 * (m(0, 0) + m(1, 1));
        const Complex det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        const Complex disc = std::sqrt(half_trace * half_trace - det);
        const Complex big = std::abs(half_trace + disc) >= std::abs(half_trace - disc) ? half_trace + disc : half_trace - disc;
        const Complex small = (big == Complex(0.0)) ? Complex(0.0) : det / big;
        out = {big, small};
    } else {
        Eigen::ComplexEigenSolver<ComplexMatrix> solver(m, false);
        if (solver.info() != Eigen::Success) throw NumericalError("eig_complex: QR iteration did not converge");
        const auto& ev = solver.eigenvalues();
        out.assign(ev.data(), ev.data() + ev.size());
    }
    std::sort(out.begin(), out.end(), complex_less);
    return out;
}

}  // namespace detail

double spectral_norm(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    return svd.singularValues()(0);
}

double condition_number(const ComplexMatrix& m) {
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

}  // namespace dsync
