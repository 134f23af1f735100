#include "plq/linalg.hpp"

#include <cmath>

namespace plq {

double max_abs(const CMatrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double hermiticity_error(const CMatrix& m) {
    if (m.rows() != m.cols()) return INFINITY;
    const double scale = max_abs(m);
    if (scale == 0.0) return 0.0;
    return max_abs(m - m.adjoint()) / scale;
}

void require_hermitian(const CMatrix& m, double tol, const char* who) {
    if (m.rows() != m.cols())
        throw InvalidArgument(std::string(who) + ": matrix is not square");
    const double err = hermiticity_error(m);
    if (err > tol)
        throw InvalidArgument(std::string(who) + ": matrix is not Hermitian (relative error " +
                              std::to_string(err) + ")");
}

void fix_gauge(Eigen::Ref<CVector> v) {
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        // strict comparison with a small slack keeps the first index on numerical ties
        const double a = std::abs(v[i]);
        if (a > best_abs * (1.0 + 1e-12)) {
            best_abs = a;
            best = i;
        }
    }
    if (best_abs <= 0.0) return;
    v *= std::conj(v[best]) / best_abs;
    v[best] = cplx(std::abs(v[best]), 0.0);
}

HermitianEigen eigh(const CMatrix& h, double hermitian_tol) {
    require_hermitian(h, hermitian_tol, "eigh");
    // Householder tridiagonalization followed by implicit symmetric QR.
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
    if (solver.info() != Eigen::Success)
        throw NumericalError("eigh", "eigensolver did not converge");
    HermitianEigen out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index c = 0; c < out.vectors.cols(); ++c) fix_gauge(out.vectors.col(c));
    return out;
}

} // namespace plq
