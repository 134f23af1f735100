#pragma once

#include "plq/common.hpp"

namespace plq {

/// Eigen-decomposition of a Hermitian matrix: H = vectors * diag(values) * vectors^dagger.
/// Values ascending; each column's largest-magnitude component is real and positive.
struct HermitianEigen {
    RVector values;
    CMatrix vectors;
};

double max_abs(const CMatrix& m);

/// max |H - H^dagger| relative to max |H| (0 for the zero matrix).
double hermiticity_error(const CMatrix& m);

/// Throws InvalidArgument if hermiticity_error(m) > tol.
void require_hermitian(const CMatrix& m, double tol, const char* who);

/// Rotates v so that its largest-magnitude entry (first one on ties) is real-positive.
void fix_gauge(Eigen::Ref<CVector> v);

HermitianEigen eigh(const CMatrix& h, double hermitian_tol = 1e-12);

} // namespace plq
