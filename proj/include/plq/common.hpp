#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace plq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double pi = std::numbers::pi;

/// Bad arguments or violated preconditions.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation that cannot proceed numerically (branch point, pole on the
/// integration contour, singular solve). Carries the name of the operation.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string operation, const std::string& what)
        : std::runtime_error(operation + ": " + what), operation_(std::move(operation)) {}
    const std::string& operation() const noexcept { return operation_; }

private:
    std::string operation_;
};

} // namespace plq
