#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace rwa {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Bad input: maps to exit code 2 in the CLI.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numerics failed on valid input: maps to exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public NumericalError {
public:
    QuadratureError(const std::string& what, double estimate)
        : NumericalError(what), error_estimate(estimate) {}
    double error_estimate;
};

class DegenerateKernelError : public NumericalError {
public:
    DegenerateKernelError(const std::string& what, int dim)
        : NumericalError(what), kernel_dim(dim) {}
    int kernel_dim;
};

} // namespace rwa
