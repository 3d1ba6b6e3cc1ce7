#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace qce {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr cplx I{0.0, 1.0};

// Thrown when an argument violates an operation's precondition.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Thrown when a numerical procedure fails to reach its tolerance.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what)
{
    if (!cond) throw DomainError(what);
}

/// Largest absolute entry of a dense expression.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m)
{
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

} // namespace qce
