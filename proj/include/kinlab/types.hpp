#pragma once

#include <complex>
#include <numbers>

#include <Eigen/Dense>

namespace kinlab {

using Index = Eigen::Index;
using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

}  // namespace kinlab
