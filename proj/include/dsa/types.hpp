// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>

#include <Eigen/Core>

namespace dsa {

using Complex = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using CMat3 = Eigen::Matrix3cd;

using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Complex kJ{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

}  // namespace dsa
