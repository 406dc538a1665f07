// vec.hpp - small vector aliases shared across modules.

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <complex>

namespace kerr {

using Vec3 = Eigen::Vector3d;
using CVec3 = Eigen::Vector3cd;
using cplx = std::complex<double>;

}  // namespace kerr
