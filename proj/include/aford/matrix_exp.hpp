#pragma once

#include <Eigen/Dense>

namespace aford {

inline constexpr Eigen::Index kMaxExponentialDimension = 1024;

/// exp(t M) by scaling and squaring: halve until ||t M||_1 / 2^s <= 1/2,
/// sum the Taylor series to machine precision, then square s times.
/// Throws ResourceGuardError above kMaxExponentialDimension and
/// std::invalid_argument for non-square or non-finite input.
Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m, double t);

}  // namespace aford
