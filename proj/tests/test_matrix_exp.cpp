#include "aford/cladogram.hpp"
#include "aford/matrix_exp.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace aford;

TEST_CASE("exponential of diagonal and nilpotent matrices") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(3, 3);
  d(0, 0) = 1.0;
  d(1, 1) = -2.0;
  d(2, 2) = 0.5;
  const auto e = matrix_exponential(d, 1.5);
  CHECK(e(0, 0) == doctest::Approx(std::exp(1.5)).epsilon(1e-13));
  CHECK(e(1, 1) == doctest::Approx(std::exp(-3.0)).epsilon(1e-13));
  CHECK(e(2, 2) == doctest::Approx(std::exp(0.75)).epsilon(1e-13));
  CHECK(e(0, 1) == 0.0);

  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(3, 3);
  n(0, 1) = 1.0;
  n(1, 2) = 1.0;
  const auto en = matrix_exponential(n, 2.0);
  CHECK(en(0, 1) == doctest::Approx(2.0));
  CHECK(en(0, 2) == doctest::Approx(2.0));
  CHECK(en(1, 2) == doctest::Approx(2.0));
  CHECK(en(2, 0) == 0.0);
}

TEST_CASE("exponential of a rotation generator") {
  Eigen::MatrixXd r(2, 2);
  r << 0, -1, 1, 0;
  const auto e = matrix_exponential(r, 30.0);
  CHECK(e(0, 0) == doctest::Approx(std::cos(30.0)).epsilon(1e-10));
  CHECK(e(1, 0) == doctest::Approx(std::sin(30.0)).epsilon(1e-10));
}

TEST_CASE("two-state generator has the closed form") {
  const double a = 3.0;
  const double b = 1.0;
  Eigen::MatrixXd q(2, 2);
  q << -a, a, b, -b;
  for (double t : {0.0, 0.1, 1.0, 10.0}) {
    const auto e = matrix_exponential(q, t);
    const double decay = std::exp(-(a + b) * t);
    CHECK(e(0, 0) == doctest::Approx((b + a * decay) / (a + b)).epsilon(1e-12));
    CHECK(e(1, 0) == doctest::Approx((b - b * decay) / (a + b)).epsilon(1e-12));
    CHECK(e.row(0).sum() == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("exponential guards") {
  CHECK_THROWS_AS(matrix_exponential(Eigen::MatrixXd::Zero(2, 3), 1.0), std::invalid_argument);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(2, 2);
  bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(matrix_exponential(bad, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(matrix_exponential(Eigen::MatrixXd::Zero(2, 2), std::numeric_limits<double>::infinity()),
                  std::invalid_argument);
  CHECK_THROWS_AS(matrix_exponential(Eigen::MatrixXd::Zero(kMaxExponentialDimension + 1, kMaxExponentialDimension + 1), 1.0),
                  ResourceGuardError);
  CHECK(matrix_exponential(Eigen::MatrixXd::Zero(0, 0), 1.0).size() == 0);
}
