#include "aford/matrix_exp.hpp"

#include "aford/cladogram.hpp"

#include <cmath>
#include <stdexcept>

namespace aford {

Eigen::MatrixXd matrix_exponential(const Eigen::MatrixXd& m, double t) {
  if (m.rows() != m.cols()) throw std::invalid_argument("matrix_exponential: matrix is not square");
  if (m.rows() > kMaxExponentialDimension) {
    throw ResourceGuardError("matrix_exponential: dimension " + std::to_string(m.rows()) +
                             " exceeds " + std::to_string(kMaxExponentialDimension));
  }
  if (!std::isfinite(t) || !m.allFinite()) {
    throw std::invalid_argument("matrix_exponential: non-finite input");
  }
  const Eigen::Index n = m.rows();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::MatrixXd a = t * m;
  const double norm = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
  a /= std::ldexp(1.0, squarings);

  Eigen::MatrixXd result = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd term = Eigen::MatrixXd::Identity(n, n);
  for (int j = 1; j <= 40; ++j) {
    term = term * a / static_cast<double>(j);
    result += term;
    if (term.cwiseAbs().maxCoeff() <= 1e-18 * result.cwiseAbs().maxCoeff()) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace aford
