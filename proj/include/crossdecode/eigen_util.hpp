#pragma once

#include <Eigen/Core>

namespace crossdecode {

/// Exact equality that tolerates differing shapes (Eigen's operator== requires equal sizes).
template <typename A, typename B>
bool exactly_equal(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.rows() == 0 || a.cols() == 0 || a == b);
}

}  // namespace crossdecode
