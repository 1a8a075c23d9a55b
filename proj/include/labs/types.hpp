#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace lbs {

typedef double Scalar;
typedef Eigen::Matrix<Scalar, Eigen::Dynamic, 1> Vector;
typedef Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> Matrix;
typedef Eigen::Index Index;

/// Thrown when an argument violates a documented precondition.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when the data cannot support the model (e.g. constant response).
class DegenerateDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw PreconditionError(what);
}

/// Closed interval [lo, hi] holding the covariate domain.
struct Interval {
  Scalar lo = 0.0;
  Scalar hi = 1.0;

  Scalar length() const { return hi - lo; }
  bool contains(Scalar x) const { return x >= lo && x <= hi; }
};

}  // namespace lbs
