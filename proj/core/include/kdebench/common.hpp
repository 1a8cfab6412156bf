#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace kdebench {

// Samples are rows; row-major keeps each point contiguous.
using PointSet = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Point = Eigen::RowVectorXd;
using PointRef = Eigen::Ref<const Point>;

// Operand dimensions do not agree.
class shape_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Malformed or non-finite input data.
class data_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Operation requires model state that is not present.
class state_error : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Filesystem or parse failure.
class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_finite(const PointSet& X, const std::string& what) {
  if (!X.allFinite()) throw data_error(what + ": non-finite entries");
}

}  // namespace kdebench
