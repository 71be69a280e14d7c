#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace cmpc {

using Index = Eigen::Index;
using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Vec2 = Eigen::Vector2d;

inline constexpr const char* kVersion = "0.1.0";

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class IndexError : public Error {
 public:
  using Error::Error;
};

/// Nominal point coincides with the center of a keep-out disc, so no
/// separating direction exists.
class DegenerateGeometry : public Error {
 public:
  using Error::Error;
};

/// Nominal point lies inside (or on) a keep-out disc.
class InfeasibleNominal : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require_size(const Eigen::Ref<const Vec>& v, Index n, const char* what) {
  if (v.size() != n) {
    throw DimensionError(std::string(what) + ": expected size " + std::to_string(n) + ", got " +
                         std::to_string(v.size()));
  }
}

inline void require_shape(const Eigen::Ref<const Mat>& m, Index rows, Index cols, const char* what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

}  // namespace detail
}  // namespace cmpc
