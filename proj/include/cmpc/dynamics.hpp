#pragma once

// Discrete-time plant models x+ = f(x, u), y = C x.

#include <cmath>
#include <concepts>

#include "cmpc/types.hpp"

namespace cmpc {

template <typename P>
concept PlantModel = requires(const P& plant, const Vec& x, const Vec& u) {
  { plant.state_dim() } -> std::convertible_to<Index>;
  { plant.input_dim() } -> std::convertible_to<Index>;
  { plant.output_dim() } -> std::convertible_to<Index>;
  { plant.step(x, u) } -> std::convertible_to<Vec>;
  { plant.jacobian_x(x, u) } -> std::convertible_to<Mat>;
  { plant.jacobian_u(x, u) } -> std::convertible_to<Mat>;
  { plant.output_matrix() } -> std::convertible_to<Mat>;
};

/// Planar unicycle with state (p_x, p_y, theta, v) and input (turn rate,
/// acceleration), forward-Euler discretized. Heading is not wrapped.
class UnicycleModel {
 public:
  static constexpr Index kStateDim = 4;
  static constexpr Index kInputDim = 2;
  static constexpr Index kOutputDim = 3;

  explicit UnicycleModel(double dt = 0.1) : dt_(dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("unicycle dt must be positive");
  }

  [[nodiscard]] double dt() const noexcept { return dt_; }
  [[nodiscard]] Index state_dim() const noexcept { return kStateDim; }
  [[nodiscard]] Index input_dim() const noexcept { return kInputDim; }
  [[nodiscard]] Index output_dim() const noexcept { return kOutputDim; }

  [[nodiscard]] Vec step(const Vec& x, const Vec& u) const {
    Vec next(kStateDim);
    next(0) = x(0) + x(3) * std::cos(x(2)) * dt_;
    next(1) = x(1) + x(3) * std::sin(x(2)) * dt_;
    next(2) = x(2) + u(0) * dt_;
    next(3) = x(3) + u(1) * dt_;
    return next;
  }

  [[nodiscard]] Mat jacobian_x(const Vec& x, const Vec& /*u*/) const {
    Mat a = Mat::Identity(kStateDim, kStateDim);
    const double c = std::cos(x(2));
    const double s = std::sin(x(2));
    a(0, 2) = -x(3) * s * dt_;
    a(0, 3) = c * dt_;
    a(1, 2) = x(3) * c * dt_;
    a(1, 3) = s * dt_;
    return a;
  }

  [[nodiscard]] Mat jacobian_u(const Vec& /*x*/, const Vec& /*u*/) const {
    Mat b = Mat::Zero(kStateDim, kInputDim);
    b(2, 0) = dt_;
    b(3, 1) = dt_;
    return b;
  }

  /// Selects (p_x, theta, v).
  [[nodiscard]] Mat output_matrix() const {
    Mat c = Mat::Zero(kOutputDim, kStateDim);
    c(0, 0) = 1.0;
    c(1, 2) = 1.0;
    c(2, 3) = 1.0;
    return c;
  }

 private:
  double dt_;
};

static_assert(PlantModel<UnicycleModel>);

struct Jacobians {
  Mat A;
  Mat B;
};

template <PlantModel Plant>
Vec step(const Plant& plant, const Vec& x, const Vec& u) {
  detail::require_size(x, plant.state_dim(), "step: state");
  detail::require_size(u, plant.input_dim(), "step: input");
  return plant.step(x, u);
}

template <PlantModel Plant>
Jacobians jacobians(const Plant& plant, const Vec& x, const Vec& u) {
  detail::require_size(x, plant.state_dim(), "jacobians: state");
  detail::require_size(u, plant.input_dim(), "jacobians: input");
  return {plant.jacobian_x(x, u), plant.jacobian_u(x, u)};
}

template <PlantModel Plant>
Vec output(const Plant& plant, const Vec& x) {
  detail::require_size(x, plant.state_dim(), "output: state");
  return plant.output_matrix() * x;
}

}  // namespace cmpc
