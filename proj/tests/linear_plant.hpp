#pragma once

#include "cmpc/dynamics.hpp"

namespace cmpc::testing {

/// x+ = A x + B u, y = C x.
struct LinearPlant {
  Mat A;
  Mat B;
  Mat C;

  [[nodiscard]] Index state_dim() const { return A.rows(); }
  [[nodiscard]] Index input_dim() const { return B.cols(); }
  [[nodiscard]] Index output_dim() const { return C.rows(); }
  [[nodiscard]] Vec step(const Vec& x, const Vec& u) const { return A * x + B * u; }
  [[nodiscard]] Mat jacobian_x(const Vec&, const Vec&) const { return A; }
  [[nodiscard]] Mat jacobian_u(const Vec&, const Vec&) const { return B; }
  [[nodiscard]] Mat output_matrix() const { return C; }
};

static_assert(PlantModel<LinearPlant>);

/// Planar double integrator, state (p_x, p_y, v_x, v_y), input (a_x, a_y),
/// output (p_x, v_x).
inline LinearPlant double_integrator(double dt) {
  LinearPlant p;
  p.A = Mat::Identity(4, 4);
  p.A(0, 2) = dt;
  p.A(1, 3) = dt;
  p.B = Mat::Zero(4, 2);
  p.B(2, 0) = dt;
  p.B(3, 1) = dt;
  p.C = Mat::Zero(2, 4);
  p.C(0, 0) = 1.0;
  p.C(1, 2) = 1.0;
  return p;
}

}  // namespace cmpc::testing
