#pragma once

// Convexified discrete-time high-order barrier constraints.
//
// Circular keep-out regions are replaced by the supporting halfplane at the
// boundary point nearest to the nominal position. The order-l barrier
// h_l = h_{l-1}(x+) - h_{l-1}(x) + gamma_l h_{l-1}(x) is then taken through
// the local affine model of the dynamics, which keeps every emitted row
// linear in the decision vector.

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cmpc/layout.hpp"
#include "cmpc/types.hpp"

namespace cmpc {

struct CircularObstacle {
  Vec2 center = Vec2::Zero();
  double radius = 1.0;

  void validate() const {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ValidationError("obstacle radius must be positive");
    if (!center.allFinite()) throw ValidationError("obstacle center must be finite");
  }
};

/// h(x) = a^T x + b.
struct AffineBarrier {
  Vec a;
  double b = 0.0;

  [[nodiscard]] double operator()(const Eigen::Ref<const Vec>& x) const { return a.dot(x) + b; }
};

struct BarrierParams {
  std::vector<double> gammas{0.3, 0.3};
  Index relative_degree = 2;
  double safe_distance = 0.1;

  void validate() const {
    if (relative_degree < 1) throw ValidationError("relative degree must be >= 1");
    if (static_cast<Index>(gammas.size()) != relative_degree) {
      throw ValidationError("need exactly one gamma per barrier order");
    }
    for (double g : gammas) {
      if (!(g > 0.0 && g <= 1.0)) throw ValidationError("each gamma must lie in (0, 1]");
    }
    if (!(safe_distance > 0.0)) throw ValidationError("safe distance must be positive");
  }
};

/// Boundary point of the disc on the segment from `p` to its center.
inline Vec2 nearest_boundary_point(const Vec2& p, const Vec2& center, double radius) {
  const Vec2 offset = p - center;
  const double dist = offset.norm();
  if (dist == 0.0) {
    throw DegenerateGeometry("nominal position coincides with disc center (" + std::to_string(center.x()) +
                             ", " + std::to_string(center.y()) + ")");
  }
  return center + radius * offset / dist;
}

inline Vec2 nearest_boundary_point(const Vec2& p, const CircularObstacle& obstacle) {
  return nearest_boundary_point(p, obstacle.center, obstacle.radius);
}

struct SeparatingHalfplane {
  AffineBarrier barrier;  // over the planar position
  bool nominal_inside = false;
};

/// Supporting halfplane at the nearest boundary point, normal pointing away
/// from the center. Also returned when `p` is inside the disc; the flag then
/// reports it.
inline SeparatingHalfplane separating_halfplane(const Vec2& p, const Vec2& center, double radius) {
  const Vec2 touch = nearest_boundary_point(p, center, radius);
  AffineBarrier h;
  h.a = touch - center;
  h.b = -(radius * radius - center.squaredNorm() + touch.dot(center));
  return {std::move(h), (p - center).norm() <= radius};
}

/// Strict form: the nominal must be outside the disc.
inline AffineBarrier tangent_halfplane(const Vec2& p, const Vec2& center, double radius) {
  auto result = separating_halfplane(p, center, radius);
  if (result.nominal_inside) {
    throw InfeasibleNominal("nominal position lies inside keep-out disc");
  }
  return std::move(result.barrier);
}

/// Lifts a barrier on (p_x, p_y) to the full state.
inline AffineBarrier embed_planar(const AffineBarrier& planar, Index state_dim, Index px = 0, Index py = 1) {
  AffineBarrier out;
  out.a = Vec::Zero(state_dim);
  out.a(px) = planar.a(0);
  out.a(py) = planar.a(1);
  out.b = planar.b;
  return out;
}

/// Z_{nu,l} for nu = 0..l. Entry nu <= l-2 is the sum over all
/// (l-nu-1)-subsets of {gamma_1 .. gamma_{l-1}} of the product of (gamma - 1).
inline std::vector<double> z_coefficients(Index level, std::span<const double> gammas) {
  if (level < 1) throw ValidationError("z_coefficients: order must be >= 1");
  if (static_cast<Index>(gammas.size()) < level - 1) {
    throw DimensionError("z_coefficients: need gamma_1..gamma_{l-1}");
  }
  const auto n = static_cast<std::size_t>(level - 1);
  std::vector<double> z(static_cast<std::size_t>(level) + 1, 0.0);
  // Subset enumeration over bitmasks; l stays small (relative degree).
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    double product = 1.0;
    std::size_t picked = 0;
    for (std::size_t b = 0; b < n; ++b) {
      if (mask & (std::uint64_t{1} << b)) {
        product *= gammas[b] - 1.0;
        ++picked;
      }
    }
    if (picked == 0) continue;  // nu = l-1 is set below
    const std::size_t nu = n - picked;
    z[nu] += product;
  }
  z[n] = (level == 1) ? 1.0 : -1.0;
  z[static_cast<std::size_t>(level)] = 0.0;
  return z;
}

/// Weights c_v with h_{l-1}(x(0)) = sum_{v=0}^{l-1} c_v h_0(x(v)) along a
/// trajectory: c_v = Z_{v,l} for v <= l-2 and c_{l-1} = 1.
inline std::vector<double> margin_coefficients(Index level, std::span<const double> gammas) {
  auto c = z_coefficients(level, gammas);
  c[static_cast<std::size_t>(level - 1)] = 1.0;
  return c;
}

/// Local affine model x+ = x_next + A (x - x_nom) + B (u - u_nom) at one step.
struct StepLinearization {
  Mat A;
  Mat B;
  Vec x_nom;
  Vec u_nom;
  Vec x_next;  // f(x_nom, u_nom)

  /// Constant part d of x+ = A x + B u + d.
  [[nodiscard]] Vec offset() const { return x_next - A * x_nom - B * u_nom; }
  [[nodiscard]] Vec predict(const Vec& x, const Vec& u) const { return A * x + B * u + offset(); }
};

/// Affine function of (x(k), u(k)).
struct AffineForm {
  Vec x_coef;
  Vec u_coef;
  double constant = 0.0;

  [[nodiscard]] double operator()(const Vec& x, const Vec& u) const {
    return x_coef.dot(x) + u_coef.dot(u) + constant;
  }
};

/// Order-`level` barrier h_level(x, u) through the affine model, with the
/// input held over the recursion. `gammas` must hold at least `level` values.
inline AffineForm dhcbf_affine(const AffineBarrier& h0, const StepLinearization& lin,
                               std::span<const double> gammas, Index level) {
  if (level < 0 || level > static_cast<Index>(gammas.size())) {
    throw ValidationError("dhcbf_affine: order " + std::to_string(level) + " exceeds relative degree " +
                          std::to_string(gammas.size()));
  }
  const Index n = lin.A.rows();
  detail::require_size(h0.a, n, "dhcbf_affine: barrier");
  const Vec d = lin.offset();
  AffineForm form{h0.a, Vec::Zero(lin.B.cols()), h0.b};
  for (Index l = 1; l <= level; ++l) {
    const double g = gammas[static_cast<std::size_t>(l - 1)];
    AffineForm next;
    next.x_coef = lin.A.transpose() * form.x_coef + (g - 1.0) * form.x_coef;
    next.u_coef = lin.B.transpose() * form.x_coef + g * form.u_coef;
    next.constant = form.x_coef.dot(d) + g * form.constant;
    form = std::move(next);
  }
  return form;
}

/// One linear inequality coeffs . z >= rhs.
struct SafetyRow {
  Vec coeffs;
  double rhs = 0.0;
  Index slack = -1;
  double slack_coefficient = 0.0;  // Z_{0,l} (1 - gamma_l)^k h_0(x(0))

  [[nodiscard]] double residual(const Vec& z) const { return coeffs.dot(z) - rhs; }
};

struct SafetyRowSpec {
  Index agent = 0;
  Index instance = 0;
  Index level = 1;  // l in 1..r
  Index step = 0;   // k in 0..T-1
};

/// Slack-relaxed order-l row at step k:
///   h_{l-1}(x(k), u(k)) - (1-g_l)^k sum_{v=1}^{l-1} c_v h_0^v(x(v))
///       >= w (1-g_l)^k c_0 h_0^0(x(0)),
/// where h_0^v is the halfplane built at the nominal of step v and
/// `barriers[v]` holds it lifted to the state.
inline SafetyRow build_safety_row(const SafetyRowSpec& spec, std::span<const AffineBarrier> barriers,
                                  const StepLinearization& lin, std::span<const double> gammas,
                                  const Vec& x0, const DecisionLayout& layout) {
  const Index k = spec.step;
  const Index l = spec.level;
  if (l < 1 || l > static_cast<Index>(gammas.size())) throw ValidationError("safety row: bad barrier order");
  if (static_cast<Index>(barriers.size()) <= std::max(k, l - 1)) {
    throw DimensionError("safety row: missing halfplane for a required step");
  }
  const Index n = layout.state_dim();
  const Index m = layout.input_dim();

  SafetyRow row;
  row.coeffs = Vec::Zero(layout.dim());
  double constant = 0.0;

  const AffineForm form = dhcbf_affine(barriers[static_cast<std::size_t>(k)], lin, gammas, l - 1);
  if (k == 0) {
    constant += form.x_coef.dot(x0);
  } else {
    row.coeffs.segment(layout.state_index(spec.agent, k), n) += form.x_coef;
  }
  row.coeffs.segment(layout.input_index(spec.agent, k), m) += form.u_coef;
  constant += form.constant;

  const double decay = std::pow(1.0 - gammas[static_cast<std::size_t>(l - 1)], static_cast<double>(k));
  const auto c = margin_coefficients(l, gammas);
  for (Index v = 1; v <= l - 1; ++v) {
    const double w = -decay * c[static_cast<std::size_t>(v)];
    const AffineBarrier& hv = barriers[static_cast<std::size_t>(v)];
    row.coeffs.segment(layout.state_index(spec.agent, v), n) += w * hv.a;
    constant += w * hv.b;
  }

  row.slack = layout.slack_index(spec.agent, spec.instance, l, k);
  row.slack_coefficient = c[0] * decay * barriers[0](x0);
  row.coeffs(row.slack) -= row.slack_coefficient;
  row.rhs = -constant;
  return row;
}

}  // namespace cmpc
